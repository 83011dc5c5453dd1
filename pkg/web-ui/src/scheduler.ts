// Per-session fade schedules. Every control gets its own pseudorandom
// sequence of (fade-in at, hold for, fade-out over) phases derived from a
// session seed, so each visitor sees controls appear and disappear on a
// different timetable while the same seed always reproduces the same show.

export interface FadePhase {
    fadeInAt: number;   // ms from session start when the fade-in begins
    holdFor: number;    // ms at full visibility
    fadeOutFor: number; // ms to fade back out (fade-in uses the same length)
}

export interface ScheduleConfig {
    horizonMs: number;
    minGapMs: number;
    maxGapMs: number;
    minHoldMs: number;
    maxHoldMs: number;
    fadeMs: number;
}

export const DEFAULT_SCHEDULE: ScheduleConfig = {
    horizonMs: 120_000,
    minGapMs: 2_000,
    maxGapMs: 8_000,
    minHoldMs: 4_000,
    maxHoldMs: 12_000,
    fadeMs: 1_500,
};

/** Tiny deterministic PRNG (mulberry32); good enough for stage timing. */
export function mulberry32(seed: number): () => number {
    let state = seed >>> 0;
    return () => {
        state = (state + 0x6d2b79f5) >>> 0;
        let t = state;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}

function pick(rng: () => number, lo: number, hi: number): number {
    return lo + rng() * (hi - lo);
}

/** Derive one control's schedule; controls are decorrelated by their index. */
export function makeSchedule(
    seed: number,
    controlIndex: number,
    config: ScheduleConfig = DEFAULT_SCHEDULE,
): FadePhase[] {
    const rng = mulberry32(seed ^ Math.imul(controlIndex + 1, 0x9e3779b9));
    const phases: FadePhase[] = [];
    let clock = 0;
    while (true) {
        const fadeInAt = clock + pick(rng, config.minGapMs, config.maxGapMs);
        const holdFor = pick(rng, config.minHoldMs, config.maxHoldMs);
        const end = fadeInAt + config.fadeMs + holdFor + config.fadeMs;
        if (end > config.horizonMs) {
            return phases;
        }
        phases.push({ fadeInAt, holdFor, fadeOutFor: config.fadeMs });
        clock = end;
    }
}

/**
 * Visibility alpha in [0, 1] at time t (ms). Schedules loop over their
 * horizon so a long performance keeps cycling the same per-seed pattern.
 */
export function visibilityAt(
    phases: FadePhase[],
    t: number,
    horizonMs: number = DEFAULT_SCHEDULE.horizonMs,
): number {
    if (phases.length === 0) {
        return 0;
    }
    const local = t % horizonMs;
    for (const phase of phases) {
        const fadeInEnd = phase.fadeInAt + phase.fadeOutFor;
        const holdEnd = fadeInEnd + phase.holdFor;
        const fadeOutEnd = holdEnd + phase.fadeOutFor;
        if (local < phase.fadeInAt) {
            return 0;
        }
        if (local < fadeInEnd) {
            return (local - phase.fadeInAt) / phase.fadeOutFor;
        }
        if (local < holdEnd) {
            return 1;
        }
        if (local < fadeOutEnd) {
            return 1 - (local - holdEnd) / phase.fadeOutFor;
        }
    }
    return 0;
}
