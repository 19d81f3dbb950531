/** Viewing-condition input: manual entry now, camera provider later.
 *
 * The interface matches the service's ViewingSample so a computer-vision
 * distance estimator can drop in without touching the game.
 */

import type { ViewingSample } from './types.js';

export const MAX_SAMPLE_AGE_MS = 10_000;

export interface ViewingProvider {
  current(nowMs: number): ViewingSample | null;
}

/** Parent-entered distance and room lighting, refreshed occasionally. */
export class ManualViewingProvider implements ViewingProvider {
  private sample: ViewingSample | null = null;

  update(distanceMm: number, ambientLux: number, nowMs: number): void {
    if (distanceMm <= 0 || ambientLux < 0) throw new Error('invalid viewing sample');
    this.sample = { distance_mm: distanceMm, ambient_lux: ambientLux, timestamp_ms: nowMs };
  }

  /** Returns null when no sample exists or the last one is stale. */
  current(nowMs: number): ViewingSample | null {
    if (this.sample === null) return null;
    if (nowMs - this.sample.timestamp_ms > MAX_SAMPLE_AGE_MS) return null;
    return { ...this.sample, timestamp_ms: nowMs };
  }
}
