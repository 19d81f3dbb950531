/** Collectible-hunt mini game: spot the odd symbol, earn credits.
 *
 * Each round presents one probe among look-alike symbols. A correct tap
 * pays a credit; probes the current viewing conditions cannot support are
 * skipped. The loop refuses to present anything when the viewing sample
 * is stale, since a trial without trustworthy distance/light covariates
 * is worthless to the screens.
 */

import type { ScreeningApi } from './api.js';
import { ManualViewingProvider, type ViewingProvider } from './distance.js';
import { ProbeRunner, RESPONSE_TIMEOUT_MS, type ProbeOutcome } from './probe.js';
import type { Canvas2D, DrawnProbe } from './render.js';
import { StubScheduler } from './scheduler.js';
import type { ScreenProfile, StimulusSpec, ViewingSample } from './types.js';

export interface RoundHandle {
  spec: StimulusSpec;
  drawn: DrawnProbe;
  view: ViewingSample;
  startedMs: number;
}

export class MiniGame {
  credits = 0;
  roundsPlayed = 0;
  deferrals = 0;
  readonly runner: ProbeRunner;
  readonly scheduler: StubScheduler;

  constructor(
    api: ScreeningApi,
    childId: string,
    sessionId: string,
    screen: ScreenProfile,
    public viewing: ViewingProvider = new ManualViewingProvider(),
    rand: () => number = Math.random,
  ) {
    this.runner = new ProbeRunner(api, childId, sessionId, screen);
    this.scheduler = new StubScheduler(screen, rand);
  }

  /** Begin a round; null when conditions do not allow a probe right now. */
  startRound(ctx: Canvas2D, dpr: number, nowMs: number): RoundHandle | null {
    const view = this.viewing.current(nowMs);
    if (view === null) return null; // stale or missing viewing sample
    const spec = this.scheduler.next(view);
    if (spec === null) {
      this.deferrals++;
      return null;
    }
    const drawn = this.runner.present(ctx, spec, dpr);
    if (drawn.skipped) {
      this.deferrals++;
      return null;
    }
    return { spec, drawn, view, startedMs: nowMs };
  }

  /** Finish a round with a tap (or null after the 5 s timeout). */
  async finishRound(
    round: RoundHandle,
    tap: { x: number; y: number } | null,
    nowMs: number,
  ): Promise<ProbeOutcome> {
    const elapsed = Math.min(nowMs - round.startedMs, RESPONSE_TIMEOUT_MS);
    const outcome = await this.runner.resolve(round.spec, round.drawn, round.view, tap, elapsed);
    this.roundsPlayed++;
    if (outcome.creditAwarded) this.credits++;
    return outcome;
  }
}
