/** One probe presentation: draw, collect the tap or time out, post once.
 *
 * Every child interaction produces exactly one TrialRecord. Network
 * failures retry the same trial_id, so the service's idempotent ingestion
 * absorbs any duplicate deliveries.
 */

import type { ScreeningApi } from './api.js';
import { hitTest, renderStimulus, type Canvas2D, type DrawnProbe } from './render.js';
import type { ScreenProfile, StimulusSpec, TrialRecord, TrialResponse, ViewingSample } from './types.js';

export const RESPONSE_TIMEOUT_MS = 5_000;
export const POST_RETRIES = 3;

export interface ProbeOutcome {
  record: TrialRecord | null; // null when the probe was skipped (deferred)
  creditAwarded: boolean;
  deferred: boolean;
}

export class ProbeRunner {
  private postedIds = new Set<string>();
  private trialCounter = 0;

  constructor(
    private api: ScreeningApi,
    private childId: string,
    private sessionId: string,
    private screen: ScreenProfile,
  ) {}

  nextTrialId(): string {
    return `${this.sessionId}-t${String(this.trialCounter++).padStart(6, '0')}`;
  }

  present(ctx: Canvas2D, spec: StimulusSpec, dpr: number): DrawnProbe {
    return renderStimulus(ctx, spec, this.screen, dpr);
  }

  /**
   * Resolve a presentation into a trial outcome. tap is null on timeout.
   * elapsedMs is the child's response latency (the timeout when absent).
   */
  async resolve(
    spec: StimulusSpec,
    drawn: DrawnProbe,
    view: ViewingSample,
    tap: { x: number; y: number } | null,
    elapsedMs: number,
  ): Promise<ProbeOutcome> {
    if (drawn.skipped) {
      return { record: null, creditAwarded: false, deferred: true };
    }
    let response: TrialResponse;
    if (tap === null) {
      response = 'no_response';
    } else if (hitTest(drawn.targetBox, tap.x, tap.y)) {
      response = 'correct';
    } else {
      response = 'incorrect';
    }
    const record: TrialRecord = {
      v: 1,
      trial_id: this.nextTrialId(),
      session_id: this.sessionId,
      spec,
      view,
      response,
      response_time_ms: Math.round(tap === null ? RESPONSE_TIMEOUT_MS : elapsedMs),
      credit_awarded: response === 'correct',
    };
    await this.post(record);
    return { record, creditAwarded: record.credit_awarded, deferred: false };
  }

  /** At-least-once delivery with a stable id; the server dedupes. */
  private async post(record: TrialRecord): Promise<void> {
    if (this.postedIds.has(record.trial_id)) return;
    this.postedIds.add(record.trial_id);
    let lastError: unknown = null;
    for (let attempt = 0; attempt < POST_RETRIES; attempt++) {
      try {
        await this.api.postTrial(this.childId, this.sessionId, record);
        return;
      } catch (err) {
        lastError = err;
      }
    }
    throw lastError;
  }
}
