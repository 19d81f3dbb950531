/** Parent dashboard state: report polling, alert cursor, offline cache.
 *
 * Pure state machine over an injected API and clock so it runs headless
 * in tests; the DOM layer just renders DashboardState. Alerts advance a
 * since-cursor, so each alert surfaces exactly once. When the service is
 * unreachable the last report stays visible behind an offline banner.
 */

import type { ScreeningApi } from './api.js';
import type { Alert, Report, ScreenKind } from './types.js';

export const POLL_INTERVAL_MS = 30_000;

export const BADGE_LABELS: Record<Exclude<ScreenKind, 'no_flag'>, string> = {
  myopia_suspect: 'Short-sightedness suspected',
  hyperopia_suspect: 'Far-sightedness suspected',
  astigmatism_suspect: 'Astigmatism suspected',
  cvd_suspect: 'Color-vision deficit suspected',
  nyctalopia_suspect: 'Night-vision problem suspected',
};

export interface TrendPoint {
  timestampMs: number;
  threshold: number;
}

export interface DashboardState {
  report: Report | null;
  badges: string[];
  trends: Record<string, TrendPoint[]>;
  newAlerts: Alert[];
  seenAlerts: Alert[];
  offline: boolean;
  lastUpdatedMs: number | null;
}

export class Dashboard {
  private state: DashboardState = {
    report: null,
    badges: [],
    trends: {},
    newAlerts: [],
    seenAlerts: [],
    offline: false,
    lastUpdatedMs: null,
  };
  private sinceCursorMs = 0;

  constructor(
    private api: ScreeningApi,
    private childId: string,
    private onChange: (state: DashboardState) => void = () => undefined,
  ) {}

  snapshot(): DashboardState {
    return this.state;
  }

  /** One poll: fetch report and fresh alerts, advance the alert cursor. */
  async refresh(nowMs: number): Promise<DashboardState> {
    try {
      const report = await this.api.getReport(this.childId);
      const alerts = await this.api.getAlerts(this.childId, this.sinceCursorMs);
      if (alerts.length > 0) {
        this.sinceCursorMs = Math.max(...alerts.map((a) => a.window[1])) + 1;
      }
      this.state = {
        report,
        badges: Object.values(report.screens)
          .filter((s) => s.kind !== 'no_flag')
          .map((s) => BADGE_LABELS[s.kind as Exclude<ScreenKind, 'no_flag'>]),
        trends: trendsFrom(report),
        newAlerts: alerts,
        seenAlerts: [...this.state.seenAlerts, ...alerts],
        offline: false,
        lastUpdatedMs: nowMs,
      };
    } catch {
      // keep the cached report visible; flag the connection
      this.state = { ...this.state, offline: true, newAlerts: [] };
    }
    this.onChange(this.state);
    return this.state;
  }

  /** Poll forever on the given scheduler (setInterval-compatible). */
  start(
    setIntervalImpl: (fn: () => void, ms: number) => unknown,
    now: () => number,
  ): unknown {
    void this.refresh(now());
    return setIntervalImpl(() => void this.refresh(now()), POLL_INTERVAL_MS);
  }
}

function trendsFrom(report: Report): Record<string, TrendPoint[]> {
  const trends: Record<string, TrendPoint[]> = {};
  for (const [key, series] of Object.entries(report.series)) {
    trends[key] = series.points.map((p) => ({
      timestampMs: p.timestamp_ms,
      threshold: p.threshold,
    }));
  }
  return trends;
}
