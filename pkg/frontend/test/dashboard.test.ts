import { readFileSync } from 'node:fs';
import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ScreeningApi } from '../src/api.js';
import { Dashboard, POLL_INTERVAL_MS } from '../src/dashboard.js';
import type { Report } from '../src/types.js';

// report derived from the service's simulated short-sighted child fixture
const MYOPE_REPORT = JSON.parse(
  readFileSync(new URL('../fixtures/myope_report.json', import.meta.url), 'utf-8'),
) as Report;

class FakeService {
  report: Report | null = MYOPE_REPORT;
  down = false;

  fetch = async (url: string): Promise<Response> => {
    if (this.down) throw new Error('connection refused');
    if (url.includes('/report')) {
      return new Response(JSON.stringify(this.report), { status: 200 });
    }
    if (url.includes('/alerts')) {
      const since = Number(new URL(url).searchParams.get('since') ?? '0');
      const alerts = (this.report?.alerts ?? []).filter((a) => a.window[1] >= since);
      return new Response(JSON.stringify({ v: 1, alerts }), { status: 200 });
    }
    return new Response('{}', { status: 404 });
  };
}

describe('parent dashboard', () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });

  it('shows the short-sightedness badge within one polling interval', async () => {
    const service = new FakeService();
    const dashboard = new Dashboard(new ScreeningApi('http://svc', service.fetch), 'kim');
    dashboard.start(
      (fn, ms) => setInterval(fn, ms),
      () => Date.now(),
    );
    await vi.advanceTimersByTimeAsync(POLL_INTERVAL_MS);
    const state = dashboard.snapshot();
    expect(state.badges).toContain('Short-sightedness suspected');
    expect(state.offline).toBe(false);
    expect(Object.keys(state.trends).length).toBeGreaterThan(0);
  });

  it('empty report renders the no-data state', async () => {
    const service = new FakeService();
    service.report = {
      v: 1,
      child_id: 'kim',
      trial_counts: {},
      fits: {},
      series: {},
      screens: {},
      alerts: [],
    };
    const dashboard = new Dashboard(new ScreeningApi('http://svc', service.fetch), 'kim');
    const state = await dashboard.refresh(0);
    expect(state.badges).toEqual([]);
    expect(state.newAlerts).toEqual([]);
    expect(state.report?.trial_counts).toEqual({});
  });

  it('each alert surfaces exactly once (cursor advances)', async () => {
    const service = new FakeService();
    const dashboard = new Dashboard(new ScreeningApi('http://svc', service.fetch), 'kim');
    const first = await dashboard.refresh(0);
    expect(first.newAlerts.length).toBeGreaterThanOrEqual(1);
    const second = await dashboard.refresh(POLL_INTERVAL_MS);
    expect(second.newAlerts).toEqual([]);
    expect(second.seenAlerts.length).toBe(first.newAlerts.length);
  });

  it('service outage shows the offline banner and keeps the cached report', async () => {
    const service = new FakeService();
    const dashboard = new Dashboard(new ScreeningApi('http://svc', service.fetch), 'kim');
    await dashboard.refresh(0);
    service.down = true;
    const state = await dashboard.refresh(POLL_INTERVAL_MS);
    expect(state.offline).toBe(true);
    expect(state.report).not.toBeNull();
    expect(state.badges).toContain('Short-sightedness suspected');
    service.down = false;
    const recovered = await dashboard.refresh(2 * POLL_INTERVAL_MS);
    expect(recovered.offline).toBe(false);
  });
});

describe('api client', () => {
  it('hits the exact endpoint paths', async () => {
    const urls: string[] = [];
    const fetchSpy = async (url: string): Promise<Response> => {
      urls.push(url);
      if (url.includes('alerts')) return new Response('{"v":1,"alerts":[]}', { status: 200 });
      return new Response(JSON.stringify(MYOPE_REPORT), { status: 200 });
    };
    const api = new ScreeningApi('http://svc:8321', fetchSpy);
    await api.getReport('kim');
    await api.getAlerts('kim', 12345);
    expect(urls[0]).toBe('http://svc:8321/v1/children/kim/report');
    expect(urls[1]).toBe('http://svc:8321/v1/children/kim/alerts?since=12345');
  });

  it('raises typed errors from error bodies', async () => {
    const api = new ScreeningApi('http://svc', async () =>
      new Response(JSON.stringify({ code: 'not_found', message: 'unknown child' }), { status: 404 }),
    );
    await expect(api.getReport('zoe')).rejects.toMatchObject({ status: 404, code: 'not_found' });
  });
});
