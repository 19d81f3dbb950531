/** Browser wiring: mini-game canvas page and parent dashboard page.
 *
 * Serve this directory statically and run the screening service locally;
 * index.html loads the game, dashboard.html the parent view.
 */

import { ScreeningApi } from './api.js';
import { Dashboard, POLL_INTERVAL_MS, type DashboardState } from './dashboard.js';
import { ManualViewingProvider } from './distance.js';
import { MiniGame } from './game.js';
import { RESPONSE_TIMEOUT_MS } from './probe.js';
import type { Canvas2D } from './render.js';
import type { ScreenProfile } from './types.js';

const DEFAULT_SCREEN: ScreenProfile = {
  width_mm: 480,
  height_mm: 270,
  width_px: 1920,
  height_px: 1080,
  max_luminance_cdm2: 250,
  black_luminance_cdm2: 0.2,
};

function query(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

export function bootGame(): void {
  const canvas = document.getElementById('probe-canvas') as HTMLCanvasElement;
  const credits = document.getElementById('credits')!;
  const status = document.getElementById('status')!;
  const distanceInput = document.getElementById('distance-mm') as HTMLInputElement;
  const ambientInput = document.getElementById('ambient-lux') as HTMLInputElement;

  const dpr = Math.min(window.devicePixelRatio || 1, 3);
  canvas.width = Math.floor(DEFAULT_SCREEN.width_px * dpr);
  canvas.height = Math.floor(DEFAULT_SCREEN.height_px * dpr);
  canvas.style.width = `${DEFAULT_SCREEN.width_px}px`;
  canvas.style.height = `${DEFAULT_SCREEN.height_px}px`;
  const ctx = canvas.getContext('2d') as unknown as Canvas2D;

  const api = new ScreeningApi(query('api', ''));
  const viewing = new ManualViewingProvider();
  const game = new MiniGame(api, query('child', 'kim'), query('session', 's1'), DEFAULT_SCREEN, viewing);

  const refreshViewing = () =>
    viewing.update(Number(distanceInput.value), Number(ambientInput.value), Date.now());
  distanceInput.addEventListener('change', refreshViewing);
  ambientInput.addEventListener('change', refreshViewing);
  refreshViewing();
  window.setInterval(refreshViewing, 5000); // manual provider stays fresh

  let active: ReturnType<MiniGame['startRound']> = null;
  let timeoutHandle = 0;

  const finish = async (tap: { x: number; y: number } | null) => {
    if (active === null) return;
    window.clearTimeout(timeoutHandle);
    const round = active;
    active = null;
    const outcome = await game.finishRound(round, tap, Date.now());
    credits.textContent = String(game.credits);
    status.textContent = outcome.creditAwarded ? 'Found it!' : 'On to the next one';
    window.setTimeout(nextRound, 600);
  };

  const nextRound = () => {
    active = game.startRound(ctx, dpr, Date.now());
    if (active === null) {
      status.textContent = 'Waiting for playable conditions';
      window.setTimeout(nextRound, 1500);
      return;
    }
    status.textContent = `Tap the odd ${active.spec.target_descriptor}`;
    timeoutHandle = window.setTimeout(() => void finish(null), RESPONSE_TIMEOUT_MS);
  };

  canvas.addEventListener('click', (ev) => {
    const rect = canvas.getBoundingClientRect();
    void finish({ x: ev.clientX - rect.left, y: ev.clientY - rect.top });
  });
  nextRound();
}

export function bootDashboard(): void {
  const badges = document.getElementById('badges')!;
  const alerts = document.getElementById('alerts')!;
  const banner = document.getElementById('offline-banner')!;
  const counts = document.getElementById('trial-counts')!;

  const api = new ScreeningApi(query('api', ''));
  const render = (state: DashboardState) => {
    banner.style.display = state.offline ? 'block' : 'none';
    badges.innerHTML = state.badges.map((b) => `<span class="badge">${b}</span>`).join(' ');
    for (const alert of state.newAlerts) {
      const li = document.createElement('li');
      li.textContent = `${alert.channel}: ${alert.recommendation_text}`;
      alerts.appendChild(li);
    }
    if (state.report) {
      counts.textContent = `${Object.values(state.report.trial_counts).reduce((a, b) => a + b, 0)} probes collected`;
    }
  };
  const dashboard = new Dashboard(api, query('child', 'kim'), render);
  dashboard.start((fn, ms) => window.setInterval(fn, ms), () => Date.now());
  void POLL_INTERVAL_MS;
}

declare global {
  interface Window {
    gamesight: { bootGame: () => void; bootDashboard: () => void };
  }
}

if (typeof window !== 'undefined') {
  window.gamesight = { bootGame, bootDashboard };
}
