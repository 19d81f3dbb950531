/** Minimal client-side probe source for the standalone mini-game.
 *
 * The full adaptive engine lives server side; this stub keeps the demo
 * game playable on its own by cycling channels at fixed intensities and
 * computing pixel sizes from the same visual-angle geometry the service
 * uses. Quantization below one pixel marks the spec infeasible rather
 * than rounding up, exactly like the engine.
 */

import type { Channel, ScreenProfile, StimulusSpec, ViewingSample } from './types.js';

const ARCMIN_PER_RADIAN = (60 * 180) / Math.PI;
const SYMBOL_EXTENT_ARCMIN = 120;
const GRATING_HALF_CYCLE_ARCMIN = 5; // 6 cycles/degree
const SCOTOPIC_MAX_AMBIENT_LUX = 10;

export const SYMBOLS = ['circle', 'square', 'triangle', 'star'];

export function arcminToPx(angleArcmin: number, screen: ScreenProfile, distanceMm: number): number {
  const pitch = screen.width_mm / screen.width_px;
  return (2 * distanceMm * Math.tan(angleArcmin / ARCMIN_PER_RADIAN / 2)) / pitch;
}

function criticalFeatureArcmin(channel: Channel, intensity: number): number {
  if (channel.kind === 'acuity') return intensity;
  if (channel.kind === 'orientation') return GRATING_HALF_CYCLE_ARCMIN;
  return SYMBOL_EXTENT_ARCMIN;
}

const ROTATION: Array<{ channel: Channel; intensity: number }> = [
  { channel: { kind: 'acuity' }, intensity: 4.0 },
  { channel: { kind: 'color', axis: 'deutan' }, intensity: 0.08 },
  { channel: { kind: 'orientation', axis_deg: 90 }, intensity: 0.3 },
  { channel: { kind: 'color', axis: 'protan' }, intensity: 0.08 },
  { channel: { kind: 'orientation', axis_deg: 0 }, intensity: 0.3 },
  { channel: { kind: 'color', axis: 'tritan' }, intensity: 0.08 },
  { channel: { kind: 'scotopic' }, intensity: 0.3 },
];

export class StubScheduler {
  private index = 0;

  constructor(private screen: ScreenProfile, private rand: () => number = Math.random) {}

  next(view: ViewingSample): StimulusSpec | null {
    for (let hops = 0; hops < ROTATION.length; hops++) {
      const { channel, intensity } = ROTATION[this.index % ROTATION.length];
      this.index++;
      if (channel.kind === 'scotopic' && view.ambient_lux > SCOTOPIC_MAX_AMBIENT_LUX) {
        continue;
      }
      const featurePx = arcminToPx(
        criticalFeatureArcmin(channel, intensity),
        this.screen,
        view.distance_mm,
      );
      const extentPx = arcminToPx(
        channel.kind === 'acuity' ? intensity * 5 : SYMBOL_EXTENT_ARCMIN,
        this.screen,
        view.distance_mm,
      );
      const margin = extentPx / 2 + 8;
      const target = SYMBOLS[Math.floor(this.rand() * SYMBOLS.length)];
      const spec: StimulusSpec = {
        channel,
        intensity,
        target_descriptor: target,
        distractor_descriptors: SYMBOLS.filter((s) => s !== target),
        position_px: [
          Math.round(margin + this.rand() * Math.max(1, this.screen.width_px - 2 * margin)),
          Math.round(margin + this.rand() * Math.max(1, this.screen.height_px - 2 * margin)),
        ],
        rendered_size_px: featurePx,
        mode: 'mini_game',
        feasible: featurePx >= 1.0,
      };
      if (spec.feasible) return spec;
    }
    return null; // nothing renderable right now
  }
}
