/** Canvas drawing for probe stimuli with device-pixel fidelity.
 *
 * All geometry is snapped to whole device pixels: a critical feature of
 * f CSS pixels is drawn at round(f * dpr) device pixels, so the on-screen
 * error is at most 0.5 / dpr <= 1 px at any DPR >= 0.5. Colors pass
 * through the sRGB transfer function (see color.ts) so the linear-RGB
 * values the service specifies are honored by the display.
 */

import { colorAxisColors, toCss, type LinearRgb } from './color.js';
import type { ScreenProfile, StimulusSpec } from './types.js';

/** Structural subset of CanvasRenderingContext2D used here (test-mockable). */
export interface Canvas2D {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  setTransform(a: number, b: number, c: number, d: number, e: number, f: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, start: number, end: number): void;
  stroke(): void;
  fill(): void;
  save(): void;
  restore(): void;
  translate(x: number, y: number): void;
  rotate(rad: number): void;
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface DrawnProbe {
  targetBox: Box;
  distractorBoxes: Box[];
  featureDevicePx: number;
  featureCssPx: number;
  skipped: boolean;
}

export function snapToDevice(cssPx: number, dpr: number): number {
  return Math.max(1, Math.round(cssPx * dpr));
}

const GAP_TO_SYMBOL_RATIO = 5;

function symbolExtentCss(spec: StimulusSpec): number {
  if (spec.channel.kind === 'acuity') {
    return spec.rendered_size_px * GAP_TO_SYMBOL_RATIO;
  }
  if (spec.channel.kind === 'orientation') {
    // patch spans several grating cycles
    return spec.rendered_size_px * 12;
  }
  return spec.rendered_size_px;
}

function scotopicColors(spec: StimulusSpec, screen: ScreenProfile): { fg: LinearRgb; bg: LinearRgb } {
  const range = screen.max_luminance_cdm2 - screen.black_luminance_cdm2;
  const v = Math.min(1, spec.intensity / range);
  return { fg: [v, v, v], bg: [0, 0, 0] };
}

function ringSymbol(
  ctx: Canvas2D,
  cxDev: number,
  cyDev: number,
  extentDev: number,
  gapDev: number,
  withGap: boolean,
  color: string,
): void {
  const radius = (extentDev - gapDev) / 2;
  ctx.beginPath();
  ctx.strokeStyle = color;
  ctx.lineWidth = gapDev;
  // the gap subtends one gap-width of arc on the right side
  const gapAngle = withGap ? gapDev / Math.max(radius, 1) : 0;
  ctx.arc(cxDev, cyDev, radius, gapAngle / 2, 2 * Math.PI - gapAngle / 2);
  ctx.stroke();
}

function gratingPatch(
  ctx: Canvas2D,
  cxDev: number,
  cyDev: number,
  extentDev: number,
  stripeDev: number,
  axisDeg: number,
  contrast: number,
  horizontalInstead: boolean,
): void {
  ctx.save();
  ctx.translate(cxDev, cyDev);
  const axis = horizontalInstead ? axisDeg + 90 : axisDeg;
  ctx.rotate((axis * Math.PI) / 180);
  const mid = 0.5;
  const hi = mid * (1 + contrast);
  const lo = mid * (1 - contrast);
  let x = -extentDev / 2;
  let bright = true;
  while (x < extentDev / 2) {
    ctx.fillStyle = toCss([bright ? hi : lo, bright ? hi : lo, bright ? hi : lo]);
    ctx.fillRect(x, -extentDev / 2, stripeDev, extentDev);
    x += stripeDev;
    bright = !bright;
  }
  ctx.restore();
}

function discSymbol(ctx: Canvas2D, cxDev: number, cyDev: number, extentDev: number, color: string): void {
  ctx.beginPath();
  ctx.fillStyle = color;
  ctx.arc(cxDev, cyDev, extentDev / 2, 0, 2 * Math.PI);
  ctx.fill();
}

/**
 * Draw one probe: the target symbol at the spec position plus one
 * distractor per alternative, evenly spread. Returns hit boxes in CSS
 * pixels. Infeasible specs are skipped (caller reports a deferral).
 */
export function renderStimulus(
  ctx: Canvas2D,
  spec: StimulusSpec,
  screen: ScreenProfile,
  dpr: number,
): DrawnProbe {
  if (!spec.feasible) {
    return { targetBox: { x: 0, y: 0, w: 0, h: 0 }, distractorBoxes: [], featureDevicePx: 0, featureCssPx: 0, skipped: true };
  }
  ctx.setTransform(1, 0, 0, 1, 0, 0);

  const featureDev = snapToDevice(spec.rendered_size_px, dpr);
  const extentDev = Math.max(featureDev, snapToDevice(symbolExtentCss(spec), dpr));
  const [cx, cy] = spec.position_px;
  const kind = spec.channel.kind;

  // background field
  let bg: LinearRgb = [0.5, 0.5, 0.5];
  let target: LinearRgb = [0, 0, 0];
  if (kind === 'color') {
    const pair = colorAxisColors(spec.channel.axis ?? 'deutan', spec.intensity);
    if (pair === null) {
      return { targetBox: { x: 0, y: 0, w: 0, h: 0 }, distractorBoxes: [], featureDevicePx: 0, featureCssPx: 0, skipped: true };
    }
    bg = pair.background;
    target = pair.target;
  } else if (kind === 'scotopic') {
    const pair = scotopicColors(spec, screen);
    bg = pair.bg;
    target = pair.fg;
  }
  ctx.fillStyle = toCss(bg);
  ctx.fillRect(0, 0, screen.width_px * dpr, screen.height_px * dpr);

  const n = 1 + spec.distractor_descriptors.length;
  const spreadDev = extentDev * 1.8;
  const positions: Array<[number, number]> = [];
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n;
    positions.push([
      Math.round(cx * dpr + (i === 0 ? 0 : Math.cos(angle) * spreadDev * 1.2)),
      Math.round(cy * dpr + (i === 0 ? 0 : Math.sin(angle) * spreadDev * 1.2)),
    ]);
  }

  positions.forEach(([pxDev, pyDev], i) => {
    const isTarget = i === 0;
    if (kind === 'acuity') {
      ringSymbol(ctx, pxDev, pyDev, extentDev, featureDev, isTarget, toCss([0, 0, 0]));
    } else if (kind === 'orientation') {
      gratingPatch(
        ctx,
        pxDev,
        pyDev,
        extentDev,
        featureDev,
        spec.channel.axis_deg ?? 0,
        isTarget ? spec.intensity : 0,
        false,
      );
    } else {
      discSymbol(ctx, pxDev, pyDev, extentDev, toCss(isTarget ? target : bg));
    }
  });

  const boxes = positions.map(([pxDev, pyDev]) => ({
    x: pxDev / dpr - extentDev / dpr / 2,
    y: pyDev / dpr - extentDev / dpr / 2,
    w: extentDev / dpr,
    h: extentDev / dpr,
  }));
  return {
    targetBox: boxes[0],
    distractorBoxes: boxes.slice(1),
    featureDevicePx: featureDev,
    featureCssPx: featureDev / dpr,
    skipped: false,
  };
}

export function hitTest(box: Box, x: number, y: number): boolean {
  return x >= box.x && x <= box.x + box.w && y >= box.y && y <= box.y + box.h;
}
