/** Linear-RGB handling for probe colors.
 *
 * Stimulus colors arrive in linear RGB; the canvas wants sRGB-encoded
 * 8-bit values, so the display transfer function is applied at draw time.
 */

export type LinearRgb = [number, number, number];

export function srgbEncode(linear: number): number {
  const v = Math.min(1, Math.max(0, linear));
  return v <= 0.0031308 ? 12.92 * v : 1.055 * Math.pow(v, 1 / 2.4) - 0.055;
}

export function toCss(rgb: LinearRgb): string {
  const bytes = rgb.map((c) => Math.round(srgbEncode(c) * 255));
  return `rgb(${bytes[0]},${bytes[1]},${bytes[2]})`;
}

// cone-excitation transform mirroring the service's stimulus math
// (Hunt-Pointer-Estevez fundamentals composed with the sRGB primaries)
const RGB_TO_LMS = [
  [0.30574457, 0.62269852, 0.0452755],
  [0.15778779, 0.76966825, 0.08804917],
  [0.0193339, 0.119192, 0.9503041],
];

const LMS_TO_RGB = invert3(RGB_TO_LMS);
const Y_ROW = [0.2126729, 0.7151522, 0.072175];
const Y_IN_LMS = mulVec(Y_ROW, LMS_TO_RGB);

function invert3(m: number[][]): number[][] {
  const [a, b, c] = m[0];
  const [d, e, f] = m[1];
  const [g, h, i] = m[2];
  const det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  return [
    [(e * i - f * h) / det, (c * h - b * i) / det, (b * f - c * e) / det],
    [(f * g - d * i) / det, (a * i - c * g) / det, (c * d - a * f) / det],
    [(d * h - e * g) / det, (b * g - a * h) / det, (a * e - b * d) / det],
  ];
}

function mulVec(v: number[], m: number[][]): number[] {
  return [0, 1, 2].map((j) => v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j]);
}

function apply(m: number[][], v: number[]): number[] {
  return m.map((row) => row[0] * v[0] + row[1] * v[1] + row[2] * v[2]);
}

/**
 * Target/background pair for a color probe: the background displaced along
 * the axis's luminance-silenced cone direction by the given cone contrast.
 * Returns null when the excursion leaves the displayable gamut.
 */
export function colorAxisColors(
  axis: 'protan' | 'deutan' | 'tritan',
  contrast: number,
  background: LinearRgb = [0.5, 0.5, 0.5],
): { target: LinearRgb; background: LinearRgb } | null {
  const lmsBg = apply(RGB_TO_LMS, background);
  const [a, b, c] = Y_IN_LMS;
  let dir: number[];
  if (axis === 'protan') dir = [1, -a / b, 0];
  else if (axis === 'deutan') dir = [-b / a, 1, 0];
  else dir = [0, -c / b, 1];
  const norm = Math.hypot(dir[0] / lmsBg[0], dir[1] / lmsBg[1], dir[2] / lmsBg[2]);
  const scaled = dir.map((v) => (v / norm) * contrast);
  const target = apply(LMS_TO_RGB, [
    lmsBg[0] + scaled[0],
    lmsBg[1] + scaled[1],
    lmsBg[2] + scaled[2],
  ]);
  if (target.some((v) => v < -1e-9 || v > 1 + 1e-9)) return null;
  return {
    target: target.map((v) => Math.min(1, Math.max(0, v))) as LinearRgb,
    background,
  };
}
