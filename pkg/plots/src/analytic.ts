/**
 * Analytic curves drawn over empirical points.
 *
 * Everything here is recomputed from formulas at render time; overlay values
 * are never read from input files. The correlation renderer uses this to
 * cross-check the producer's sine_target column before drawing.
 */

/** Limiting density of states: sqrt(4 - E^2) / (2 pi) on [-2, 2], else 0. */
export function semicircleDensity(E: number): number {
  if (Math.abs(E) > 2) return 0;
  return Math.sqrt(4 - E * E) / (2 * Math.PI);
}

/** sin(pi x)/(pi x) with the removable singularity filled by its series. */
export function sineKernel(x: number): number {
  const px = Math.PI * x;
  if (Math.abs(x) < 1e-4) {
    return 1 - (px * px) / 6 * (1 - (px * px) / 20);
  }
  return Math.sin(px) / px;
}

/** Two-point determinantal target 1 - S(s)^2. */
export function sineTarget(s: number): number {
  const S = sineKernel(s);
  return 1 - S * S;
}

/** Closed-form Gaussian inverse-moment benchmark 1/((m-1)...(m-r)). */
export function gaussianInverseMoment(m: number, r: number): number {
  if (!Number.isInteger(m) || !Number.isInteger(r) || m <= r || r < 1) {
    throw new Error(`need integers m > r >= 1, got m=${m}, r=${r}`);
  }
  let denom = 1;
  for (let k = m - r; k < m; k++) denom *= k;
  return 1 / denom;
}

/** Least-squares slope of y = s x through the origin. */
export function slopeThroughOrigin(x: number[], y: number[]): number {
  let xy = 0;
  let xx = 0;
  for (let i = 0; i < x.length; i++) {
    xy += x[i]! * y[i]!;
    xx += x[i]! * x[i]!;
  }
  return xy / xx;
}

/** Unweighted least-squares line y = a + b x. */
export function lineFit(x: number[], y: number[]): { a: number; b: number } {
  const n = x.length;
  let sx = 0, sy = 0;
  for (let i = 0; i < n; i++) {
    sx += x[i]!;
    sy += y[i]!;
  }
  const mx = sx / n;
  const my = sy / n;
  let sxx = 0, sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i]! - mx) * (x[i]! - mx);
    sxy += (x[i]! - mx) * (y[i]! - my);
  }
  const b = sxy / sxx;
  return { a: my - b * mx, b };
}
