/** Least-squares slope of ln(p) against the axis over points with p > 0. */

export interface SlopeFit {
  slope: number | null; // null when fewer than two positive points remain
  points: number;       // points used in the fit
}

export function fitLogSlope(
  axis: readonly number[],
  p: readonly (number | null)[],
  range?: readonly [number, number],
): SlopeFit {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let j = 0; j < axis.length; j++) {
    const pj = p[j];
    if (pj === null || !(pj > 0)) continue;
    if (range && (axis[j] < range[0] || axis[j] > range[1])) continue;
    xs.push(axis[j]);
    ys.push(Math.log(pj));
  }
  if (xs.length < 2) return { slope: null, points: xs.length };
  const xbar = xs.reduce((a, b) => a + b, 0) / xs.length;
  const ybar = ys.reduce((a, b) => a + b, 0) / ys.length;
  let sxy = 0;
  let sxx = 0;
  for (let j = 0; j < xs.length; j++) {
    sxy += (xs[j] - xbar) * (ys[j] - ybar);
    sxx += (xs[j] - xbar) * (xs[j] - xbar);
  }
  return { slope: sxy / sxx, points: xs.length };
}
