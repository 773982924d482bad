/**
 * Synthetic point data: an honest two-cluster distribution plus two
 * corruption mechanisms standing in for different generative attackers.
 *
 * Honest samples come from two planar Gaussian clusters with unit
 * covariance, one per class, means separated by `sep` along the x axis.
 * Attacker 0 drops label-flipped points near the class boundary;
 * attacker 1 samples from the class means shifted off-distribution and
 * labels them at random. Everything is a pure function of its seed.
 */

import { Rng } from "./rng";

export interface Sample {
  x: number;
  y: number;
  /** class label, -1 or +1 */
  label: number;
}

export interface DatasetOptions {
  /** distance between the two class means (default 4.0) */
  sep: number;
  /** held-out evaluation points drawn from the honest distribution */
  evalSize: number;
}

export const DEFAULT_OPTIONS: DatasetOptions = { sep: 4.0, evalSize: 1000 };

function honestSample(rng: Rng, sep: number): Sample {
  const label = rng.next() < 0.5 ? -1 : 1;
  const cx = (label * sep) / 2;
  return { x: cx + rng.gauss(), y: rng.gauss(), label };
}

/** Honest contributions: clean points with correct labels. */
export function honestSamples(count: number, seed: number, sep: number): Sample[] {
  const rng = new Rng(seed, "honest");
  const out: Sample[] = [];
  for (let i = 0; i < count; i++) out.push(honestSample(rng, sep));
  return out;
}

/**
 * Boundary label flips: points concentrated around the decision
 * boundary (x near 0), labeled as the *wrong* side. The band is wide
 * enough (sigma 1.2) to overlap the cluster tails, so growing flip mass
 * genuinely drags the learned boundary.
 */
export function boundaryFlipSamples(count: number, seed: number, generator: number): Sample[] {
  const rng = new Rng(seed, `malicious-flip-${generator}`);
  const out: Sample[] = [];
  for (let i = 0; i < count; i++) {
    const x = 1.2 * rng.gauss();
    const y = rng.gauss();
    const trueLabel = x >= 0 ? 1 : -1;
    out.push({ x, y, label: -trueLabel });
  }
  return out;
}

/**
 * Distribution shift: class means displaced by 2.0 off the class axis,
 * labels assigned uniformly at random.
 */
export function shiftedRandomSamples(
  count: number,
  seed: number,
  generator: number,
  sep: number
): Sample[] {
  const rng = new Rng(seed, `malicious-shift-${generator}`);
  const out: Sample[] = [];
  for (let i = 0; i < count; i++) {
    const side = rng.next() < 0.5 ? -1 : 1;
    const cx = (side * sep) / 2;
    const x = cx + rng.gauss();
    const y = 2.0 + rng.gauss();
    const label = rng.next() < 0.5 ? -1 : 1;
    out.push({ x, y, label });
  }
  return out;
}

/**
 * Training set for a strategy profile: h honest samples plus m[i]
 * samples from malicious generator i. Generators alternate mechanism by
 * index: even ones flip labels near the boundary, odd ones shift the
 * distribution.
 */
export function synthesize(
  h: number,
  m: number[],
  seed: number,
  options: DatasetOptions = DEFAULT_OPTIONS
): Sample[] {
  const out = honestSamples(h, seed, options.sep);
  m.forEach((count, index) => {
    if (index % 2 === 0) {
      out.push(...boundaryFlipSamples(count, seed, index));
    } else {
      out.push(...shiftedRandomSamples(count, seed, index, options.sep));
    }
  });
  return out;
}

/** Clean evaluation set, fixed per seed, drawn only from the honest distribution. */
export function evalSet(seed: number, options: DatasetOptions = DEFAULT_OPTIONS): Sample[] {
  const rng = new Rng(seed, "eval");
  const out: Sample[] = [];
  for (let i = 0; i < options.evalSize; i++) out.push(honestSample(rng, options.sep));
  return out;
}
