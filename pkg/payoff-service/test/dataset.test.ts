import { describe, expect, it } from "vitest";

import {
  DEFAULT_OPTIONS,
  boundaryFlipSamples,
  evalSet,
  honestSamples,
  shiftedRandomSamples,
  synthesize,
} from "../src/dataset";

describe("synthesize", () => {
  it("honest-only profile draws only honest samples", () => {
    const got = synthesize(10, [0, 0], 7);
    expect(got).toHaveLength(10);
    expect(got).toEqual(honestSamples(10, 7, DEFAULT_OPTIONS.sep));
  });

  it("malicious-only profile draws no honest samples", () => {
    const got = synthesize(0, [5, 5], 7);
    expect(got).toHaveLength(10);
    const expected = [
      ...boundaryFlipSamples(5, 7, 0),
      ...shiftedRandomSamples(5, 7, 1, DEFAULT_OPTIONS.sep),
    ];
    expect(got).toEqual(expected);
  });

  it("full profile carries the requested malicious mass", () => {
    const got = synthesize(150, [75, 75], 7);
    expect(got).toHaveLength(300);
    const honest = honestSamples(150, 7, DEFAULT_OPTIONS.sep);
    expect(got.slice(0, 150)).toEqual(honest);
  });

  it("is deterministic per (h, m, seed)", () => {
    expect(synthesize(40, [20, 10], 3)).toEqual(synthesize(40, [20, 10], 3));
    expect(synthesize(40, [20, 10], 3)).not.toEqual(synthesize(40, [20, 10], 4));
  });

  it("alternates corruption mechanisms by generator index", () => {
    const flips = synthesize(0, [50, 0], 1);
    const shifts = synthesize(0, [0, 50], 1);
    // flips sit near the boundary and carry inverted labels
    for (const s of flips) {
      expect(s.label).toBe(s.x >= 0 ? -1 : 1);
    }
    // shifted samples live off the class axis (y displaced by +2)
    const meanY = shifts.reduce((acc, s) => acc + s.y, 0) / shifts.length;
    expect(meanY).toBeGreaterThan(1.0);
  });
});

describe("evalSet", () => {
  it("has the configured size and is fixed per seed", () => {
    const a = evalSet(7);
    const b = evalSet(7);
    expect(a).toHaveLength(1000);
    expect(a).toEqual(b);
    expect(evalSet(8)).not.toEqual(a);
  });

  it("contains only correctly labeled honest-distribution points", () => {
    // labels must match the cluster each point was drawn from: with
    // separation 4 the wrong-side tail is rare but real, so check the
    // generating invariant instead: label in {-1, 1} and the point lies
    // within a plausible radius of its own cluster mean
    for (const s of evalSet(3)) {
      expect([-1, 1]).toContain(s.label);
      const cx = (s.label * DEFAULT_OPTIONS.sep) / 2;
      const r2 = (s.x - cx) ** 2 + s.y ** 2;
      expect(r2).toBeLessThan(36); // 6 sigma
    }
  });

  it("honors a custom eval size", () => {
    expect(evalSet(1, { sep: 4.0, evalSize: 50 })).toHaveLength(50);
  });
});
