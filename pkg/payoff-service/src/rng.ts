/**
 * Deterministic RNG streams.
 *
 * Every data draw is keyed by (seed, purpose string) so identical
 * requests rebuild identical datasets regardless of call order.
 */

/** FNV-1a hash of a string, returned as an unsigned 32-bit integer. */
export function hashString(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/** Mulberry32: small, fast, good-enough 32-bit PRNG. */
export class Rng {
  private state: number;
  private sparePair: number | null = null;

  constructor(seed: number, purpose: string) {
    this.state = (hashString(purpose) ^ Math.imul(seed >>> 0, 0x9e3779b9)) >>> 0;
    // avoid the all-zeros fixed point
    if (this.state === 0) this.state = 0x6d2b79f5;
  }

  /** Uniform float in [0, 1). */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  /** Standard normal via Box-Muller (pairs cached). */
  gauss(): number {
    if (this.sparePair !== null) {
      const v = this.sparePair;
      this.sparePair = null;
      return v;
    }
    let u = 0;
    while (u === 0) u = this.next(); // log(0) guard
    const v = this.next();
    const r = Math.sqrt(-2.0 * Math.log(u));
    const theta = 2.0 * Math.PI * v;
    this.sparePair = r * Math.sin(theta);
    return r * Math.cos(theta);
  }
}
