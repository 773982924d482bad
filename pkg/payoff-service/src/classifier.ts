/**
 * Linear margin classifier trained by full-batch subgradient descent on
 * the L2-regularized hinge loss. Deterministic: zero initialization,
 * fixed epoch count and learning-rate schedule, no shuffling.
 */

import { Sample } from "./dataset";

export interface LinearModel {
  w: [number, number];
  b: number;
}

const EPOCHS = 150;
const BASE_LR = 0.5;
const L2 = 1e-3;

export function train(samples: Sample[]): LinearModel | null {
  if (samples.length === 0) return null;
  const labels = new Set(samples.map((s) => s.label));
  if (labels.size < 2) return null;

  let w0 = 0;
  let w1 = 0;
  let b = 0;
  const n = samples.length;
  for (let epoch = 0; epoch < EPOCHS; epoch++) {
    const lr = BASE_LR / (1.0 + 0.05 * epoch);
    let g0 = w0 * L2;
    let g1 = w1 * L2;
    let gb = 0;
    for (const s of samples) {
      const margin = s.label * (w0 * s.x + w1 * s.y + b);
      if (margin < 1) {
        g0 -= (s.label * s.x) / n;
        g1 -= (s.label * s.y) / n;
        gb -= s.label / n;
      }
    }
    w0 -= lr * g0;
    w1 -= lr * g1;
    b -= lr * gb;
  }
  return { w: [w0, w1], b };
}

export function predict(model: LinearModel, sample: Sample): number {
  return model.w[0] * sample.x + model.w[1] * sample.y + model.b >= 0 ? 1 : -1;
}

export function score(model: LinearModel, samples: Sample[]): number {
  if (samples.length === 0) return 0.5;
  let correct = 0;
  for (const s of samples) {
    if (predict(model, s) === s.label) correct++;
  }
  return correct / samples.length;
}

/**
 * Train on the given set and return held-out accuracy on an evaluation
 * set. Degenerate training sets (empty or single-class) score the
 * chance level 0.5.
 */
export function trainAndScore(trainSet: Sample[], evalSamples: Sample[]): number {
  const model = train(trainSet);
  if (model === null) return 0.5;
  return score(model, evalSamples);
}
