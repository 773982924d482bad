"""Pure-Python grid-scan backend.

Reference implementation of the hot kernels: closed-form accuracy from
dataset totals, per-player deviation gains, and the exhaustive
equilibrium scan. The compiled backend in ``_grid_fast.pyx`` mirrors the
exact arithmetic (same operations in the same order) so both produce
bit-identical doubles; keep the two in sync.

Player 0 is the honest contributor by convention; its utility is
``accuracy - cost``, every other player's is ``-accuracy - cost``.
"""

from __future__ import annotations


def accuracy_from_totals(
    n: float, b: float, a_max: float, kappa: float, lam: float, floor: float
) -> float:
    """Accuracy of a dataset with ``n`` samples carrying ``b`` poison mass.

    Learning-curve gain n/(n+kappa) times a poison penalty linear in the
    poison ratio b/n, clamped to [floor, 1]. An empty dataset scores the
    chance-level floor.
    """
    if n <= 0.0:
        return floor
    rho = b / n
    if rho > 1.0:
        rho = 1.0
    raw = a_max * (n / (n + kappa)) * (1.0 - lam * rho)
    if raw < floor:
        raw = floor
    if raw > 1.0:
        raw = 1.0
    return raw


def profile_accuracy(counts, betas, a_max, kappa, lam, floor) -> float:
    """Accuracy of a full strategy profile."""
    n = 0.0
    b = 0.0
    for i in range(len(counts)):
        n += counts[i]
        b += betas[i] * counts[i]
    return accuracy_from_totals(n, b, a_max, kappa, lam, floor)


def deviation_gains(counts, admissible, costs, betas, a_max, kappa, lam, floor):
    """Best unilateral utility improvement per player over the grid.

    ``admissible[i]`` lists the counts player i may deviate to, in
    ascending order. Gains are measured against the utility at ``counts``
    and are >= 0 whenever the current count is itself admissible.
    """
    k = len(counts)
    n = 0.0
    b = 0.0
    for i in range(k):
        n += counts[i]
        b += betas[i] * counts[i]
    acc = accuracy_from_totals(n, b, a_max, kappa, lam, floor)

    gains = [0.0] * k
    for i in range(k):
        if i == 0:
            cur = acc - costs[i] * counts[i]
        else:
            cur = -acc - costs[i] * counts[i]
        best = cur
        for c in admissible[i]:
            n2 = n - counts[i] + c
            b2 = b + betas[i] * (c - counts[i])
            acc2 = accuracy_from_totals(n2, b2, a_max, kappa, lam, floor)
            if i == 0:
                u2 = acc2 - costs[i] * c
            else:
                u2 = -acc2 - costs[i] * c
            if u2 > best:
                best = u2
        gains[i] = best - cur
    return gains


def scan_equilibria(admissible, costs, betas, a_max, kappa, lam, floor, eps_gain,
                    visit=None):
    """All visited profiles where no unilateral deviation over
    ``admissible`` gains more than ``eps_gain``, in lexicographic order.

    ``visit`` restricts which profiles are checked (for sharding a scan
    across workers) while deviations always range over the full
    ``admissible`` sets; it defaults to ``admissible``.
    """
    if visit is None:
        visit = admissible
    k = len(admissible)
    sizes = [len(a) for a in visit]
    idx = [0] * k
    out = []

    while True:
        counts = [visit[i][idx[i]] for i in range(k)]
        n = 0.0
        b = 0.0
        for i in range(k):
            n += counts[i]
            b += betas[i] * counts[i]
        acc = accuracy_from_totals(n, b, a_max, kappa, lam, floor)

        is_eq = True
        for i in range(k):
            if i == 0:
                cur = acc - costs[i] * counts[i]
            else:
                cur = -acc - costs[i] * counts[i]
            limit = cur + eps_gain
            for c in admissible[i]:
                n2 = n - counts[i] + c
                b2 = b + betas[i] * (c - counts[i])
                acc2 = accuracy_from_totals(n2, b2, a_max, kappa, lam, floor)
                if i == 0:
                    u2 = acc2 - costs[i] * c
                else:
                    u2 = -acc2 - costs[i] * c
                if u2 > limit:
                    is_eq = False
                    break
            if not is_eq:
                break
        if is_eq:
            out.append(tuple(counts))

        # next visited profile in lexicographic order
        pos = k - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < sizes[pos]:
                break
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            return out
