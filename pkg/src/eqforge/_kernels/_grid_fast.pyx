# cython: boundscheck=False, wraparound=False, cdivision=False, language_level=3
"""Compiled grid-scan backend.

Mirrors ``_grid_py`` operation for operation so both backends return
bit-identical doubles; any change here must be applied there too.
"""

from libc.stdlib cimport malloc, free


cdef inline double _acc(double n, double b, double a_max, double kappa,
                        double lam, double floor) nogil:
    cdef double rho, raw
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


def accuracy_from_totals(double n, double b, double a_max, double kappa,
                         double lam, double floor):
    return _acc(n, b, a_max, kappa, lam, floor)


def profile_accuracy(counts, betas, double a_max, double kappa, double lam,
                     double floor):
    cdef Py_ssize_t k = len(counts)
    cdef Py_ssize_t i
    cdef double n = 0.0
    cdef double b = 0.0
    for i in range(k):
        n += <double> counts[i]
        b += (<double> betas[i]) * (<double> counts[i])
    return _acc(n, b, a_max, kappa, lam, floor)


def deviation_gains(counts, admissible, costs, betas, double a_max,
                    double kappa, double lam, double floor):
    cdef Py_ssize_t k = len(counts)
    cdef Py_ssize_t i, j, m
    cdef double n = 0.0
    cdef double b = 0.0
    cdef double acc, cur, best, n2, b2, acc2, u2, ci, cnt, beta_i, c

    for i in range(k):
        n += <double> counts[i]
        b += (<double> betas[i]) * (<double> counts[i])
    acc = _acc(n, b, a_max, kappa, lam, floor)

    gains = [0.0] * k
    for i in range(k):
        ci = <double> costs[i]
        cnt = <double> counts[i]
        beta_i = <double> betas[i]
        if i == 0:
            cur = acc - ci * cnt
        else:
            cur = -acc - ci * cnt
        best = cur
        adm = admissible[i]
        m = len(adm)
        for j in range(m):
            c = <double> adm[j]
            n2 = n - cnt + c
            b2 = b + beta_i * (c - cnt)
            acc2 = _acc(n2, b2, a_max, kappa, lam, floor)
            if i == 0:
                u2 = acc2 - ci * c
            else:
                u2 = -acc2 - ci * c
            if u2 > best:
                best = u2
        gains[i] = best - cur
    return gains


def scan_equilibria(admissible, costs, betas, double a_max, double kappa,
                    double lam, double floor, double eps_gain, visit=None):
    # ``visit`` shards which profiles are checked; deviations always
    # range over the full admissible sets (see _grid_py)
    if visit is None:
        visit = admissible
    cdef Py_ssize_t k = len(admissible)
    cdef Py_ssize_t i, j, pos, total_adm, total_vis
    cdef double n, b, acc, cur, limit, n2, b2, acc2, u2, c
    cdef bint is_eq

    # flatten deviation and visit sets into C arrays
    cdef Py_ssize_t *adm_sizes = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t *adm_offsets = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t *vis_sizes = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t *vis_offsets = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef double *costs_c = <double *> malloc(k * sizeof(double))
    cdef double *betas_c = <double *> malloc(k * sizeof(double))
    cdef double *counts = <double *> malloc(k * sizeof(double))
    cdef double *adm_flat = NULL
    cdef double *vis_flat = NULL
    if not (adm_sizes and adm_offsets and vis_sizes and vis_offsets
            and idx and costs_c and betas_c and counts):
        raise MemoryError()

    total_adm = 0
    total_vis = 0
    for i in range(k):
        adm_sizes[i] = len(admissible[i])
        adm_offsets[i] = total_adm
        total_adm += adm_sizes[i]
        vis_sizes[i] = len(visit[i])
        vis_offsets[i] = total_vis
        total_vis += vis_sizes[i]
        costs_c[i] = <double> costs[i]
        betas_c[i] = <double> betas[i]
        idx[i] = 0
    adm_flat = <double *> malloc(total_adm * sizeof(double))
    vis_flat = <double *> malloc(total_vis * sizeof(double))
    try:
        if not (adm_flat and vis_flat):
            raise MemoryError()
        for i in range(k):
            seq = admissible[i]
            for j in range(adm_sizes[i]):
                adm_flat[adm_offsets[i] + j] = <double> seq[j]
            seq = visit[i]
            for j in range(vis_sizes[i]):
                vis_flat[vis_offsets[i] + j] = <double> seq[j]

        out = []
        while True:
            n = 0.0
            b = 0.0
            for i in range(k):
                counts[i] = vis_flat[vis_offsets[i] + idx[i]]
                n += counts[i]
                b += betas_c[i] * counts[i]
            acc = _acc(n, b, a_max, kappa, lam, floor)

            is_eq = True
            for i in range(k):
                if i == 0:
                    cur = acc - costs_c[i] * counts[i]
                else:
                    cur = -acc - costs_c[i] * counts[i]
                limit = cur + eps_gain
                for j in range(adm_sizes[i]):
                    c = adm_flat[adm_offsets[i] + j]
                    n2 = n - counts[i] + c
                    b2 = b + betas_c[i] * (c - counts[i])
                    acc2 = _acc(n2, b2, a_max, kappa, lam, floor)
                    if i == 0:
                        u2 = acc2 - costs_c[i] * c
                    else:
                        u2 = -acc2 - costs_c[i] * c
                    if u2 > limit:
                        is_eq = False
                        break
                if not is_eq:
                    break
            if is_eq:
                out.append(tuple(int(vis_flat[vis_offsets[i] + idx[i]]) for i in range(k)))

            pos = k - 1
            while pos >= 0:
                idx[pos] += 1
                if idx[pos] < vis_sizes[pos]:
                    break
                idx[pos] = 0
                pos -= 1
            if pos < 0:
                return out
    finally:
        free(adm_sizes); free(adm_offsets); free(vis_sizes); free(vis_offsets)
        free(idx); free(costs_c); free(betas_c); free(counts)
        free(adm_flat); free(vis_flat)
