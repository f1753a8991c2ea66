# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled next-reaction core.

Hot loop of the stochastic simulator.  Must stay arithmetically identical
to ``_core_py.run_core``: same operations, same order, IEEE doubles, no
fused multiply-adds (the build passes -ffp-contract=off).
"""

from libc.math cimport INFINITY

COMPLETED = 0
EVENT_CAP = 1
NEED_ARRIVALS = 2
ABSORBED = 3
TMAX = 4

DEF MAXR = 32


def run_core(
    long long[:, ::1] stoich,
    int[::1] kinds,
    long long[:, ::1] orders,
    double[:, ::1] params,
    int[::1] mm_species,
    long long[::1] x,
    double[::1] scal,
    double[::1] T,
    double[::1] next_arr,
    long long[::1] arr_idx,
    list arrivals,
    long long[::1] n_avail,
    long long[::1] counters,
    int sum_species,
    double[::1] thresholds,
    double[::1] y_out,
    long long event_cap,
    double t_max,
    bint stop_on_target,
):
    cdef int n_reactions = <int> stoich.shape[0]
    cdef int n_species = <int> stoich.shape[1]
    cdef int n_thr = <int> thresholds.shape[0]
    if n_reactions > MAXR:
        raise ValueError("compiled core supports at most %d reactions" % MAXR)

    cdef const double* aptr[MAXR]
    cdef double[::1] mv
    cdef int j, s, e, bj
    for j in range(n_reactions):
        mv = arrivals[j]
        aptr[j] = &mv[0]

    cdef double t = scal[0]
    cdef long long event_count = counters[0]
    cdef long long thr_idx = counters[1]
    cdef double prop[MAXR]
    cdef double a, v, mn, dt, best, t_next, cap
    cdef long long o
    cdef int status = -1
    cdef int channel = -1

    while True:
        if event_count >= event_cap:
            status = EVENT_CAP
            break

        for j in range(n_reactions):
            if kinds[j] == 0:
                a = params[j, 0]
                for s in range(n_species):
                    o = orders[j, s]
                    if o > 0:
                        v = <double> x[s]
                        for e in range(<int> o):
                            a = a * (v - e)
                prop[j] = a
            else:
                v = <double> x[mm_species[j]]
                cap = params[j, 1]
                mn = v if v < cap else cap
                prop[j] = params[j, 0] * mn / (params[j, 2] + v) * v

        best = INFINITY
        bj = -1
        for j in range(n_reactions):
            a = prop[j]
            if a > 0.0:
                dt = (next_arr[j] - T[j]) / a
                if dt < best:
                    best = dt
                    bj = j

        if bj < 0:
            status = ABSORBED
            break

        t_next = t + best
        if t_next > t_max:
            t = t_max
            status = TMAX
            break

        for j in range(n_reactions):
            if j != bj and prop[j] > 0.0:
                T[j] = T[j] + prop[j] * best
        T[bj] = next_arr[bj]
        t = t_next

        for s in range(n_species):
            x[s] = x[s] + stoich[bj, s]
        event_count += 1

        while thr_idx < n_thr and (<double> x[sum_species]) >= thresholds[thr_idx]:
            y_out[thr_idx] = t
            thr_idx += 1

        arr_idx[bj] += 1
        if stop_on_target and thr_idx == n_thr:
            status = COMPLETED
            break
        if arr_idx[bj] >= n_avail[bj]:
            status = NEED_ARRIVALS
            channel = bj
            break
        next_arr[bj] = aptr[bj][arr_idx[bj]]

    scal[0] = t
    counters[0] = event_count
    counters[1] = thr_idx
    return status, channel
