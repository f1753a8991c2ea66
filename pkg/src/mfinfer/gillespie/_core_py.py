"""Pure-Python next-reaction core.

Implements the same resumable contract as the compiled kernel in
``_core.pyx`` with identical arithmetic (same operations in the same
order on IEEE doubles), so both backends produce bit-identical
trajectories from the same Poisson paths.
"""

from __future__ import annotations

COMPLETED = 0
EVENT_CAP = 1
NEED_ARRIVALS = 2
ABSORBED = 3
TMAX = 4

_INF = float("inf")


def run_core(
    stoich,
    kinds,
    orders,
    params,
    mm_species,
    x,
    scal,
    T,
    next_arr,
    arr_idx,
    arrivals,
    n_avail,
    counters,
    sum_species,
    thresholds,
    y_out,
    event_cap,
    t_max,
    stop_on_target,
):
    n_reactions = stoich.shape[0]
    n_species = stoich.shape[1]
    n_thr = thresholds.shape[0]

    xs_ = [int(v) for v in x]
    T_ = [float(v) for v in T]
    na_ = [float(v) for v in next_arr]
    ai_ = [int(v) for v in arr_idx]
    avail_ = [int(v) for v in n_avail]
    t = float(scal[0])
    event_count = int(counters[0])
    thr_idx = int(counters[1])
    prop = [0.0] * n_reactions

    def _persist():
        for s in range(n_species):
            x[s] = xs_[s]
        for j in range(n_reactions):
            T[j] = T_[j]
            next_arr[j] = na_[j]
            arr_idx[j] = ai_[j]
        scal[0] = t
        counters[0] = event_count
        counters[1] = thr_idx

    while True:
        if event_count >= event_cap:
            _persist()
            return EVENT_CAP, -1

        for j in range(n_reactions):
            if kinds[j] == 0:
                a = float(params[j, 0])
                for s in range(n_species):
                    o = orders[j, s]
                    if o > 0:
                        v = float(xs_[s])
                        for e in range(o):
                            a = a * (v - e)
                prop[j] = a
            else:
                v = float(xs_[mm_species[j]])
                cap = float(params[j, 1])
                mn = v if v < cap else cap
                prop[j] = float(params[j, 0]) * mn / (float(params[j, 2]) + v) * v

        best = _INF
        bj = -1
        for j in range(n_reactions):
            a = prop[j]
            if a > 0.0:
                dt = (na_[j] - T_[j]) / a
                if dt < best:
                    best = dt
                    bj = j

        if bj < 0:
            _persist()
            return ABSORBED, -1

        t_next = t + best
        if t_next > t_max:
            t = t_max
            _persist()
            return TMAX, -1

        for j in range(n_reactions):
            if j != bj and prop[j] > 0.0:
                T_[j] = T_[j] + prop[j] * best
        T_[bj] = na_[bj]
        t = t_next

        for s in range(n_species):
            xs_[s] = xs_[s] + stoich[bj, s]
        event_count += 1

        while thr_idx < n_thr and float(xs_[sum_species]) >= float(thresholds[thr_idx]):
            y_out[thr_idx] = t
            thr_idx += 1

        ai_[bj] += 1
        if stop_on_target and thr_idx == n_thr:
            _persist()
            return COMPLETED, -1
        if ai_[bj] >= avail_[bj]:
            _persist()
            return NEED_ARRIVALS, bj
        na_[bj] = float(arrivals[bj][ai_[bj]])
