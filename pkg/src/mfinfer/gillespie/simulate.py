"""Exact stochastic simulation via the next-reaction method.

Reaction firings are the arrival times of unit-rate Poisson processes run
through each channel's integrated propensity (random time change).  Holding
a channel's path fixed while redrawing the others produces coupled
simulations; see ``enzyme.simulate_coupled_pair``.

Propensities may depend on time only through the state, so they are
constant between events and the integrated propensity advances by
``a_j * dt`` per step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _core_py, backend
from .network import ReactionNetwork
from .paths import UnitPoissonPath

__all__ = [
    "DEFAULT_EVENT_CAP",
    "DEFAULT_CLAMP_TIME",
    "SummarySpec",
    "Trajectory",
    "TrajectorySummary",
    "make_paths",
    "simulate",
    "simulate_direct",
]

DEFAULT_EVENT_CAP = 10**6
DEFAULT_CLAMP_TIME = 1e3

_INF = float("inf")


@dataclass(frozen=True)
class SummarySpec:
    """Trajectory summary: times at which a species count reaches each level."""

    species: int
    thresholds: tuple[float, ...]

    @staticmethod
    def counts(species: int, levels) -> "SummarySpec":
        return SummarySpec(species=species, thresholds=tuple(float(v) for v in levels))


@dataclass
class Trajectory:
    times: list[float]
    states: list[tuple[int, ...]]
    channels: list[int]


@dataclass
class TrajectorySummary:
    y: np.ndarray
    completed: bool
    clamped: bool
    final_state: tuple[int, ...]
    t_final: float
    event_count: int
    wallclock: float
    trajectory: Trajectory | None = field(default=None, repr=False)


def make_paths(network: ReactionNetwork, streams) -> list[UnitPoissonPath]:
    """One fresh unit-rate Poisson path per reaction channel."""
    return [UnitPoissonPath(streams.stream()) for _ in network.reactions]


def _coded_arrays(network: ReactionNetwork):
    n_r, n_s = network.n_reactions, network.n_species
    stoich = network.stoich_matrix()
    kinds = np.zeros(n_r, dtype=np.int32)
    orders = np.zeros((n_r, n_s), dtype=np.int64)
    params = np.zeros((n_r, 3), dtype=np.float64)
    mm_species = np.full(n_r, -1, dtype=np.int32)
    for j, r in enumerate(network.reactions):
        d = r.descriptor
        kinds[j] = d.kind
        params[j, 0] = d.rate
        if d.kind == 0:
            orders[j, : len(d.orders)] = d.orders
        else:
            params[j, 1] = d.cap
            params[j, 2] = d.half_sat
            mm_species[j] = d.species
    return stoich, kinds, orders, params, mm_species


def _finalize(
    y_out, thr_idx, n_thr, status, clamp_time, x, t, event_count, wallclock, record
):
    clamped = thr_idx < n_thr
    if clamped:
        y_out[thr_idx:] = clamp_time
    completed = (not clamped) if n_thr > 0 else status != _core_py.EVENT_CAP
    return TrajectorySummary(
        y=y_out,
        completed=completed,
        clamped=clamped,
        final_state=tuple(int(v) for v in x),
        t_final=t,
        event_count=event_count,
        wallclock=wallclock,
        trajectory=record,
    )


def simulate(
    network: ReactionNetwork,
    theta=None,
    *,
    streams=None,
    paths: list[UnitPoissonPath] | None = None,
    summary: SummarySpec | None = None,
    event_cap: int = DEFAULT_EVENT_CAP,
    t_max: float | None = None,
    clamp_time: float = DEFAULT_CLAMP_TIME,
    use_backend: str | None = None,
    record: bool = False,
) -> TrajectorySummary:
    """Simulate one trajectory.

    Either ``streams`` (an IterationStreams allocator, used to create fresh
    paths) or ``paths`` (one UnitPoissonPath per reaction, enabling
    cross-fidelity coupling) must be given.  When a summary is supplied the
    run stops once every threshold is reached; threshold times never
    reached are clamped to ``clamp_time``.
    """
    start = time.perf_counter()
    if paths is None:
        if streams is None:
            raise ValueError("either streams or paths must be provided")
        paths = make_paths(network, streams)
    if len(paths) != network.n_reactions:
        raise ValueError("need exactly one path per reaction")

    n_thr = len(summary.thresholds) if summary is not None else 0
    sum_species = summary.species if summary is not None else 0
    thresholds = np.array(
        summary.thresholds if summary is not None else (), dtype=np.float64
    )
    y_out = np.full(n_thr, np.nan, dtype=np.float64)
    stop_on_target = n_thr > 0
    t_cap = _INF if t_max is None else float(t_max)

    x = np.array(network.initial_state, dtype=np.int64)
    thr_idx = 0
    while thr_idx < n_thr and float(x[sum_species]) >= float(thresholds[thr_idx]):
        y_out[thr_idx] = 0.0
        thr_idx += 1

    if record or not network.all_coded():
        return _simulate_python(
            network,
            theta,
            paths,
            sum_species,
            thresholds,
            y_out,
            thr_idx,
            event_cap,
            t_cap,
            clamp_time,
            stop_on_target,
            record,
            start,
            x,
        )

    core = backend.get_core(use_backend)
    stoich, kinds, orders, params, mm_species = _coded_arrays(network)
    n_r = network.n_reactions
    T = np.zeros(n_r, dtype=np.float64)
    next_arr = np.empty(n_r, dtype=np.float64)
    arr_idx = np.zeros(n_r, dtype=np.int64)
    n_avail = np.empty(n_r, dtype=np.int64)
    for j, p in enumerate(paths):
        next_arr[j] = p.arrival(0)
        n_avail[j] = p.n_realized
    arrs = [p.buffer() for p in paths]
    scal = np.array([0.0], dtype=np.float64)
    counters = np.array([0, thr_idx], dtype=np.int64)

    if stop_on_target and thr_idx == n_thr:
        status = _core_py.COMPLETED
    else:
        while True:
            status, ch = core.run_core(
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
                arrs,
                n_avail,
                counters,
                sum_species,
                thresholds,
                y_out,
                event_cap,
                t_cap,
                stop_on_target,
            )
            if status != _core_py.NEED_ARRIVALS:
                break
            p = paths[ch]
            p.ensure(max(int(arr_idx[ch]) + 1, 2 * p.n_realized))
            arrs[ch] = p.buffer()
            n_avail[ch] = p.n_realized
            next_arr[ch] = p.arrival(int(arr_idx[ch]))

    return _finalize(
        y_out,
        int(counters[1]),
        n_thr,
        status,
        clamp_time,
        x,
        float(scal[0]),
        int(counters[0]),
        time.perf_counter() - start,
        None,
    )


def _simulate_python(
    network,
    theta,
    paths,
    sum_species,
    thresholds,
    y_out,
    thr_idx,
    event_cap,
    t_cap,
    clamp_time,
    stop_on_target,
    record,
    start,
    x0,
):
    """Readable next-reaction loop for callable propensities and recording.

    Arithmetic mirrors the resumable cores so a recorded run retraces a
    kernel run exactly.
    """
    n_r = network.n_reactions
    n_thr = thresholds.shape[0]
    props = [r.propensity for r in network.reactions]
    stoich = [r.change for r in network.reactions]
    x = [int(v) for v in x0]
    T = [0.0] * n_r
    arr_idx = [0] * n_r
    next_arr = [p.arrival(0) for p in paths]
    t = 0.0
    event_count = 0
    status = _core_py.ABSORBED
    traj = Trajectory([0.0], [tuple(x)], [-1]) if record else None

    if not (stop_on_target and thr_idx == n_thr):
        while True:
            if event_count >= event_cap:
                status = _core_py.EVENT_CAP
                break
            a = [float(props[j](x, theta, t)) for j in range(n_r)]
            best = _INF
            bj = -1
            for j in range(n_r):
                if a[j] > 0.0:
                    dt = (next_arr[j] - T[j]) / a[j]
                    if dt < best:
                        best = dt
                        bj = j
            if bj < 0:
                status = _core_py.ABSORBED
                break
            t_next = t + best
            if t_next > t_cap:
                t = t_cap
                status = _core_py.TMAX
                break
            for j in range(n_r):
                if j != bj and a[j] > 0.0:
                    T[j] = T[j] + a[j] * best
            T[bj] = next_arr[bj]
            t = t_next
            for s in range(len(x)):
                x[s] = x[s] + stoich[bj][s]
            event_count += 1
            if record:
                traj.times.append(t)
                traj.states.append(tuple(x))
                traj.channels.append(bj)
            while thr_idx < n_thr and float(x[sum_species]) >= float(
                thresholds[thr_idx]
            ):
                y_out[thr_idx] = t
                thr_idx += 1
            arr_idx[bj] += 1
            if stop_on_target and thr_idx == n_thr:
                status = _core_py.COMPLETED
                break
            next_arr[bj] = paths[bj].arrival(arr_idx[bj])
    else:
        status = _core_py.COMPLETED

    return _finalize(
        y_out,
        thr_idx,
        n_thr,
        status,
        clamp_time,
        x,
        t,
        event_count,
        time.perf_counter() - start,
        traj,
    )


def simulate_direct(
    network: ReactionNetwork,
    theta=None,
    *,
    rng: np.random.Generator,
    summary: SummarySpec | None = None,
    event_cap: int = DEFAULT_EVENT_CAP,
    t_max: float | None = None,
    clamp_time: float = DEFAULT_CLAMP_TIME,
) -> TrajectorySummary:
    """Direct-method simulator, kept as an independent cross-validation oracle.

    Statistically equivalent to ``simulate`` but draws a single exponential
    waiting time from the total propensity and picks the channel
    categorically, with its own randomness layout.
    """
    start = time.perf_counter()
    n_thr = len(summary.thresholds) if summary is not None else 0
    sum_species = summary.species if summary is not None else 0
    thresholds = np.array(
        summary.thresholds if summary is not None else (), dtype=np.float64
    )
    y_out = np.full(n_thr, np.nan, dtype=np.float64)
    stop_on_target = n_thr > 0
    t_cap = _INF if t_max is None else float(t_max)

    props = [r.propensity for r in network.reactions]
    stoich = [r.change for r in network.reactions]
    x = [int(v) for v in network.initial_state]
    t = 0.0
    event_count = 0
    thr_idx = 0
    while thr_idx < n_thr and float(x[sum_species]) >= float(thresholds[thr_idx]):
        y_out[thr_idx] = 0.0
        thr_idx += 1
    status = _core_py.COMPLETED if (stop_on_target and thr_idx == n_thr) else None

    while status is None:
        if event_count >= event_cap:
            status = _core_py.EVENT_CAP
            break
        a = [float(p(x, theta, t)) for p in props]
        a0 = math.fsum(a)
        if a0 <= 0.0:
            status = _core_py.ABSORBED
            break
        t_next = t + rng.standard_exponential() / a0
        if t_next > t_cap:
            t = t_cap
            status = _core_py.TMAX
            break
        t = t_next
        u = rng.random() * a0
        acc = 0.0
        bj = len(a) - 1
        for j, aj in enumerate(a):
            acc += aj
            if u < acc:
                bj = j
                break
        for s in range(len(x)):
            x[s] += stoich[bj][s]
        event_count += 1
        while thr_idx < n_thr and float(x[sum_species]) >= float(thresholds[thr_idx]):
            y_out[thr_idx] = t
            thr_idx += 1
        if stop_on_target and thr_idx == n_thr:
            status = _core_py.COMPLETED

    return _finalize(
        y_out,
        thr_idx,
        n_thr,
        status,
        clamp_time,
        x,
        t,
        event_count,
        time.perf_counter() - start,
        None,
    )
