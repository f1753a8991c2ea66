"""Benchmark the compiled simulation kernel against the pure-Python core.

Runs the full enzyme network at a fixed parameter point with both
backends and reports events per second, then checks that the two
produce bit-identical summaries from the same seed.

Usage: python benchmarks/bench_simulators.py [--runs N] [--seed S]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mfinfer.gillespie import backend
from mfinfer.gillespie.enzyme import EnzymePair
from mfinfer.streams import StreamFactory

THETA = (50.0, 50.0, 1.0)


def run_batch(pair: EnzymePair, n_runs: int, seed: int):
    factory = StreamFactory(seed)
    events = 0
    summaries = []
    start = time.perf_counter()
    for i in range(1, n_runs + 1):
        out = pair.simulate_hi(THETA, factory.iteration(i))
        events += out.event_count
        summaries.append(out.y)
    elapsed = time.perf_counter() - start
    return elapsed, events, np.vstack(summaries)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not backend.compiled_available():
        print("compiled kernel not built; benchmarking the python core only")
        backends = ["python"]
    else:
        backends = ["compiled", "python"]

    results = {}
    for name in backends:
        pair = EnzymePair(use_backend=name)
        elapsed, events, summaries = run_batch(pair, args.runs, args.seed)
        results[name] = (elapsed, events, summaries)
        rate = events / elapsed if elapsed > 0 else float("inf")
        print(
            f"{name:>8}: {args.runs} runs, {events} events, "
            f"{elapsed:.3f} s, {rate / 1e6:.2f} M events/s"
        )

    if len(results) == 2:
        elapsed_c, events_c, y_c = results["compiled"]
        elapsed_p, events_p, y_p = results["python"]
        identical = events_c == events_p and np.array_equal(y_c, y_p)
        print(f"bit-identical summaries: {identical}")
        if elapsed_c > 0:
            print(f"speedup: {elapsed_p / elapsed_c:.1f}x")
        if not identical:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
