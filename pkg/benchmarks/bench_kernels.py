"""Time the compiled kernels against the numpy fallback on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are loaded side by side; every workload is also checked for
equal results before it is timed.
"""

import argparse
import time

import numpy as np

from dissoc import _pykernels, backend
from dissoc.groupoid import all_tables_array, decode, named_table


def workloads(rng):
    nand = decode(2, 14).entries
    d = named_table("D").entries
    left = rng.integers(0, 2, size=(64, 256), dtype=np.uint8)
    blocks = np.ascontiguousarray(nand[:, rng.integers(0, 2, size=512)].astype(np.uint8))
    vecs = rng.integers(0, 3, size=(400, 729), dtype=np.uint8)
    stack = rng.integers(0, 2, size=(2048, 14, 16), dtype=np.uint8)
    tables = all_tables_array(2)[rng.integers(0, 16, size=4096)]
    va = rng.integers(0, 2, size=(4096, 8), dtype=np.uint8)
    vb = rng.integers(0, 2, size=(4096, 4), dtype=np.uint8)
    word = rng.integers(0, 3, size=60).tolist()
    aut = [[0] * 12 for _ in range(12)]
    for s in range(11):
        aut[s][s + 1] = 1 << (s % 3)
    aut[11][6] = 0b101
    return [
        ("fanout 64x256 -> 512", "fanout", (left, blocks)),
        ("max_pair_agreement 400 x 3^6", "max_pair_agreement", (vecs,)),
        ("batch_max_agreement 2048 tables", "batch_max_agreement", (stack,)),
        ("batch_compose 4096 tables", "batch_compose", (tables, va, vb)),
        ("prefix_value_masks len 60, n=3", "prefix_value_masks", (word, d)),
        ("automaton_closure 12 states", "automaton_closure", (aut, d)),
    ]


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    native = backend.available().get("native")
    if native is None:
        print("compiled kernels are not built; only the fallback is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':36s} {'python':>10s} {'native':>10s} {'speedup':>8s}")
    for title, name, inputs in workloads(rng):
        t_py, out_py = best_of(getattr(_pykernels, name), inputs, args.repeat)
        if native is None:
            print(f"{title:36s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        t_nat, out_nat = best_of(getattr(native, name), inputs, args.repeat)
        if not same(out_py, out_nat):
            raise SystemExit(f"backends disagree on {name}")
        print(f"{title:36s} {t_py * 1e3:9.2f}ms {t_nat * 1e3:9.2f}ms {t_py / t_nat:7.1f}x")


if __name__ == "__main__":
    main()
