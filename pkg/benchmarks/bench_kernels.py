"""Compare the compiled and pure-Python kernel back ends.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
fed identical inputs on every available back end; results are cross-checked
before timings are reported.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from avnlab import ghzlab, kernels
from avnlab.qcore import PauliString, random_state


def _cases():
    rng = np.random.default_rng(0)
    state = random_state(6, rng).amplitudes
    xm, zm, ny = PauliString.parse("x1y2z3x4y5z6", 6).masks()

    n_vars = 20
    masks = rng.integers(1, 1 << n_vars, size=6, dtype=np.uint64)
    rhs = rng.integers(0, 2, size=6).astype(np.uint8)
    signs = np.array([1, 1, 1, -1, 1, -1], dtype=np.int64)

    n_shots = 100_000
    cdf_first, cdf_second = ghzlab._shot_tables(0.9)
    settings = np.arange(n_shots, dtype=np.int64) % 4
    u1, u2 = rng.random(n_shots), rng.random(n_shots)

    return {
        "pauli_apply (6 qubits)": lambda k: k.pauli_apply(state, xm, zm, ny),
        f"scan_equations (2^{n_vars})": lambda k: k.scan_equations(masks, rhs, n_vars, 64),
        f"scan_bound (2^{n_vars})": lambda k: k.scan_bound(masks, signs, n_vars, int(masks[0]), 1),
        f"sample_outcomes ({n_shots} shots)":
            lambda k: k.sample_outcomes(settings, u1, u2, cdf_first, 2, cdf_second),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.allclose(a, b)) if isinstance(a, np.ndarray) else a == b


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(backends)}")
    print(f"{'kernel':32s}" + "".join(f"{name:>12s}" for name in backends) + "     speedup")
    for name, call in _cases().items():
        outputs = {b: call(mod) for b, mod in backends.items()}
        ref = outputs["python"]
        if not all(_same(ref, out) for out in outputs.values()):
            raise SystemExit(f"{name}: back ends disagree")
        times = {b: min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
                 for b, mod in backends.items()}
        row = f"{name:32s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
