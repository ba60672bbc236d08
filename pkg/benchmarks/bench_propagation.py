"""Benchmark the propagation stepping loop: numba kernel vs numpy fallback.

The workload is the real one: the six-level gate at its reference operating
point, whose pulse spans ~1.3e5 cavity-coupling times and is covered by a
precomputed one-step matrix applied a few thousand times.  Run with

    python benchmarks/bench_propagation.py [--steps N]

The pure-numpy path is what you get with CAVGATE_NO_NUMBA=1.
"""

import argparse
import time

import numpy as np

from cavgate import _kernels
from cavgate.hilbert import build_basis
from cavgate.metrics import embed_qubit_state
from cavgate.propagator import plan
from cavgate.raman_gate import RamanParams, build_generator_raman, raman_pulse_duration


def time_loop(fn, step, psi, counts, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(step, psi, counts)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20000, help="total matrix applications")
    ap.add_argument("--records", type=int, default=200, help="trajectory records")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    params = RamanParams(delta=1000.0, omega_diag=2.0, kappa=1e-3,
                         omega20=0.05, omega21=0.05)
    basis = build_basis("raman", 2)
    gen = build_generator_raman(params, basis)
    t_gate = raman_pulse_duration(params)

    print(f"dim = {basis.dim}, pulse length = {t_gate:.4g} (units of 1/g)")
    print(f"numba available: {_kernels.NUMBA_AVAILABLE}, enabled: {_kernels.numba_enabled()}")

    start = time.perf_counter()
    p = plan(gen, t_gate)
    print(f"one-step matrix (plan): {time.perf_counter() - start:.3f} s, "
          f"dt = {p.dt:.4g}, total plan steps = {p.total_steps}")

    psi = np.ascontiguousarray(embed_qubit_state(basis, [0, 0, 1, 0]).amplitudes)
    step = np.ascontiguousarray(p.step_matrix)
    per = args.steps // args.records
    counts = np.full(args.records, per, dtype=np.int64)

    # compile before timing
    _kernels._apply_steps_numba(step, psi, counts[:1].copy())

    t_numba, out_numba = time_loop(_kernels._apply_steps_numba, step, psi, counts, args.repeats)
    t_numpy, out_numpy = time_loop(_kernels._apply_steps_numpy, step, psi, counts, args.repeats)

    n = args.records * per
    print(f"\n{n} applications of a {basis.dim}x{basis.dim} complex step matrix:")
    print(f"  numba : {t_numba:.4f} s  ({1e6 * t_numba / n:.2f} us/step)")
    print(f"  numpy : {t_numpy:.4f} s  ({1e6 * t_numpy / n:.2f} us/step)")
    print(f"  speedup: {t_numpy / t_numba:.2f}x")
    print(f"  paths agree to {np.abs(out_numba - out_numpy).max():.2e}")


if __name__ == "__main__":
    main()
