"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--n 4096] [--rows 8] [--repeat 200]

Times the two hot kernels on their own and a full batched loop propagation
(9.5 m of HB1500, 2000 steps) with each backend swapped into the solver.
"""
import argparse
import timeit

import numpy as np

from sagnacsq import _core, params
from sagnacsq._core import _fallback
from sagnacsq.nlse import TimeGrid, make_sech_envelope, split_step

try:
    from sagnacsq._core import _kernels
except ImportError:
    _kernels = None


def per_call(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def bench_kernels(mod, n, rows, repeat):
    rng = np.random.default_rng(0)
    a = np.ascontiguousarray(rng.standard_normal((rows, n)) + 1j * rng.standard_normal((rows, n)))
    f = np.exp(1j * rng.standard_normal(n))
    return {
        "spm_phase": per_call(lambda: mod.spm_phase(a, 1e-9), repeat),
        "apply_spectral": per_call(lambda: mod.apply_spectral(a, np.conj(f)), repeat),
    }


def bench_loop(mod, n, rows):
    grid = TimeGrid(n, 16.0)
    env = make_sech_envelope(grid, params.PulseSpec(100.0, energy_pj=146.3))
    batch = np.stack([env.samples * s for s in np.linspace(0.2, 1.5, rows)])
    fiber = params.HB1500
    saved = _core.spm_phase, _core.apply_spectral
    _core.spm_phase, _core.apply_spectral = mod.spm_phase, mod.apply_spectral
    try:
        run = lambda: split_step(batch, grid.dt, fiber.beta2, fiber.gamma, fiber.length_m, 2000)
        out = run()
        return min(timeit.repeat(run, number=1, repeat=3)), out
    finally:
        _core.spm_phase, _core.apply_spectral = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--rows", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    backends = [("python", _fallback)]
    if _kernels is not None:
        backends.insert(0, ("cython", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"kernels on a {args.rows} x {args.n} complex array (us per call)")
    results = {name: bench_kernels(mod, args.n, args.rows, args.repeat) for name, mod in backends}
    for kernel in ("spm_phase", "apply_spectral"):
        row = "  ".join(f"{name} {results[name][kernel] * 1e6:9.1f}" for name, _ in backends)
        print(f"  {kernel:<15} {row}")

    print(f"loop propagation, {args.rows} pulses, 2000 steps (s)")
    outs = {}
    for name, mod in backends:
        t, outs[name] = bench_loop(mod, args.n, args.rows)
        print(f"  {name:<8} {t:7.3f}")
    if len(outs) == 2:
        diff = np.max(np.abs(outs["cython"] - outs["python"])) / np.max(np.abs(outs["python"]))
        print(f"  max relative difference between backends: {diff:.1e}")


if __name__ == "__main__":
    main()
