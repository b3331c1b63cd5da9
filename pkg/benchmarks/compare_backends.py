"""Times the hot kernels under the compiled core and the numpy fallback.

Usage: python benchmarks/compare_backends.py [n ...]

Covers the three backend primitives (rbf gram assembly, the kernel
deflation sweep, double centering) plus a full fit that exercises them
together. Prints one table row per size with the speedup of the compiled
core; runs whatever backends are importable.
"""

import sys
import time

import numpy as np
from threadpoolctl import threadpool_limits

from kpls import _core_fallback
from kpls.datasets import synth_kinlike
from kpls.kernels import KernelSpec, center, gram
from kpls.nipals import fit


def best_of(fn, repeats=5):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_backend(impl, X, K_raw, t, u, c):
    times = {}
    times["rbf_gram"] = best_of(lambda: impl.rbf_gram(X, 2.0))
    work = K_raw.copy()
    times["deflate"] = best_of(lambda: impl.deflate_inplace(work, t, u, c))
    work2 = K_raw.copy()
    times["center"] = best_of(lambda: impl.center_inplace(work2))
    return times


def main(argv):
    sizes = [int(a) for a in argv] or [400, 800, 1600]
    impls = [("numpy", _core_fallback)]
    try:
        from kpls import _core

        impls.append(("compiled", _core))
    except ImportError:
        print("compiled core not built; timing the numpy fallback only")

    header = f"{'n':>6} {'kernel':<10}" + "".join(f"{name:>12}" for name, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)

    with threadpool_limits(limits=1):
        for n in sizes:
            ds = synth_kinlike(n, seed=0)
            X = np.ascontiguousarray(ds.X)
            K_raw = _core_fallback.rbf_gram(X, 2.0)
            rng = np.random.default_rng(0)
            t = rng.standard_normal(n)
            t /= np.linalg.norm(t)
            u = K_raw @ t
            c = float(t @ u)

            rows = {name: bench_backend(impl, X, K_raw, t, u, c)
                    for name, impl in impls}
            for kernel_name in ("rbf_gram", "deflate", "center"):
                line = f"{n:>6} {kernel_name:<10}"
                for name, _ in impls:
                    line += f"{rows[name][kernel_name] * 1e3:>10.2f}ms"
                if len(impls) == 2:
                    ratio = rows["numpy"][kernel_name] / rows["compiled"][kernel_name]
                    line += f"{ratio:>9.2f}x"
                print(line)

            # end-to-end: gram + centering + a 10-component fit
            import kpls.backend as backend_mod

            def full_fit(impl):
                saved = (
                    backend_mod.rbf_gram,
                    backend_mod.linear_gram,
                    backend_mod.deflate_inplace,
                    backend_mod.center_inplace,
                )
                backend_mod.rbf_gram = impl.rbf_gram
                backend_mod.linear_gram = impl.linear_gram
                backend_mod.deflate_inplace = impl.deflate_inplace
                backend_mod.center_inplace = impl.center_inplace
                try:
                    K = center(gram(KernelSpec("rbf", 2.0), ds.X))
                    fit(K, ds.y - ds.y.mean(), 10)
                finally:
                    (
                        backend_mod.rbf_gram,
                        backend_mod.linear_gram,
                        backend_mod.deflate_inplace,
                        backend_mod.center_inplace,
                    ) = saved

            line = f"{n:>6} {'full fit':<10}"
            fit_times = {}
            for name, impl in impls:
                fit_times[name] = best_of(lambda impl=impl: full_fit(impl), repeats=3)
                line += f"{fit_times[name] * 1e3:>10.2f}ms"
            if len(impls) == 2:
                line += f"{fit_times['numpy'] / fit_times['compiled']:>9.2f}x"
            print(line)


if __name__ == "__main__":
    main(sys.argv[1:])
