"""The three desk-scale experiments behind the CLI.

Approximation-quality sweep (exact vs approximate degrees of freedom and
their criterion values), runtime scaling on the kinematics surrogate, and
the two-model confidence-band demo. All emit plain rows of Python values;
the CLI turns them into CSV.
"""

import math
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from threadpoolctl import threadpool_limits

from .datasets import Dataset, synth_kinlike, synth_polymix, synth_sinc
from .errors import InvalidInputError, KplsError
from .kernels import KernelSpec, center, center_targets, gram
from .nipals import fit as nipals_fit
from .pipeline import fit_kpls
from .selection import gmdl
from .sensitivity import dof_approx, dof_exact

# cubic-oracle guard for the approximation-quality sweep
DOF_EXPERIMENT_MAX_N = 500

DEFAULT_LADDER = tuple(range(100, 1001, 100))
CI_DEMO_MODELS = ((0.1, 15), (1.0, 9))


@dataclass
class ExperimentConfig:
    seed: int = 0
    n: int = 100
    sigma: Optional[float] = 0.1
    widths: Tuple[float, ...] = (0.01, 0.1, 1.0)
    m: int = 10
    m_star: int = 10
    m_max: int = 30
    level: float = 0.98
    source: str = "sinc"
    input_path: Optional[str] = None
    ladder: Tuple[int, ...] = DEFAULT_LADDER
    repeats: int = 3
    grid_points: int = 131
    kernel: str = "rbf"
    force: bool = False


@dataclass
class RuntimeRecord:
    n: int
    variant: str
    seconds: float
    fitted_components: int


def make_dataset(config: ExperimentConfig) -> Dataset:
    from .datasets import load_csv

    source = config.source
    if source == "sinc":
        return synth_sinc(config.n, config.sigma, config.seed)
    if source == "polymix":
        return synth_polymix(config.n, config.sigma, config.seed)
    if source == "kinlike":
        return synth_kinlike(config.n, config.seed)
    if source.startswith("csv:"):
        return load_csv(source[4:])
    if config.input_path:
        return load_csv(config.input_path)
    raise InvalidInputError(
        f"unknown dataset source {source!r}; use sinc, polymix, kinlike, or csv:<path>"
    )


def _m_max_sweep(m_star: int, m_max: int) -> List[int]:
    values = sorted(set(range(m_star, m_max + 1, 5)) | {m_max})
    return values


def run_dof_experiment(config: ExperimentConfig) -> List[dict]:
    """Exact and Ritz-approximate degrees of freedom over the demo grid.

    One row per (width, m_max, m) with both DoF variants and both
    criterion values; dof columns are nan where a configuration broke
    down or the criterion preconditions fail.
    """
    if config.n > DOF_EXPERIMENT_MAX_N and not config.force:
        raise InvalidInputError(
            f"n = {config.n} exceeds the cubic-oracle guard "
            f"({DOF_EXPERIMENT_MAX_N}); pass --force to run anyway"
        )
    dataset = make_dataset(config)
    sweep = _m_max_sweep(config.m_star, config.m_max)
    rows = []
    for width in config.widths:
        pipe = fit_kpls(
            dataset,
            KernelSpec(kind=config.kernel, width=width),
            m_max=min(config.m_max, dataset.n),
        )
        model = pipe.model
        y_c = pipe.y_centered
        yty = float(y_c @ y_c)
        n = dataset.n

        exact_cache = {}
        for m in range(1, config.m_star + 1):
            if m <= model.actual_m:
                try:
                    exact_cache[m] = dof_exact(pipe.K, y_c, model, m).dof
                except KplsError:
                    exact_cache[m] = math.nan
            else:
                exact_cache[m] = math.nan

        for m_max_value in sweep:
            for m in range(1, config.m_star + 1):
                d_exact = exact_cache[m]
                d_approx = math.nan
                if m <= model.actual_m:
                    try:
                        d_approx = dof_approx(
                            pipe.K, y_c, model, m, min(m_max_value, model.actual_m)
                        ).dof
                    except KplsError:
                        d_approx = math.nan
                rss = (
                    float(np.sum((y_c - model.yhat[:, m - 1]) ** 2))
                    if m <= model.actual_m
                    else math.nan
                )

                def _criterion(dof_value):
                    if not math.isfinite(dof_value) or not math.isfinite(rss):
                        return math.nan
                    try:
                        return gmdl(rss, dof_value, n, yty)
                    except KplsError:
                        return math.nan

                rows.append(
                    {
                        "width": width,
                        "m_max": m_max_value,
                        "m": m,
                        "dof_exact": d_exact,
                        "dof_approx": d_approx,
                        "gmdl_exact": _criterion(d_exact),
                        "gmdl_approx": _criterion(d_approx),
                    }
                )
    return rows


def _time_once(fn) -> float:
    """One timing, inner-repeated when below reliable clock resolution."""
    t0 = time.perf_counter()
    fn()
    elapsed = time.perf_counter() - t0
    if elapsed < 0.02:
        inner = max(2, int(math.ceil(0.05 / max(elapsed, 1e-9))))
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        elapsed = (time.perf_counter() - t0) / inner
    return elapsed


def _measure_cells(cells: dict, repeats: int) -> dict:
    """Fastest of `repeats` interleaved timings per cell, after one
    discarded warm-up round.

    Interleaving rounds over all cells means slow drifts of the machine
    (thermal state, noisy neighbors) hit every cell alike and cancel in
    the fitted exponents; the per-cell minimum then discards one-sided
    scheduling noise, which only ever adds time.
    """
    for fn in cells.values():
        fn()
    times = {key: [] for key in cells}
    for _ in range(repeats):
        for key, fn in cells.items():
            times[key].append(_time_once(fn))
    return {key: min(vals) for key, vals in times.items()}


def run_runtime_benchmark(config: ExperimentConfig):
    """Wall time of the exact and approximate DoF pipelines over the ladder.

    Sub-samples are nested prefixes of one kinematics draw. Timing runs
    pinned to one BLAS thread so the fitted exponents reflect the
    algorithms, not core count. Returns (records, slopes) where slopes
    are least-squares log-log exponents over the upper half of the
    ladder.
    """
    ladder = tuple(config.ladder)
    if not ladder or list(ladder) != sorted(ladder):
        raise InvalidInputError("ladder sizes must be ascending")
    full = synth_kinlike(max(ladder), config.seed)
    width = 2.0  # fixed moderate width for the 8-D angle inputs
    m = config.m
    m_max = config.m_max

    records: List[RuntimeRecord] = []
    with threadpool_limits(limits=1):
        cells = {}
        components = {}
        for n in ladder:
            subset = Dataset(X=full.X[:n], y=full.y[:n])
            K = center(gram(KernelSpec("rbf", width), subset.X))
            y_c, _ = center_targets(subset.y)

            def run_exact(K=K, y_c=y_c):
                model = nipals_fit(K, y_c, m)
                dof_exact(K, y_c, model, min(m, model.actual_m))

            def run_approx(K=K, y_c=y_c):
                model = nipals_fit(K, y_c, m_max)
                dof_approx(
                    K, y_c, model, min(m, model.actual_m), model.actual_m
                )

            model_probe = nipals_fit(K, y_c, m_max)
            cells[(n, "exact")] = run_exact
            cells[(n, "approx")] = run_approx
            components[(n, "exact")] = min(m, model_probe.actual_m)
            components[(n, "approx")] = model_probe.actual_m

        seconds = _measure_cells(cells, config.repeats)
        for n in ladder:
            for variant in ("exact", "approx"):
                records.append(
                    RuntimeRecord(
                        n=n,
                        variant=variant,
                        seconds=seconds[(n, variant)],
                        fitted_components=components[(n, variant)],
                    )
                )

    slopes = {}
    for variant in ("exact", "approx"):
        pts = [(r.n, r.seconds) for r in records if r.variant == variant]
        upper = pts[len(pts) // 2 :]
        if len(upper) < 2:
            upper = pts[-2:]
        if len(upper) < 2:
            slopes[variant] = math.nan
            continue
        logs_n = np.log([p[0] for p in upper])
        logs_t = np.log([p[1] for p in upper])
        slopes[variant] = float(np.polyfit(logs_n, logs_t, 1)[0])
    return records, slopes


def run_ci_demo(config: ExperimentConfig) -> List[dict]:
    """Confidence bands of the two demo models over a 1-D grid.

    Mixture-input polynomial data with unit noise, bands at the
    configured level; grid spans [-6, 7]. config.sigma is the noise level
    used for the bands (None estimates it from the residuals).
    """
    dataset = synth_polymix(config.n, sigma=1.0, seed=config.seed)
    grid = np.linspace(-6.0, 7.0, config.grid_points)
    rows = []
    for width, m in CI_DEMO_MODELS:
        pipe = fit_kpls(dataset, KernelSpec("rbf", width), m_max=m)
        m_used = min(m, pipe.model.actual_m)
        band = pipe.band(grid, m=m_used, level=config.level, sigma=config.sigma)
        label = f"rbf_w{width:g}_m{m}"
        for i, x in enumerate(grid):
            rows.append(
                {
                    "model": label,
                    "level": config.level,
                    "x": float(x),
                    "prediction": band.prediction[i],
                    "stderr": band.stderr[i],
                    "lower": band.lower[i],
                    "upper": band.upper[i],
                }
            )
    return rows
