"""Command-line front end.

Subcommands: synth, fit, dof, select, ci, bench. All tabular output is
CSV with a header row, UTF-8, LF line endings, floats at 17 significant
digits. Exit codes: 0 success, 1 usage error, 2 numerical failure.
A key=value config file (--config) supplies defaults; explicit flags win.
KPLS_THREADS caps the BLAS thread pool for the whole process.
"""

import argparse
import math
import os
import sys
from typing import List, Optional

import numpy as np
from threadpoolctl import threadpool_limits

from . import backend
from .datasets import dataset_header, load_csv
from .errors import KplsError, UsageError
from .experiments import (
    DEFAULT_LADDER,
    ExperimentConfig,
    run_ci_demo,
    run_dof_experiment,
    run_runtime_benchmark,
)
from .kernels import KernelSpec
from .persist import save_model
from .pipeline import fit_kpls
from .selection import SelectionGrid, select
from .sensitivity import dof_approx, dof_exact

SUBCOMMANDS = ("synth", "fit", "dof", "select", "ci", "bench")


def _fmt(value) -> str:
    if isinstance(value, float) or isinstance(value, np.floating):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: Optional[str], header: List[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(cell) for cell in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _info(message: str) -> None:
    print(message, file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers: {text!r}")


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers: {text!r}")


def load_config_file(path: str) -> dict:
    """Read a key=value config file; '#' starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(
                    f"{path}:{line_no}: expected key=value, got {raw.strip()!r}"
                )
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="kpls", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="|".join(SUBCOMMANDS))

    def add_common(p):
        p.add_argument("--kernel", choices=("rbf", "linear"), default=None)
        p.add_argument("--width", type=float, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--m-max", type=int, default=None)
        p.add_argument("--m-star", type=int, default=None)
        p.add_argument("--level", type=float, default=None)
        p.add_argument("--sigma", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--input", default=None, help="dataset CSV (x1..xd,y)")
        p.add_argument("--output", default=None, help="output path (default stdout)")
        p.add_argument("--config", default=None, help="key=value config file")

    p_synth = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    add_common(p_synth)
    p_synth.add_argument(
        "--dataset", choices=("sinc", "polymix", "kinlike"), default=None
    )

    p_fit = sub.add_parser("fit", help="fit a model and persist it")
    add_common(p_fit)

    p_dof = sub.add_parser("dof", help="exact and approximate degrees of freedom")
    add_common(p_dof)
    p_dof.add_argument(
        "--sweep",
        action="store_true",
        help="emit the full width x budget x m approximation-quality table",
    )
    p_dof.add_argument("--widths", default=None, help="comma-separated widths (sweep)")

    p_select = sub.add_parser("select", help="gMDL grid search")
    add_common(p_select)
    p_select.add_argument("--widths", default=None, help="comma-separated widths")
    p_select.add_argument("--model-out", default=None, help="persist chosen model here")
    p_select.add_argument(
        "--exact-dof", action="store_true", help="score with exact degrees of freedom"
    )

    p_ci = sub.add_parser("ci", help="confidence-band demo over two models")
    add_common(p_ci)
    p_ci.add_argument("--grid-points", type=int, default=None)

    p_bench = sub.add_parser("bench", help="runtime scaling of exact vs approx")
    add_common(p_bench)
    p_bench.add_argument("--ladder", default=None, help="comma-separated sizes")
    p_bench.add_argument("--repeats", type=int, default=None)
    p_bench.add_argument(
        "--force", action="store_true", help="lift the cubic-oracle size guard"
    )

    p_dof.add_argument(
        "--force", action="store_true", help="lift the cubic-oracle size guard"
    )
    return parser


def _resolve(args, config: dict, key: str, default, caster=None):
    """Flag value if given, else config-file value, else default."""
    value = getattr(args, key, None)
    if value is None or value is False:
        raw = config.get(key)
        if raw is not None:
            value = caster(raw) if caster else raw
        elif value is None:
            value = default
    return value


def _dataset_from_args(args, config):
    seed = _resolve(args, config, "seed", 0, int)
    n = _resolve(args, config, "n", None, int)
    sigma = _resolve(args, config, "sigma", None, float)
    source = _resolve(args, config, "dataset", "sinc")
    input_path = _resolve(args, config, "input", None)
    if input_path:
        return load_csv(input_path)
    from .datasets import synth_kinlike, synth_polymix, synth_sinc

    if source == "sinc":
        return synth_sinc(n or 100, 0.1 if sigma is None else sigma, seed)
    if source == "polymix":
        return synth_polymix(n or 40, 1.0 if sigma is None else sigma, seed)
    if source == "kinlike":
        return synth_kinlike(n or 1000, seed)
    raise UsageError(f"unknown dataset {source!r}")


def cmd_synth(args, config) -> int:
    dataset = _dataset_from_args(args, config)
    output = _resolve(args, config, "output", None)
    rows = [list(x) + [yv] for x, yv in zip(dataset.X, dataset.y)]
    write_csv(output, dataset_header(dataset.d), rows)
    return 0


def _fit_from_args(args, config, default_m_max=10):
    dataset = _dataset_from_args(args, config)
    kind = _resolve(args, config, "kernel", "rbf")
    width = _resolve(args, config, "width", 1.0, float)
    m_max = _resolve(args, config, "m_max", default_m_max, int)
    spec = KernelSpec(kind=kind, width=width)
    return fit_kpls(dataset, spec, m_max=min(m_max, dataset.n))


def cmd_fit(args, config) -> int:
    output = _resolve(args, config, "output", None)
    if not output:
        raise UsageError("fit requires --output for the persisted model")
    pipe = _fit_from_args(args, config)
    save_model(output, pipe)
    _info(
        f"fitted {pipe.model.actual_m} of {pipe.model.m_max} components "
        f"(kernel {pipe.spec.kind}, width {pipe.spec.width:g}) -> {output}"
    )
    return 0


def cmd_dof(args, config) -> int:
    from .experiments import DOF_EXPERIMENT_MAX_N

    force = bool(getattr(args, "force", False)) or config.get("force") == "1"
    if getattr(args, "sweep", False) or config.get("sweep") == "1":
        return _cmd_dof_sweep(args, config, force)
    pipe = _fit_from_args(args, config, default_m_max=20)
    if pipe.dataset.n > DOF_EXPERIMENT_MAX_N and not force:
        raise UsageError(
            f"n = {pipe.dataset.n} exceeds the cubic-oracle guard "
            f"({DOF_EXPERIMENT_MAX_N}); pass --force to run anyway"
        )
    m = _resolve(args, config, "m", 5, int)
    m = min(m, pipe.model.actual_m)
    y_c = pipe.y_centered
    exact = dof_exact(pipe.K, y_c, pipe.model, m)
    approx = dof_approx(pipe.K, y_c, pipe.model, m, pipe.model.actual_m)
    header = [
        "m",
        "m_max_used",
        "dof_exact",
        "dof_approx",
        "term_trace_exact",
        "term_trace_approx",
        "term_latent",
        "term_residual",
        "plus_m",
    ]
    row = [
        m,
        approx.m_max_used,
        exact.dof,
        approx.dof,
        exact.term_trace,
        approx.term_trace,
        exact.term_latent,
        exact.term_residual,
        exact.plus_m,
    ]
    write_csv(_resolve(args, config, "output", None), header, [row])
    return 0


def _cmd_dof_sweep(args, config, force: bool) -> int:
    widths_raw = getattr(args, "widths", None) or config.get("widths")
    widths = _parse_float_list(widths_raw) if widths_raw else (0.01, 0.1, 1.0)
    cfg = ExperimentConfig(
        seed=_resolve(args, config, "seed", 0, int),
        n=_resolve(args, config, "n", 100, int),
        sigma=_resolve(args, config, "sigma", 0.1, float),
        widths=widths,
        m_star=_resolve(args, config, "m_star", 10, int),
        m_max=_resolve(args, config, "m_max", 30, int),
        kernel=_resolve(args, config, "kernel", "rbf"),
        source=_resolve(args, config, "dataset", "sinc"),
        input_path=_resolve(args, config, "input", None),
        force=force,
    )
    rows = run_dof_experiment(cfg)
    header = ["width", "m_max", "m", "dof_exact", "dof_approx",
              "gmdl_exact", "gmdl_approx"]
    write_csv(
        _resolve(args, config, "output", None),
        header,
        [[r[k] for k in header] for r in rows],
    )
    return 0


def cmd_select(args, config) -> int:
    dataset = _dataset_from_args(args, config)
    widths_raw = getattr(args, "widths", None) or config.get("widths")
    widths = _parse_float_list(widths_raw) if widths_raw else (0.01, 0.1, 1.0)
    m_star = _resolve(args, config, "m_star", 10, int)
    m_max = _resolve(args, config, "m_max", max(20, m_star), int)
    m_star = min(m_star, dataset.n - 1)
    m_max = min(max(m_max, m_star), dataset.n)
    grid = SelectionGrid(widths=widths, m_star=m_star, m_max=m_max)
    use_approx = not bool(getattr(args, "exact_dof", False))
    report = select(dataset, grid, use_approx_dof=use_approx)

    header = ["width", "m", "rss", "dof", "gmdl", "chosen"]
    rows = []
    for entry in report.entries:
        rows.append(
            [
                entry.width,
                entry.m,
                entry.rss,
                math.nan if entry.dof is None else entry.dof,
                math.nan if entry.gmdl is None else entry.gmdl,
                int(
                    entry.width == report.chosen_width and entry.m == report.chosen_m
                ),
            ]
        )
    write_csv(_resolve(args, config, "output", None), header, rows)
    _info(
        f"chosen width {report.chosen_width:g}, m = {report.chosen_m} "
        f"(gMDL {report.chosen_gmdl:.6g})"
    )

    model_out = getattr(args, "model_out", None) or config.get("model_out")
    if model_out:
        pipe = fit_kpls(
            dataset,
            KernelSpec(kind="rbf", width=report.chosen_width),
            m_max=report.chosen_m,
        )
        save_model(model_out, pipe)
        _info(f"persisted chosen model -> {model_out}")
    return 0


def cmd_ci(args, config) -> int:
    cfg = ExperimentConfig(
        seed=_resolve(args, config, "seed", 0, int),
        n=_resolve(args, config, "n", 40, int),
        sigma=_resolve(args, config, "sigma", 1.0, float),
        level=_resolve(args, config, "level", 0.98, float),
        grid_points=_resolve(args, config, "grid_points", 131, int),
    )
    rows = run_ci_demo(cfg)
    header = ["model", "level", "x", "prediction", "stderr", "lower", "upper"]
    write_csv(
        _resolve(args, config, "output", None),
        header,
        [[r[k] for k in header] for r in rows],
    )
    _info(
        "sensitivity convention: exact bidiagonal coupling solves "
        "(finite-difference validated)"
    )
    return 0


def cmd_bench(args, config) -> int:
    ladder_raw = getattr(args, "ladder", None) or config.get("ladder")
    ladder = _parse_int_list(ladder_raw) if ladder_raw else DEFAULT_LADDER
    cfg = ExperimentConfig(
        seed=_resolve(args, config, "seed", 0, int),
        m=_resolve(args, config, "m", 10, int),
        m_max=_resolve(args, config, "m_max", 30, int),
        ladder=ladder,
        repeats=_resolve(args, config, "repeats", 3, int),
    )
    records, slopes = run_runtime_benchmark(cfg)
    header = ["n", "variant", "seconds"]
    rows = [[r.n, r.variant, r.seconds] for r in records]
    write_csv(_resolve(args, config, "output", None), header, rows)
    _info(f"backend: {backend.NAME}")
    for variant in ("exact", "approx"):
        _info(f"fitted log-log slope ({variant}) = {slopes[variant]:.3f}")
    return 0


_HANDLERS = {
    "synth": cmd_synth,
    "fit": cmd_fit,
    "dof": cmd_dof,
    "select": cmd_select,
    "ci": cmd_ci,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        threads = os.environ.get("KPLS_THREADS")
        if threads is not None:
            if not threads.isdigit() or int(threads) < 1:
                raise UsageError("KPLS_THREADS must be a positive integer")

        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        config = {}
        if getattr(args, "config", None):
            config = load_config_file(args.config)

        if threads is not None:
            with threadpool_limits(limits=int(threads)):
                return _HANDLERS[args.command](args, config)
        return _HANDLERS[args.command](args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KplsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
