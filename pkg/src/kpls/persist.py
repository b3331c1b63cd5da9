"""Model persistence in a flat, versioned text format.

Scalars as key=value lines, arrays as named CSV blocks with explicit
shapes, floats at 17 significant digits. The training inputs are stored
too; the gram matrix is recomputed on load (it is deterministic given
the data and the kernel), so files stay O(n m) instead of O(n^2).
"""

import numpy as np

from .datasets import Dataset
from .errors import CsvParseError
from .kernels import KernelSpec, center, gram
from .nipals import KplsModel
from .pipeline import KplsPipeline

FORMAT_TAG = "kpls-model-v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_block(handle, name: str, arr: np.ndarray) -> None:
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    handle.write(f"[{name} {arr.shape[0]} {arr.shape[1]}]\n")
    for row in arr:
        handle.write(",".join(_fmt(v) for v in row) + "\n")


def save_model(path, pipeline: KplsPipeline) -> None:
    ds, model, spec = pipeline.dataset, pipeline.model, pipeline.spec
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(FORMAT_TAG + "\n")
        handle.write(f"kind={spec.kind}\n")
        handle.write(f"width={_fmt(spec.width)}\n")
        handle.write(f"centered={int(pipeline.K.centered)}\n")
        handle.write(f"n={ds.n}\n")
        handle.write(f"d={ds.d}\n")
        handle.write(f"m_max={model.m_max}\n")
        handle.write(f"actual_m={model.actual_m}\n")
        handle.write(f"y_mean={_fmt(model.y_mean)}\n")
        handle.write(f"breakdown={int(model.breakdown)}\n")
        _write_block(handle, "X", ds.X)
        _write_block(handle, "y", ds.y)
        _write_block(handle, "T", model.T)
        _write_block(handle, "R", model.R)
        _write_block(handle, "L", model.L)
        _write_block(handle, "knorms", model.knorms)
        _write_block(handle, "yhat", model.yhat)
        _write_block(handle, "alpha", model.alpha)


def _parse_block_header(line: str, line_no: int):
    body = line.strip()[1:-1].split()
    if len(body) != 3:
        raise CsvParseError(f"malformed block header {line.strip()!r}", line=line_no)
    return body[0], int(body[1]), int(body[2])


def load_model(path) -> KplsPipeline:
    scalars = {}
    blocks = {}
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != FORMAT_TAG:
        raise CsvParseError(
            f"not a {FORMAT_TAG} file (bad or missing format tag)", line=1
        )
    i = 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("["):
            name, rows, cols = _parse_block_header(line, i + 1)
            data = []
            for r in range(rows):
                i += 1
                try:
                    cells = lines[i].split(",")
                    data.append([float(c) for c in cells])
                except (IndexError, ValueError):
                    raise CsvParseError(
                        f"bad row {r + 1} of block {name}", line=i + 1
                    ) from None
                if len(cells) != cols:
                    raise CsvParseError(
                        f"block {name} row {r + 1}: expected {cols} columns",
                        line=i + 1,
                    )
            blocks[name] = np.array(data)
        elif "=" in line:
            key, value = line.split("=", 1)
            scalars[key.strip()] = value.strip()
        elif line.strip():
            raise CsvParseError(f"unexpected line {line!r}", line=i + 1)
        i += 1

    required_blocks = ("X", "y", "T", "R", "L", "knorms", "yhat", "alpha")
    for name in required_blocks:
        if name not in blocks:
            raise CsvParseError(f"missing block [{name}]", line=len(lines))

    spec = KernelSpec(kind=scalars["kind"], width=float(scalars["width"]))
    dataset = Dataset(X=blocks["X"], y=blocks["y"].ravel())
    K = gram(spec, dataset.X)
    if scalars["centered"] == "1":
        K = center(K)
    model = KplsModel(
        n=int(scalars["n"]),
        m_max=int(scalars["m_max"]),
        actual_m=int(scalars["actual_m"]),
        T=blocks["T"],
        R=blocks["R"],
        L=blocks["L"],
        knorms=blocks["knorms"].ravel(),
        yhat=blocks["yhat"],
        alpha=blocks["alpha"],
        y_mean=float(scalars["y_mean"]),
        breakdown=scalars.get("breakdown", "0") == "1",
    )
    return KplsPipeline(dataset=dataset, spec=spec, K=K, model=model)
