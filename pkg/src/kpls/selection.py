"""Model selection: the gMDL criterion and grid search over width x components.

gMDL follows the two-branch mixture form: with S = rss/(n - dof) and
F = (yty - rss)/(dof S), the code length is
(n/2) ln S + (dof/2) ln F + ln n when F > 1, and the null-model length
(n/2) ln(yty/n) + (1/2) ln n otherwise.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidInputError, KplsError, SelectionFailedError
from .kernels import KernelSpec, center, center_targets, gram
from .nipals import fit
from .sensitivity import dof_approx, dof_exact
from .datasets import Dataset


def gmdl(rss: float, dof: float, n: int, yty: float) -> float:
    """Generalized minimum description length of a fit.

    rss is the residual sum of squares, dof the (possibly fractional)
    model degrees of freedom, yty the squared norm of the (centered)
    response. A zero rss returns -inf, the limit of the F > 1 branch.
    """
    if not 0.0 < dof < n:
        raise InvalidInputError(f"dof must lie in (0, n = {n}), got {dof}")
    if rss < 0:
        raise InvalidInputError("rss must be nonnegative")
    if yty < rss - 1e-9:
        raise InvalidInputError("yty must be at least rss")
    if rss == 0.0:
        return -math.inf
    S = rss / (n - dof)
    F = (yty - rss) / (dof * S)
    if F > 1.0:
        return 0.5 * n * math.log(S) + 0.5 * dof * math.log(F) + math.log(n)
    return 0.5 * n * math.log(yty / n) + 0.5 * math.log(n)


@dataclass(frozen=True)
class SelectionGrid:
    """Search grid: kernel widths crossed with component counts 1..m_star."""

    widths: Tuple[float, ...]
    m_star: int
    m_max: int

    def __post_init__(self):
        if not self.widths:
            raise InvalidInputError("grid needs at least one width")
        if not 1 <= self.m_star <= self.m_max:
            raise InvalidInputError("need 1 <= m_star <= m_max")
        object.__setattr__(self, "widths", tuple(float(w) for w in self.widths))


@dataclass
class SelectionEntry:
    width: float
    m: int
    rss: float
    dof: Optional[float]
    gmdl: Optional[float]
    note: str = ""


@dataclass
class SelectionReport:
    entries: List[SelectionEntry]
    chosen_width: float
    chosen_m: int
    chosen_gmdl: float
    runner_up_gap: Optional[float] = None
    diagnostics: List[str] = field(default_factory=list)


def select(
    dataset: Dataset,
    grid: SelectionGrid,
    use_approx_dof: bool = True,
    kernel_kind: str = "rbf",
    center_data: bool = True,
) -> SelectionReport:
    """Fit once per width, score every truncation level, return the argmin.

    Ties are broken deterministically: smaller gMDL, then smaller m, then
    smaller width. Configurations whose degrees of freedom fall outside
    (0, n) are kept in the report with a note but excluded from the
    argmin; if nothing remains the whole selection fails.
    """
    entries: List[SelectionEntry] = []
    diagnostics: List[str] = []
    y = dataset.y
    if center_data:
        y_c, _ = center_targets(y)
    else:
        y_c = np.asarray(y, dtype=float)
    n = dataset.n
    yty = float(y_c @ y_c)

    for width in grid.widths:
        spec = KernelSpec(kind=kernel_kind, width=width)
        K = gram(spec, dataset.X)
        if center_data:
            K = center(K)
        try:
            model = fit(K, y_c, min(grid.m_max, n), allow_uncentered=not center_data)
        except KplsError as exc:
            diagnostics.append(f"width {width}: fit failed: {exc}")
            continue
        if model.actual_m < grid.m_max:
            diagnostics.append(
                f"width {width}: Krylov space exhausted at "
                f"{model.actual_m} components"
            )
        m_top = min(grid.m_star, model.actual_m)
        for m in range(1, m_top + 1):
            rss = float(np.sum((y_c - model.yhat[:, m - 1]) ** 2))
            note = ""
            dof_val = None
            gmdl_val = None
            try:
                if use_approx_dof:
                    dof_val = dof_approx(K, y_c, model, m, model.actual_m).dof
                else:
                    dof_val = dof_exact(K, y_c, model, m).dof
                gmdl_val = gmdl(rss, dof_val, n, yty)
            except KplsError as exc:
                note = str(exc)
            entries.append(
                SelectionEntry(
                    width=width, m=m, rss=rss, dof=dof_val, gmdl=gmdl_val, note=note
                )
            )

    scored = [e for e in entries if e.gmdl is not None and math.isfinite(e.gmdl)]
    scored_or_perfect = scored + [
        e for e in entries if e.gmdl is not None and e.gmdl == -math.inf
    ]
    if not scored_or_perfect:
        raise SelectionFailedError(
            "no grid configuration produced a valid criterion value",
            diagnostics=diagnostics + [e.note for e in entries if e.note],
        )

    best = min(scored_or_perfect, key=lambda e: (e.gmdl, e.m, e.width))
    others = sorted(e.gmdl for e in scored_or_perfect if e is not best)
    gap = (others[0] - best.gmdl) if others else None
    return SelectionReport(
        entries=entries,
        chosen_width=best.width,
        chosen_m=best.m,
        chosen_gmdl=best.gmdl,
        runner_up_gap=gap,
        diagnostics=diagnostics,
    )
