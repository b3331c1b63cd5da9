import math

import numpy as np
import pytest

import kpls
from kpls.errors import InvalidInputError
from kpls.selection import SelectionGrid, gmdl, select


class TestGmdl:
    def test_null_fit_branch(self):
        n, yty = 50, 20.0
        expect = 0.5 * n * math.log(yty / n) + 0.5 * math.log(n)
        assert gmdl(yty, 5.0, n, yty) == pytest.approx(expect, rel=1e-14)

    def test_hand_evaluated_value(self):
        # n=100, yty=100, rss=1, dof=10: S = 1/90, F = 99 * 90 / 10 = 891
        expect = 50.0 * math.log(1.0 / 90.0) + 5.0 * math.log(891.0) + math.log(100.0)
        assert gmdl(1.0, 10.0, 100, 100.0) == pytest.approx(expect, rel=1e-14)
        assert expect == pytest.approx(-186.42359119317112, rel=1e-12)

    def test_increasing_in_dof_for_good_fits(self):
        values = [gmdl(1.0, d, 100, 100.0) for d in np.linspace(2, 20, 10)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_perfect_fit_dominates(self):
        assert gmdl(0.0, 5.0, 50, 10.0) == -math.inf

    def test_preconditions(self):
        with pytest.raises(InvalidInputError):
            gmdl(1.0, 0.0, 50, 10.0)
        with pytest.raises(InvalidInputError):
            gmdl(1.0, 50.0, 50, 10.0)
        with pytest.raises(InvalidInputError):
            gmdl(-1.0, 5.0, 50, 10.0)
        with pytest.raises(InvalidInputError):
            gmdl(10.0, 5.0, 50, 1.0)


class TestSelect:
    def test_single_configuration_chosen(self):
        ds = kpls.synth_sinc(50, 0.1, seed=0)
        grid = SelectionGrid(widths=(1.0,), m_star=1, m_max=5)
        report = select(ds, grid)
        assert report.chosen_width == 1.0
        assert report.chosen_m == 1

    def test_report_minimum_is_chosen(self):
        ds = kpls.synth_sinc(60, 0.1, seed=1)
        grid = SelectionGrid(widths=(0.1, 1.0), m_star=6, m_max=12)
        report = select(ds, grid)
        valid = [e for e in report.entries if e.gmdl is not None]
        best = min(e.gmdl for e in valid)
        assert report.chosen_gmdl == best

    def test_deterministic(self):
        ds = kpls.synth_sinc(60, 0.1, seed=2)
        grid = SelectionGrid(widths=(0.1, 1.0), m_star=5, m_max=10)
        r1 = select(ds, grid)
        r2 = select(ds, grid)
        assert (r1.chosen_width, r1.chosen_m) == (r2.chosen_width, r2.chosen_m)
        assert [e.gmdl for e in r1.entries] == [e.gmdl for e in r2.entries]

    def test_exact_and_approx_agree_at_full_krylov_dimension(self):
        # linear kernel with a slow-converging spectrum: the fit reaches the
        # full centered rank, where the Ritz traces equal the kernel traces
        rng = np.random.default_rng(3)
        n = 40
        U, _ = np.linalg.qr(rng.standard_normal((n, n)))
        sv = np.sqrt(np.logspace(-6, 0, n))
        X = U @ np.diag(sv) @ np.linalg.qr(rng.standard_normal((n, n)))[0]
        y = rng.standard_normal(n)
        ds = kpls.Dataset(X=X, y=y)
        grid = SelectionGrid(widths=(1.0,), m_star=6, m_max=n)
        rep_a = select(ds, grid, use_approx_dof=True, kernel_kind="linear")
        rep_e = select(ds, grid, use_approx_dof=False, kernel_kind="linear")
        assert (rep_a.chosen_width, rep_a.chosen_m) == (
            rep_e.chosen_width,
            rep_e.chosen_m,
        )
        for ea, ee in zip(rep_a.entries, rep_e.entries):
            if ea.dof is not None and ee.dof is not None:
                assert ea.dof == pytest.approx(ee.dof, abs=1e-5)

    def test_empty_grid_rejected(self):
        with pytest.raises(InvalidInputError):
            SelectionGrid(widths=(), m_star=3, m_max=5)
        with pytest.raises(InvalidInputError):
            SelectionGrid(widths=(1.0,), m_star=6, m_max=5)

    def test_selection_quality_on_decaying_spectra(self):
        # smoke version of the statistical acceptance check: with widths
        # whose spectra decay, the Ritz-approximated criterion picks models
        # close to the grid-best held-out error
        wins = 0
        for seed in range(5):
            ds = kpls.synth_sinc(100, 0.1, seed=seed)
            test = kpls.synth_sinc(300, 0.1, seed=900 + seed)
            grid = SelectionGrid(widths=(0.1, 0.5, 1.0), m_star=10, m_max=25)
            report = select(ds, grid)
            best = np.inf
            chosen = np.inf
            for width in grid.widths:
                pipe = kpls.fit_kpls(ds, kpls.KernelSpec("rbf", width), m_max=25)
                for m in range(1, min(10, pipe.model.actual_m) + 1):
                    mse = float(np.mean((pipe.predict(test.X, m) - test.y) ** 2))
                    best = min(best, mse)
                    if width == report.chosen_width and m == report.chosen_m:
                        chosen = mse
            wins += chosen <= 2.0 * best
        assert wins >= 4
