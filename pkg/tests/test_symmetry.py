import numpy as np
import pytest

from demonscatter.errors import AsymmetricGridError
from demonscatter.kernels import OpticalParameters, build_kernel
from demonscatter.nonlocal_solver import NonlocalKernel
from demonscatter.symmetry import (
    SymmetryClass,
    classify,
    predicted_relations,
    residual,
    transform,
    verify_predictions,
)
from demonscatter.units import RabiProfile, make_grid

PAPER_PROFILE = RabiProfile(b=165.874, c=103.876, x0=0.16455)


def random_smooth(grid, rng, nbumps=4, scale=3.0):
    x = grid.points
    env = np.exp(-((x / 0.55) ** 6))
    env[np.abs(x) > 1.4] = 0.0
    A = np.zeros((grid.n, grid.n), dtype=complex)
    for _ in range(nbumps):
        cx, cy = rng.uniform(-0.5, 0.5, 2)
        w = rng.uniform(0.15, 0.35)
        amp = (rng.normal() + 1j * rng.normal()) * scale
        A += amp * np.exp(
            -(((x[:, None] - cx) ** 2 + (x[None, :] - cy) ** 2) / w**2)
        )
    return A * env[:, None] * env[None, :]


def symmetrized(A, cls):
    return 0.5 * (A + transform(A, cls))


GRID = make_grid(-1.5, 1.5, 1201)
RNG = np.random.default_rng(7)
BASE = random_smooth(GRID, RNG)


def test_transform_involution():
    for cls in SymmetryClass:
        assert np.array_equal(transform(transform(BASE, cls), cls), BASE)


def test_real_symmetric_even_kernel_all_residuals_zero():
    x = GRID.points
    K = np.exp(-((x[:, None]) ** 2 + (x[None, :]) ** 2) / 0.1)
    K[np.abs(x) > 1.4, :] = 0.0
    K[:, np.abs(x) > 1.4] = 0.0
    kernel = NonlocalKernel(grid=GRID, K=K)
    for cls in SymmetryClass:
        # grid points are not exactly sign-symmetric in floating point, so
        # allow roundoff-level residuals on the parity classes
        assert residual(kernel, cls) < 1e-14


def test_symmetrized_kernels_have_zero_residual():
    for cls in SymmetryClass:
        if cls is SymmetryClass.Trivial:
            continue
        kernel = NonlocalKernel(grid=GRID, K=symmetrized(BASE, cls))
        assert residual(kernel, cls) < 1e-13 * np.max(np.abs(BASE))


def test_paper_kernel_trivial_only():
    params = OpticalParameters(
        delta=91.211, gamma=0.0, profile=PAPER_PROFILE, E=32.0
    )
    kernel = build_kernel(params, GRID)
    report = classify(kernel)
    assert report.trivial_only
    kmax = np.max(np.abs(kernel.K))
    for name, r in report.residuals.items():
        if name != "Trivial":
            assert r > 1e-3 * kmax


def test_pt_odd_imaginary_local_kernel():
    # i f(x) with f real odd on the diagonal: PT residual 0, Hermiticity > 0
    x = GRID.points
    f = x * np.exp(-((x / 0.4) ** 2))
    f[np.abs(x) > 1.201] = 0.0
    sigma = 0.05
    da = np.exp(-(((x[:, None] - x[None, :]) / sigma) ** 2))
    mask = (np.abs(x) <= 1.201).astype(float)
    K = 1j * 0.5 * (f[:, None] + f[None, :]) * da * mask[:, None] * mask[None, :]
    kernel = NonlocalKernel(grid=GRID, K=K)
    assert residual(kernel, SymmetryClass.PT) < 1e-13
    assert residual(kernel, SymmetryClass.Hermiticity) > 1e-3


def test_local_real_kernel_tr_pseudohermitian():
    x = GRID.points
    f = np.exp(-((x / 0.4) ** 2))
    f[np.abs(x) > 1.201] = 0.0
    da = np.exp(-(((x[:, None] - x[None, :]) / 0.05) ** 2))
    mask = (np.abs(x) <= 1.201).astype(float)
    K = 0.5 * (f[:, None] + f[None, :]) * da * mask[:, None] * mask[None, :]
    kernel = NonlocalKernel(grid=GRID, K=K)
    assert residual(kernel, SymmetryClass.TimeReversalPseudohermiticity) == 0.0


def test_parity_requires_symmetric_grid():
    grid = make_grid(-1.0, 2.0, 301)
    x = grid.points
    K = np.exp(-(((x[:, None] - 0.5) ** 2 + (x[None, :] - 0.5) ** 2) / 0.05))
    K[np.abs(x - 0.5) > 0.45, :] = 0.0
    K[:, np.abs(x - 0.5) > 0.45] = 0.0
    kernel = NonlocalKernel(grid=grid, K=K)
    with pytest.raises(AsymmetricGridError):
        residual(kernel, SymmetryClass.Parity)
    report = classify(kernel)
    assert np.isnan(report.residuals["Parity"])
    assert not report.verdicts["Parity"]


def test_predicted_relations():
    assert predicted_relations({SymmetryClass.Hermiticity}) == {
        "|T|=|Tt|", "|R|=|Rt|", "D=0",
    }
    assert predicted_relations({SymmetryClass.TimeReversalPseudohermiticity}) == {
        "|T|=|Tt|", "D=(|Rt|^2-|R|^2)/2",
    }
    assert predicted_relations({SymmetryClass.TimeReversal}) == {
        "|R|=|Rt|", "D=(|T|^2-|Tt|^2)/2",
    }
    assert predicted_relations({SymmetryClass.Trivial}) == set()


def test_closure_hermiticity_and_tr():
    A = BASE
    K = symmetrized(symmetrized(A, SymmetryClass.Hermiticity), SymmetryClass.TimeReversal)
    kernel = NonlocalKernel(grid=GRID, K=K)
    r_h = residual(kernel, SymmetryClass.Hermiticity)
    r_t = residual(kernel, SymmetryClass.TimeReversal)
    r_tp = residual(kernel, SymmetryClass.TimeReversalPseudohermiticity)
    assert r_tp <= r_h + r_t + 1e-12


@pytest.mark.parametrize(
    "cls",
    [c for c in SymmetryClass if c is not SymmetryClass.Trivial],
)
def test_verify_predictions_per_class(cls):
    kernel = NonlocalKernel(grid=GRID, K=symmetrized(BASE, cls))
    rep = verify_predictions(kernel, 6.0)
    assert cls in rep.report.satisfied
    assert rep.all_hold, rep.violations


def test_verify_predictions_paper_kernel():
    grid = make_grid(-1.5, 1.5, 2001)
    params = OpticalParameters(
        delta=91.211, gamma=0.0, profile=PAPER_PROFILE, E=32.0
    )
    kernel = build_kernel(params, grid)
    rep = verify_predictions(kernel, 8.0)
    assert rep.report.trivial_only
    assert rep.violations == {}
    t2, r2, tt2, rt2 = rep.amplitudes.probabilities
    D = 0.5 * (t2 - r2 + rt2 - tt2)
    assert D == pytest.approx(0.5, abs=0.02)
