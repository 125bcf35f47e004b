import numpy as np
import pytest

from demonscatter.errors import (
    NonPositiveEnergyError,
    ThresholdSingularityError,
    UnsupportedModelError,
)
from demonscatter.kernels import (
    OpticalParameters,
    build_kernel,
    compute_mu,
    compute_q,
    feshbach_reference,
    regenerate_kernel,
)
from demonscatter.local_solver import build_two_level_model
from demonscatter.units import RabiProfile, make_grid

PAPER_PROFILE = RabiProfile(b=165.874, c=103.876, x0=0.16455)


def test_mu_values():
    assert compute_mu(0.0, 0.0, 5.0) == 0.0
    assert compute_mu(91.211, 0.0, 32.0) == pytest.approx(91.211 / 32.0)
    assert compute_mu(0.0, 64.0, 32.0) == pytest.approx(1j)
    with pytest.raises(NonPositiveEnergyError):
        compute_mu(1.0, 0.0, 0.0)


def test_q_values():
    assert compute_q(32.0, 0.0).q == pytest.approx(8.0)
    bw = compute_q(32.0, 91.211 / 32.0)
    assert bw.q == pytest.approx(8.0 * np.sqrt(1 + 91.211 / 32.0))
    assert abs(bw.q - 15.698) < 1e-3
    below = compute_q(32.0, -2.0)
    assert below.q.real == pytest.approx(0.0, abs=1e-12)
    assert below.q.imag == pytest.approx(8.0)


def test_q_branch_property():
    rng = np.random.default_rng(9)
    for _ in range(200):
        mu = complex(rng.normal(scale=3), rng.normal(scale=3))
        E = float(rng.uniform(0.1, 100))
        assert compute_q(E, mu).q.imag >= 0


def test_zero_profile_zero_kernel():
    grid = make_grid(-1.5, 1.5, 101)
    params = OpticalParameters(
        delta=1.0, gamma=0.0, profile=RabiProfile(b=0.0, c=0.0), E=32.0
    )
    assert np.all(build_kernel(params, grid).K == 0)


def test_diagonal_negative_imaginary():
    grid = make_grid(-1.5, 1.5, 401)
    params = OpticalParameters(
        delta=91.211, gamma=0.0, profile=PAPER_PROFILE, E=32.0
    )
    K = build_kernel(params, grid).K
    d = np.diagonal(K)
    nz = np.abs(d) > 0
    assert np.all(d[nz].imag < 0)
    assert np.allclose(d[nz].real, 0.0, atol=1e-15 * np.max(np.abs(d)))


def test_kernel_not_hermitian():
    grid = make_grid(-1.5, 1.5, 401)
    params = OpticalParameters(
        delta=91.211, gamma=0.0, profile=PAPER_PROFILE, E=32.0
    )
    K = build_kernel(params, grid).K
    assert np.max(np.abs(K - np.conj(K.T))) > 1e-3 * np.max(np.abs(K))


def test_kernel_energy_dependent():
    grid = make_grid(-1.5, 1.5, 201)
    mk = lambda E: build_kernel(
        OpticalParameters(delta=91.211, gamma=0.0, profile=PAPER_PROFILE, E=E),
        grid,
    ).K
    assert np.max(np.abs(mk(32.0) - mk(20.0))) > 0


def test_q_zero_error():
    grid = make_grid(-1.5, 1.5, 101)
    params = OpticalParameters(
        delta=-32.0, gamma=0.0, profile=PAPER_PROFILE, E=32.0
    )
    with pytest.raises(ThresholdSingularityError):
        build_kernel(params, grid)


def test_regenerate_at_other_grid_and_energy():
    grid1 = make_grid(-1.5, 1.5, 101)
    grid2 = make_grid(-1.5, 1.5, 201)
    params = OpticalParameters(
        delta=91.211, gamma=0.0, profile=PAPER_PROFILE, E=32.0
    )
    k1 = build_kernel(params, grid1)
    k2 = regenerate_kernel(k1, grid=grid2, E=20.0)
    assert k2.grid.n == 201
    assert k2.descriptor.E == 20.0


def test_feshbach_matches_closed_form():
    grid = make_grid(-1.5, 1.5, 401)
    for gamma in (0.0, 64.0):
        model = build_two_level_model(PAPER_PROFILE, 91.211, gamma, grid)
        ref = feshbach_reference(model, 32.0)
        params = OpticalParameters(
            delta=91.211, gamma=gamma, profile=PAPER_PROFILE, E=32.0
        )
        K = build_kernel(params, grid).K
        rel = np.max(np.abs(ref.K - K)) / np.max(np.abs(K))
        assert rel < 1e-8


def test_feshbach_zero_coupling():
    grid = make_grid(-1.5, 1.5, 101)
    model = build_two_level_model(RabiProfile(b=0.0, c=0.0), 91.211, grid=grid)
    assert np.all(feshbach_reference(model, 32.0).K == 0)


def test_feshbach_gamma_case_q():
    # Delta=0, gamma=64, E=32: q = 8 (1+i)^{1/2}
    grid = make_grid(-1.5, 1.5, 201)
    model = build_two_level_model(PAPER_PROFILE, 0.0, 64.0, grid)
    ref = feshbach_reference(model, 32.0)
    params = OpticalParameters(
        delta=0.0, gamma=64.0, profile=PAPER_PROFILE, E=32.0
    )
    built = build_kernel(params, grid)
    assert np.allclose(ref.K, built.K, atol=1e-10 * np.max(np.abs(built.K)))
    q = compute_q(32.0, 1j).q
    assert q == pytest.approx(8.0 * np.sqrt(1 + 1j))


def test_feshbach_requires_two_channels():
    import numpy as np

    from demonscatter.channels import ChannelSet
    from demonscatter.local_solver import LocalPotentialModel

    grid = make_grid(-1.5, 1.5, 51)
    model = LocalPotentialModel(
        grid=grid, channels=ChannelSet(thresholds=(0.0,)),
        V=np.zeros((51, 1, 1)),
    )
    with pytest.raises(UnsupportedModelError):
        feshbach_reference(model, 32.0)


def test_optical_parameters_validation():
    with pytest.raises(ValueError):
        OpticalParameters(delta=0.0, gamma=-1.0, profile=PAPER_PROFILE, E=32.0)
    with pytest.raises(NonPositiveEnergyError):
        OpticalParameters(delta=0.0, gamma=0.0, profile=PAPER_PROFILE, E=0.0)
