"""Channel bookkeeping and the flux-normalized S-matrix container.

The S-matrix for N open channels is the 2N x 2N block matrix

    S = [[T, Rt],
         [R, Tt]]

with T, R the transmission/reflection amplitude matrices for left incidence
and Tt, Rt their right-incidence counterparts.  Amplitudes are flux
normalized (plane waves scaled by 1/sqrt(k)), so squared moduli are
probabilities.  Only open channels appear in S; closed channels live inside
the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllChannelsClosedError,
    ChannelIndexError,
    ShapeMismatchError,
)

#: Unitarity tolerance for analytically constructed S-matrices.
TOL_CONSTRUCTED = 1e-12

#: Unitarity tolerance for solver-produced S-matrices (discretization error
#: dominates).
TOL_SOLVER = 1e-8


@dataclass(frozen=True)
class ChannelSet:
    """Asymptotic channels with internal-state thresholds eps_j.

    Thresholds are kept in the order supplied.  They may be complex (an
    eliminated lossy level contributes -i gamma/2); a channel can only be
    open if its threshold is real.
    """

    thresholds: tuple
    labels: tuple = None

    def __post_init__(self):
        eps = tuple(complex(e) for e in self.thresholds)
        if len(eps) == 0:
            raise ValueError("at least one channel required")
        if not all(np.isfinite([e.real for e in eps]) & np.isfinite([e.imag for e in eps])):
            raise ValueError("thresholds must be finite")
        object.__setattr__(self, "thresholds", eps)
        if self.labels is None:
            object.__setattr__(
                self, "labels", tuple(f"ch{i}" for i in range(len(eps)))
            )
        elif len(self.labels) != len(eps):
            raise ValueError("labels/thresholds length mismatch")

    @property
    def n_channels(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class ChannelKinematics:
    """Wavenumbers and open/closed status of every channel at energy E.

    k_j = sqrt(2 (E - eps_j)) with the branch Im k_j >= 0; open channels
    have real k_j > 0, closed ones purely imaginary k_j.
    """

    energy: float
    k: np.ndarray = field(repr=False)
    open_mask: np.ndarray = field(repr=False)

    @property
    def n_open(self) -> int:
        return int(np.count_nonzero(self.open_mask))

    @property
    def open_indices(self) -> np.ndarray:
        return np.flatnonzero(self.open_mask)

    @property
    def k_open(self) -> np.ndarray:
        return self.k[self.open_mask].real


def branch_sqrt(z):
    """sqrt with branch Im >= 0 (and Re >= 0 on the real line)."""
    r = np.sqrt(np.asarray(z, dtype=complex))
    flip = (r.imag < 0) | ((r.imag == 0) & (r.real < 0))
    return np.where(flip, -r, r)


def kinematics(channels: ChannelSet, E: float) -> ChannelKinematics:
    """Channel wavenumbers and open/closed flags at total energy E."""
    if not np.isfinite(E):
        raise ValueError("energy must be finite")
    eps = np.array(channels.thresholds, dtype=complex)
    k = branch_sqrt(2.0 * (E - eps))
    open_mask = (eps.imag == 0.0) & (E > eps.real)
    if not open_mask.any():
        raise AllChannelsClosedError(
            f"all channels closed at E={E} (min threshold "
            f"{min(e.real for e in channels.thresholds)})"
        )
    return ChannelKinematics(energy=float(E), k=k, open_mask=open_mask)


@dataclass(frozen=True)
class SMatrix:
    """2N x 2N flux-normalized S-matrix stored as its four N x N blocks."""

    T: np.ndarray
    R: np.ndarray
    Tt: np.ndarray
    Rt: np.ndarray

    def __post_init__(self):
        blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in
                  (self.T, self.R, self.Tt, self.Rt)]
        n = blocks[0].shape[0]
        for b in blocks:
            if b.shape != (n, n):
                raise ShapeMismatchError(
                    f"all blocks must be {n}x{n}, got shapes "
                    f"{[bb.shape for bb in blocks]}"
                )
        for name, b in zip(("T", "R", "Tt", "Rt"), blocks):
            object.__setattr__(self, name, b)

    @property
    def n_open(self) -> int:
        return self.T.shape[0]

    def full(self) -> np.ndarray:
        """Assemble the 2N x 2N matrix [[T, Rt], [R, Tt]]."""
        return np.block([[self.T, self.Rt], [self.R, self.Tt]])

    @classmethod
    def from_full(cls, S: np.ndarray) -> "SMatrix":
        S = np.asarray(S, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise ShapeMismatchError(f"need a square 2Nx2N matrix, got {S.shape}")
        n = S.shape[0] // 2
        return cls(T=S[:n, :n], Rt=S[:n, n:], R=S[n:, :n], Tt=S[n:, n:])


@dataclass(frozen=True)
class ChannelAmplitudes:
    """The four amplitudes of one selected channel i0."""

    T: complex
    R: complex
    Tt: complex
    Rt: complex

    @property
    def probabilities(self):
        """(|T|^2, |R|^2, |Tt|^2, |Rt|^2)."""
        return (
            abs(self.T) ** 2,
            abs(self.R) ** 2,
            abs(self.Tt) ** 2,
            abs(self.Rt) ** 2,
        )


def unitarity_defect(S: SMatrix) -> float:
    """max-norm deviation of S†S and SS† from the identity."""
    M = S.full()
    eye = np.eye(M.shape[0])
    d1 = np.max(np.abs(M.conj().T @ M - eye))
    d2 = np.max(np.abs(M @ M.conj().T - eye))
    return float(max(d1, d2))


def channel_row_column_sums(S: SMatrix, i: int):
    """The four flux sums of channel i; each equals 1 for unitary S.

    Returns (sum_k |T_ki|^2 + |R_ki|^2, sum_k |Tt_ki|^2 + |Rt_ki|^2,
             sum_k |T_ik|^2 + |Rt_ik|^2, sum_k |Tt_ik|^2 + |R_ik|^2).
    """
    n = S.n_open
    if not 0 <= i < n:
        raise ChannelIndexError(f"channel {i} out of range for {n} open channels")
    col_left = float(np.sum(np.abs(S.T[:, i]) ** 2 + np.abs(S.R[:, i]) ** 2))
    col_right = float(np.sum(np.abs(S.Tt[:, i]) ** 2 + np.abs(S.Rt[:, i]) ** 2))
    row_out_right = float(np.sum(np.abs(S.T[i, :]) ** 2 + np.abs(S.Rt[i, :]) ** 2))
    row_out_left = float(np.sum(np.abs(S.Tt[i, :]) ** 2 + np.abs(S.R[i, :]) ** 2))
    return col_left, col_right, row_out_right, row_out_left


def extract_channel(S: SMatrix, i0: int) -> ChannelAmplitudes:
    """Diagonal amplitudes T, R, Tt, Rt of channel i0."""
    n = S.n_open
    if not 0 <= i0 < n:
        raise ChannelIndexError(f"channel {i0} out of range for {n} open channels")
    return ChannelAmplitudes(
        T=complex(S.T[i0, i0]),
        R=complex(S.R[i0, i0]),
        Tt=complex(S.Tt[i0, i0]),
        Rt=complex(S.Rt[i0, i0]),
    )


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases
