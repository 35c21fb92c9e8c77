"""Orthogonal transformation between bare coordinates and normal modes.

Row index mu runs over the bare oscillators (0 = atom, k = 1..N the field
modes); column index r runs over the N+1 normal modes.  Each column is the
unit eigenvector of the coupled quadratic form belonging to Omega_r, fixed
by the normalization condition sum_mu (t_mu^r)^2 = 1 and the ratio

    t_k^r = eta omega_k / (omega_k^2 - Omega_r^2) * t_atom^r,

with the sign convention t_atom^r > 0.  The closed-form atom element

    t_atom^r = eta Omega_r / sqrt((Omega_r^2 - omega_bar^2)^2
               + (eta^2/2)(3 Omega_r^2 - omega_bar^2) + 4 g^2 Omega_r^2)

is the infinite-mode limit of that normalization; at finite truncation it
deviates from the explicitly normalized element by O(1/N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionHazard, DomainError, NormalizationFailure, RegimeViolation
from .spectrum import (
    DressedAtomParams,
    ModeSpectrum,
    truncated_mode_sum,
    truncated_mode_sum_sq,
)

__all__ = [
    "TransformMatrix",
    "atom_element",
    "field_element",
    "build_matrix",
    "atom_weights",
    "approx_small_cavity_elements",
]

# Dense (N+1)^2 storage: keep desk-scale by default.
MATRIX_MODE_CAP = 5000

_COLUMN_NORM_TOL = 1e-6
_ROW_ORTHO_TOL = 1e-6


@dataclass(frozen=True)
class TransformMatrix:
    """Dense orthogonal matrix t[mu, r] plus per-row closure diagnostics.

    ``tail_deficit[mu] = 1 - sum_r t[mu, r]^2`` measures how much of each
    bare oscillator's weight the retained normal modes fail to carry; for a
    self-consistent truncation it is at rounding level.
    """

    spectrum: ModeSpectrum
    t: np.ndarray
    tail_deficit: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "t", t)
        td = np.asarray(self.tail_deficit, dtype=float)
        td.setflags(write=False)
        object.__setattr__(self, "tail_deficit", td)
        n1 = self.spectrum.params.n_modes + 1
        if t.shape != (n1, n1):
            raise NormalizationFailure(f"matrix must be {n1}x{n1}, got {t.shape}")
        col_dev = np.abs(np.sum(t * t, axis=0) - 1.0)
        if np.any(col_dev > _COLUMN_NORM_TOL):
            raise NormalizationFailure(
                f"column norm deviates by {col_dev.max():.3e} (bad roots?)"
            )
        if np.any(t[0, :] <= 0.0):
            raise NormalizationFailure("sign convention t_atom^r > 0 violated")
        gram_dev = np.abs(t @ t.T - np.eye(n1)).max()
        if gram_dev > _ROW_ORTHO_TOL:
            raise NormalizationFailure(
                f"row orthonormality off by {gram_dev:.3e} (bad roots?)"
            )

    @property
    def bigomegas(self) -> np.ndarray:
        return self.spectrum.bigomegas


def atom_element(omega_r: float, params: DressedAtomParams) -> float:
    """Closed-form atom component of the normal mode at frequency omega_r."""
    if omega_r <= 0:
        raise DomainError(f"normal frequency must be positive, got {omega_r}")
    w2, o2 = params.omega_bar**2, omega_r**2
    radicand = (o2 - w2) ** 2 + 0.5 * params.eta_sq * (3.0 * o2 - w2) + 4.0 * params.g**2 * o2
    if radicand <= 0.0:
        raise DomainError(
            f"non-positive radicand {radicand:.3e} at Omega={omega_r:.6g}; "
            "inputs are inconsistent with a genuine normal mode"
        )
    return params.eta * omega_r / np.sqrt(radicand)


def field_element(omega_k: float, omega_r: float, t_atom_r: float,
                  params: DressedAtomParams) -> float:
    """Field-mode component t_k^r from the atom component of the same column."""
    gap = omega_k**2 - omega_r**2
    if abs(gap) < 1e-12 * omega_k**2:
        raise DivisionHazard(
            f"normal frequency {omega_r:.9g} collided with bare mode {omega_k:.9g}"
        )
    return params.eta * omega_k / gap * t_atom_r


def build_matrix(spectrum: ModeSpectrum, *, mode_cap: int = MATRIX_MODE_CAP) -> TransformMatrix:
    """Assemble and normalize the full (N+1) x (N+1) transformation.

    Columns are built from the eigenvector ratio and normalized explicitly,
    which keeps every column unit length and the rows orthonormal to the
    accuracy of the supplied roots.
    """
    params = spectrum.params
    n = params.n_modes
    if n > mode_cap:
        raise ValueError(
            f"n_modes={n} exceeds the dense-matrix cap {mode_cap}; "
            "use atom_weights() for large truncations"
        )
    wk = spectrum.omegas
    lam = spectrum.bigomegas**2
    gap = wk[:, None] ** 2 - lam[None, :]
    if np.any(np.abs(gap) < 1e-12 * wk[:, None] ** 2):
        raise DivisionHazard("a normal frequency collided with a bare-mode asymptote")
    raw = np.empty((n + 1, n + 1))
    raw[0, :] = 1.0
    raw[1:, :] = params.eta * wk[:, None] / gap
    norms = np.sqrt(np.sum(raw * raw, axis=0))
    if not np.all(np.isfinite(norms)) or np.any(norms == 0.0):
        raise NormalizationFailure("non-finite column encountered during assembly")
    t = raw / norms
    tail = 1.0 - np.sum(t * t, axis=1)
    return TransformMatrix(spectrum=spectrum, t=t, tail_deficit=tail)


def atom_weights(spectrum: ModeSpectrum, method: str = "auto") -> np.ndarray:
    """(t_atom^r)^2 for every normal mode, without dense storage.

    Uses sum_k omega_k^2/(omega_k^2 - lam)^2 = S(lam) + lam S2(lam) so the
    weights stay O(1) per root even for very large truncations.
    """
    params = spectrum.params
    lam = spectrum.bigomegas**2
    s = truncated_mode_sum(lam, params, method)
    s2 = truncated_mode_sum_sq(lam, params, method)
    return 1.0 / (1.0 + params.eta_sq * (s + lam * s2))


def approx_small_cavity_elements(params: DressedAtomParams, k_max: int,
                                 *, delta_threshold: float = 0.2) -> np.ndarray:
    """First-order squared elements of the atom-dominated normal mode.

    Returns ``[ (t_0^0)^2, (t_1^0)^2, ..., (t_k_max^0)^2 ]`` with
    (t_0^0)^2 = (1 + 2 pi delta / 3)^-1 and
    (t_k^0)^2 = (4/k^2)(delta/pi) (t_0^0)^2.
    """
    if params.delta >= delta_threshold:
        raise RegimeViolation(
            f"small-cavity elements need delta < {delta_threshold}, "
            f"got delta = {params.delta:.4g}"
        )
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    atom_sq = 1.0 / (1.0 + 2.0 * np.pi * params.delta / 3.0)
    k = np.arange(1, k_max + 1)
    out = np.empty(k_max + 1)
    out[0] = atom_sq
    out[1:] = (4.0 / k**2) * (params.delta / np.pi) * atom_sq
    return out
