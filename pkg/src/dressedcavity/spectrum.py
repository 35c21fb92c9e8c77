"""Normal-mode spectrum of a dressed atom in a reflecting spherical cavity.

The model: one atom in the harmonic approximation, renormalized frequency
``omega_bar``, coupled linearly with strength ``eta = sqrt(4 g dw / pi)``
to the ``N`` field modes ``omega_k = k pi c / R`` of a perfectly
reflecting sphere of radius ``R`` (mode spacing ``dw = pi c / R``).

The collective oscillation frequencies ``Omega_r`` are the N+1 roots of
the secular equation

    omega_bar^2 - Omega^2 = eta^2 Omega^2 sum_{k=1..N} 1/(omega_k^2 - Omega^2),

one root below the first bare frequency, one between each pair of
consecutive bare frequencies, and one above the last.  In the
infinite-mode limit the sum telescopes into a cotangent:

    cot(R Omega / c) = Omega/(2 g) + (c/(R Omega)) (1 - R omega_bar^2/(2 g c)),

which is what :func:`cotangent_curves` samples and what the small-cavity
approximation expands.  All quantities are in consistent arbitrary units
(``c = 1`` is the conventional choice).

Everything here is a pure function of its inputs; the returned spectra
are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma, polygamma, zeta

from .errors import ConvergenceFailure, InvariantViolation, RegimeViolation

__all__ = [
    "DressedAtomParams",
    "ModeSpectrum",
    "field_frequencies",
    "secular_residual",
    "cotangent_curves",
    "cotangent_residual",
    "solve_eigenfrequencies",
    "approx_small_cavity_spectrum",
    "truncated_mode_sum",
    "truncated_mode_sum_sq",
]

# Above this mode count the O(1) cotangent/digamma closed form replaces the
# direct O(N) mode sum in the solver.
_DIRECT_SUM_LIMIT = 2048

# Default regime gate for the small-cavity expansion (delta << 1).
DELTA_THRESHOLD = 0.2


@dataclass(frozen=True)
class DressedAtomParams:
    """Physical constants of one atom-field system.

    Attributes
    ----------
    omega_bar : renormalized atom frequency [1/time]
    g         : coupling constant [1/time]
    radius    : cavity radius R [length]
    c         : wave speed [length/time]
    n_modes   : number of retained field modes N (truncation knob)

    Derived on construction:

    delta_omega : mode spacing pi c / R [1/time]
    eta         : coupling amplitude sqrt(4 g delta_omega / pi) [1/time]
    delta       : g R / (pi c), coupling-to-spacing ratio [dimensionless]
    kappa_sq    : omega_bar^2 - g^2 [1/time^2] (weak-coupling shift)
    """

    omega_bar: float
    g: float
    radius: float
    c: float = 1.0
    n_modes: int = 200
    delta_omega: float = field(init=False)
    eta: float = field(init=False)
    delta: float = field(init=False)
    kappa_sq: float = field(init=False)

    def __post_init__(self):
        if not (self.omega_bar > 0 and self.g > 0 and self.radius > 0 and self.c > 0):
            raise ValueError(
                "omega_bar, g, radius and c must all be positive, got "
                f"omega_bar={self.omega_bar}, g={self.g}, radius={self.radius}, c={self.c}"
            )
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be an integer >= 1, got {self.n_modes}")
        object.__setattr__(self, "n_modes", int(self.n_modes))
        object.__setattr__(self, "delta_omega", np.pi * self.c / self.radius)
        object.__setattr__(self, "eta", np.sqrt(4.0 * self.g * self.delta_omega / np.pi))
        object.__setattr__(self, "delta", self.g * self.radius / (np.pi * self.c))
        object.__setattr__(self, "kappa_sq", self.omega_bar**2 - self.g**2)

    @classmethod
    def from_delta(cls, omega_bar, g, delta, c=1.0, n_modes=200):
        """Build params from the dimensionless cavity-size parameter delta."""
        if delta <= 0:
            raise ValueError(f"delta must be positive, got {delta}")
        return cls(omega_bar=omega_bar, g=g, radius=np.pi * c * delta / g,
                   c=c, n_modes=n_modes)

    @property
    def eta_sq(self) -> float:
        return 4.0 * self.g * self.delta_omega / np.pi


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModeSpectrum:
    """The N bare field frequencies plus the N+1 normal frequencies.

    ``method`` records provenance: "exact-roots" (secular-equation solve),
    "small-cavity-approx" (first order in delta) or "oracle" (matrix
    diagonalization).
    """

    params: DressedAtomParams
    omegas: np.ndarray
    bigomegas: np.ndarray
    method: str

    def __post_init__(self):
        object.__setattr__(self, "omegas", _readonly(self.omegas))
        object.__setattr__(self, "bigomegas", _readonly(self.bigomegas))
        om, bo = self.omegas, self.bigomegas
        n = self.params.n_modes
        if om.shape != (n,) or bo.shape != (n + 1,):
            raise InvariantViolation(
                f"expected {n} bare and {n + 1} normal frequencies, "
                f"got {om.shape} and {bo.shape}"
            )
        ladder = self.params.delta_omega * np.arange(1, n + 1)
        if not np.allclose(om, ladder, rtol=1e-12, atol=0.0):
            raise InvariantViolation("bare frequencies must be k pi c / R")
        if not np.all(bo > 0):
            raise InvariantViolation("normal frequencies must all be positive")
        if np.any(np.diff(bo) <= 0):
            raise InvariantViolation("normal frequencies must be strictly increasing")
        # Interlacing with the bare-mode asymptotes: one root below omega_1,
        # then exactly one root inside each (omega_k, omega_k+1) gap.
        if not bo[0] < om[0]:
            raise InvariantViolation("lowest normal frequency must lie below omega_1")
        if np.any(bo[1:] <= om) or np.any(bo[1:-1] >= om[1:]):
            raise InvariantViolation("normal frequencies must interlace the bare modes")


def field_frequencies(params: DressedAtomParams) -> np.ndarray:
    """Bare field frequencies omega_k = k pi c / R, k = 1..N, ascending."""
    return params.delta_omega * np.arange(1, params.n_modes + 1)


# ---------------------------------------------------------------------------
# Truncated mode sums
# ---------------------------------------------------------------------------
#
# S(lam)  = sum_{k=1..N} 1/(omega_k^2 - lam)
# S2(lam) = sum_{k=1..N} 1/(omega_k^2 - lam)^2 = dS/dlam
#
# evaluated either directly (exact, O(N)) or through the closed form
#   sum_{k>=1} 1/(k^2 - u^2) = 1/(2u^2) - (pi/2u) cot(pi u)
# minus the digamma tail sum_{k>N} 1/(k^2 - u^2) = [psi(N+1+u)-psi(N+1-u)]/(2u),
# which is O(1) per point and agrees with the direct sum to ~1e-13.

def _series_small_u(u_sq: np.ndarray, terms: int = 8) -> np.ndarray:
    # sum_k 1/(k^2-u^2) = zeta(2) + zeta(4) u^2 + ... for |u| << 1
    acc = np.zeros_like(u_sq)
    for m in range(terms, 0, -1):
        acc = (acc + zeta(2 * m)) * u_sq if m > 1 else acc + zeta(2)
    return acc


def _mode_sum_closed(lam, n, dw):
    lam = np.asarray(lam, dtype=float)
    u = np.sqrt(lam) / dw
    u_sq = u * u
    small = u < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        full = np.where(
            small,
            _series_small_u(u_sq),
            0.5 / u_sq - np.pi / (2.0 * u * np.tan(np.pi * u)),
        )
    tail = (digamma(n + 1 + u) - digamma(n + 1 - u)) / (2.0 * u)
    return (full - tail) / dw**2


def _mode_sum_sq_closed(lam, n, dw):
    lam = np.asarray(lam, dtype=float)
    u = np.sqrt(lam) / dw
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = 1.0 / np.tan(np.pi * u)
    dsig = (
        -1.0 / u**3
        + (np.pi / (2.0 * u * u)) * cot
        + (np.pi**2 / (2.0 * u)) * (1.0 + cot * cot)
        + (digamma(n + 1 + u) - digamma(n + 1 - u)) / (2.0 * u * u)
        - (polygamma(1, n + 1 + u) + polygamma(1, n + 1 - u)) / (2.0 * u)
    )
    return dsig / (2.0 * dw**4 * u)


def _direct_sum(lam, wk2, power):
    lam = np.asarray(lam, dtype=float)
    flat = np.atleast_1d(lam).ravel()
    out = np.empty(flat.shape)
    step = max(1, 2**24 // wk2.size)  # keep the broadcast under ~128 MB
    for s in range(0, flat.size, step):
        e = min(s + step, flat.size)
        out[s:e] = np.sum(1.0 / (wk2 - flat[s:e, None]) ** power, axis=-1)
    return out.reshape(lam.shape) if lam.ndim else out[0]


def truncated_mode_sum(lam, params: DressedAtomParams, method: str = "auto"):
    """sum_{k=1..N} 1/(omega_k^2 - lam) for scalar or array lam [time^2]."""
    n, dw = params.n_modes, params.delta_omega
    if method == "direct" or (method == "auto" and n <= _DIRECT_SUM_LIMIT):
        return _direct_sum(lam, field_frequencies(params) ** 2, 1)
    return _mode_sum_closed(lam, n, dw)


def truncated_mode_sum_sq(lam, params: DressedAtomParams, method: str = "auto"):
    """sum_{k=1..N} 1/(omega_k^2 - lam)^2 for scalar or array lam."""
    n, dw = params.n_modes, params.delta_omega
    if method == "direct" or (method == "auto" and n <= _DIRECT_SUM_LIMIT):
        return _direct_sum(lam, field_frequencies(params) ** 2, 2)
    return _mode_sum_sq_closed(lam, n, dw)


def secular_residual(omega, params: DressedAtomParams, method: str = "auto"):
    """Defining-equation residual F(Omega^2) at frequency omega.

    F(lam) = omega_bar^2 - lam - eta^2 lam S(lam); F is strictly decreasing
    in lam between consecutive asymptotes, so each bracket holds one root.
    """
    lam = np.asarray(omega, dtype=float) ** 2
    s = truncated_mode_sum(lam, params, method)
    return params.omega_bar**2 - lam - params.eta_sq * lam * s


def cotangent_curves(omega, params: DressedAtomParams):
    """Both sides of the infinite-cavity eigenfrequency condition.

    Returns ``(lhs, rhs)`` with ``lhs = cot(R Omega / c)`` and
    ``rhs = Omega/(2g) + (c/(R Omega))(1 - R omega_bar^2/(2 g c))``.
    Their intersections are the normal frequencies of the untruncated
    system; the finite-N roots approach them as N grows.
    """
    omega = np.asarray(omega, dtype=float)
    r_over_c = params.radius / params.c
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = 1.0 / np.tan(r_over_c * omega)
        rhs = omega / (2.0 * params.g) + (1.0 / (r_over_c * omega)) * (
            1.0 - r_over_c * params.omega_bar**2 / (2.0 * params.g)
        )
    return lhs, rhs


def cotangent_residual(omega, params: DressedAtomParams):
    """lhs - rhs of the infinite-cavity condition (vanishes at its roots)."""
    lhs, rhs = cotangent_curves(omega, params)
    return lhs - rhs


# ---------------------------------------------------------------------------
# Root solving
# ---------------------------------------------------------------------------

def _upper_bound(params: DressedAtomParams) -> float:
    # Gershgorin bound on the largest eigenvalue of the coupled quadratic
    # form; F is guaranteed negative there.
    wk = field_frequencies(params)
    atom_row = params.omega_bar**2 + params.n_modes * params.eta_sq + params.eta * wk.sum()
    mode_rows = wk[-1] ** 2 + params.eta * wk[-1]
    return max(atom_row, mode_rows) + 1.0


def _bracket_root(f: Callable[[float], float], lo_omega: float, hi_omega: float,
                  dw: float, index: int, max_iter: int) -> float:
    """Find the sign change inside (lo_omega, hi_omega) and refine with Brent.

    The residual diverges to +inf at the lower asymptote and -inf at the
    upper one, so an offset pair that fails to straddle the root has simply
    overshot it; the offset shrinks geometrically until the signs differ.
    """
    eps = 1e-9 * dw
    width = hi_omega - lo_omega
    while True:
        a = lo_omega + eps
        b = hi_omega - eps
        if a < b:
            fa = f(a)
            fb = f(b)
            if fa > 0.0 and fb < 0.0:
                break
            if fa == 0.0:
                return a
            if fb == 0.0:
                return b
        eps *= 0.1
        if eps < 1e-18 * width or eps < 8.0 * np.finfo(float).eps * hi_omega:
            raise ConvergenceFailure(
                f"no sign change found in bracket {index} "
                f"({lo_omega:.6g}, {hi_omega:.6g})",
                interval_index=index,
            )
    try:
        return brentq(f, a, b, xtol=1e-300, rtol=4.0 * np.finfo(float).eps,
                      maxiter=max_iter)
    except RuntimeError as exc:
        raise ConvergenceFailure(
            f"root refinement failed in bracket {index}: {exc}",
            interval_index=index,
        ) from exc


def _solve_brackets_vectorized(f, lo: np.ndarray, hi: np.ndarray, dw: float,
                               max_iter: int) -> np.ndarray:
    """Bisect every bracket at once; ``f`` must accept frequency arrays."""
    eps = np.full(lo.shape, 1e-9 * dw)
    floor = 8.0 * np.finfo(float).eps * hi
    for _ in range(64):
        a = lo + eps
        b = hi - eps
        ok = (a < b) & (f(a) > 0.0) & (f(b) < 0.0)
        if ok.all():
            break
        eps = np.where(ok, eps, 0.1 * eps)
        if np.any(~ok & (eps < floor)):
            bad = int(np.argmax(~ok & (eps < floor)))
            raise ConvergenceFailure(
                f"no sign change found in bracket {bad}", interval_index=bad)
    else:
        bad = int(np.argmax(~ok))
        raise ConvergenceFailure(
            f"no sign change found in bracket {bad}", interval_index=bad)
    for _ in range(max(max_iter, 64)):
        mid = 0.5 * (a + b)
        below = f(mid) < 0.0
        b = np.where(below, mid, b)
        a = np.where(below, a, mid)
        if np.all(b - a <= 4.0 * np.finfo(float).eps * b):
            break
    return 0.5 * (a + b)


def solve_eigenfrequencies(params: DressedAtomParams, *,
                           residual_tol: float = 1e-10,
                           max_iter: int = 200,
                           method: str = "auto") -> ModeSpectrum:
    """Solve the secular equation for all N+1 normal frequencies.

    Each root is bracketed between consecutive bare-mode asymptotes
    (the lowest in (0, omega_1), the highest between omega_N and a
    Gershgorin bound).  Small truncations refine each bracket with
    Brent's method on the direct mode sum; large ones bisect every
    bracket simultaneously on the cotangent/digamma closed form.  After
    refinement the relative Newton correction |F/F'| / Omega^2 must fall
    below ``residual_tol`` at every root, otherwise
    :class:`ConvergenceFailure` is raised naming the offending bracket.
    """
    n, dw = params.n_modes, params.delta_omega
    wk = field_frequencies(params)
    use_closed = method == "closed" or (method == "auto" and n > _DIRECT_SUM_LIMIT)

    # The top bracket may contain spurious cotangent/digamma pole pairs of
    # the closed form beyond omega_N; always use the direct sum there.
    wk2_top = wk * wk

    def f_top(om: float) -> float:
        lam = om * om
        return float(params.omega_bar**2 - lam
                     - params.eta_sq * lam * np.sum(1.0 / (wk2_top - lam)))

    roots = np.empty(n + 1)
    if use_closed:
        def f_vec(om: np.ndarray) -> np.ndarray:
            lam = om * om
            return (params.omega_bar**2 - lam
                    - params.eta_sq * lam * _mode_sum_closed(lam, n, dw))

        lo = np.concatenate(([0.0], wk[:-1]))
        roots[:n] = _solve_brackets_vectorized(f_vec, lo, wk, dw, max_iter)
    else:
        wk2 = wk * wk

        def f_mid(om: float) -> float:
            lam = om * om
            return float(params.omega_bar**2 - lam
                         - params.eta_sq * lam * np.sum(1.0 / (wk2 - lam)))

        lo = 0.0
        for i in range(n):
            roots[i] = _bracket_root(f_mid, lo, wk[i], dw, i, max_iter)
            lo = wk[i]
    top = np.sqrt(_upper_bound(params))
    roots[n] = _bracket_root(f_top, wk[-1], top, dw, n, max_iter)

    lam = roots**2
    meth = "closed" if use_closed else "direct"
    resid = np.abs(secular_residual(roots[:n], params, meth))
    slope = 1.0 + params.eta_sq * lam[:n] * truncated_mode_sum_sq(lam[:n], params, meth)
    # the top root can sit far above omega_N where the closed form is unsafe
    resid_top = abs(f_top(roots[n]))
    slope_top = 1.0 + params.eta_sq * lam[n] * float(
        np.sum(1.0 / (wk2_top - lam[n]) ** 2))
    newton_rel = np.concatenate((resid / (slope * lam[:n]),
                                 [resid_top / (slope_top * lam[n])]))
    if np.any(newton_rel > residual_tol):
        bad = int(np.argmax(newton_rel))
        raise ConvergenceFailure(
            f"root {bad} residual {newton_rel[bad]:.3e} exceeds {residual_tol:.1e}",
            interval_index=bad,
        )
    return ModeSpectrum(params=params, omegas=wk, bigomegas=roots, method="exact-roots")


def approx_small_cavity_spectrum(params: DressedAtomParams, *,
                                 delta_threshold: float = DELTA_THRESHOLD) -> ModeSpectrum:
    """First-order small-cavity normal frequencies (delta << 1).

    Omega_0 = omega_bar (1 - pi delta / 3)
    Omega_k = (g/delta) (k + 2 delta / (pi k)),  k >= 1
    """
    if params.delta >= delta_threshold:
        raise RegimeViolation(
            f"small-cavity expansion needs delta < {delta_threshold}, "
            f"got delta = {params.delta:.4g}"
        )
    k = np.arange(1, params.n_modes + 1)
    bigomegas = np.empty(params.n_modes + 1)
    bigomegas[0] = params.omega_bar * (1.0 - np.pi * params.delta / 3.0)
    bigomegas[1:] = (params.g / params.delta) * (k + 2.0 * params.delta / (np.pi * k))
    return ModeSpectrum(params=params, omegas=field_frequencies(params),
                        bigomegas=bigomegas, method="small-cavity-approx")
