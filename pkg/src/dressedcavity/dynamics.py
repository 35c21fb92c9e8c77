"""Excitation-transfer amplitudes of the dressed system, by three routes.

The amplitude that a single excitation placed on dressed oscillator mu at
t = 0 is found on oscillator nu at time t is

    f_mu_nu(t) = sum_r t_mu^r t_nu^r exp(-i Omega_r t),

an exact finite sum over normal modes ("discrete-sum" route).  Two
analytic companions cover the limiting cavity sizes:

* free space (R -> infinity, weak coupling kappa^2 = omega_bar^2 - g^2 > 0):

      f_00(t) = exp(-g t) [cos(kappa t) - (g/kappa) sin(kappa t)] + i G(t)

  where G is the semi-infinite oscillatory integral evaluated by
  :func:`imag_survival_integral`;

* small cavity (delta = g R / pi c << 1): a rapidly converging series with
  inverse-square weights, plus its closed-form lower bound.

"Survival" throughout means mu = nu = atom: the initially excited dressed
atom is still excited at t.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .coupling import TransformMatrix, atom_weights
from .errors import InvariantViolation, QuadratureFailure, RegimeViolation
from .spectrum import DressedAtomParams, ModeSpectrum

__all__ = [
    "QuadratureConfig",
    "FreeSpaceParams",
    "AmplitudeTrace",
    "amplitude_discrete",
    "amplitude_trace",
    "amplitude_row",
    "survival_trace",
    "spectral_weight",
    "imag_survival_integral",
    "amplitude_free_space",
    "free_space_trace",
    "survival_sq_large_time",
    "small_cavity_amplitude",
    "survival_sq_small_cavity",
    "survival_sq_lower_bound",
    "series_tail_bound",
]

_ABS_BOUND = 1.0 + 1e-9
_T0_TOL = 1e-9


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the semi-infinite oscillatory integral.

    The integrand is integrated adaptively up to ``omega_bar +
    tail_start_bands * g`` (resonance head) and half-period by half-period
    beyond, with the alternating series accelerated by repeated averaging.
    """

    abs_tol: float = 1e-8
    max_half_periods: int = 10_000
    tail_start_bands: float = 10.0


@dataclass(frozen=True)
class FreeSpaceParams:
    """Atom constants in the infinite-cavity limit (weak-coupling branch)."""

    omega_bar: float
    g: float
    kappa_sq: float = field(init=False)

    def __post_init__(self):
        if self.omega_bar <= 0 or self.g <= 0:
            raise ValueError("omega_bar and g must be positive")
        k2 = self.omega_bar**2 - self.g**2
        if k2 <= 0:
            raise RegimeViolation(
                f"free-space closed form needs omega_bar > g (kappa^2 > 0); "
                f"got omega_bar={self.omega_bar}, g={self.g}"
            )
        object.__setattr__(self, "kappa_sq", k2)

    @property
    def kappa(self) -> float:
        return np.sqrt(self.kappa_sq)


@dataclass(frozen=True)
class AmplitudeTrace:
    """Time series of one amplitude, tagged with its evaluation route."""

    times: np.ndarray
    values: np.ndarray
    mu: object
    nu: object
    method: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.shape != v.shape:
            raise InvariantViolation("times and values must have matching shapes")
        if np.any(np.diff(t) < 0):
            raise InvariantViolation("times must be non-decreasing")
        mags = np.abs(v)
        if np.any(mags > _ABS_BOUND):
            raise InvariantViolation(
                f"|amplitude| reached {mags.max():.12f} > 1 (unphysical)"
            )
        if self.method == "discrete-sum" and t.size and t[0] == 0.0:
            expected = 1.0 if self.mu == self.nu else 0.0
            if abs(v[0] - expected) > _T0_TOL:
                raise InvariantViolation(
                    f"amplitude at t=0 is {v[0]:.3e}, expected {expected}"
                )


def _row_index(label, n_modes: int) -> int:
    if label == "atom" or label == 0:
        return 0
    if isinstance(label, (int, np.integer)) and 1 <= label <= n_modes:
        return int(label)
    raise ValueError(f"row label must be 'atom' or a mode index 1..{n_modes}, got {label!r}")


# ---------------------------------------------------------------------------
# Discrete-sum route
# ---------------------------------------------------------------------------

def amplitude_discrete(tm: TransformMatrix, mu, nu, t: float) -> complex:
    """Exact amplitude f_mu_nu(t) summed over the N+1 normal modes."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    n = tm.spectrum.params.n_modes
    i, j = _row_index(mu, n), _row_index(nu, n)
    phases = np.exp(-1j * tm.bigomegas * t)
    return complex(np.sum(tm.t[i, :] * tm.t[j, :] * phases))


def amplitude_trace(tm: TransformMatrix, mu, nu, times) -> AmplitudeTrace:
    """Vectorized discrete-sum amplitude over a time grid."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be >= 0")
    n = tm.spectrum.params.n_modes
    i, j = _row_index(mu, n), _row_index(nu, n)
    w = tm.t[i, :] * tm.t[j, :]
    values = np.exp(-1j * np.outer(times, tm.bigomegas)) @ w
    return AmplitudeTrace(times=times, values=values, mu=mu, nu=nu,
                          method="discrete-sum")


def amplitude_row(tm: TransformMatrix, mu, times) -> np.ndarray:
    """All amplitudes f_mu_nu(t) at once; shape (len(times), N+1).

    Column 0 is nu = atom, column k is field mode k.  Row norms are the
    unitarity sums sum_nu |f_mu_nu|^2.
    """
    times = np.asarray(times, dtype=float)
    n = tm.spectrum.params.n_modes
    i = _row_index(mu, n)
    phased = np.exp(-1j * np.outer(times, tm.bigomegas)) * tm.t[i, :]
    return phased @ tm.t.T


def survival_trace(spectrum: ModeSpectrum, times, weights: np.ndarray | None = None,
                   *, chunk: int = 512) -> AmplitudeTrace:
    """Atom survival amplitude directly from spectral weights.

    Avoids the dense transformation matrix, so it stays usable at very
    large mode counts (the weights default to :func:`atom_weights`).
    """
    if weights is None:
        weights = atom_weights(spectrum)
    times = np.asarray(times, dtype=float)
    om = spectrum.bigomegas
    values = np.empty(times.shape, dtype=complex)
    for s in range(0, times.size, chunk):
        e = min(s + chunk, times.size)
        values[s:e] = np.exp(-1j * np.outer(times[s:e], om)) @ weights
    return AmplitudeTrace(times=times, values=values, mu="atom", nu="atom",
                          method="discrete-sum")


# ---------------------------------------------------------------------------
# Free-space closed form
# ---------------------------------------------------------------------------

def spectral_weight(x, omega_bar: float, g: float):
    """Continuum weight x^2 / [(x^2 - omega_bar^2)^2 + 4 g^2 x^2].

    Normalized so that (4g/pi) * integral over [0, inf) equals one; it is
    the R -> infinity limit of the discrete weights (t_atom^r)^2 / dw.
    """
    x = np.asarray(x, dtype=float)
    return x * x / ((x * x - omega_bar**2) ** 2 + 4.0 * g * g * x * x)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _half_period_integral(f, a: float, b: float) -> float:
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    return rad * float(np.sum(_GL_WEIGHTS * f(mid + rad * _GL_NODES)))


def _euler_accelerated_sum(term, abs_tol: float, max_terms: int) -> float:
    # van Wijngaarden repeated averaging of an alternating series
    wksp = np.empty(max_terms)
    total = 0.0
    order = 0
    small = 0
    for j in range(max_terms):
        tj = term(j)
        if j == 0:
            order = 1
            wksp[0] = tj
            total = 0.5 * tj
            inc = total
        else:
            tmp = wksp[0]
            wksp[0] = tj
            for k in range(1, order):
                dum = wksp[k]
                wksp[k] = 0.5 * (wksp[k - 1] + tmp)
                tmp = dum
            wksp[order] = 0.5 * (wksp[order - 1] + tmp)
            if abs(wksp[order]) <= abs(wksp[order - 1]):
                inc = 0.5 * wksp[order]
                total += inc
                order += 1
            else:
                inc = wksp[order]
                total += inc
        small = small + 1 if abs(inc) < abs_tol else 0
        if small >= 2 and j >= 5:
            return total
    raise QuadratureFailure(
        f"oscillatory tail not converged after {max_terms} half-periods"
    )


def imag_survival_integral(t: float, omega_bar: float, g: float,
                           quad_cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """-(4g/pi) * integral_0^inf spectral_weight(x) sin(x t) dx.

    Head: adaptive sine-weighted quadrature up to the resonance band edge
    omega_bar + tail_start_bands * g, with extra split points at omega_bar
    and at the lower band edge so a narrow resonance (small g) sits on
    panel boundaries.  Tail: one Gauss panel per half-period of sin(x t),
    summed with repeated-averaging acceleration of the alternating series.
    Returns 0 exactly at t = 0.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 0.0

    def h(x):
        return spectral_weight(x, omega_bar, g)

    prefactor = 4.0 * g / np.pi
    tol = quad_cfg.abs_tol
    band = quad_cfg.tail_start_bands * g
    split2 = omega_bar + band
    cuts = sorted({0.0, max(0.0, omega_bar - band), omega_bar, split2})
    acc = 0.0
    err_total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= a:
                continue
            val, err = quad(h, a, b, weight="sin", wvar=t,
                            epsabs=tol / (8.0 * prefactor), epsrel=1e-12, limit=400)
            acc += val
            err_total += err
        # bridge up to the first sine zero past the resonance band
        j0 = int(np.ceil(split2 * t / np.pi))
        x0 = j0 * np.pi / t
        if x0 > split2:
            val, err = quad(h, split2, x0, weight="sin", wvar=t,
                            epsabs=tol / (8.0 * prefactor), epsrel=1e-12, limit=200)
            acc += val
            err_total += err
    if prefactor * err_total > 4.0 * tol:
        raise QuadratureFailure(
            f"head quadrature error {prefactor * err_total:.2e} exceeds "
            f"{4.0 * tol:.1e} at t={t:.6g}"
        )

    period = np.pi / t

    def tail_term(j: int) -> float:
        a = x0 + j * period
        return _half_period_integral(lambda x: h(x) * np.sin(x * t), a, a + period)

    acc += _euler_accelerated_sum(tail_term, tol / 4.0, quad_cfg.max_half_periods)
    return -prefactor * acc


def amplitude_free_space(p: FreeSpaceParams, t: float,
                         quad_cfg: QuadratureConfig = QuadratureConfig()) -> complex:
    """Survival amplitude in the infinite-cavity limit (weak coupling)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    kappa = p.kappa
    real = np.exp(-p.g * t) * (np.cos(kappa * t) - (p.g / kappa) * np.sin(kappa * t))
    return complex(real, imag_survival_integral(t, p.omega_bar, p.g, quad_cfg))


def free_space_trace(p: FreeSpaceParams, times,
                     quad_cfg: QuadratureConfig = QuadratureConfig()) -> AmplitudeTrace:
    times = np.asarray(times, dtype=float)
    values = np.array([amplitude_free_space(p, t, quad_cfg) for t in times])
    return AmplitudeTrace(times=times, values=values, mu="atom", nu="atom",
                          method="free-space-closed-form")


def survival_sq_large_time(t: float, omega_bar: float, g: float) -> float:
    """Late-time survival probability: damped envelope plus power-law floor.

    exp(-2 g t) [cos(omega_bar t) - (g/omega_bar) sin(omega_bar t)]^2
      + 64 g^2 / (omega_bar^8 t^6)

    The power-law term is the quoted closed-form floor; the measured tail of
    |amplitude_free_space|^2 sits a factor pi^2 below it (the sine integral
    decays as 8g/(pi omega_bar^4 t^3)), so treat this as an upper envelope.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    trig = np.cos(omega_bar * t) - (g / omega_bar) * np.sin(omega_bar * t)
    return float(np.exp(-2.0 * g * t) * trig**2 + 64.0 * g**2 / (omega_bar**8 * t**6))


# ---------------------------------------------------------------------------
# Small-cavity series
# ---------------------------------------------------------------------------

def small_cavity_amplitude(params: DressedAtomParams, times, k_max: int = 10_000,
                           *, delta_threshold: float = 0.2) -> np.ndarray:
    """First-order survival amplitude for delta << 1.

    Uses the approximate mode weights (t_0^0)^2 = (1 + 2 pi delta/3)^-1 and
    (t_0^k)^2 = (4 delta / pi k^2) (t_0^0)^2 with the first-order
    frequencies; squaring reproduces the cosine double series with
    1/k^2 l^2 weights term by term.
    """
    if params.delta >= delta_threshold:
        raise RegimeViolation(
            f"small-cavity series needs delta < {delta_threshold}, "
            f"got delta = {params.delta:.4g}"
        )
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    d = params.delta
    atom_sq = 1.0 / (1.0 + 2.0 * np.pi * d / 3.0)
    k = np.arange(1, k_max + 1)
    om0 = params.omega_bar * (1.0 - np.pi * d / 3.0)
    omk = (params.g / d) * (k + 2.0 * d / (np.pi * k))
    wk = (4.0 * d / np.pi) * atom_sq / k**2
    out = atom_sq * np.exp(-1j * om0 * times)
    # chunk the k sum so huge k_max never allocates len(times) x k_max at once
    step = max(1, int(4_000_000 / max(times.size, 1)))
    for s in range(0, k_max, step):
        e = min(s + step, k_max)
        out = out + np.exp(-1j * np.outer(times, omk[s:e])) @ wk[s:e]
    return out


def survival_sq_small_cavity(t: float, params: DressedAtomParams,
                             k_max: int = 10_000) -> float:
    """|survival amplitude|^2 from the truncated small-cavity series."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    amp = small_cavity_amplitude(params, np.array([t]), k_max)
    return float(np.abs(amp[0]) ** 2)


def small_cavity_trace(params: DressedAtomParams, times,
                       k_max: int = 10_000) -> AmplitudeTrace:
    times = np.asarray(times, dtype=float)
    values = small_cavity_amplitude(params, times, k_max)
    return AmplitudeTrace(times=times, values=values, mu="atom", nu="atom",
                          method="small-cavity-series")


def survival_sq_lower_bound(delta: float, *, delta_threshold: float = 0.2) -> float:
    """Worst-case survival probability: every series cosine set to -1.

    (1 + 2 pi delta/3)^-2 (1 - 4 pi delta/3 - 4 pi^2 delta^2/9); positive
    for small delta, which is why a small enough cavity never lets the
    excitation fully decay.
    """
    if delta < 0 or delta >= delta_threshold:
        raise RegimeViolation(
            f"lower bound needs 0 <= delta < {delta_threshold}, got {delta}"
        )
    x = 2.0 * np.pi * delta / 3.0
    return float((1.0 - 2.0 * x - x * x) / (1.0 + x) ** 2)


def series_tail_bound(params: DressedAtomParams, k_max: int) -> float:
    """Bound on the |survival|^2 error from truncating the series at k_max."""
    atom_sq = 1.0 / (1.0 + 2.0 * np.pi * params.delta / 3.0)
    dropped = (4.0 * params.delta / np.pi) * atom_sq / k_max
    return 2.0 * dropped + dropped**2
