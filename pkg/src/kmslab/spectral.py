"""Fourier analysis of smooth compactly supported windows.

Convention: chi_hat(omega) = int exp(-i omega tau) chi(tau) dtau.

The transforms are computed on saddle-point contours in the complex time
plane (see ``_contour``), which keeps full relative accuracy where the
real-axis integral would cancel to far below machine precision.  A plain
real-axis evaluation (QUADPACK's Clenshaw-Curtis oscillatory rule) is kept as
an independent reference for moderate frequencies.
"""

from __future__ import annotations

import logging
import threading
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp, roots_legendre

from ._contour import segment_transform
from .switching import BumpProduct, Plateau, Rescaled, SwitchingFunction

logger = logging.getLogger(__name__)

__all__ = [
    "QuadratureError",
    "EnvelopeFitError",
    "FourierTransform",
    "Envelope",
    "SpectralProfile",
    "fourier_transform",
    "direct_fourier_transform",
    "one_sided_bump_transform",
    "spectral_norms",
    "autocorrelation",
    "fit_envelope",
    "decay_envelope_fit",
    "spectral_profile",
    "profile_nodes",
]

# beyond this many natural frequency units the phase of exp(-i omega tau)
# is no longer meaningful in double precision
_RELIABLE_UNITS = 1e7


class QuadratureError(RuntimeError):
    """A quadrature missed its tolerance; carries the best estimate."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class EnvelopeFitError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class FourierTransform:
    """chi_hat on a frequency grid.

    ``log_abs`` stays finite where ``value`` underflows.  ``abs_error`` is
    measured against the local saddle scale, so it is also meaningful next
    to zeros of chi_hat.  ``flagged`` marks frequencies outside the reliable
    window, where ``value`` holds the envelope upper bound instead.
    """

    omega: np.ndarray
    value: np.ndarray
    log_abs: np.ndarray
    log_scale: np.ndarray
    abs_error: np.ndarray
    flagged: np.ndarray

    @property
    def log_density(self) -> np.ndarray:
        return 2.0 * self.log_abs

    @property
    def log_density_error(self) -> np.ndarray:
        """ln of the absolute error bound on |chi_hat|^2."""
        rel = self.abs_error * np.exp(-self.log_scale)
        mant = np.exp(self.log_abs - self.log_scale)
        with np.errstate(divide="ignore"):
            return 2.0 * self.log_scale + np.log(2.0 * mant * rel + rel * rel)


def reliable_limit(chi: SwitchingFunction) -> float:
    return _RELIABLE_UNITS * chi.frequency_scale


def _transform_parts(chi: SwitchingFunction, w: np.ndarray):
    """(log_scale, mantissa, error) of chi_hat at w >= 0."""
    if isinstance(chi, BumpProduct):
        c_l, c_r = chi.singularity_strength
        return segment_transform(chi.log_analytic, w, chi.width, c_l, c_r)
    if isinstance(chi, Plateau):
        c_l, c_r = chi.singularity_strength
        scale, mant, err = segment_transform(chi.log_ramp_analytic, w, chi.ramp, c_l, c_r)
        box = chi.box_length
        # chi = (b/Z) * indicator[0, box]
        factor = np.exp(-0.5j * w * box) * np.sinc(w * box / (2.0 * np.pi))
        scale = scale + np.log(box / chi.ramp_norm)
        return scale, mant * factor, err * np.abs(factor)
    if isinstance(chi, Rescaled):
        scale, mant, err = _transform_parts(chi.base, chi.scale * w)
        return scale + np.log(chi.scale), mant, err
    raise TypeError(f"no transform for window kind {chi.kind!r}")


def fourier_transform(
    chi: SwitchingFunction,
    omega,
    rtol: float = 1e-9,
    envelope: "Envelope | None" = None,
) -> FourierTransform:
    """chi_hat(omega) for arbitrary real omega (vectorised).

    Raises ``QuadratureError`` when the error estimate exceeds ``rtol`` times
    the local scale.  Frequencies beyond ``reliable_limit`` are answered with
    the (flagged) envelope when one is supplied and raise otherwise.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    w = np.abs(omega)
    flagged = w > reliable_limit(chi)
    if flagged.any() and envelope is None:
        raise QuadratureError(
            f"|omega| beyond reliable window {reliable_limit(chi):.3g} and no envelope supplied"
        )
    scale = np.empty(w.shape)
    mant = np.empty(w.shape, dtype=complex)
    err = np.empty(w.shape)
    ok = ~flagged
    if ok.any():
        s, m, e = _transform_parts(chi, w[ok])
        scale[ok], mant[ok], err[ok] = s, m, e
    if flagged.any():
        scale[flagged] = envelope.log(w[flagged])
        mant[flagged] = 1.0
        err[flagged] = np.inf
    # real window: chi_hat(-omega) = conj(chi_hat(omega))
    mant = np.where(omega < 0, np.conj(mant), mant)
    bad = ok & (err > rtol)
    if bad.any():
        i = int(np.argmax(np.where(bad, err, -1)))
        raise QuadratureError(
            f"transform at omega={omega[i]:.6g} reached only {err[i]:.2e} relative to scale",
            estimate=np.exp(scale[i]) * mant[i],
            error=err[i],
        )
    with np.errstate(divide="ignore"):
        log_abs = scale + np.log(np.abs(mant))
    value = np.exp(scale) * mant
    abs_err = np.where(flagged, np.inf, np.exp(scale) * np.where(flagged, 0.0, err))
    return FourierTransform(omega, value, log_abs, scale, abs_err, flagged)


def direct_fourier_transform(chi: SwitchingFunction, omega: float, epsabs: float = 1e-15) -> complex:
    """Real-axis reference transform (reliable while |chi_hat| >> 1e-15)."""
    lo, hi = chi.support
    edges = np.linspace(lo, hi, 9)
    re = im = 0.0
    kw = dict(wvar=omega, epsabs=epsabs, epsrel=1e-13, limit=500)
    with warnings.catch_warnings():
        # epsrel sits at the roundoff level on purpose; QUADPACK reports it
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            re += quad(chi, a, b, weight="cos", **kw)[0]
            im -= quad(chi, a, b, weight="sin", **kw)[0]
    return complex(re, im)


def one_sided_bump_transform(omega, kappa: float = 1.0):
    """Closed form of int_0^inf exp(-i omega tau) f(tau) dtau.

    Equals (2 sqrt(pi)/kappa) exp(-sqrt(i omega/kappa)) with the principal root.
    """
    omega = np.asarray(omega, dtype=float)
    return 2.0 * np.sqrt(np.pi) / kappa * np.exp(-np.sqrt(1j * omega / kappa + 0j))


# --------------------------------------------------------------------------
# autocorrelation

_GL_AC_X, _GL_AC_W = roots_legendre(24)
_AC_SUBPANELS = 16


def _breakpoints(chi: SwitchingFunction) -> np.ndarray:
    """Points where chi fails to be analytic."""
    if isinstance(chi, BumpProduct):
        return np.array(chi.support)
    if isinstance(chi, Plateau):
        d, box = chi.ramp, chi.box_length
        return np.unique([0.0, d, box, box + d])
    if isinstance(chi, Rescaled):
        return _breakpoints(chi.base) * chi.scale
    return np.array(chi.support)


def autocorrelation(chi: SwitchingFunction, s, order: int = 0):
    """g(s) = int chi(u) chi(u - s) du, or its first/second derivative.

    Composite Gauss-Legendre (16 panels x 24 nodes) between the breakpoints
    of the integrand, which is analytic on each piece.  g^(1) and g^(2) use
    g' = -int chi chi'(u - s), g'' = -int chi' chi'(u - s).
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    lo, hi = chi.support
    bp = _breakpoints(chi)
    first = chi.derivative if order == 2 else chi
    second = chi if order == 0 else chi.derivative
    sign = 1.0 if order == 0 else -1.0
    out = np.zeros(s_arr.shape)
    for k, sk in enumerate(s_arr):
        a, b = max(lo, lo + sk), min(hi, hi + sk)
        if b <= a:
            continue
        pts = np.concatenate([[a, b], bp, bp + sk])
        pts = np.unique(pts[(pts >= a) & (pts <= b)])
        frac = np.linspace(0.0, 1.0, _AC_SUBPANELS + 1)
        pts = (pts[:-1, None] + np.diff(pts)[:, None] * frac[None, :]).ravel()
        pts = np.unique(pts)
        half = 0.5 * np.diff(pts)
        mid = 0.5 * (pts[:-1] + pts[1:])
        u = (mid[:, None] + half[:, None] * _GL_AC_X[None, :]).ravel()
        wts = (half[:, None] * _GL_AC_W[None, :]).ravel()
        out[k] = sign * np.dot(wts, first(u) * second(u - sk))
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# decay envelope


@dataclass(frozen=True)
class Envelope:
    """|chi_hat(omega)| <= amplitude (1+|omega|)^power exp(-rate |omega|^exponent)."""

    amplitude: float
    rate: float
    exponent: float
    power: float
    residual: float
    window: tuple[float, float]

    def log(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        return np.log(self.amplitude) + self.power * np.log1p(w) - self.rate * w**self.exponent

    def __call__(self, omega):
        return np.exp(self.log(omega))


def _fit_fixed_exponent(w, y, q):
    design = np.column_stack([np.ones_like(w), np.log1p(w), -(w**q)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(np.sqrt(np.mean(resid**2)))


def fit_envelope(omega, log_abs, window=None, max_residual: float = 0.25) -> Envelope:
    """Least-squares fit of ln|chi_hat| to ln A + rho ln(1+w) - beta w^q.

    The exponent q is profiled (the model is linear in the other three); the
    amplitude is then raised just enough to dominate every sample.
    """
    w = np.abs(np.asarray(omega, dtype=float))
    y = np.asarray(log_abs, dtype=float)
    res = minimize_scalar(
        lambda q: _fit_fixed_exponent(w, y, q)[1],
        bounds=(0.05, 3.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    q = float(res.x)
    (ln_a, rho, beta), rms = _fit_fixed_exponent(w, y, q)
    if not np.isfinite(rms) or rms > max_residual:
        raise EnvelopeFitError(f"envelope fit residual {rms:.3g} exceeds {max_residual}", rms)
    model = ln_a + rho * np.log1p(w) - beta * w**q
    ln_a += max(0.0, float(np.max(y - model)))
    span = window if window is not None else (float(w.min()), float(w.max()))
    return Envelope(float(np.exp(ln_a)), float(beta), q, float(rho), rms, span)


def _hull_period(chi: SwitchingFunction) -> float:
    if isinstance(chi, Plateau):
        return 2.0 * np.pi / min(chi.ramp, chi.box_length)
    if isinstance(chi, Rescaled):
        return _hull_period(chi.base) / chi.scale
    return 2.0 * np.pi / chi.width


def hull_samples(chi: SwitchingFunction, window, points: int = 60, oversample: int = 32):
    """Local maxima of |chi_hat| over one oscillation period per grid point."""
    lo, hi = window
    grid = np.geomspace(lo, hi, points)
    period = _hull_period(chi)
    offsets = np.linspace(0.0, period, oversample, endpoint=False)
    dense = (grid[:, None] + offsets[None, :]).ravel()
    ft = fourier_transform(chi, dense)
    la = ft.log_abs.reshape(points, oversample)
    idx = np.argmax(la, axis=1)
    return dense.reshape(points, oversample)[np.arange(points), idx], la.max(axis=1)


def decay_envelope_fit(chi: SwitchingFunction, window=None, max_residual: float = 0.25) -> Envelope:
    """Fit the decay envelope over ``window`` (default [1e2, 1e4] x frequency scale)."""
    if window is None:
        k = chi.frequency_scale
        window = (1e2 * k, 1e4 * k)
    if window[1] > reliable_limit(chi):
        raise ValueError("fit window extends past the reliable quadrature range")
    w, la = hull_samples(chi, window)
    return fit_envelope(w, la, window=tuple(window), max_residual=max_residual)


# --------------------------------------------------------------------------
# profile on quadrature nodes

_GL_FINE = roots_legendre(16)
_GL_COARSE = roots_legendre(8)
_PANEL_CAP = 400_000


@dataclass(frozen=True)
class ProfileNodes:
    """|chi_hat|^2 on composite Gauss-Legendre panels covering [0, cutoff].

    Weights are doubled so that sums approximate full-line integrals of even
    integrands.  ``fine``/``coarse`` are the two rules used for error
    estimates; ``*_err`` hold ln of the absolute density error.
    """

    cutoff: float
    panel_width: float
    omega: np.ndarray
    log_weight: np.ndarray
    log_density: np.ndarray
    log_density_err: np.ndarray
    omega_c: np.ndarray
    log_weight_c: np.ndarray
    log_density_c: np.ndarray


def panel_width(chi: SwitchingFunction) -> float:
    return np.pi / (2.0 * chi.width)


_node_cache: dict[tuple[SwitchingFunction, float], dict] = {}
_cache_lock = threading.Lock()


def _panel_block(chi, start: int, stop: int, h: float, rule):
    x, wts = rule
    left = np.arange(start, stop) * h
    om = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    lw = np.tile(np.log(h * wts), stop - start)  # 2 * h/2 * w
    ft = fourier_transform(chi, om, rtol=1e-6)
    return om, lw, ft.log_density, ft.log_density_error


def profile_nodes(chi: SwitchingFunction, cutoff: float, max_width: float | None = None) -> ProfileNodes:
    """Nodes up to ``cutoff`` (rounded up to whole panels).

    Panels are anchored at omega = 0, so a smaller cutoff always sees a prefix
    of the same node set: results do not depend on what was cached before.
    ``max_width`` halves the panels until they are no wider than it, for
    integrands whose other factor varies faster than |chi_hat|^2.
    """
    h = panel_width(chi)
    if max_width is not None:
        while h > max_width:
            h *= 0.5
    n_panels = int(np.ceil(cutoff / h))
    if n_panels > _PANEL_CAP:
        raise QuadratureError(f"{n_panels} spectral panels requested (cap {_PANEL_CAP})")
    with _cache_lock:
        entry = _node_cache.get((chi, h))
        have = 0 if entry is None else entry["panels"]
        if n_panels > have:
            fine = _panel_block(chi, have, n_panels, h, _GL_FINE)
            coarse = _panel_block(chi, have, n_panels, h, _GL_COARSE)
            if entry is None:
                entry = {"panels": 0, "fine": [np.empty(0)] * 4, "coarse": [np.empty(0)] * 4}
            entry["fine"] = [np.concatenate([a, b]) for a, b in zip(entry["fine"], fine)]
            entry["coarse"] = [np.concatenate([a, b]) for a, b in zip(entry["coarse"], coarse)]
            entry["panels"] = n_panels
            _node_cache[(chi, h)] = entry
        nf, nc = n_panels * _GL_FINE[0].size, n_panels * _GL_COARSE[0].size
        f = [a[:nf] for a in entry["fine"]]
        c = [a[:nc] for a in entry["coarse"]]
    return ProfileNodes(n_panels * h, h, f[0], f[1], f[2], f[3], c[0], c[1], c[2])


@dataclass(frozen=True)
class SpectralProfile:
    """Sampled |chi_hat|^2 with its norms and decay envelope."""

    omega_grid: np.ndarray
    density: np.ndarray
    norm_l2: float
    norm_weighted: float
    norm_error: tuple[float, float]
    envelope: Envelope
    cutoff: float


def default_cutoff(chi: SwitchingFunction, envelope: Envelope, efolds: float = 80.0) -> float:
    """Frequency where the squared envelope has dropped ``efolds`` below its peak."""
    target = np.log(envelope.amplitude) - 0.5 * efolds
    lo, hi = 1e-3 * chi.frequency_scale, reliable_limit(chi)
    if envelope.log(hi) > target:
        return hi
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        if envelope.log(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _tail_log_mass(envelope: Envelope, cutoff: float, weight_power: int) -> float:
    """ln int_cutoff^inf 2 (1.5 env)^2 w^k dw, by log-spaced trapezoid."""
    w = cutoff * np.geomspace(1.0, 1e6, 4000)
    la = 2.0 * (np.log(1.5) + envelope.log(w)) + weight_power * np.log(w)
    lw = np.log(np.gradient(w))
    return float(np.log(2.0) + logsumexp(la + lw))


_envelope_cache: dict[SwitchingFunction, Envelope] = {}


def envelope_for(chi: SwitchingFunction) -> Envelope:
    with _cache_lock:
        env = _envelope_cache.get(chi)
    if env is None:
        env = decay_envelope_fit(chi)
        with _cache_lock:
            _envelope_cache[chi] = env
    return env


def spectral_profile(chi: SwitchingFunction, cutoff: float | None = None) -> SpectralProfile:
    env = envelope_for(chi)
    if cutoff is None:
        cutoff = default_cutoff(chi, env)
    nodes = profile_nodes(chi, cutoff)
    ln_w2 = 2.0 * np.log(nodes.omega.clip(min=1e-300))
    ln_w2c = 2.0 * np.log(nodes.omega_c.clip(min=1e-300))
    n0 = logsumexp(nodes.log_weight + nodes.log_density)
    n0c = logsumexp(nodes.log_weight_c + nodes.log_density_c)
    n1 = logsumexp(nodes.log_weight + nodes.log_density + ln_w2)
    n1c = logsumexp(nodes.log_weight_c + nodes.log_density_c + ln_w2c)
    d0 = logsumexp(nodes.log_weight + nodes.log_density_err)
    d1 = logsumexp(nodes.log_weight + nodes.log_density_err + ln_w2)
    tail0 = _tail_log_mass(env, nodes.cutoff, 0)
    tail1 = _tail_log_mass(env, nodes.cutoff, 2)
    norm_l2, norm_w = float(np.exp(n0)), float(np.exp(n1))
    err0 = abs(norm_l2 - np.exp(n0c)) + np.exp(d0) + np.exp(tail0)
    err1 = abs(norm_w - np.exp(n1c)) + np.exp(d1) + np.exp(tail1)
    return SpectralProfile(
        omega_grid=nodes.omega,
        density=np.exp(nodes.log_density),
        norm_l2=norm_l2,
        norm_weighted=norm_w,
        norm_error=(float(err0), float(err1)),
        envelope=env,
        cutoff=nodes.cutoff,
    )


def spectral_norms(chi: SwitchingFunction, rtol: float = 1e-8) -> tuple[float, float]:
    """(||chi_hat||^2, ||omega chi_hat||^2) over the full frequency line.

    Integrated in the frequency domain.  Windows whose spectrum would need
    more than the panel cap (long plateaus) use the time-domain identities
    2 pi ||chi||^2 and 2 pi ||chi'||^2 instead.
    """
    try:
        prof = spectral_profile(chi)
    except QuadratureError:
        logger.info("spectral grid too large for %r, using time-domain norms", chi)
        return 2.0 * np.pi * chi.l2_norm_sq(), 2.0 * np.pi * chi.derivative_l2_norm_sq()
    e0, e1 = prof.norm_error
    if e0 > rtol * prof.norm_l2 or e1 > rtol * prof.norm_weighted:
        raise QuadratureError(
            "spectral norm truncation/quadrature error above tolerance",
            estimate=(prof.norm_l2, prof.norm_weighted),
            error=(e0, e1),
        )
    return prof.norm_l2, prof.norm_weighted
