"""Catalog of smooth, compactly supported switching functions.

Three kinds are provided:

* ``BumpProduct``  -- chi(tau) = f(tau) f(1/kappa - tau), with
  f(tau) = (kappa tau)^(-3/2) exp(-1/(4 kappa tau)) for tau > 0;
* ``Plateau``      -- smooth ramp up over ``ramp``, flat top of length ``flat``,
  mirrored ramp down;
* ``Rescaled``     -- chi(tau / scale) for any base window.

All windows are immutable, hashable and evaluate vectorised over numpy arrays.
Values outside the declared support are exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

__all__ = [
    "InvalidParameterError",
    "SwitchingFunction",
    "BumpProduct",
    "Plateau",
    "Rescaled",
    "bump_factor",
    "bump_product_switch",
    "plateau_switch",
    "adiabatic_rescale",
]

# exp(-1/(4 kappa tau)) is below the smallest subnormal double here
_UNDERFLOW_ARG = 745.0

_GL64_X, _GL64_W = roots_legendre(64)


class InvalidParameterError(ValueError):
    """A physical parameter violates its domain."""


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(f"{name} must be > 0 (got {value!r})")
    return value


def _log_bump_factor(tau: np.ndarray, kappa: float) -> np.ndarray:
    """ln f on tau > 0; -inf elsewhere (including the underflow zone)."""
    tau = np.asarray(tau, dtype=float)
    out = np.full(tau.shape, -np.inf)
    x = kappa * tau
    ok = x > 1.0 / (4.0 * _UNDERFLOW_ARG)
    xo = x[ok]
    out[ok] = -1.5 * np.log(xo) - 0.25 / xo
    return out


def bump_factor(tau, kappa: float):
    """f(tau) = (kappa tau)^(-3/2) exp(-1/(4 kappa tau)) for tau > 0, else 0.

    Below kappa*tau ~ 1/2980 the exponential underflows and exact 0 is returned.
    """
    kappa = _positive("kappa", kappa)
    scalar = np.ndim(tau) == 0
    out = np.exp(_log_bump_factor(np.atleast_1d(tau), kappa))
    return float(out[0]) if scalar else out


class SwitchingFunction:
    """Common interface of catalog windows.

    Subclasses provide ``support``, ``_eval`` and ``_derivative``; the public
    ``__call__`` and ``derivative`` handle scalars and the exterior of the
    support.
    """

    kind: str

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def width(self) -> float:
        lo, hi = self.support
        return hi - lo

    @property
    def frequency_scale(self) -> float:
        """Natural inverse time of the switching, used to place fit windows."""
        raise NotImplementedError

    def _eval(self, tau: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self, tau: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _apply(self, fn, tau):
        scalar = np.ndim(tau) == 0
        t = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.zeros(t.shape)
        lo, hi = self.support
        inside = (t > lo) & (t < hi)
        if inside.any():
            out[inside] = fn(t[inside])
        return float(out[0]) if scalar else out

    def __call__(self, tau):
        return self._apply(self._eval, tau)

    def derivative(self, tau):
        return self._apply(self._derivative, tau)

    def l2_norm_sq(self) -> float:
        """Time-domain integral of chi^2."""
        return _quad_support(lambda t: self(t) ** 2, self)

    def derivative_l2_norm_sq(self) -> float:
        """Time-domain integral of chi'^2."""
        return _quad_support(lambda t: self.derivative(t) ** 2, self)

    def integral(self) -> float:
        return _quad_support(self, self)


def _quad_support(fn, chi: SwitchingFunction) -> float:
    lo, hi = chi.support
    pts = np.linspace(lo, hi, 9)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += quad(fn, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return total


@dataclass(frozen=True)
class BumpProduct(SwitchingFunction):
    """chi(tau) = f(tau) f(1/kappa - tau), supported on [0, 1/kappa]."""

    kappa: float = 1.0
    kind = "bump_product"

    def __post_init__(self):
        _positive("kappa", self.kappa)

    @property
    def support(self):
        return (0.0, 1.0 / self.kappa)

    @property
    def frequency_scale(self):
        return self.kappa

    def log_value(self, tau):
        tau = np.asarray(tau, dtype=float)
        w = 1.0 / self.kappa
        return _log_bump_factor(tau, self.kappa) + _log_bump_factor(w - tau, self.kappa)

    def _eval(self, tau):
        return np.exp(self.log_value(tau))

    def _derivative(self, tau):
        k = self.kappa
        u, v = tau, 1.0 / k - tau
        dlog = (-1.5 / u + 0.25 / (k * u * u)) - (-1.5 / v + 0.25 / (k * v * v))
        return self._eval(tau) * dlog

    def log_analytic(self, z: np.ndarray) -> np.ndarray:
        """Principal-branch continuation of ln chi into the lower half plane."""
        k = self.kappa
        u, v = k * z, k * (1.0 / k - z)
        return -1.5 * (np.log(u) + np.log(v)) - 0.25 / u - 0.25 / v

    @property
    def singularity_strength(self) -> tuple[float, float]:
        # exp(-c/z) strengths at the left and right support ends
        return (0.25 / self.kappa, 0.25 / self.kappa)


@dataclass(frozen=True)
class Plateau(SwitchingFunction):
    """Ramp-flat-ramp window on [0, 2*ramp + flat].

    The ramp is the normalised integral of b(u) = exp(-1/(u (ramp - u))).
    Equivalently chi = (b / Z) convolved with the indicator of
    [0, ramp + flat], which is what the spectral code exploits.
    """

    ramp: float = 1.0
    flat: float = 1.0
    kind = "plateau"

    def __post_init__(self):
        _positive("ramp duration", self.ramp)
        flat = float(self.flat)
        if not np.isfinite(flat) or flat < 0.0:
            raise InvalidParameterError(f"flat duration must be >= 0 (got {flat!r})")

    @property
    def support(self):
        return (0.0, 2.0 * self.ramp + self.flat)

    @property
    def frequency_scale(self):
        return 1.0 / self.ramp

    @property
    def box_length(self) -> float:
        return self.ramp + self.flat

    def log_ramp_density(self, u):
        """ln b(u) on the ramp; -inf outside (0, ramp)."""
        u = np.asarray(u, dtype=float)
        d = self.ramp
        out = np.full(u.shape, -np.inf)
        ok = (u > 0.0) & (u < d)
        uo = u[ok]
        out[ok] = -(1.0 / d) * (1.0 / uo + 1.0 / (d - uo))
        return out

    def log_ramp_analytic(self, z):
        d = self.ramp
        return -(1.0 / d) * (1.0 / z + 1.0 / (d - z))

    @cached_property
    def ramp_norm(self) -> float:
        """Z = integral of b over the ramp."""
        d = self.ramp
        b = lambda u: float(np.exp(self.log_ramp_density(np.array([u]))[0]))
        return 2.0 * quad(b, 0.0, d / 2, epsabs=0.0, epsrel=2e-14, limit=200)[0]

    def ramp_profile(self, t: np.ndarray) -> np.ndarray:
        """Normalised ramp R(t) = (1/Z) int_0^t b, for t in [0, ramp]."""
        t = np.asarray(t, dtype=float)
        d = self.ramp
        lower = t <= d / 2
        s = np.where(lower, t, d - t)
        # 64-point Gauss-Legendre on [0, s] per point; s <= d/2 keeps b smooth
        nodes = 0.5 * s[:, None] * (_GL64_X[None, :] + 1.0)
        vals = np.exp(self.log_ramp_density(nodes)) @ _GL64_W
        part = 0.5 * s * vals / self.ramp_norm
        return np.where(lower, part, 1.0 - part)

    def _eval(self, tau):
        d, total = self.ramp, self.support[1]
        out = np.ones(tau.shape)
        up = tau < d
        down = tau > d + self.flat
        if up.any():
            out[up] = self.ramp_profile(tau[up])
        if down.any():
            out[down] = self.ramp_profile(total - tau[down])
        return out

    def _derivative(self, tau):
        d, total = self.ramp, self.support[1]
        out = np.zeros(tau.shape)
        up = tau < d
        down = tau > d + self.flat
        z = self.ramp_norm
        out[up] = np.exp(self.log_ramp_density(tau[up])) / z
        out[down] = -np.exp(self.log_ramp_density(total - tau[down])) / z
        return out

    @property
    def singularity_strength(self):
        return (1.0 / self.ramp, 1.0 / self.ramp)

    def l2_norm_sq(self) -> float:
        # flat top contributes exactly its length; both ramps are equal
        d = self.ramp
        r2 = quad(lambda t: float(self.ramp_profile(np.array([t]))[0]) ** 2, 0.0, d,
                  epsabs=0.0, epsrel=1e-13, limit=200)[0]
        return self.flat + 2.0 * r2

    def derivative_l2_norm_sq(self) -> float:
        d, z = self.ramp, self.ramp_norm
        b2 = lambda u: float(np.exp(2.0 * self.log_ramp_density(np.array([u]))[0]))
        return 2.0 * quad(b2, 0.0, d, epsabs=0.0, epsrel=1e-13, limit=200)[0] / z**2

    def integral(self) -> float:
        return self.box_length


@dataclass(frozen=True)
class Rescaled(SwitchingFunction):
    """chi_scale(tau) = base(tau / scale)."""

    base: SwitchingFunction
    scale: float
    kind = "rescaled"

    def __post_init__(self):
        _positive("lambda", self.scale)

    @property
    def support(self):
        lo, hi = self.base.support
        return (lo * self.scale, hi * self.scale)

    @property
    def frequency_scale(self):
        return self.base.frequency_scale / self.scale

    def _eval(self, tau):
        return self.base(tau / self.scale)

    def _derivative(self, tau):
        return self.base.derivative(tau / self.scale) / self.scale

    def l2_norm_sq(self) -> float:
        return self.scale * self.base.l2_norm_sq()

    def derivative_l2_norm_sq(self) -> float:
        return self.base.derivative_l2_norm_sq() / self.scale

    def integral(self) -> float:
        return self.scale * self.base.integral()


def bump_product_switch(kappa: float) -> BumpProduct:
    return BumpProduct(_positive("kappa", kappa))


def plateau_switch(ramp: float, flat: float) -> Plateau:
    return Plateau(ramp, flat)


def adiabatic_rescale(chi: SwitchingFunction, lam: float) -> SwitchingFunction:
    """Slow down a switching by ``lam``.

    Bump products (and already rescaled windows) are stretched pointwise,
    chi(tau) -> chi(tau/lam).  Plateaus keep their ramps and stretch only the
    flat top, flat -> lam * flat; use ``Rescaled(plateau, lam)`` directly for
    a whole-window stretch.
    """
    lam = _positive("lambda", lam)
    if isinstance(chi, Plateau):
        return Plateau(chi.ramp, chi.flat * lam)
    if isinstance(chi, Rescaled):
        return Rescaled(chi.base, chi.scale * lam)
    return Rescaled(chi, lam)
