"""Saddle-point contour quadrature for Fourier integrals of bump-type windows.

For h analytic in the lower half plane over (0, width), with essential zeros
exp(-c/z) at z = 0 and exp(-c'/(width - z)) at z = width, the integral

    I(omega) = int_0^width exp(-i omega z) h(z) dz,   omega >= 0

is moved onto the triangle 0 -> width/2 - i width/2 -> width.  Both legs leave
the real axis at 45 degrees and pass through the saddle points that dominate
|I| ~ exp(-sqrt(2 c omega)), so the quadrature never has to resolve the
catastrophic cancellation of the real-axis integral.  On each leg the radius
is parametrised logarithmically and a composite Gauss-Legendre rule is placed
around the saddle.

Results are returned as (log_scale, mantissa) pairs so that magnitudes far
below the double range survive.
"""

from __future__ import annotations

import numpy as np
from scipy.special import roots_legendre

_SQ2 = np.sqrt(2.0)
_ROT_A = np.exp(-0.25j * np.pi)  # leg leaving z = 0
_ROT_B = np.exp(0.25j * np.pi)   # leg arriving at z = width

# relative magnitude (in e-folds) below which integrand mass is dropped
_CUTOFF_EFOLDS = 60.0


def _composite_rule(panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


_FINE = _composite_rule(16, 10)
_COARSE = _composite_rule(16, 8)


def _leg_range(omega: np.ndarray, c: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    """log-radius interval carrying the non-negligible part of one leg."""
    r_apex = width / _SQ2
    # exp(-c/(sqrt2 r)) < exp(-800) below this radius
    s_lo = np.full(omega.shape, np.log(c / (_SQ2 * 800.0)))
    s_hi = np.full(omega.shape, np.log(r_apex))
    m = np.sqrt(2.0 * c * np.maximum(omega, 0.0))
    big = m > 1.0
    if big.any():
        s_saddle = 0.5 * np.log(c / omega[big])
        half = np.arccosh(1.0 + _CUTOFF_EFOLDS / m[big])
        s_lo[big] = np.maximum(s_lo[big], s_saddle - half)
        s_hi[big] = np.minimum(s_hi[big], s_saddle + half)
    # saddle may sit past the apex for tiny omega: keep a non-empty interval
    s_lo = np.minimum(s_lo, s_hi - 1e-3)
    return s_lo, s_hi


def _leg_log_terms(log_h, omega, c, width, leg, rule):
    nodes, weights = rule
    s_lo, s_hi = _leg_range(omega, c, width)
    span = (s_hi - s_lo)[:, None]
    s = s_lo[:, None] + span * nodes[None, :]
    r = np.exp(s)
    if leg == "a":
        z = r * _ROT_A
        rot = _ROT_A
    else:
        z = width - r * _ROT_B
        rot = _ROT_B
    expo = log_h(z) - 1j * omega[:, None] * z + s + np.log(weights)[None, :] + np.log(span)
    return expo + np.log(rot)


def segment_transform(log_h, omega, width: float, c_left: float, c_right: float):
    """Return (log_scale, mantissa, abs_error_mantissa) for omega >= 0.

    I(omega) = exp(log_scale) * mantissa; the error is on the same scale and
    is the difference of two composite rules of different order.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    out_scale = np.empty(omega.shape)
    out_val = np.empty(omega.shape, dtype=complex)
    out_err = np.empty(omega.shape)
    chunk = 512
    for i in range(0, omega.size, chunk):
        om = omega[i:i + chunk]
        fine = [
            _leg_log_terms(log_h, om, c_left, width, "a", _FINE),
            _leg_log_terms(log_h, om, c_right, width, "b", _FINE),
        ]
        coarse = [
            _leg_log_terms(log_h, om, c_left, width, "a", _COARSE),
            _leg_log_terms(log_h, om, c_right, width, "b", _COARSE),
        ]
        shift = np.max(np.concatenate([t.real for t in fine], axis=1), axis=1)
        terms = [np.exp(t - shift[:, None]) for t in fine]
        val_f = sum(t.sum(axis=1) for t in terms)
        mass = sum(np.abs(t).sum(axis=1) for t in terms)
        val_c = sum(np.exp(t - shift[:, None]).sum(axis=1) for t in coarse)
        out_scale[i:i + chunk] = shift
        out_val[i:i + chunk] = val_f
        # phase rounding of exp(-i omega width) sets an absolute floor
        floor = 4e-16 * (1.0 + om * width) * mass
        out_err[i:i + chunk] = np.abs(val_f - val_c) + floor
    return out_scale, out_val, out_err
