"""Detailed-balance temperature estimates and asymptotic thermality scans.

The estimator is 1/T = (ln F(-E) - ln F(E)) / E.  A scan evaluates it
along an energy grid with an interaction time lambda(E) that grows
polynomially in the gap, compares the departure from 2 pi/a with the
leading-order error bands and issues a verdict.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .response import (
    ResponseResult,
    ln_planck_factor,
    response_frequency,
)
from .switching import InvalidParameterError, Plateau, Rescaled, SwitchingFunction

logger = logging.getLogger(__name__)

__all__ = [
    "THERMAL",
    "NOT_THERMAL",
    "INCONCLUSIVE",
    "UndefinedTemperatureError",
    "ScalingSchedule",
    "ThermalityBounds",
    "ThermalityReport",
    "schedule_lambda",
    "bounds",
    "temperature_estimate",
    "classify",
    "thermality_scan",
    "plateau_scan",
    "exact_kernel_responses",
]

THERMAL = "polynomially_asymptotically_thermal"
NOT_THERMAL = "not_thermal"
INCONCLUSIVE = "inconclusive"

TWO_PI = 2.0 * math.pi


class UndefinedTemperatureError(ArithmeticError):
    """The estimator needs strictly positive responses."""


@dataclass(frozen=True)
class ScalingSchedule:
    """lambda(E) = alpha (2 pi E / a)^(1 + p) with alpha > pi kappa/(2a), p > 1."""

    alpha: float
    p: float
    a: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "p", "a", "kappa"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0.0:
                raise InvalidParameterError(f"{name} must be > 0 (got {v!r})")
        threshold = math.pi * self.kappa / (2.0 * self.a)
        if not self.alpha > threshold:
            raise InvalidParameterError(
                f"schedule requires alpha > pi*kappa/(2a) = {threshold:.17g} (got alpha={self.alpha!r})"
            )
        if not self.p > 1.0:
            raise InvalidParameterError(f"schedule requires p > 1 (got p={self.p!r})")


def _gap_variable(E: float, a: float) -> float:
    E = float(E)
    if not np.isfinite(E) or E <= 0.0:
        raise InvalidParameterError(f"energy gap E must be > 0 (got {E!r})")
    return TWO_PI * E / a


def schedule_lambda(s: ScalingSchedule, E: float) -> float:
    return s.alpha * _gap_variable(E, s.a) ** (1.0 + s.p)


@dataclass(frozen=True)
class ThermalityBounds:
    """Leading-order widths of the allowed band [-b_minus, b_plus] on 1/T - 2 pi/a."""

    b_minus: float
    b_plus: float
    leading_order: bool = True


def _bounds(a: float, p: float, norm_ratio: float, x: float) -> ThermalityBounds:
    b_minus = 4.0 / (TWO_PI**5 * a) * x ** (-(1.0 + p) / 2.0)
    b_plus = norm_ratio * math.pi**2 / (3.0 * a * a) * x ** (-(4.0 + 2.0 * p))
    return ThermalityBounds(b_minus, b_plus)


def bounds(s: ScalingSchedule, chi_norms: tuple[float, float], E: float) -> ThermalityBounds:
    """B-(E) and B+(E) from the schedule and (||chi_hat||^2, ||omega chi_hat||^2)."""
    norm_l2, norm_w = chi_norms
    return _bounds(s.a, s.p, norm_w / norm_l2, _gap_variable(E, s.a))


def temperature_estimate(ln_F_minus: float, ln_F_plus: float, E: float) -> float:
    """Inverse temperature (ln F(-E) - ln F(E)) / E, computed in log space."""
    E = float(E)
    if not np.isfinite(E) or E <= 0.0:
        raise InvalidParameterError(f"energy gap E must be > 0 (got {E!r})")
    for v in (ln_F_minus, ln_F_plus):
        if not np.isfinite(v):
            raise UndefinedTemperatureError(f"response log value {v!r} is not finite")
    return (ln_F_minus - ln_F_plus) / E


# --------------------------------------------------------------------------
# verdicts


def classify(
    x: Sequence[float],
    deviation: Sequence[float],
    noise: Sequence[float],
    band: Sequence[ThermalityBounds],
    slack: float = 10.0,
    decay_gate: float = -0.5,
) -> tuple[str, float | None]:
    """Verdict and fitted log-log exponent of |deviation| against x = 2 pi E/a.

    Points at or below their noise level are left out of the fit; two or more
    such points make the scan inconclusive, unless every deviation vanishes
    identically, which is thermal with no exponent to report.
    """
    x = np.asarray(x, dtype=float)
    dev = np.asarray(deviation, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if np.all(dev == 0.0):
        return THERMAL, None
    resolved = np.abs(dev) > noise
    if np.count_nonzero(~resolved) >= 2:
        return INCONCLUSIVE, None
    slope = float(np.polyfit(np.log(x[resolved]), np.log(np.abs(dev[resolved])), 1)[0])
    lo = np.array([-slack * b.b_minus for b in band]) - noise
    hi = np.array([slack * b.b_plus for b in band]) + noise
    inside = bool(np.all((dev >= lo) & (dev <= hi)))
    return (THERMAL if slope < decay_gate and inside else NOT_THERMAL), slope


@dataclass(frozen=True)
class ThermalityReport:
    """A scan along an energy grid; every list is aligned with ``E_grid``.

    ``deviation`` is 1/T_est - 2 pi/a and ``noise`` its propagated
    quadrature error.  ``fitted_exponent`` is None when no fit applies.
    """

    E_grid: list
    lambdas: list
    ln_F_minus: list
    ln_F_plus: list
    inv_T_est: list
    deviation: list
    bounds: list
    noise: list
    fitted_exponent: float | None
    verdict: str
    a: float = 1.0
    notes: list = field(default_factory=list)

    @property
    def gap_variable(self) -> list:
        return [TWO_PI * E / self.a for E in self.E_grid]

    @property
    def temperatures(self) -> list:
        return [1.0 / v if v != 0.0 else math.inf for v in self.inv_T_est]

    def rows(self) -> list[dict]:
        return [
            {
                "E": E,
                "lambda": lam,
                "ln_F_minus": fm,
                "ln_F_plus": fp,
                "inv_T_est": it,
                "deviation": d,
                "B_minus": b.b_minus,
                "B_plus": b.b_plus,
                "noise": n,
            }
            for E, lam, fm, fp, it, d, b, n in zip(
                self.E_grid, self.lambdas, self.ln_F_minus, self.ln_F_plus,
                self.inv_T_est, self.deviation, self.bounds, self.noise,
            )
        ]


# --------------------------------------------------------------------------
# scans

# (E, lam) -> (response at -E, response at +E)
ResponsePair = Callable[[float, float], tuple[ResponseResult, ResponseResult]]


def _frequency_pair(chi: SwitchingFunction, a: float, tol: float) -> ResponsePair:
    def pair(E, lam):
        return (
            response_frequency(chi, -E, lam, a, tol),
            response_frequency(chi, E, lam, a, tol),
        )

    return pair


def exact_kernel_responses(a: float = 1.0) -> ResponsePair:
    """Responses equal to the bare kernel G(-+E), i.e. the infinite-time limit of any window."""

    def pair(E, lam):
        def one(e):
            lv = float(ln_planck_factor(e, a))
            return ResponseResult(lv, 1, 0.0, "infinite_time_limit", e, lam, 0.0, 0.0)

        return one(-E), one(E)

    return pair


def _validate_grid(E_grid) -> list[float]:
    grid = [float(e) for e in E_grid]
    if len(grid) < 4:
        raise InvalidParameterError(f"grid too short: {len(grid)} point(s), at least 4 required")
    if any(not np.isfinite(e) or e <= 0.0 for e in grid):
        raise InvalidParameterError("energy grid must be positive and finite")
    if any(e2 <= e1 for e1, e2 in zip(grid, grid[1:])):
        raise InvalidParameterError("energy grid must be strictly increasing")
    return grid


def _run(
    grid: list[float],
    lambdas: list[float],
    pair: ResponsePair,
    band: list[ThermalityBounds],
    a: float,
    slack: float,
    decay_gate: float,
    workers: int,
    notes: list,
) -> ThermalityReport:
    jobs = list(zip(grid, lambdas))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: pair(*job), jobs))
    else:
        results = [pair(*job) for job in jobs]

    ln_m, ln_p, inv_t, dev, noise = [], [], [], [], []
    for E, (rm, rp) in zip(grid, results):
        if rm.sign <= 0 or rp.sign <= 0:
            raise UndefinedTemperatureError(f"non-positive response at E={E!r}")
        ln_m.append(rm.ln_value)
        ln_p.append(rp.ln_value)
        inv_t.append(temperature_estimate(rm.ln_value, rp.ln_value, E))
        if np.isfinite(rm.ln_ratio) and np.isfinite(rp.ln_ratio):
            # the kernel factors cancel exactly: only ln(F/F_inf) is left
            d = temperature_estimate(rm.ln_ratio, rp.ln_ratio, E)
            n = (rm.ratio_error_ln + rp.ratio_error_ln) / E
        else:
            d = inv_t[-1] - TWO_PI / a
            n = (rm.abs_error_ln + rp.abs_error_ln) / E
        dev.append(d)
        noise.append(n)
    x = [TWO_PI * E / a for E in grid]
    verdict, slope = classify(x, dev, noise, band, slack, decay_gate)
    return ThermalityReport(
        E_grid=grid,
        lambdas=lambdas,
        ln_F_minus=ln_m,
        ln_F_plus=ln_p,
        inv_T_est=inv_t,
        deviation=dev,
        bounds=band,
        noise=noise,
        fitted_exponent=slope,
        verdict=verdict,
        a=a,
        notes=notes,
    )


def _window_norms(chi: SwitchingFunction) -> tuple[float, float]:
    from .spectral import spectral_norms

    if isinstance(chi, (Plateau, Rescaled)) and isinstance(_base(chi), Plateau):
        return 2.0 * math.pi * chi.l2_norm_sq(), 2.0 * math.pi * chi.derivative_l2_norm_sq()
    return spectral_norms(chi)


def _base(chi):
    while isinstance(chi, Rescaled):
        chi = chi.base
    return chi


def thermality_scan(
    chi: SwitchingFunction | None,
    s: ScalingSchedule,
    E_grid: Sequence[float],
    tol: float = 1e-8,
    slack: float = 10.0,
    decay_gate: float = -0.5,
    fixed_lambda: float | None = None,
    responses: ResponsePair | None = None,
    norms: tuple[float, float] | None = None,
    workers: int = 1,
) -> ThermalityReport:
    """Scan 1/T_est - 2pi/a along ``E_grid`` with lambda = schedule_lambda(s, E).

    ``fixed_lambda`` replaces the schedule by a constant (a degenerate,
    test-only setting).  ``responses`` swaps the response evaluation, e.g.
    for ``exact_kernel_responses``; ``chi`` may then be None if ``norms``
    are given.
    """
    grid = _validate_grid(E_grid)
    notes: list[str] = []
    if fixed_lambda is not None:
        lambdas = [float(fixed_lambda)] * len(grid)
        notes.append(f"fixed lambda = {float(fixed_lambda)!r}; schedule bypassed")
    else:
        lambdas = [schedule_lambda(s, E) for E in grid]
    if norms is None:
        if chi is None:
            raise InvalidParameterError("either a switching function or its spectral norms is required")
        norms = _window_norms(chi)
    band = [bounds(s, norms, E) for E in grid]
    # tolerance pre-check: ln-F noise alone must stay below the band
    worst = max(2.0 * tol / E - b.b_minus for E, b in zip(grid, band))
    if worst > 0.0:
        msg = f"ln F tolerance {tol:.1e} may exceed the B- band at the top of the grid"
        logger.warning(msg)
        notes.append(msg)
    pair = responses if responses is not None else _frequency_pair(chi, s.a, tol)
    return _run(grid, lambdas, pair, band, s.a, slack, decay_gate, workers, notes)


def plateau_scan(
    ramp: float,
    flat: float,
    degree: int,
    E_grid: Sequence[float],
    a: float = 1.0,
    control: bool = False,
    tol: float = 1e-8,
    slack: float = 10.0,
    decay_gate: float = -0.5,
    workers: int = 1,
) -> ThermalityReport:
    """Plateau windows with lambda(E) = (2 pi E/a)^degree.

    By default lambda stretches the flat top only and the ramps stay fixed.
    With ``control=True`` the whole window is rescaled instead.  The bands
    use p = degree - 1, the exponent for which lambda matches the schedule
    form.
    """
    degree_i = int(degree)
    if degree_i != degree or degree_i < 1:
        raise InvalidParameterError(f"polynomial degree must be an integer >= 1 (got {degree!r})")
    grid = _validate_grid(E_grid)
    if not np.isfinite(a) or a <= 0.0:
        raise InvalidParameterError(f"acceleration a must be > 0 (got {a!r})")
    shape = Plateau(ramp, flat)
    lambdas = [(TWO_PI * E / a) ** degree_i for E in grid]
    p = degree_i - 1.0
    notes = ["whole-window rescaling (control run)" if control else "flat top stretched, ramps fixed"]

    windows = {}
    for lam in lambdas:
        windows[lam] = Rescaled(shape, lam) if control else Plateau(ramp, flat * lam)

    def pair(E, lam):
        chi = windows[lam]
        return (
            response_frequency(chi, -E, 1.0, a, tol),
            response_frequency(chi, E, 1.0, a, tol),
        )

    band = []
    for E, lam in zip(grid, lambdas):
        n0, n1 = _window_norms(windows[lam])
        band.append(_bounds(a, p, n1 / n0, TWO_PI * E / a))
    return _run(grid, lambdas, pair, band, a, slack, decay_gate, workers, notes)
