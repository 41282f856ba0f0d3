"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records a PASS/FAIL line (printed in the pytest terminal summary)
before asserting, so a failing criterion still shows its measured numbers.
"""

import math
import time

import numpy as np
from scipy.integrate import quad

from kmslab import cli
from kmslab.response import ln_planck_factor, response_frequency, response_time
from kmslab.spectral import decay_envelope_fit, one_sided_bump_transform
from kmslab.switching import BumpProduct, Rescaled, bump_factor
from kmslab.thermality import (
    NOT_THERMAL,
    ScalingSchedule,
    bounds,
    plateau_scan,
    temperature_estimate,
    thermality_scan,
)

TWO_PI = 2 * math.pi
BUMP = BumpProduct(1.0)
X_GRID = (20.0, 40.0, 80.0, 160.0)
E_GRID = [x / TWO_PI for x in X_GRID]


def test_criterion_1_cross_method(acceptance):
    t0 = time.perf_counter()
    worst, ok = 0.0, True
    for lam in (1.0, 2.0, 4.0):
        chi = Rescaled(BUMP, lam)
        for E in (0.5, 1.0, 2.0):
            rt = response_time(chi, E)
            rf = response_frequency(BUMP, E, lam)
            diff = abs(rt.ln_value - rf.ln_value)
            worst = max(worst, diff)
            ok &= diff <= 1e-5 + rt.abs_error_ln + rf.abs_error_ln
    dt = time.perf_counter() - t0
    passed = ok and dt < 120
    acceptance("1 cross-method", passed, f"max |d ln F| = {worst:.2e} (tol 1e-5 + errors)", dt, 120)
    assert passed


def test_criterion_2_detailed_balance(acceptance):
    rng = np.random.default_rng(2)
    w = rng.uniform(-50, 50, 100)
    a = rng.choice([0.5, 1.0, 2.0], 100)
    err = np.array([abs(ln_planck_factor(-x, b) - ln_planck_factor(x, b) - TWO_PI * x / b) for x, b in zip(w, a)])
    passed = bool(np.max(err) <= 1e-12)
    acceptance("2 detailed balance", passed, f"max error {np.max(err):.1e} (tol 1e-12)")
    assert passed


def test_criterion_3_pointwise_limit(acceptance):
    t0 = time.perf_counter()
    lams = np.array([10.0, 30.0, 100.0, 300.0, 1000.0])
    dev = []
    for lam in lams:
        lm = response_frequency(BUMP, -1.0, lam).ln_value
        lp = response_frequency(BUMP, 1.0, lam).ln_value
        dev.append(abs(temperature_estimate(lm, lp, 1.0) - TWO_PI))
    slope = np.polyfit(np.log(lams), np.log(dev), 1)[0]
    dt = time.perf_counter() - t0
    passed = abs(slope + 2.0) <= 0.2 and dt < 60
    acceptance("3 pointwise limit", passed, f"slope {slope:.3f} (target -2 +- 0.2)", dt, 60)
    assert passed


def test_criterion_4_unruh_thermality(acceptance):
    t0 = time.perf_counter()
    rep = thermality_scan(BUMP, ScalingSchedule(math.pi, 2.0), E_GRID, tol=1e-8)
    inside = all(
        -10 * b.b_minus - n <= d <= 10 * b.b_plus + n for d, b, n in zip(rep.deviation, rep.bounds, rep.noise)
    )
    dt = time.perf_counter() - t0
    slope = rep.fitted_exponent
    passed = slope is not None and slope <= -0.5 and inside and dt < 600
    acceptance("4 Unruh thermality", passed, f"exponent {slope:.3f} (<= -0.5), inside 10x band: {inside}", dt, 600)
    assert passed


def test_criterion_5_plateau_counterexample(acceptance):
    t0 = time.perf_counter()
    rep = plateau_scan(1.0, 1.0, 2, E_GRID)
    top = slice(len(E_GRID) // 2, None)
    floor = all(abs(d) > 10 * n for d, n in zip(rep.deviation[top], rep.noise[top]))
    stalls = rep.fitted_exponent >= -0.5 or floor
    ctrl = plateau_scan(1.0, 1.0, 2, E_GRID, control=True)
    mags = np.abs(ctrl.deviation)
    decays = bool(np.all(np.diff(mags) < 0)) and ctrl.fitted_exponent < -0.5
    dt = time.perf_counter() - t0
    passed = stalls and rep.verdict == NOT_THERMAL and decays and dt < 600
    acceptance(
        "5 plateau counterexample",
        passed,
        f"exponent {rep.fitted_exponent:.3f}, verdict {rep.verdict}; control exponent {ctrl.fitted_exponent:.3f}",
        dt,
        600,
    )
    assert passed


def test_criterion_6_spectral_decay(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    for w in np.geomspace(1.0, 100.0, 9):
        f = lambda t: bump_factor(t, 1.0)
        re = quad(f, 0.0, np.inf, weight="cos", wvar=w, limlst=200)[0]
        im = -quad(f, 0.0, np.inf, weight="sin", wvar=w, limlst=200)[0]
        ref = one_sided_bump_transform(w, 1.0)
        worst = max(worst, abs(complex(re, im) - ref) / abs(ref))
    env = decay_envelope_fit(BUMP, window=(1e2, 1e4))
    dt = time.perf_counter() - t0
    q_ok = abs(env.exponent - 0.5) <= 0.05
    b_ok = abs(env.rate - 1 / math.sqrt(2)) <= 0.15 / math.sqrt(2)
    passed = worst <= 1e-6 and q_ok and b_ok and dt < 120
    acceptance(
        "6 spectral decay",
        passed,
        f"closed form rel err {worst:.1e}; q = {env.exponent:.4f}, beta = {env.rate:.4f}",
        dt,
        120,
    )
    assert passed


def test_criterion_7_bound_arithmetic(acceptance):
    s = ScalingSchedule(math.pi, 2.0, a=1.0)
    b = bounds(s, (1.0, 1.0), 100.0 / TWO_PI)
    value_ok = abs(b.b_minus - 4.0847e-7) <= 1e-11
    b1, b4 = bounds(s, (1.0, 3.0), 1.0), bounds(s, (1.0, 3.0), 4.0)
    r_minus = b4.b_minus / b1.b_minus / 4 ** (-(1 + s.p) / 2) - 1
    r_plus = b4.b_plus / b1.b_plus / 4 ** (-(4 + 2 * s.p)) - 1
    ratio_ok = abs(r_minus) <= 1e-14 and abs(r_plus) <= 1e-14
    passed = value_ok and ratio_ok
    acceptance("7 bound arithmetic", passed, f"B- = {b.b_minus:.6e}; ratio errors {r_minus:.1e}, {r_plus:.1e}")
    assert passed


CRITERION_4_INI = """\
[switching]
kind = bump_product
kappa = 1.0

[physics]
a = 1.0

[schedule]
alpha = 3.141592653589793
p = 2

[grid]
variable = x
grid_min = 20
grid_max = 160
count = 4
spacing = log

[tolerances]
ln_f_tol = 1e-8
"""


def test_criterion_8_reproducibility(acceptance, tmp_path):
    ini = tmp_path / "c4.ini"
    ini.write_text(CRITERION_4_INI, encoding="utf-8")
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert cli.main(["thermality", "--config", str(ini), "--out", str(out)]) == cli.EXIT_OK
        outs.append((out / "thermality.csv").read_bytes())
    passed = outs[0] == outs[1] and len(outs[0]) > 0
    acceptance("8 reproducibility", passed, f"thermality.csv identical across runs: {passed}")
    assert passed
