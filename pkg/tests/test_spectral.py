import math

import numpy as np
import pytest

from kmslab.spectral import (
    EnvelopeFitError,
    QuadratureError,
    autocorrelation,
    decay_envelope_fit,
    direct_fourier_transform,
    fit_envelope,
    fourier_transform,
    hull_samples,
    one_sided_bump_transform,
    reliable_limit,
    spectral_norms,
    spectral_profile,
)
from kmslab.switching import BumpProduct, Plateau, Rescaled

# mpmath reference values (tests/oracles.py)
INT_CHI = 2.6081973286931687322
L2_CHI = 7.7924828525204197488
L2_DCHI = 186.85432928900547695
CHI_HAT = {
    0.7: complex(2.4138950579753116041, -0.88114047969132836064),
    5.0: complex(-0.82988383280160363445, -0.61994172722067819966),
    20.0: complex(-0.19450482688346963994, 0.1261093105029527819),
    60.0: complex(0.0029540537681925218177, 0.01892169275797404595),
}

BUMP = BumpProduct(1.0)


def test_transform_at_zero_is_integral():
    ft = fourier_transform(BUMP, 0.0)
    assert ft.value[0].imag == pytest.approx(0.0, abs=1e-14)
    assert ft.value[0].real == pytest.approx(INT_CHI, rel=1e-10)


@pytest.mark.parametrize("omega", sorted(CHI_HAT))
def test_transform_matches_oracle(omega):
    got = fourier_transform(BUMP, omega).value[0]
    assert abs(got - CHI_HAT[omega]) <= 1e-11 * abs(CHI_HAT[omega])


def test_transform_matches_real_axis_quadrature():
    w = np.linspace(0.5, 60.0, 12)
    ft = fourier_transform(BUMP, w)
    ref = np.array([direct_fourier_transform(BUMP, x) for x in w])
    np.testing.assert_allclose(ft.value, ref, rtol=1e-9, atol=1e-13)


def test_conjugate_symmetry():
    for chi in (BUMP, Plateau(1.0, 1.0), Rescaled(BUMP, 3.0)):
        a, b = fourier_transform(chi, [-5.0, 5.0]).value
        assert abs(a) == pytest.approx(abs(b), rel=1e-10)
        assert a == pytest.approx(np.conj(b), rel=1e-12)


def test_rescaling_identity():
    lam, w = 3.0, 0.7
    lhs = fourier_transform(Rescaled(BUMP, lam), w).value[0]
    rhs = lam * fourier_transform(BUMP, lam * w).value[0]
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_plateau_transform_matches_real_axis_quadrature():
    chi = Plateau(1.0, 2.0)
    w = np.array([0.0, 0.3, 2.0, 7.5, 15.0])
    ft = fourier_transform(chi, w)
    ref = np.array([direct_fourier_transform(chi, x) for x in w])
    np.testing.assert_allclose(ft.value, ref, rtol=1e-8, atol=1e-12)


def test_large_frequency_keeps_relative_accuracy():
    # exp(-a sqrt(w)) magnitudes far below double precision of the real-axis integral
    ft = fourier_transform(BUMP, [1e4, 3e4])
    assert np.all(np.isfinite(ft.log_abs))
    assert np.all(ft.abs_error <= 1e-9 * np.exp(ft.log_scale))
    closed = one_sided_bump_transform(np.array([1e4, 3e4]))
    # two saddle contributions of the same size as the one-sided transform, up to the algebraic factor
    assert np.all(np.abs(ft.log_abs - np.log(np.abs(closed))) < 12.0)


def test_transform_error_floor_raises():
    # phase rounding of exp(-i omega tau) alone exceeds 1e-9 of the scale here
    with pytest.raises(QuadratureError) as info:
        fourier_transform(BUMP, 1e5, rtol=1e-9)
    assert info.value.error > 1e-9
    assert np.isfinite(fourier_transform(BUMP, 1e5, rtol=1e-6).log_abs[0])


def test_beyond_reliable_window():
    far = 2.0 * reliable_limit(BUMP)
    with pytest.raises(QuadratureError):
        fourier_transform(BUMP, far)
    env = decay_envelope_fit(BUMP)
    ft = fourier_transform(BUMP, [1.0, far], envelope=env)
    assert ft.flagged.tolist() == [False, True]
    assert ft.log_abs[1] == pytest.approx(env.log(far))


def test_one_sided_closed_form_against_quadrature():
    from scipy.integrate import quad

    from kmslab.switching import bump_factor

    for w in np.geomspace(1.0, 100.0, 7):
        f = lambda t: bump_factor(t, 1.0)
        # tail beyond t = 4e4 is below 1e-7 of the total relative to the result scale
        re = quad(f, 0.0, np.inf, weight="cos", wvar=w, limlst=200)[0]
        im = -quad(f, 0.0, np.inf, weight="sin", wvar=w, limlst=200)[0]
        ref = one_sided_bump_transform(w, 1.0)
        assert abs(complex(re, im) - ref) <= 1e-6 * abs(ref)


def test_spectral_norms_parseval():
    n0, n1 = spectral_norms(BUMP)
    assert n0 == pytest.approx(2 * math.pi * L2_CHI, rel=1e-8)
    assert n1 == pytest.approx(2 * math.pi * L2_DCHI, rel=1e-6)
    # time-domain route of the same identities
    assert 2 * math.pi * BUMP.l2_norm_sq() == pytest.approx(n0, rel=1e-10)


def test_spectral_norms_regression():
    n0, n1 = spectral_norms(BUMP)
    assert n0 == pytest.approx(48.96161376540515, rel=1e-10)
    assert n1 == pytest.approx(1174.040376371575, rel=1e-8)


def test_parseval_plateau():
    chi = Plateau(1.0, 1.0)
    n0, _ = spectral_norms(chi)
    assert n0 == pytest.approx(2 * math.pi * chi.l2_norm_sq(), rel=1e-8)


def test_profile_density_even_and_nonnegative():
    prof = spectral_profile(BUMP)
    assert np.all(prof.density >= 0.0)
    w = prof.omega_grid[::997]
    plus = fourier_transform(BUMP, w).log_density
    minus = fourier_transform(BUMP, -w).log_density
    np.testing.assert_allclose(minus, plus, rtol=0, atol=1e-10)


def test_autocorrelation_basics():
    assert autocorrelation(BUMP, 0.0) == pytest.approx(L2_CHI, rel=1e-12)
    assert autocorrelation(BUMP, 0.3) == pytest.approx(autocorrelation(BUMP, -0.3), rel=1e-10)
    assert autocorrelation(BUMP, 2.0) == 0.0
    assert autocorrelation(BUMP, -2.5) == 0.0


def test_autocorrelation_derivatives():
    s, h = 0.31, 1e-5
    g1 = autocorrelation(BUMP, s, 1)
    g2 = autocorrelation(BUMP, s, 2)
    fd1 = (autocorrelation(BUMP, s + h) - autocorrelation(BUMP, s - h)) / (2 * h)
    fd2 = (autocorrelation(BUMP, s + h, 1) - autocorrelation(BUMP, s - h, 1)) / (2 * h)
    assert g1 == pytest.approx(fd1, rel=1e-7)
    assert g2 == pytest.approx(fd2, rel=1e-6)
    assert autocorrelation(BUMP, 0.0, 2) == pytest.approx(-L2_DCHI, rel=1e-10)


def test_autocorrelation_order_checked():
    with pytest.raises(ValueError):
        autocorrelation(BUMP, 0.1, 3)


def test_envelope_bump_kappa_one():
    env = decay_envelope_fit(BUMP)
    assert env.exponent == pytest.approx(0.5, rel=0.10)
    assert env.rate == pytest.approx(1 / math.sqrt(2), rel=0.15)


def test_envelope_scaling_with_kappa():
    e1 = decay_envelope_fit(BUMP)
    e2 = decay_envelope_fit(BumpProduct(2.0))
    assert e2.exponent == pytest.approx(0.5, rel=0.10)
    assert e2.rate == pytest.approx(e1.rate / math.sqrt(2), rel=0.15)


def test_envelope_plateau_superpolynomial():
    env = decay_envelope_fit(Plateau(1.0, 2.0))
    assert 0.0 < env.exponent < 1.0
    assert env.rate > 0.0


def test_envelope_soundness():
    for chi in (BUMP, Plateau(1.0, 2.0)):
        env = decay_envelope_fit(chi)
        w = np.geomspace(*env.window, 333)
        ft = fourier_transform(chi, w)
        assert np.all(ft.log_abs <= math.log(1.5) + env.log(w))
        hw, hl = hull_samples(chi, env.window)
        assert np.all(hl <= math.log(1.5) + env.log(hw))


def test_envelope_fit_recovers_gaussian():
    # sanity check of the fit itself: exp(-w^2/8), no algebraic prefactor
    w = np.geomspace(0.5, 6.0, 60)
    env = fit_envelope(w, -(w**2) / 8.0)
    assert env.exponent == pytest.approx(2.0, rel=1e-3)
    assert env.rate == pytest.approx(1 / 8.0, rel=1e-2)


def test_envelope_fit_rejects_bad_model():
    w = np.linspace(1.0, 100.0, 60)
    noisy = np.where(np.arange(60) % 2 == 0, 0.0, -5.0)
    with pytest.raises(EnvelopeFitError) as info:
        fit_envelope(w, noisy)
    assert info.value.residual > 0.25


def test_fit_window_must_be_reliable():
    with pytest.raises(ValueError):
        decay_envelope_fit(BUMP, window=(1e2, 1e9))
