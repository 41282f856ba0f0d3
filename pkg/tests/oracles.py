"""Independent high-precision reference computations (mpmath).

None of this touches the package numerics; the frozen fixtures used by the
tests were produced by ``python3 tests/oracles.py``.
"""

import mpmath as mp

mp.mp.dps = 30


def bump(tau, kappa=1):
    tau = mp.mpf(tau)
    k = mp.mpf(kappa)
    w = 1 / k
    if tau <= 0 or tau >= w:
        return mp.mpf(0)
    f = lambda t: (k * t) ** mp.mpf(-1.5) * mp.exp(-1 / (4 * k * t))
    return f(tau) * f(w - tau)


def bump_derivative(tau, kappa=1):
    return mp.diff(lambda t: bump(t, kappa), tau)


def _pieces(kappa):
    w = 1 / mp.mpf(kappa)
    return [w * j / 16 for j in range(17)]


def bump_integral(kappa=1):
    return mp.quad(lambda t: bump(t, kappa), _pieces(kappa))


def bump_l2(kappa=1):
    return mp.quad(lambda t: bump(t, kappa) ** 2, _pieces(kappa))


def bump_derivative_l2(kappa=1):
    k = mp.mpf(kappa)
    w = 1 / k

    def dchi(t):
        u, v = t, w - t
        dlog = (-mp.mpf(1.5) / u + 1 / (4 * k * u * u)) - (-mp.mpf(1.5) / v + 1 / (4 * k * v * v))
        return bump(t, kappa) * dlog

    return mp.quad(lambda t: dchi(t) ** 2, _pieces(kappa))


def bump_transform(omega, kappa=1):
    om = mp.mpf(omega)
    re = mp.quad(lambda t: bump(t, kappa) * mp.cos(om * t), _pieces(kappa))
    im = -mp.quad(lambda t: bump(t, kappa) * mp.sin(om * t), _pieces(kappa))
    return mp.mpc(re, im)


def planck(omega, a=1):
    om, a = mp.mpf(omega), mp.mpf(a)
    if om == 0:
        return a / (2 * mp.pi)
    return om / mp.expm1(2 * mp.pi * om / a)


def plateau_ramp_norm(ramp=1):
    d = mp.mpf(ramp)
    return mp.quad(lambda u: mp.exp(-1 / (u * (d - u))), [0, d / 2, d])


if __name__ == "__main__":
    print("int chi        ", mp.nstr(bump_integral(), 20))
    print("||chi||^2      ", mp.nstr(bump_l2(), 20))
    print("||chi'||^2     ", mp.nstr(bump_derivative_l2(), 20))
    for w in (0.7, 5, 20, 60):
        z = bump_transform(w)
        print("chi_hat", w, mp.nstr(z.real, 20), mp.nstr(z.imag, 20))
    print("G(1)           ", mp.nstr(planck(1), 20))
    print("Z(ramp=1)      ", mp.nstr(plateau_ramp_norm(), 20))
    print("chi(0.5)       ", mp.nstr(bump(0.5), 20))
