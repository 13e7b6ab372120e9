"""Exact spectral gap of the Gibbs measure with a flat plateau and quadratic wings.

On a wing V = kappa r^2 / 2 the eigen-ODE f'' - (kappa r / t) f' + lam f = 0 is
solved by the Hermite function He_nu(y) = e^{y^2/4} D_nu(y), y = r sqrt(kappa/t),
nu = lam t / kappa. Matching f'/f at the plateau ends gives a scalar equation in
k = sqrt(lam). Used to freeze expected values in the C++ tests.
"""
import sys
import mpmath as mp

mp.mp.dps = 40


def wing_log_slope(lam, kappa, t):
    # outward f'/f at r = 0+ for the polynomially bounded wing solution
    nu = lam * t / kappa
    ratio = mp.sqrt(2) * mp.gamma((1 - nu) / 2) / mp.gamma(-nu / 2)
    return -mp.sqrt(kappa / t) * ratio


def gap(length, kappa_l, kappa_r, t, guess=None):
    def residual(k):
        lam = k * k
        rl = wing_log_slope(lam, kappa_l, t)
        rr = wing_log_slope(lam, kappa_r, t)
        s, c = mp.sin(k * length), mp.cos(k * length)
        return -k * s - (rl + rr) * c + rr * rl / k * s

    k0 = guess if guess is not None else mp.pi / length
    k = mp.findroot(residual, k0 * (1 - 0.5 * mp.sqrt(t)))
    return k * k


if __name__ == "__main__":
    kl = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
    kr = float(sys.argv[2]) if len(sys.argv) > 2 else 1.0
    ts = [10 ** (-2 - 3 * i / 7) for i in range(8)] + [1e-3, 1e-4, 1e-5, 1e-6]
    for t in ts:
        lam = gap(mp.pi, kl, kr, mp.mpf(t))
        cp = 1 / lam
        print(f"{t:.17g} {mp.nstr(cp, 20)} {mp.nstr((cp - 1) / mp.sqrt(t), 12)}")
