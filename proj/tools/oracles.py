"""High-precision reference values for the unit tests (mpmath, 30 digits).

Run: python3 tools/oracles.py
Each value is computed by a route that shares no code with the library:
endpoint singularities are removed by trigonometric substitution and the
integrals are done with mpmath tanh-sinh quadrature.
"""

import mpmath as mp

mp.mp.dps = 30


def one_gap_comb(a=1, b=2):
    # x = (a+b)/2 + (b-a)/2 cos t on the gap removes sqrt((x-a)(b-x)).
    mid, rad = mp.mpf(a + b) / 2, mp.mpf(b - a) / 2
    x = lambda t: mid + rad * mp.cos(t)
    c = mp.quad(lambda t: mp.sqrt(x(t)), [0, mp.pi]) / mp.quad(lambda t: 1 / mp.sqrt(x(t)), [0, mp.pi])
    tc = mp.acos((c - mid) / rad)
    # |m| = |x - c| / (2 sqrt(x) sqrt((x-a)(b-x))) in the gap; height from a to c.
    h = mp.quad(lambda t: (c - x(t)) / (2 * mp.sqrt(x(t))), [tc, mp.pi])
    # band [0, a]: x = a sin^2 p gives dp (c - x)/sqrt(b - x), here for a = 1.
    u = mp.quad(lambda p: (c - a * mp.sin(p) ** 2) / mp.sqrt(b - a * mp.sin(p) ** 2), [0, mp.pi / 2]) * mp.sqrt(a)
    return c, h, u


def denjoy_lower_bound(b1=1, l1=mp.mpf(1) / 4, q=mp.mpf(1) / 4):
    p = mp.nprod(lambda n: 1 - l1 * q ** (n - 1), [1, mp.inf])
    return mp.sqrt(b1) * mp.sqrt(p) / 2


def sine_tail(s, m):
    # int_s^inf sin t / t^m by oscillatory quadrature.
    return mp.quadosc(lambda t: mp.sin(t) / t**m, [s, mp.inf], omega=1)


def one_gap_phi_small_x_limit(gaps):
    return sum(mp.mpf(b - a) for a, b in gaps) / 2


if __name__ == "__main__":
    c, h, u = one_gap_comb()
    print("one-gap comb c =", mp.nstr(c, 20))
    print("one-gap comb h =", mp.nstr(h, 20))
    print("one-gap comb u =", mp.nstr(u, 20))
    print("denjoy lower bound (4^-n) =", mp.nstr(denjoy_lower_bound(), 20))
    for s in (0.5, 3.0):
        for m in (1, 2, 3, 5):
            print(f"sine tail s={s} m={m} =", mp.nstr(sine_tail(s, m), 20))
    print("Si(1) =", mp.nstr(mp.si(1), 20), " Ci(1) =", mp.nstr(mp.ci(1), 20))
