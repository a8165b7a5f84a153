"""Reference values frozen into the unit tests, computed without the C++ code.

Quadratures use mpmath at 20 digits; spectral gaps come from a finite-difference
Schroedinger form -f'' + (u'^2/4 - u''/2) f of the generator, which shares no
code or discretization with the library oracle.
"""
import mpmath as mp
import numpy as np
from scipy.linalg import eigh_tridiagonal

mp.mp.dps = 20


def quartic(b1, b2):
    u = lambda x: x**4 - b1 * x**2 + b2 * x
    du = lambda x: 4 * x**3 - 2 * b1 * x + b2
    d2u = lambda x: 12 * x**2 - 2 * b1
    return u, du, d2u


def delta_plus(u, theta):
    # sup_x int_theta^x e^{u} * int_x^inf e^{-u}
    A = lambda x: mp.quad(lambda y: mp.e ** u(y), [theta, x])
    B = lambda x: mp.quad(lambda y: mp.e ** -u(y), [x, mp.inf])
    # stationary point of A B: e^u B = A e^-u
    x = mp.findroot(lambda x: mp.e ** u(x) * B(x) - A(x) * mp.e ** -u(x), (0.2, 2.0), solver="anderson")
    return A(x) * B(x)


def median(u):
    z = mp.quad(lambda y: mp.e ** -u(y), [-mp.inf, 0, mp.inf])
    return mp.findroot(lambda m: mp.quad(lambda y: mp.e ** -u(y), [-mp.inf, m]) - z / 2, -0.4)


def fd_gap(b1, b2, half=5.0, n=20000):
    _, du, d2u = quartic(b1, b2)
    def level(n):
        x = np.linspace(-half, half, n)
        h = x[1] - x[0]
        v = du(x) ** 2 / 4 - d2u(x) / 2
        e = eigh_tridiagonal(2 / h**2 + v, -np.ones(n - 1) / h**2, select="i", select_range=(0, 1))[0]
        return e[1] - e[0]
    a, b = level(n), level(2 * n)
    return b + (b - a) / 3


def coupling_eps(n, beta, R=None, m=400001):
    # 4 inf_r sqrt(phi(r)) / f(r) from cumulative trapezoids on a fine grid
    from scipy.integrate import cumulative_trapezoid
    R = R or (8000.0 * n) ** 0.25  # keeps e^{-C} inside double range
    r = np.linspace(0.0, R, m)
    C = -r**4 / (16 * n) + beta * r**2 / 4
    phi = cumulative_trapezoid(np.exp(-C), r, initial=0.0)
    g = np.exp(C) * np.sqrt(phi)
    tail = cumulative_trapezoid(g[::-1], -r[::-1], initial=0.0)[::-1]
    f = cumulative_trapezoid(np.exp(-C) * tail, r, initial=0.0)
    k = slice(m // 2000, m * 3 // 4)
    ratio = np.sqrt(phi[k]) / f[k]
    i = np.argmin(ratio)
    return r[k][i], 4 * ratio[i]


if __name__ == "__main__":
    u, _, _ = quartic(0, 0)
    print("delta quartic(0,0) theta=0:", mp.nstr(delta_plus(u, 0), 15))
    u, _, _ = quartic(0, 1)
    print("median quartic(0,1):", mp.nstr(median(u), 15))
    print("gamma(5/4):", mp.nstr(mp.gamma(1.25), 15))
    print("gamma(3/4)/gamma(1/4):", mp.nstr(mp.gamma(0.75) / mp.gamma(0.25), 15))
    for b1, b2 in [(0, 0), (1, 0), (3, 1), (2, 1)]:
        print(f"gap quartic({b1},{b2}):", fd_gap(b1, b2))
    for n, beta in [(1, 0.0), (2, 0.0), (3, 0.0), (1, -1.0)]:
        print(f"coupling n={n} beta={beta} (argmin, eps):", coupling_eps(n, beta))
