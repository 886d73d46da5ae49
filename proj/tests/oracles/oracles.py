"""Reference values frozen into the unit tests.

Everything here is computed with mpmath at 30 digits, independently of the
C++ code paths (different quadrature, closed forms where they exist).
Run: python3 tests/oracles/oracles.py
"""
from mpmath import mp, mpf, quad, gamma, sin, pi, sqrt, erf, exp, expm1, log1p, inf

mp.dps = 30


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 17)}")


# Covariance and moving-average kernel at single points.
show("fbs_cov N=1 H=0.25 s=1 t=2", (1 + mpf(2) ** mpf("0.5") - 1) / 2)
show("kernel_g h=0.75 t=1 s=-1", mpf(2) ** mpf("0.25") - 1)


# Squared per-axis kappa factor: int_0^inf ((1+s)^p - s^p)^2 ds + 1/(2h), p = h - 1/2,
# against the Mandelbrot-Van Ness closed form.
def kappa_sq(h):
    h = mpf(h)
    p = h - mpf(1) / 2
    f = lambda s: ((1 + s) ** p - s ** p) ** 2
    k = 2 / h  # s = y^k tames the s^{2p} endpoint singularity on [0, 1]
    near = quad(lambda y: f(y ** k) * k * y ** (k - 1), [0, 1])
    # Tail with v = 1/s: ((1+s)^p - s^p)^2 ds = v^{-2p-2} expm1(p log1p(v))^2 dv,
    # written without cancellation; v = y^4 removes the v^{-2p} endpoint power.
    m = 4
    tail = lambda v: v ** (-2 * p - 2) * expm1(p * log1p(v)) ** 2
    far = quad(lambda y: tail(y ** m) * m * y ** (m - 1), [0, 1])
    return near + far + 1 / (2 * h)


def kappa_sq_closed(h):
    h = mpf(h)
    return gamma(h + mpf(1) / 2) ** 2 / (gamma(2 * h + 1) * sin(pi * h))


for h in ["0.1", "0.3", "0.7", "0.75", "0.9"]:
    a, b = kappa_sq(h), kappa_sq_closed(h)
    show(f"kappa_axis_squared h={h}", b)
    assert abs(a - b) < mpf("1e-12") * b, (h, a, b)

# Liouville covariance, N=1, H=0.3, s=1, t=2.
show("liouville_cov H=0.3 s=1 t=2", quad(lambda r: (1 - r) ** mpf("-0.2") * (2 - r) ** mpf("-0.2"), [0, 1]))

# First moments E L(0, T) = int_T (2 pi prod t^{2H})^{-1/2} dt.
show("E L N=1 H=0.5 T=[1,2]", sqrt(2 / pi) * (sqrt(2) - 1))
show("E L N=2 H=0.5 T=[1,2]^2", (2 * (sqrt(2) - 1)) ** 2 / sqrt(2 * pi))
show("E L N=2 H=(0.4,0.6) T=[1,2]^2",
     quad(lambda s: s ** mpf("-0.4"), [1, 2]) * quad(lambda t: t ** mpf("-0.6"), [1, 2]) / sqrt(2 * pi))
# Level x = 1 for the Brownian case.
show("E L N=1 H=0.5 T=[1,2] x=1", quad(lambda t: exp(-1 / (2 * t)) / sqrt(2 * pi * t), [1, 2]))

# Second moment, N=1, H=0.5, d=1, T=[1,2], x=0:
# 2 int_{1<s<t<2} (2 pi)^{-1} (s (t - s))^{-1/2} dt ds.
show("E L^2 N=1 H=0.5 T=[1,2]",
     2 * quad(lambda s: 2 * sqrt(2 - s) / sqrt(s), [1, 2]) / (2 * pi))

# Expected grid estimator: m midpoint cells on [1,2], cube of side w at 0.
def hist_exp(m, w):
    w = mpf(w)
    tot = mpf(0)
    for i in range(m):
        t = 1 + (i + mpf(1) / 2) / m
        tot += erf(w / (2 * sqrt(2 * t))) / m
    return tot / w


show("histogram expectation m=16 w=0.25", hist_exp(16, "0.25"))

# Ordered simplex integral, n = 2, alpha = 0.5, a = 1, r = 0.5, s0 = 0.25. The
# inner integral is closed form; the outer one runs on tanh-sinh quadrature.
al, a, r, s0 = mpf("0.5"), mpf(1), mpf("0.5"), mpf("0.25")
show("dirichlet n=2 lhs",
     quad(lambda s1: (s1 - s0) ** (-al) * (a + r - s1) ** (1 - al) / (1 - al), [a, a + r]))
show("dirichlet n=1 lhs a=1 r=0.5 s0=0.25 al=0.5",
     ((a + r - s0) ** (1 - al) - (a - s0) ** (1 - al)) / (1 - al))

# Gaussian u-integral, Brownian points {1, 2}, g(v) = |v|^0.5:
# sqrt(2 pi / c22) * 2^{(g+1)/2} Gamma((g+1)/2) * sigma^{-(g+1)}, sigma^2 = det / c22.
g = mpf("0.5")
c22, det = mpf(2), mpf(1)
sig = sqrt(det / c22)
show("u-integral Brownian {1,2} gamma=0.5",
     sqrt(2 * pi / c22) * 2 ** ((g + 1) / 2) * gamma((g + 1) / 2) * sig ** (-(g + 1)))

# Holder weights, case (ii), H = (0.4, 0.6), q = 3, delta = 0.1.
show("1/p1 case (ii)", (1 / mpf("0.9")) * (1 / mpf("1.2")) - (mpf("0.1") / mpf("0.9")) * 3)

# Gauge phi1 at r = exp(-e^2), beta = 1.6, N = 2.
rr = exp(-exp(2))
show("phi1(exp(-e^2)) beta=1.6 N=2", rr ** mpf("1.6") * mpf(2) ** mpf("0.4"))

# Increment moment for Brownian motion on [1,2] (N=1, H=0.5, d=1), levels 0 and y.
# By the Markov property E L(a)L(b) = int_{1<s<t<2} [p_s(a) p_{t-s}(b-a) + p_s(b) p_{t-s}(a-b)].
def pdens(v, z):
    return exp(-z * z / (2 * v)) / sqrt(2 * pi * v)


def mixed(a, b):
    f = lambda s, u: pdens(s, a) * pdens(u, b - a) + pdens(s, b) * pdens(u, a - b)
    return quad(lambda s: quad(lambda u: f(s, u), [0, mpf("1e-3"), mpf("0.1"), 2 - s]), [1, 2])


for yv in ("0.3", "0.1"):
    yy = mpf(yv)
    show("increment E(L(0)-L(%s))^2 N=1 H=0.5 T=[1,2]" % yv, mixed(0, 0) + mixed(yy, yy) - 2 * mixed(0, yy))
