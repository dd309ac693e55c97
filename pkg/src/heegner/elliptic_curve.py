"""Elliptic curves over Q: invariants, a_p, periods, uniformisation, heights.

Models are integral Weierstrass equations
    y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
Exact points carry Fraction (or QuadElt) coordinates; complex points are
handled through the period lattice and the Weierstrass p-function.
"""
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

import mpmath
import numpy as np

from ._arith import DomainError, ConsistencyError, factorint, valuation
from ._qfield import QuadElt, ideal_norm


@dataclass(frozen=True)
class CurveModel:
    label: str
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: int
    deg_phi: int = None
    ap_cache: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    @property
    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self):
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self):
        return self.a1 * self.a3 + 2 * self.a4

    @property
    def b6(self):
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self):
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self):
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def __hash__(self):
        return hash((self.label, self.ainvs))


def make_curve(label, ainvs, conductor, deg_phi=None) -> CurveModel:
    E = CurveModel(label, *[int(a) for a in ainvs], int(conductor), deg_phi)
    if E.discriminant == 0:
        raise DomainError(f"{label}: singular model (discriminant 0)")
    return E


def invariants(E: CurveModel):
    """(Delta, c4, c6, j) with j an exact Fraction."""
    D = E.discriminant
    if D == 0:
        raise DomainError("singular model")
    return D, E.c4, E.c6, Fraction(E.c4 ** 3, D)


def on_curve(E: CurveModel, P) -> bool:
    if P is None:
        return True
    x, y = P
    a1, a2, a3, a4, a6 = E.ainvs
    return y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6


# ---------------------------------------------------------------------------
# reduction mod p


def count_points(E: CurveModel, p: int) -> int:
    """#E(F_p) for the (possibly singular) reduction, including infinity."""
    a1, a2, a3, a4, a6 = [a % p for a in E.ainvs]
    if p == 2:
        n = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                    n += 1
        return n
    x = np.arange(p, dtype=np.int64)
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6 = E.b2 % p, E.b4 % p, E.b6 % p
    rhs = (((4 * x + b2) * x % p + 2 * b4) * x + b6) % p
    sq = np.zeros(p, dtype=np.int64)
    np.add.at(sq, (x * x) % p, 1)
    return 1 + int(sq[rhs].sum())


def ap_good(E: CurveModel, p: int) -> int:
    if E.discriminant % p == 0:
        raise DomainError(f"{E.label} has bad reduction at {p}")
    a = p + 1 - count_points(E, p)
    if a * a > 4 * p:
        raise ConsistencyError(f"Hasse bound violated at p={p}")
    return a


def reduction_type(E: CurveModel, p: int):
    """('split'|'nonsplit'|'additive', a_p) at a prime of bad reduction."""
    if E.discriminant % p:
        raise DomainError(f"{E.label} has good reduction at {p}")
    count = p + 1 - count_points(E, p)
    if E.c4 % p == 0:
        kind, a = "additive", 0
    elif p > 3:
        ls = pow(-E.c6 % p, (p - 1) // 2, p)
        kind, a = ("split", 1) if ls == 1 else ("nonsplit", -1)
    else:
        kind, a = ("split", 1) if count == 1 else ("nonsplit", -1)
    if count != a:
        raise ConsistencyError(f"{E.label} at {p}: criterion gives {a}, count gives {count}")
    return kind, a


def ap(E: CurveModel, p: int) -> int:
    """a_p for any prime, cached write-once."""
    v = E.ap_cache.get(p)
    if v is not None:
        return v
    v = ap_good(E, p) if E.discriminant % p else reduction_type(E, p)[1]
    with E._lock:
        E.ap_cache.setdefault(p, v)
    return v


def validate_conductor(E: CurveModel) -> bool:
    """Multiplicative primes divide N exactly once; good primes do not divide N."""
    N = E.conductor
    for p in factorint(E.discriminant):
        kind, _ = reduction_type(E, p)
        if kind != "additive" and valuation(N, p) != 1:
            return False
    for p in factorint(N) if N > 1 else {}:
        if E.discriminant % p:
            return False
    return True


# ---------------------------------------------------------------------------
# exact group law


def add(E: CurveModel, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = E.ainvs
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return None
        den = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def neg(E: CurveModel, P):
    if P is None:
        return None
    x, y = P
    return (x, -y - E.a1 * x - E.a3)


def mul(E: CurveModel, n: int, P):
    if n < 0:
        return mul(E, -n, neg(E, P))
    R = None
    while n:
        if n & 1:
            R = add(E, R, P)
        P = add(E, P, P)
        n >>= 1
    return R


def rational_point(E, x, y):
    P = (Fraction(x), Fraction(y))
    if not on_curve(E, P):
        raise DomainError(f"{P} is not on {E.label}")
    return P


def torsion_order(E, P, bound: int = 16):
    """Order of P if it is at most `bound` (Mazur: <= 12 over Q), else 0."""
    if P is not None and all(isinstance(c, (int, Fraction)) for c in P):
        # on an integral model rational torsion has 4x and 8y integral
        if (4 * Fraction(P[0])).denominator != 1 or (8 * Fraction(P[1])).denominator != 1:
            return 0
    Q = P
    for k in range(1, bound + 1):
        if Q is None:
            return k
        Q = add(E, Q, P)
    return 0


# ---------------------------------------------------------------------------
# period lattice and the Weierstrass p-function


@dataclass(frozen=True)
class PeriodLattice:
    w1: mpmath.mpf      # real period
    w2: mpmath.mpc      # Im(w2/w1) > 0
    prec: int
    roots: tuple
    g2: mpmath.mpf
    g3: mpmath.mpf
    b2: int
    a1: int
    a3: int
    r1: mpmath.mpc = None   # reduced basis used for q-series
    r2: mpmath.mpc = None

    @property
    def tau(self):
        return self.w2 / self.w1


def _reduce_basis(w1, w2):
    # Gauss reduction so that tau = w2/w1 lies in the fundamental domain
    for _ in range(1000):
        if abs(w2) < abs(w1):
            w1, w2 = w2, -w1
        t = w2 / w1
        m = int(mpmath.nint(t.real))
        if m:
            w2 = w2 - m * w1
        if abs(w2) >= abs(w1) * (1 - mpmath.mpf(2) ** (-mpmath.mp.prec // 2)):
            break
    if (w2 / w1).imag < 0:
        w2 = -w2
    return w1, w2


def period_lattice(E: CurveModel, prec: int = 128) -> PeriodLattice:
    """Periods by the AGM on the roots of 4X^3 - g2 X - g3.

    Validated by rebuilding c4, c6 from the Eisenstein series of the lattice.
    """
    with mpmath.workprec(prec + 40):
        g2 = mpmath.mpf(E.c4) / 12
        g3 = mpmath.mpf(E.c6) / 216
        rts = mpmath.polyroots([4, 0, -g2, -g3], maxsteps=200, extraprec=2 * prec)
        if E.discriminant > 0:
            e = sorted([mpmath.re(r) for r in rts], reverse=True)
            e1, e2, e3 = e
            w1 = mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2))
            w2 = mpmath.mpc(0, mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e2 - e3)))
            roots = (e1, e2, e3)
        else:
            e1 = [mpmath.re(r) for r in rts if abs(mpmath.im(r)) < mpmath.mpf(2) ** (-prec)]
            if len(e1) != 1:
                e1 = [min(rts, key=lambda r: abs(mpmath.im(r))).real]
            e1 = e1[0]
            cx = [r for r in rts if abs(r - e1) > mpmath.mpf(2) ** (-prec)]
            e2 = cx[0] if mpmath.im(cx[0]) > 0 else cx[1]
            e3 = mpmath.conj(e2)
            z0 = mpmath.sqrt(abs((e1 - e2) * (e1 - e3)))
            w1 = 2 * mpmath.pi / mpmath.agm(2 * mpmath.sqrt(z0), mpmath.sqrt(2 * z0 + 3 * e1))
            w2 = -w1 / 2 + mpmath.mpc(0, mpmath.pi / mpmath.agm(2 * mpmath.sqrt(z0), mpmath.sqrt(2 * z0 - 3 * e1)))
            roots = (e1, e2, e3)
        r1, r2 = _reduce_basis(mpmath.mpc(w1), mpmath.mpc(w2))
        L = PeriodLattice(w1, w2, prec, roots, g2, g3, E.b2, E.a1, E.a3, r1, r2)
        c4r, c6r = eisenstein_invariants(L)
        tol = mpmath.mpf(2) ** (-prec + 16) * max(1, abs(E.c4), abs(E.c6))
        if abs(c4r - E.c4) > tol or abs(c6r - E.c6) > tol:
            raise ConsistencyError(f"{E.label}: period lattice does not reproduce c4, c6")
    return L


def eisenstein_invariants(L: PeriodLattice):
    """(c4, c6) = ((2pi/w)^4 E4(tau), (2pi/w)^6 E6(tau)) for the reduced basis."""
    with mpmath.workprec(L.prec + 40):
        w = L.r1
        tau = L.r2 / L.r1
        q = mpmath.expjpi(2 * tau)
        s3 = s5 = mpmath.mpc(0)
        qn = mpmath.mpc(1)
        eps = mpmath.mpf(2) ** (-L.prec - 40)
        n = 0
        while True:
            n += 1
            qn *= q
            t3 = n ** 3 * qn / (1 - qn)
            s3 += t3
            s5 += n ** 5 * qn / (1 - qn)
            if abs(qn) * n ** 5 < eps:
                break
        E4 = 1 + 240 * s3
        E6 = 1 - 504 * s5
        k = 2 * mpmath.pi / w
        return mpmath.re(k ** 4 * E4), mpmath.re(k ** 6 * E6)


def _wp_pair(L: PeriodLattice, w):
    """(p(w), p'(w)) by the q-expansion on the reduced basis."""
    with mpmath.workprec(L.prec + 40):
        w1, w2 = L.r1, L.r2
        tau = w2 / w1
        z = mpmath.mpc(w) / w1
        m = int(mpmath.nint(z.imag / tau.imag))
        z -= m * tau
        z -= int(mpmath.nint(z.real))
        if abs(z) < mpmath.mpf(2) ** (-L.prec):
            raise ZeroDivisionError("p has a pole at lattice points")
        q = mpmath.expjpi(2 * tau)
        u = mpmath.expjpi(2 * z)
        P = mpmath.mpf(1) / 12 + u / (1 - u) ** 2
        dP = u * (1 + u) / (1 - u) ** 3
        qn = mpmath.mpc(1)
        eps = mpmath.mpf(2) ** (-L.prec - 30)
        n = 0
        while True:
            n += 1
            qn *= q
            a, b = qn * u, qn / u
            P += a / (1 - a) ** 2 + b / (1 - b) ** 2 - 2 * qn / (1 - qn) ** 2
            dP += a * (1 + a) / (1 - a) ** 3 - b * (1 + b) / (1 - b) ** 3
            if abs(qn) * max(abs(u), 1 / abs(u)) < eps:
                break
        k = 2j * mpmath.pi / w1
        return k ** 2 * P, k ** 3 * dP


def weierstrass_p(L: PeriodLattice, w):
    return _wp_pair(L, w)[0]


def complex_to_point(L: PeriodLattice, w):
    """(x, y) on the model for w in C/L, or None at w = 0 mod L."""
    try:
        X, dX = _wp_pair(L, w)
    except ZeroDivisionError:
        return None
    x = X - mpmath.mpf(L.b2) / 12
    y = (dX - L.a1 * x - L.a3) / 2
    return (x, y)


def reduce_mod_lattice(L: PeriodLattice, w):
    """Representative of w in the fundamental parallelogram of (w1, w2)."""
    with mpmath.workprec(L.prec + 20):
        w = mpmath.mpc(w)
        # solve w = s w1 + t w2 over R
        w1, w2 = mpmath.mpc(L.w1), L.w2
        det = (w1.conjugate() * w2).imag
        t = (w1.conjugate() * w).imag / det
        s = -(w * w2.conjugate()).imag / det
        return w - mpmath.floor(s) * w1 - mpmath.floor(t) * w2


def point_to_complex(L: PeriodLattice, P):
    """Elliptic logarithm: w with complex_to_point(w) = P (Carlson R_F + Newton)."""
    if P is None:
        return mpmath.mpc(0)
    with mpmath.workprec(L.prec + 40):
        x, y = P
        x = _as_complex(x)
        y = _as_complex(y)
        X = x + mpmath.mpf(L.b2) / 12
        Y = 2 * y + L.a1 * x + L.a3
        e1, e2, e3 = L.roots
        shift = mpmath.mpc(0, mpmath.mpf(2) ** (-L.prec // 2))
        args = [X - e1, X - e2, X - e3]
        if all(abs(a.imag) < mpmath.mpf(2) ** (-L.prec) for a in map(mpmath.mpc, args)):
            args = [a + shift for a in args]
        w = mpmath.elliprf(*args)
        for _ in range(60):
            Pw, dPw = _wp_pair(L, w)
            if abs(dPw + Y) < abs(dPw - Y):
                w = -w
                Pw, dPw = _wp_pair(L, w)
            step = (Pw - X) / dPw
            w -= step
            if abs(step) < mpmath.mpf(2) ** (-L.prec - 20) * (1 + abs(w)):
                break
        Pw, dPw = _wp_pair(L, w)
        if abs(dPw + Y) < abs(dPw - Y):
            w = -w
    return reduce_mod_lattice(L, w)


def _as_complex(v):
    if isinstance(v, QuadElt):
        return v.to_complex()
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpmathify(v)


# ---------------------------------------------------------------------------
# heights


def _proj_integral(P):
    """Coprime integer [X:Y:Z] for a rational affine point."""
    x, y = P
    den = x.denominator * y.denominator // gcd(x.denominator, y.denominator)
    X, Y, Z = x.numerator * (den // x.denominator), y.numerator * (den // y.denominator), den
    g = gcd(gcd(X, Y), Z)
    return X // g, Y // g, Z // g


def naive_height(P) -> float:
    """log max |x_i| over places, normalised by [K:Q].

    Accepts None (the origin), an exact affine point over Q, a projective
    integer triple, or an affine point with QuadElt coordinates over an
    imaginary quadratic field.  Evaluated at the ambient mpmath precision.
    """
    if P is None:
        return mpmath.mpf(0)
    if len(P) == 3:
        X, Y, Z = [int(v) for v in P]
        g = gcd(gcd(X, Y), Z)
        return mpmath.log(max(abs(X), abs(Y), abs(Z)) // g)
    x, y = P
    for v in (x, y):
        if not isinstance(v, (int, Fraction, QuadElt)):
            raise DomainError("naive_height needs exact coordinates")
    if isinstance(x, QuadElt) or isinstance(y, QuadElt):
        D = x.D if isinstance(x, QuadElt) else y.D
        if D > 0:
            raise DomainError("only imaginary quadratic fields are supported")
        coords = [QuadElt(x, 0, D) if not isinstance(x, QuadElt) else x,
                  QuadElt(y, 0, D) if not isinstance(y, QuadElt) else y,
                  QuadElt(1, 0, D)]
        arch = 2 * mpmath.log(max(abs(c.to_complex()) for c in coords))
        fin = -mpmath.log(ideal_norm(coords))
        return (arch + fin) / 2
    X, Y, Z = _proj_integral((Fraction(x), Fraction(y)))
    return mpmath.log(max(abs(X), abs(Y), abs(Z)))


def x_height(P) -> mpmath.mpf:
    """log max(|num x|, |den x|) for a rational point (origin -> 0)."""
    if P is None:
        return mpmath.mpf(0)
    x = Fraction(P[0])
    return mpmath.log(max(abs(x.numerator), x.denominator))


def _vq(r: Fraction, p: int):
    if r == 0:
        return 10 ** 9
    return valuation(r.numerator, p) - valuation(r.denominator, p)


def _lambda_infinity(L: PeriodLattice, w):
    """Archimedean local height normalised as 1/2 log|x| + o(1) at the origin."""
    with mpmath.workprec(L.prec + 40):
        w1, w2 = L.r1, L.r2
        tau = w2 / w1
        z = mpmath.mpc(w) / w1
        m = int(mpmath.floor(z.imag / tau.imag))
        z -= m * tau
        z -= mpmath.floor(z.real)
        t = z.imag / tau.imag
        q = mpmath.expjpi(2 * tau)
        u = mpmath.expjpi(2 * z)
        lq = mpmath.log(abs(q))
        B2 = t * t - t + mpmath.mpf(1) / 6
        lam = -B2 * lq / 2 - mpmath.log(abs(1 - u))
        qn = mpmath.mpc(1)
        eps = mpmath.mpf(2) ** (-L.prec - 30)
        eta_sum = mpmath.mpf(0)
        n = 0
        while True:
            n += 1
            qn *= q
            lam -= mpmath.log(abs((1 - qn * u) * (1 - qn / u)))
            eta_sum += mpmath.log(abs(1 - qn))
            if abs(qn) / abs(u) < eps and abs(qn) < eps:
                break
        log_eta = lq / 24 + eta_sum
        return lam + mpmath.log(2 * mpmath.pi / abs(w1)) + 2 * log_eta


def _lambda_bad(E: CurveModel, P, p: int) -> mpmath.mpf:
    """Correction at a bad prime: 0 unless P reduces to the singular point."""
    a1, a2, a3, a4, a6 = E.ainvs
    x, y = P
    psi2 = 2 * y + a1 * x + a3
    dx = 3 * x * x + 2 * a2 * x + a4 - a1 * y
    if _vq(dx, p) <= 0 or _vq(psi2, p) <= 0:
        return mpmath.mpf(0)
    if E.c4 % p:
        N = valuation(E.discriminant, p)
        n = min(Fraction(_vq(psi2, p)), Fraction(N, 2))
        c = n * (N - n) / (2 * N)
        return -mpmath.mpf(c.numerator) / c.denominator * mpmath.log(p)
    psi3 = 3 * x ** 4 + E.b2 * x ** 3 + 3 * E.b4 * x * x + 3 * E.b6 * x + E.b8
    v2, v3 = _vq(psi2, p), _vq(psi3, p)
    if v3 >= 3 * v2:
        return -mpmath.mpf(v2) / 3 * mpmath.log(p)
    return -mpmath.mpf(v3) / 8 * mpmath.log(p)


_NORMALISATION = {"projective": 3, "x": 2, "half": 1}


def _hhat_half_rational(E: CurveModel, P, prec: int, L=None):
    if P is None:
        return mpmath.mpf(0)
    x, y = Fraction(P[0]), Fraction(P[1])
    L = L or period_lattice(E, prec)
    with mpmath.workprec(prec + 20):
        w = point_to_complex(L, (x, y))
        lam = _lambda_infinity(L, w)
        d = isqrt(x.denominator)
        if d * d != x.denominator:
            raise DomainError("model is not integral at the denominator of x")
        fin = mpmath.log(d)
        for p in factorint(E.discriminant):
            fin += _lambda_bad(E, (x, y), p)
        return lam + fin


def twist_point(E: CurveModel, P):
    """For P = (x, y) in E(K), x rational and 2y + a1 x + a3 in sqrt(D) Q,
    return (E^D short model, rational point) with equal canonical height."""
    x, y = P
    D = y.D
    xr = x.r if isinstance(x, QuadElt) else Fraction(x)
    Y = 2 * y + E.a1 * xr + E.a3
    if Y.r != 0:
        raise DomainError("not a twist-type point")
    # Y' = 108 Y, X' = 36 x + 3 b2 on Y'^2 = X'^3 - 27 c4 X' - 54 c6,
    # then (D X', D^2 t) on the twist with Y' = t sqrt(D)
    X1 = 36 * xr + 3 * E.b2
    t = 108 * Y.s
    Et = make_curve(f"{E.label}^({D})", (0, 0, 0, -27 * D * D * E.c4, -54 * D ** 3 * E.c6), E.conductor)
    Q = (D * X1, D * D * t)
    if not on_curve(Et, Q):
        raise ConsistencyError("twist map failed")
    return Et, Q


def canonical_height(P, E: CurveModel, prec: int = 128, normalization: str = "projective", L=None):
    """Neron-Tate height.

    Equals lim 4^-n h(2^n P) for the naive height h of the chosen
    normalisation: 'projective' uses log max(|X|,|Y|,|Z|) (the default,
    comparable with naive_height), 'x' uses log max(|num x|, |den x|) and
    'half' is half of that.  Computed as a sum of local heights:
    archimedean by the q-series of the Neron function, non-archimedean by
    the denominator of x plus explicit corrections at bad primes.
    Points over an imaginary quadratic field are supported when x is
    rational, through the quadratic twist.
    """
    k = _NORMALISATION[normalization]
    if P is None:
        return mpmath.mpf(0)
    x, y = P
    if isinstance(x, QuadElt) or isinstance(y, QuadElt):
        xe = x if isinstance(x, QuadElt) else QuadElt(x, 0, y.D)
        ye = y if isinstance(y, QuadElt) else QuadElt(y, 0, x.D)
        if xe.is_rational() and ye.is_rational():
            P = (xe.r, ye.r)
        else:
            (E, P), L = twist_point(E, (xe, ye)), None
    with mpmath.workprec(prec + 20):
        return k * _hhat_half_rational(E, P, prec, L)


def doubling_height(P, E: CurveModel, n: int, normalization: str = "projective"):
    """4^-n h(2^n P) with exact rational doubling (small n only)."""
    Q = P
    for _ in range(n):
        Q = add(E, Q, Q)
    h = naive_height(Q) if normalization == "projective" else x_height(Q)
    if normalization == "half":
        h = h / 2
    return h / mpmath.mpf(4) ** n


# ---------------------------------------------------------------------------
# recognition


def _cf_rational(v, denom_bound: int, tol):
    """Best rational approximation to v with denominator <= bound within tol."""
    v = mpmath.mpf(v)
    h0, h1, k0, k1 = 0, 1, 1, 0
    r = v
    best = None
    for _ in range(4 * denom_bound.bit_length() + 64):
        a = int(mpmath.floor(r))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > denom_bound:
            break
        if abs(v - mpmath.mpf(h1) / k1) <= tol * max(1, abs(v)):
            best = Fraction(h1, k1)
            break
        frac = r - a
        if frac == 0:
            best = Fraction(h1, k1)
            break
        r = 1 / frac
    return best


def _rational_sqrt(r: Fraction):
    if r < 0:
        return None
    n, d = isqrt(r.numerator), isqrt(r.denominator)
    if n * n == r.numerator and d * d == r.denominator:
        return Fraction(n, d)
    return None


def _recognize_quadratic(v, D: int, denom_bound: int):
    """Integer relation a + b sqrt(D) + c v + d v sqrt(D) = 0 for complex v."""
    rt = mpmath.mpc(0, mpmath.sqrt(-D))
    vec_c = [mpmath.mpc(1), rt, v, v * rt]
    kappa = mpmath.sqrt(2) + mpmath.pi / 7
    vec = [c.real + kappa * c.imag for c in vec_c]
    rel = mpmath.pslq(vec, maxcoeff=denom_bound ** 2, maxsteps=20000)
    if rel is None:
        return None
    a, b, c, d = rel
    if c == 0 and d == 0:
        return None
    num = QuadElt(-a, -b, D)
    den = QuadElt(c, d, D)
    x = num / den
    if abs(x.to_complex() - v) > mpmath.mpf(2) ** (-mpmath.mp.prec // 2) * (1 + abs(v)):
        return None
    return x


def rational_recognition(L: PeriodLattice, w, E: CurveModel, denom_bound: int = 10 ** 12, D: int = None):
    """Exact point of E(Q) (or E(Q(sqrt D))) whose complex image is w, or None."""
    with mpmath.workprec(L.prec):
        pt = complex_to_point(L, w)
        if pt is None:
            return None
        xc, yc = pt
        Yc = 2 * yc + E.a1 * xc + E.a3
        tol = mpmath.mpf(2) ** (-L.prec // 2)
        scale = 1 + abs(xc)
        if abs(xc.imag) < tol * scale and abs(Yc.imag) < tol * (1 + abs(Yc)):
            x = _cf_rational(xc.real, denom_bound, tol)
            if x is not None:
                g = 4 * x ** 3 + E.b2 * x * x + 2 * E.b4 * x + E.b6
                Y = _rational_sqrt(g)
                if Y is not None:
                    if Yc.real < 0:
                        Y = -Y
                    y = (Y - E.a1 * x - E.a3) / 2
                    if on_curve(E, (x, y)):
                        return (x, y)
        if D is None:
            return None
        x = _recognize_quadratic(xc, D, denom_bound)
        if x is None:
            return None
        Y = _recognize_quadratic(Yc, D, denom_bound)
        if Y is None:
            return None
        y = (Y - E.a1 * x - E.a3) / 2
        if on_curve(E, (x, y)):
            return (x, y)
    return None
