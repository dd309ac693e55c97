"""Heegner points on X_0(N): enumeration, class-group action and heights.

A Heegner form of level N is (A, B, C) with N | A, B = beta mod 2N and
B^2 - 4AC = D, for one fixed square root beta of D mod 4N.  Its root
z = (-B + sqrt D)/(2A) is the Heegner point; Gamma_0(N)-classes of such
forms are in bijection with Cl(D).
"""
from dataclasses import dataclass
from math import gcd, isqrt

import mpmath
import numpy as np

from ._arith import PreconditionError, crt, prime_divisors, sl2_index, xgcd
from .dirichlet_l import kronecker, script_LD_float
from .quadclass import (QuadForm, class_group_structure, compose, is_fundamental,
                        reduce)


def heegner_condition(N: int, D: int) -> bool:
    """Every prime dividing N splits in Q(sqrt D)."""
    if N == 1:
        return True
    return all(kronecker(D, p) == 1 for p in prime_divisors(N))


def heegner_beta(N: int, D: int) -> int:
    """Smallest beta >= 0 with beta^2 = D mod 4N."""
    m = 4 * N
    for b in range(2 * N + 1):
        if (b * b - D) % m == 0:
            return b
    raise PreconditionError(f"D={D} is not a square mod {m}")


def volume_X0(N: int):
    """Hyperbolic volume of X_0(N): (pi/3) [SL2(Z) : Gamma_0(N)]."""
    return mpmath.pi / 3 * sl2_index(N)


@dataclass(frozen=True)
class HeegnerPointRep:
    N: int
    form: QuadForm
    class_index: int

    @property
    def D(self) -> int:
        return self.form.disc

    def z(self, prec: int = 128):
        with mpmath.workprec(prec):
            return self.form.root()


def _coprime_representative(f: QuadForm, N: int) -> QuadForm:
    """A form equivalent to f whose first coefficient is prime to N."""
    if gcd(f.a, N) == 1:
        return f
    a, b, c = f
    bound = 1
    while True:
        for x in range(0, bound + 1):
            for y in (bound - x, -(bound - x)):
                if gcd(x, y) != 1:
                    continue
                val = a * x * x + b * x * y + c * y * y
                if gcd(val, N) == 1:
                    g, v, u = xgcd(x, y)
                    # x*v + y*u = 1 ; matrix [[x, -u], [y, v]] has det 1
                    u = -u
                    b2 = 2 * a * x * u + b * (x * v + y * u) + 2 * c * y * v
                    c2 = a * u * u + b * u * v + c * v * v
                    return QuadForm(val, b2, c2)
        bound += 1


def _lift(f: QuadForm, N: int, beta: int) -> QuadForm:
    a, b, _ = f
    D = f.disc
    B, m = crt(b % (2 * a), 2 * a, beta % (2 * N), 2 * N)
    # centre B to keep coefficients small
    if B > m // 2:
        B -= m
    A = a * N
    return QuadForm(A, B, (B * B - D) // (4 * A))


def heegner_form_for_class(G, target: QuadForm, N: int, beta: int) -> QuadForm:
    D = G.discriminant.value
    nform = QuadForm(N, beta, (beta * beta - D) // (4 * N))
    want = compose(target, reduce(nform).inverse()) if N > 1 else target
    f = _coprime_representative(want, N)
    F = _lift(f, N, beta)
    assert reduce(F) == reduce(target)
    return F


def enumerate_heegner(N: int, D: int, G=None) -> list:
    """One Heegner point per ideal class, ordered like G.reduced_forms."""
    if not is_fundamental(D):
        raise PreconditionError(f"{D} is not fundamental")
    if not heegner_condition(N, D):
        raise PreconditionError(f"Heegner condition fails for N={N}, D={D}")
    G = G or class_group_structure(D)
    if N == 1:
        return [HeegnerPointRep(1, f, i) for i, f in enumerate(G.reduced_forms)]
    beta = heegner_beta(N, D)
    return [HeegnerPointRep(N, heegner_form_for_class(G, f, N, beta), i)
            for i, f in enumerate(G.reduced_forms)]


def galois_act(G, cls: QuadForm, P: HeegnerPointRep) -> HeegnerPointRep:
    """Act on P by the ideal class of `cls` (composition of classes)."""
    if G.discriminant.value != P.D:
        raise PreconditionError("class group and point have different D")
    t = compose(G.reduced_forms[P.class_index], cls)
    i = G.reduced_forms.index(t)
    if P.N == 1:
        return HeegnerPointRep(1, t, i)
    # beta and beta + 2N are both roots mod 4N, so beta < 2N
    beta = P.form.b % (2 * P.N)
    return HeegnerPointRep(P.N, heegner_form_for_class(G, t, P.N, beta), i)


# ----------------------------------------------------------------------------
# Gamma_0(N) heights


def _best_pair_exact(F: QuadForm, N: int):
    """Minimise |cz + d|^2 for the root of F over coprime (c, d), N | c.

    With z = (-B + i sqrt q)/(2A) one has 4A^2 |cz+d|^2 = (2Ad - cB)^2 + c^2 q,
    so everything is an exact integer comparison.
    """
    A, B, _ = F
    q = -F.disc
    best, pair = 4 * A * A, (0, 1)
    c = N
    while c * c * q < 4 * A * A:
        # need (2Ad - cB)^2 < 4A^2 - c^2 q
        r = isqrt(4 * A * A - c * c * q)
        lo = -(-(c * B - r) // (2 * A))
        hi = (c * B + r) // (2 * A)
        for d in range(lo, hi + 1):
            if gcd(c, d) == 1:
                v = (2 * A * d - c * B) ** 2 + c * c * q
                if v < best:
                    best, pair = v, (c, d)
        c += N
    return best, pair


def _complete(c: int, d: int):
    # a, b with a*d - b*c = 1
    if c == 0:
        return (d, 0, 0, d)
    g, x, y = xgcd(d, c)
    # d*x + c*y = 1  ->  a = x, b = -y
    return (x, -y, c, d)


def ht_form(F: QuadForm, N: int, prec: int = 128):
    """ht_N of the root of F, with the maximising gamma in Gamma_0(N)."""
    best, (c, d) = _best_pair_exact(F, N)
    A = F.a
    q = -F.disc
    with mpmath.workprec(prec + 10):
        h = 2 * A * mpmath.sqrt(q) / best
    return h, _complete(c, d)


def ht_N(z, N: int = 1, prec: int = 128):
    """max over gamma in Gamma_0(N) of Im(gamma z), by bounded lattice search.

    Only pairs with |c| Im z < 1 can beat (c, d) = (0, 1), which bounds the search.
    """
    with mpmath.workprec(prec + 20):
        z = mpmath.mpc(z)
        x, y = z.real, z.imag
        if y <= 0:
            raise PreconditionError("ht_N needs Im z > 0")
        best = mpmath.mpf(1)
        c = N
        while c * y < 1:
            r = mpmath.sqrt(1 - (c * y) ** 2)
            lo = int(mpmath.ceil(-c * x - r))
            hi = int(mpmath.floor(-c * x + r))
            for d in range(lo, hi + 1):
                if gcd(c, d) == 1:
                    v = (c * x + d) ** 2 + (c * y) ** 2
                    best = min(best, v)
            c += N
        return y / best


def gamma0_maximize(z, N: int = 1, prec: int = 128):
    """(gamma, gamma z) with gamma in Gamma_0(N) maximising Im."""
    with mpmath.workprec(prec + 20):
        z = mpmath.mpc(z)
        x, y = z.real, z.imag
        best, pair = mpmath.mpf(1), (0, 1)
        c = N
        while c * y < 1:
            r = mpmath.sqrt(1 - (c * y) ** 2)
            for d in range(int(mpmath.ceil(-c * x - r)), int(mpmath.floor(-c * x + r)) + 1):
                if gcd(c, d) == 1:
                    v = (c * x + d) ** 2 + (c * y) ** 2
                    if v < best:
                        best, pair = v, (c, d)
            c += N
        a, b, c, d = _complete(*pair)
        # fold the real part into [-1/2, 1/2) with a translation (still in Gamma_0(N))
        w = (a * z + b) / (c * z + d)
        t = int(mpmath.floor(w.real + mpmath.mpf(1) / 2))
        a, b = a - t * c, b - t * d
        return (a, b, c, d), (a * z + b) / (c * z + d)


def apply(g, z):
    a, b, c, d = g
    return (a * z + b) / (c * z + d)


# ----------------------------------------------------------------------------
# orbit statistics


@dataclass(frozen=True)
class OrbitStatistics:
    D: int
    N: int
    heights: list
    mean_height: float
    predicted: float
    residual: float
    discrepancy: float


def average_height_report(D: int, N: int = 1, script=None, G=None) -> OrbitStatistics:
    """Mean ht_N over the orbit against Vol(X_0(N))^-1 * script-L_D."""
    pts = enumerate_heegner(N, D, G)
    hs = [float(ht_form(P.form, N)[0]) for P in pts]
    mean = sum(hs) / len(hs)
    if script is None:
        script = script_LD_float(D)
    pred = float(script) / float(volume_X0(N))
    disc = discrepancy_from_forms([P.form for P in pts])
    return OrbitStatistics(D, N, hs, mean, pred, mean - pred, disc)


_SQ3_2 = 2 / 3 ** 0.5


def box_family(nx: int = 8, ns: int = 8):
    """64 boxes: uniform grid in (Re z, 1/Im z) over [-1/2, 1/2] x [0, 2/sqrt 3]."""
    xs = np.linspace(-0.5, 0.5, nx + 1)
    ss = np.linspace(0.0, _SQ3_2, ns + 1)
    return [(xs[i], xs[i + 1], ss[j], ss[j + 1]) for i in range(nx) for j in range(ns)]


def _box_mass(x0, x1, s0, s1):
    # In (x, s = 1/y) coordinates dx dy / y^2 = dx ds and the fundamental
    # domain is |x| <= 1/2, 0 < s <= 1/sqrt(1 - x^2).
    cuts = {x0, x1}
    for s in (s0, s1):
        if s > 1:
            r = (1 - 1 / s ** 2) ** 0.5
            for v in (-r, r):
                if x0 < v < x1:
                    cuts.add(v)
    cuts = sorted(cuts)
    m = 0.0
    for u, v in zip(cuts, cuts[1:]):
        mid = (u + v) / 2
        g = 1 / (1 - mid * mid) ** 0.5
        if g <= s0:
            continue
        if g >= s1:
            m += (s1 - s0) * (v - u)
        else:
            m += (np.arcsin(v) - np.arcsin(u)) - s0 * (v - u)
    return m


_BOXES = box_family()
_MASSES = np.array([_box_mass(*b) for b in _BOXES]) / (np.pi / 3)
_EDGES_X = np.linspace(-0.5, 0.5, 9)
_EDGES_S = np.linspace(0.0, _SQ3_2, 9)


def _discrepancy_xs(x, s) -> float:
    H, _, _ = np.histogram2d(x, s, bins=[_EDGES_X, _EDGES_S])
    frac = H.ravel() / len(x)
    return float(np.max(np.abs(frac - _MASSES)))


def discrepancy_from_forms(forms) -> float:
    """Box discrepancy of the SL2(Z)-reduced roots of the given forms."""
    red = [reduce(f) for f in forms]
    x = np.array([-f.b / (2 * f.a) for f in red])
    s = np.array([2 * f.a / (-f.disc) ** 0.5 for f in red])
    return _discrepancy_xs(x, s)


def reduced_roots_fast(D: int):
    """(Re z, 1/Im z) arrays for all reduced forms of D (vectorised enumeration)."""
    q = -D
    bmax = isqrt(q // 3)
    b = np.arange(q % 2, bmax + 1, 2, dtype=np.int64)
    amax = isqrt((bmax * bmax + q) // 4)
    a = np.arange(1, amax + 1, dtype=np.int64)
    B, A = np.meshgrid(b, a, indexing="ij")
    m = (B * B + q) // 4
    ok = (A >= np.maximum(B, 1)) & (A * A <= m) & (m % A == 0)
    Bs, As = B[ok], A[ok]
    Cs = m[ok] // As
    prim = np.gcd(np.gcd(As, Bs), Cs) == 1
    Bs, As, Cs = Bs[prim], As[prim], Cs[prim]
    twin = (Bs > 0) & (Bs < As) & (As < Cs)
    a_all = np.concatenate([As, As[twin]])
    b_all = np.concatenate([Bs, -Bs[twin]])
    return -b_all / (2.0 * a_all), 2.0 * a_all / np.sqrt(q)


def equidistribution_stats(D: int, N: int = 1, boxes=None) -> float:
    """max over boxes of |empirical fraction - normalised hyperbolic mass|.

    Level-N orbits are projected to SL2(Z)\\H through their reduced forms.
    """
    if not heegner_condition(N, D):
        raise PreconditionError(f"Heegner condition fails for N={N}, D={D}")
    if boxes is None:
        x, s = reduced_roots_fast(D)
        return _discrepancy_xs(x, s)
    x, s = reduced_roots_fast(D)
    worst = 0.0
    for (x0, x1, s0, s1) in boxes:
        frac = np.mean((x >= x0) & (x < x1) & (s >= s0) & (s < s1))
        worst = max(worst, abs(frac - _box_mass(x0, x1, s0, s1) / (np.pi / 3)))
    return float(worst)


def cusp_mass(D: int, N: int, T: float) -> float:
    """Fraction of the orbit with ht_N > T."""
    pts = enumerate_heegner(N, D)
    return sum(float(ht_form(P.form, N)[0]) > T for P in pts) / len(pts)
