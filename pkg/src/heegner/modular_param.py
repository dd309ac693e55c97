"""The modular parametrisation X_0(N) -> E and Heegner points on E.

phi(z) = sum a_n q^n / n,  q = e^(2 pi i z), taken mod the period lattice
(Manin constant 1).  Heegner points are first moved by Gamma_0(N) to the
highest representative so that the q-series converges quickly.
"""
from dataclasses import dataclass, field

import mpmath
import numpy as np

from ._arith import DomainError, PreconditionError, primes_upto, sl2_index
from . import elliptic_curve as ec
from .dirichlet_l import script_LD
from .heegner_points import (
    apply, enumerate_heegner, gamma0_maximize, heegner_condition, ht_form, volume_X0,
)
from .quadclass import class_group_structure


@dataclass(frozen=True)
class QExpansion:
    N: int
    coeffs: tuple   # coeffs[n] = a_n, coeffs[0] = 0

    @property
    def M(self) -> int:
        return len(self.coeffs) - 1

    def tail_bound(self, y):
        """Bound on |sum_{n>M} a_n q^n / n| at Im z = y, from |a_n| <= d(n) sqrt(n) <= 2n."""
        qa = mpmath.exp(-2 * mpmath.pi * y)
        return 2 * qa ** (self.M + 1) / (1 - qa)


_EXPANSIONS = {}


def an_coeffs(E: ec.CurveModel, M: int) -> QExpansion:
    """a_1..a_M from a_p by multiplicativity and the Hecke recursion."""
    if M > 10 ** 7:
        raise DomainError("q-expansion length beyond desk scale")
    key = (E.ainvs, E.conductor)
    have = _EXPANSIONS.get(key)
    if have is not None and have.M >= M:
        return have
    a = np.zeros(M + 1, dtype=object)
    a[1] = 1
    for p in primes_upto(M):
        ap = ec.ap(E, p)
        bad = E.conductor % p == 0
        prev, cur = 1, ap
        pk = p
        while pk <= M:
            # a_{m p^k} = a_m a_{p^k} for m prime to p, m <= M / p^k
            for m in range(1, M // pk + 1):
                if m % p and a[m]:
                    a[m * pk] = a[m] * cur
            if bad:
                prev, cur = cur, cur * ap
            else:
                prev, cur = cur, ap * cur - p * prev
            pk *= p
    q = QExpansion(E.conductor, tuple(int(v) for v in a))
    _EXPANSIONS[key] = q
    return q


def _terms_needed(y, prec: int) -> int:
    lq = 2 * mpmath.pi * y / mpmath.log(2)
    return int((prec + 12) / lq) + 8


def phi_raw(E, z, prec: int = 128, M=None):
    """The q-series at z itself, with its truncation bound (no Gamma_0(N) move)."""
    with mpmath.workprec(prec + 30):
        z = mpmath.mpc(z)
        if z.imag <= 0:
            raise DomainError("phi needs Im z > 0")
        if M is None:
            M = _terms_needed(z.imag, prec)
        Q = an_coeffs(E, M)
        q = mpmath.expjpi(2 * z)
        # Horner in q: sum_{n=1}^M (a_n/n) q^n
        s = mpmath.mpc(0)
        for n in range(M, 0, -1):
            an = Q.coeffs[n]
            s = s * q + (mpmath.mpf(an) / n if an else 0)
        s *= q
        return s, Q.tail_bound(z.imag) if Q.M == M else \
            QExpansion(Q.N, Q.coeffs[:M + 1]).tail_bound(z.imag)


@dataclass(frozen=True)
class PhiValue:
    z: mpmath.mpc
    moved: mpmath.mpc
    w: mpmath.mpc
    point: tuple
    tail: mpmath.mpf


def phi_eval(E, z, prec: int = 128, L=None) -> PhiValue:
    """w = phi(z) mod Lambda and the corresponding complex point (x, y)."""
    L = L or _lattice(E, prec)
    _, zz = gamma0_maximize(z, E.conductor, prec)
    w, tail = phi_raw(E, zz, prec)
    w = ec.reduce_mod_lattice(L, w)
    return PhiValue(mpmath.mpc(z), zz, w, ec.complex_to_point(L, w), tail)


_LATTICES = {}


def _lattice(E, prec):
    key = (E.ainvs, prec)
    if key not in _LATTICES:
        _LATTICES[key] = ec.period_lattice(E, prec)
    return _LATTICES[key]


def _log_plus_norm(pt, prec):
    """log+ of the euclidean norm of [x:y:1]; 0 at the origin."""
    if pt is None:
        return mpmath.mpf(0)
    x, y = pt
    r2 = abs(x) ** 2 + abs(y) ** 2
    return max(mpmath.log(r2) / 2, mpmath.mpf(0))


@dataclass
class HeegnerResult:
    label: str
    D: int
    h: int
    forms: list
    heights: list                 # ht_N for each orbit point
    orbit_w: list                 # phi(z_A) in C / Lambda
    trace_w: mpmath.mpc           # sum of orbit_w reduced mod Lambda
    proxy: mpmath.mpf
    lower: mpmath.mpf             # (2 pi / Vol X_0(N)) script-L_D
    predicted: object = None      # 24 deg / index * script-L_D, if deg known
    trace_point: tuple = None     # exact point (Fraction or QuadElt coords)
    over: str = None              # 'Q' or 'K'
    hhat: mpmath.mpf = None
    notes: list = field(default_factory=list)


def _orbit_w(E, P, prec, L):
    N = E.conductor
    ht, g = ht_form(P.form, N, prec)
    with mpmath.workprec(prec + 20):
        zz = apply(g, P.z(prec + 20))
        w, _ = phi_raw(E, zz, prec)
        return ht, ec.reduce_mod_lattice(L, w)


def heegner_orbit(E, D: int, prec: int = 128, G=None, L=None):
    """(points, ht_N values, w's) for the Heegner orbit of discriminant D on X_0(N)."""
    N = E.conductor
    if not heegner_condition(N, D):
        raise PreconditionError(f"D={D} fails the Heegner condition at N={N}")
    L = L or _lattice(E, prec)
    pts = enumerate_heegner(N, D, G)
    heights, ws = [], []
    for P in pts:
        ht, w = _orbit_w(E, P, prec, L)
        heights.append(ht)
        ws.append(w)
    return pts, heights, ws


def _near_origin(L, w, prec):
    eps = mpmath.mpf(2) ** (-prec // 2)
    return min(abs(w - m * L.w1 - n * L.w2) for m in (0, 1) for n in (0, 1)) < eps


def archimedean_height_proxy(E, D: int, prec: int = 128, orbit=None):
    """(1/h) sum log+ |rho(phi(z_A))| over the orbit."""
    L = _lattice(E, prec)
    pts, _, ws = orbit or heegner_orbit(E, D, prec, L=L)
    total = mpmath.mpf(0)
    for P, w in zip(pts, ws):
        lat = L
        if _near_origin(L, w, prec):
            # log+ blows up near the origin: redo this point at doubled precision
            lat = _lattice(E, 2 * prec)
            _, w = _orbit_w(E, P, 2 * prec, lat)
        total += _log_plus_norm(ec.complex_to_point(lat, w), prec)
    return total / len(ws)


def minoration_lower(E, D: int, prec: int = 128):
    """(2 pi / Vol X_0(N)) script-L_D."""
    s, _ = script_LD(D, prec)
    return 2 * mpmath.pi / volume_X0(E.conductor) * s


def predicted_asymptotic(E, D: int, prec: int = 128):
    """24 deg(phi) / [SL2(Z):Gamma_0(N)] * script-L_D."""
    if not E.deg_phi:
        raise PreconditionError(f"{E.label}: modular degree unknown")
    s, _ = script_LD(D, prec)
    return mpmath.mpf(24 * E.deg_phi) / sl2_index(E.conductor) * s


def heegner_point(E, D: int, prec: int = 256, denom_bound=None) -> HeegnerResult:
    """Orbit, trace, recognition and height of the Heegner point of discriminant D."""
    from .root_number import global_sign
    sgn = global_sign(E, D)
    if sgn != -1:
        raise PreconditionError(f"sgn({E.label}, {D}) = {sgn}: no Heegner point pipeline")
    if denom_bound is None:
        denom_bound = 2 ** max((prec - 64) // 2, 8)
    L = _lattice(E, prec)
    G = class_group_structure(D)
    pts, heights, ws = heegner_orbit(E, D, prec, G=G, L=L)
    with mpmath.workprec(prec + 20):
        trace = ec.reduce_mod_lattice(L, mpmath.fsum(ws))
    proxy = archimedean_height_proxy(E, D, prec, orbit=(pts, heights, ws))
    res = HeegnerResult(E.label, D, len(pts), [P.form for P in pts], heights, ws, trace,
                        proxy, minoration_lower(E, D, prec))
    if E.deg_phi:
        res.predicted = predicted_asymptotic(E, D, prec)
    if len(pts) > 2:
        res.notes.append("h(D) > 2: exact recognition not attempted")
        return res
    with mpmath.workprec(prec):
        P = ec.rational_recognition(L, trace, E, denom_bound, D=D)
    if P is None and ec.complex_to_point(L, trace) is not None:
        res.notes.append("trace not recognised at this denominator bound")
        return res
    res.trace_point = P
    if P is None:
        res.over, res.hhat = "Q", mpmath.mpf(0)
        res.notes.append("trace is the origin")
        return res
    res.over = "Q" if all(not isinstance(c, ec.QuadElt) or c.is_rational() for c in P) else "K"
    res.hhat = ec.canonical_height(P, E, prec)
    return res
