"""Kronecker characters and the values L(1, chi_D), L'(1, chi_D).

The high precision path works in MPFR via gmpy2.  For an odd real
primitive character of conductor q the completed function

    Lambda(s) = (q/pi)^((s+1)/2) Gamma((s+1)/2) L(s, chi)

is the Mellin transform of the twisted theta series
sum n chi(n) exp(-pi n^2 x/q).  Splitting the Mellin integral at x = 1 and
using Lambda(s) = Lambda(1 - s) gives a Gaussian-weighted character sum
with cutoff sqrt(q/pi) plus a dual sum of the same shape:

    L(1)        = sum chi(n) [exp(-y)/n + (pi/sqrt q) erfc(sqrt y)]
    2 Lambda'(1) = sum n chi(n) [E1(y)/y - K(y)]

with y = pi n^2/q and K(y) = int_1^oo exp(-yx) x^(-1/2) log x dx.
Both sums have explicit geometric tails, so the truncation error is a
proven bound.  A float64 version of the same sums drives the large sweeps.
"""
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpfr
from scipy import special

from ._arith import ConsistencyError, DomainError, primes_upto
from .quadclass import class_number, is_fundamental


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n)."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    sign = 1
    if n < 0:
        n = -n
        if D < 0:
            sign = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            sign = -sign
    # Jacobi symbol (D/n), n odd positive
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


@dataclass(frozen=True)
class KroneckerCharacter:
    discriminant: int

    def __call__(self, n: int) -> int:
        return kronecker(self.discriminant, n)

    @property
    def modulus(self) -> int:
        return abs(self.discriminant)


def weight(D: int) -> int:
    """Number of roots of unity in Q(sqrt D)."""
    return {-3: 6, -4: 4}.get(D, 2)


def _check(D: int):
    if D >= 0 or not is_fundamental(D):
        raise DomainError(f"{D} is not a negative fundamental discriminant")


def _to_mp(x) -> mpmath.mpf:
    if isinstance(x, mpmath.mpf):
        return x
    m, e = x.as_mantissa_exp()
    # exact conversion, independent of the ambient mpmath precision
    with mpmath.workprec(max(int(m).bit_length(), 1) + 8):
        return mpmath.mpf((int(m), int(e)))


@dataclass(frozen=True)
class LReport:
    D: int
    L1: mpmath.mpf
    L1_err: mpmath.mpf
    Lprime1: mpmath.mpf
    Lprime1_err: mpmath.mpf
    script_LD: mpmath.mpf
    script_LD_err: mpmath.mpf
    precision_bits: int


# ---------------------------------------------------------------------------
# MPFR theta sums


@lru_cache(maxsize=4)
def _series_tables(prec: int):
    # sized for every y the theta sums can produce at this precision
    wp = 2 * prec + 160
    kmax = 8 * prec + 400
    with gmpy2.context(gmpy2.get_context(), precision=wp):
        half = mpfr("0.5")
        inv_h = [1 / (mpfr(k) + half) for k in range(kmax + 1)]
        inv_k = [mpfr(0)] + [1 / mpfr(k) for k in range(1, kmax + 1)]
        Hh, Hk = [], []
        acc = mpfr(0)
        for v in inv_h:
            acc += v
            Hh.append(acc)
        acc = mpfr(0)
        for v in inv_k:
            acc += v
            Hk.append(acc)
    return inv_h, Hh, inv_k, Hk


def _incomplete_triple(y, prec: int, consts):
    """(erfc(sqrt y), E1(y), K(y)) with absolute error about 2^-prec.

    All three come from positive series sharing the factor e^-y:
      gamma(1/2, y) = sqrt(y) e^-y sum_k t_k,      t_k = y^k/(1/2)_(k+1)
      Ein(y)        = e^-y sum_k u_k Hk_k,         u_k = y^k/k!
      K(y)          = e^-y sum_k t_k Hh_k - sqrt(pi)(c0 + log y)/sqrt(y)
    where Hh_k = sum_{j<=k} 1/(1/2 + j), Hk_k the harmonic numbers and
    K(y) = int_1^oo e^(-yx) x^(-1/2) log x dx.  Subtracting from the
    complete values cancels to size e^-y, hence the guard bits.
    """
    yf = float(y)
    wp = prec + int(1.45 * yf) + 24
    inv_h, Hh, inv_k, Hk = _series_tables(prec - 16)
    gam, sqpi, c0 = consts
    with gmpy2.context(gmpy2.get_context(), precision=wp):
        y = mpfr(y)
        t = mpfr(2)
        u = y
        sg = t
        sk = t * Hh[0]
        se = u
        eps = mpfr(2) ** (-wp)
        k = 1
        while True:
            t = t * y * inv_h[k]
            sg += t
            dk = t * Hh[k]
            sk += dk
            if k > 1:
                u = u * y * inv_k[k]
                de = u * Hk[k]
                se += de
            if k > yf and dk < eps * sk:
                break
            k += 1
        ey = gmpy2.exp(-y)
        ly = gmpy2.log(y)
        ry = gmpy2.sqrt(y)
        erfc = 1 - ry * ey * sg / sqpi
        e1 = -gam - ly + ey * se
        K = ey * sk - sqpi * (c0 + ly) / ry
    return erfc, e1, K


def _theta_sums(D: int, prec: int, need_derivative: bool = True):
    """Return (L1, S2, tailL, tailS, terms) at `prec` bits.

    S2 = sum n chi(n) [E1(y)/y - K(y)] = 2 Lambda'(1).
    """
    q = -D
    wp = prec + 16
    with gmpy2.context(gmpy2.get_context(), precision=wp):
        pi = gmpy2.const_pi()
        gam = gmpy2.const_euler()
        consts = (gam, gmpy2.sqrt(pi), gam + 2 * gmpy2.const_log2())
        a = pi / gmpy2.sqrt(mpfr(q))
        # stop once exp(-y)/y^2 * n is below 2^-wp relative to Lambda(1) ~ q
        ymax = wp * 0.6931471805599453 + 0.5 * np.log(q) + 8
        M = int((ymax * q / float(pi)) ** 0.5) + 1
        S1 = mpfr(0)
        S2 = mpfr(0)
        for n in range(1, M + 1):
            c = kronecker(D, n)
            if c == 0:
                continue
            y = pi * n * n / q
            erfc, e1, K = _incomplete_triple(y, wp, consts)
            t1 = gmpy2.exp(-y) / n + a * erfc
            if c > 0:
                S1 += t1
            else:
                S1 -= t1
            if need_derivative:
                t2 = n * (e1 / y - K)
                if c > 0:
                    S2 += t2
                else:
                    S2 -= t2
        # tails: |term1(n)| <= 2 e^-y / n, |term2(n)| <= 2 n e^-y / y^2 for y >= 1,
        # summed geometrically (ratio of consecutive e^-y is < e^(-2 pi M/q))
        yM = pi * (M + 1) ** 2 / q
        ratio = gmpy2.exp(-2 * pi * (M + 1) / q)
        geo = 1 / (1 - ratio)
        tailL = 2 * gmpy2.exp(-yM) / (M + 1) * geo
        tailS = 2 * (M + 1) * gmpy2.exp(-yM) / (yM * yM) * geo * (1 + 1 / (M + 1)) ** 1
        rnd = mpfr(2) ** (-prec) * M
    return S1, S2, tailL + rnd * abs(S1) / M, tailS + rnd, M


def L1(D: int, prec: int = 128):
    """L(1, chi_D) with error bound, cross-checked against h(D).

    Route (a) is the theta-smoothed sum above, route (b) the class number
    formula 2 pi h/(w sqrt|D|).  Returns (value, error_bound) as mpf.
    """
    _check(D)
    S1, _, tail, _, _ = _theta_sums(D, prec, need_derivative=False)
    with mpmath.workprec(prec + 16):
        val = _to_mp(S1)
        err = _to_mp(tail)
        h = class_number(D)
        ref = 2 * mpmath.pi * h / (weight(D) * mpmath.sqrt(-D))
        if abs(val - ref) > err + mpmath.mpf(2) ** (-prec + 4) * ref:
            raise ConsistencyError(f"L(1) routes disagree for D={D}: {val} vs {ref}")
    return val, err


def l_report(D: int, prec: int = 128) -> LReport:
    """L(1), L'(1) and script-L_D = 1/2 log|D| + L'/L(1) from one theta pass."""
    _check(D)
    q = -D
    S1, S2, eL, eS, _ = _theta_sums(D, prec)
    with gmpy2.context(gmpy2.get_context(), precision=prec + 16):
        pi = gmpy2.const_pi()
        gam = gmpy2.const_euler()
        lam1 = q / pi * S1
        lam1p = S2 / 2
        script = lam1p / lam1 + gmpy2.log(pi) / 2 + gam / 2
        Lp = S1 * (script - gmpy2.log(mpfr(q)) / 2)
        # first-order propagation of the two tail bounds
        e_lam1 = q / pi * eL
        e_script = (eS / 2 + abs(lam1p) * e_lam1 / lam1) / (lam1 - e_lam1)
        e_Lp = eL * abs(script - gmpy2.log(mpfr(q)) / 2) + S1 * e_script
    return LReport(D, _to_mp(S1), _to_mp(eL), _to_mp(Lp), _to_mp(e_Lp),
                   _to_mp(script), _to_mp(e_script), prec)


def _L_general(D: int, s, prec: int):
    """L(s, chi_D) for real s near 1 from the same theta splitting (mpmath)."""
    q = -D
    with mpmath.workprec(prec + 20):
        s = mpmath.mpf(s)
        a1, a2 = (s + 1) / 2, (2 - s) / 2
        ymax = (prec + 20) * 0.7 + 10
        M = int((ymax * q / float(mpmath.pi)) ** 0.5) + 1
        lam = mpmath.mpf(0)
        for n in range(1, M + 1):
            c = kronecker(D, n)
            if c:
                y = mpmath.pi * n * n / q
                lam += c * n * (mpmath.gammainc(a1, y) / y ** a1 + mpmath.gammainc(a2, y) / y ** a2)
        return lam / ((q / mpmath.pi) ** a1 * mpmath.gamma(a1))


def Lprime1_fd(D: int, prec: int = 64):
    """L'(1, chi_D) by the 6-point central difference of s -> L(s, chi_D)."""
    h = mpmath.mpf(2) ** (-(prec // 7) - 1)
    w = {1: 45, 2: -9, 3: 1}
    with mpmath.workprec(prec + 20):
        acc = mpmath.mpf(0)
        for k, c in w.items():
            acc += c * (_L_general(D, 1 + k * h, prec) - _L_general(D, 1 - k * h, prec))
        return acc / (60 * h)


def Lprime1(D: int, prec: int = 128, crosscheck: bool = True):
    """L'(1, chi_D) with error bound.

    The reported value comes from the theta sum; with crosscheck=True it is
    compared with a finite-difference derivative computed at 64 bits and a
    disagreement above 2^(-min(prec, 64)/4) raises ConsistencyError.
    """
    rep = l_report(D, prec)
    if crosscheck:
        fd = Lprime1_fd(D, 64)
        tol = mpmath.mpf(2) ** (-min(prec, 64) / 4)
        if abs(fd - rep.Lprime1) > tol:
            raise ConsistencyError(f"L'(1) cross-check failed for D={D}")
    return rep.Lprime1, rep.Lprime1_err


def script_LD(D: int, prec: int = 128):
    """1/2 log|D| + L'/L(1, chi_D), returned as (value, error_bound)."""
    rep = l_report(D, prec)
    return rep.script_LD, rep.script_LD_err


# ---------------------------------------------------------------------------
# float64 sweep path


@lru_cache(maxsize=2)
def _spf_valuations(M: int):
    """Dense valuation matrix V[n-1, i] = v_{p_i}(n) for n <= M."""
    ps = np.array(primes_upto(M), dtype=np.int64)
    ns = np.arange(1, M + 1, dtype=np.int64)
    V = np.zeros((M, len(ps)), dtype=np.int8)
    for i, p in enumerate(ps):
        pk = p
        while pk <= M:
            V[ns % pk == 0, i] += 1
            pk *= p
    return ps, V


def chi_vector(D: int, M: int) -> np.ndarray:
    """chi_D(n) for n = 1..M as an int8 array, via complete multiplicativity."""
    Mcap = 1 << max(int(M - 1).bit_length(), 6)
    ps, V = _spf_valuations(Mcap)
    on = np.array([kronecker(D, int(p)) for p in ps], dtype=np.int8)
    V = V[:M]
    zero = (V[:, on == 0].sum(axis=1) > 0)
    neg = (V[:, on == -1].astype(np.int32).sum(axis=1) % 2 == 1)
    out = np.where(neg, -1, 1).astype(np.int8)
    out[zero] = 0
    return out


_C0 = float(mpmath.euler + 2 * mpmath.log(2))
_K_TERMS = 160


def _K_float(y: np.ndarray) -> np.ndarray:
    # the K series of _incomplete_triple; float64 cancellation costs ~1e-16 absolute
    inv = 1.0 / (np.arange(_K_TERMS) + 0.5)
    H = np.cumsum(inv)
    t = np.full_like(y, 2.0)
    s = t * H[0]
    for k in range(1, _K_TERMS):
        t = t * y * inv[k]
        s = s + t * H[k]
    return np.exp(-y) * s - np.sqrt(np.pi) * (_C0 + np.log(y)) / np.sqrt(y)


def script_LD_float(D: int):
    """float64 value of script-L_D (absolute error ~1e-11 for |D| <= 10^6)."""
    q = -D
    M = int((40.0 * q / np.pi) ** 0.5) + 1
    n = np.arange(1, M + 1, dtype=np.float64)
    chi = chi_vector(D, M).astype(np.float64)
    y = np.pi * n * n / q
    S1 = np.sum(chi * (np.exp(-y) / n + np.pi / np.sqrt(q) * special.erfc(np.sqrt(y))))
    S2 = np.sum(chi * n * (special.exp1(y) / y - _K_float(y)))
    lam1 = q / np.pi * S1
    return float(S2 / 2 / lam1 + 0.5 * np.log(np.pi) + 0.5 * np.euler_gamma)


def third_log_gap(D: int) -> float:
    """script-L_D - (1/3) log|D| in float64."""
    return script_LD_float(D) - np.log(-D) / 3.0


__all__ = [
    "kronecker", "KroneckerCharacter", "weight", "LReport", "L1", "Lprime1",
    "Lprime1_fd", "script_LD", "l_report", "chi_vector", "script_LD_float",
    "third_log_gap",
]
