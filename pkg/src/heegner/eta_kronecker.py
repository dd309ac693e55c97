"""Dedekind eta and the Kronecker limit identity on Heegner orbits.

For a fundamental D < 0 with reduced forms Q, z_Q = (-b + sqrt D)/(2a):

    -(1/h) sum_Q log(Im z_Q |eta(z_Q)|^4) = script-L_D + log 2 - gamma.

The left side is computed here from the q-product, the right side by
dirichlet_l; the two share nothing but the list of discriminants.
"""
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from ._arith import DomainError
from .quadclass import enumerate_reduced
from . import dirichlet_l


@lru_cache(maxsize=16)
def euler_gamma(prec: int):
    """Euler's constant by the Brent-McMillan series B1, |error| < pi e^(-4n)."""
    n = int(prec * 0.6931471805599453 / 4) + 2
    N = int(3.5911 * n) + 1
    with mpmath.workprec(prec + 2 * n.bit_length() + 20):
        A = -mpmath.log(n)
        B = mpmath.mpf(1)
        U, V = A, B
        n2 = n * n
        for k in range(1, N + 1):
            B = B * n2 / (k * k)
            A = (A * n2 / k + B) / k
            U += A
            V += B
        g = U / V
    return g


@dataclass(frozen=True)
class EtaEvaluation:
    z: mpmath.mpc
    value: mpmath.mpc
    truncation_bound: mpmath.mpf
    terms: int


def _terms_for(qabs, prec):
    # smallest M with 2|q|^(M+1)/(1-|q|) < 2^-(prec+8)
    lq = -mpmath.log(qabs, 2)
    return max(int((prec + 10) / lq) + 1, 1)


def _eta_product(z, prec: int, M=None):
    with mpmath.workprec(prec + 20):
        q = mpmath.expjpi(2 * z)
        qa = abs(q)
        if qa >= 1:
            raise DomainError("eta needs Im z > 0")
        if M is None:
            M = _terms_for(qa, prec)
        p = mpmath.mpc(1)
        qn = mpmath.mpc(1)
        for _ in range(M):
            qn *= q
            p *= 1 - qn
        val = mpmath.expjpi(z / 12) * p
        tail = abs(val) * 2 * qa ** (M + 1) / (1 - qa) * 1.01
    return val, tail, M


def eta(z, prec: int = 128, reduce: bool = True, M=None) -> EtaEvaluation:
    """eta(z) = q^(1/24) prod (1 - q^n), q = e^(2 pi i z).

    With reduce=True the point is first moved into the standard fundamental
    domain using eta(z+1) = e^(i pi/12) eta(z) and eta(-1/z) = sqrt(-iz) eta(z).
    """
    z = mpmath.mpc(z)
    if z.imag <= 0:
        raise DomainError("eta needs Im z > 0")
    if not reduce:
        val, tail, M = _eta_product(z, prec, M)
        return EtaEvaluation(z, val, tail, M)
    with mpmath.workprec(prec + 30):
        w = z
        factor = mpmath.mpc(1)
        for _ in range(10000):
            n = int(mpmath.nint(w.real))
            if n:
                w -= n
                factor *= mpmath.expjpi(mpmath.mpf(n) / 12)
            if abs(w) < 1 - mpmath.mpf(2) ** (-prec):
                # eta(w) = eta(-1/w) / sqrt(-i w)
                factor /= mpmath.sqrt(-1j * w)
                w = -1 / w
            else:
                break
        val, tail, M = _eta_product(w, prec, M)
        return EtaEvaluation(z, factor * val, abs(factor) * tail, M)


def log_abs_eta(z, prec: int = 128):
    """log|eta(z)| for z already in the fundamental domain (no reduction)."""
    with mpmath.workprec(prec + 20):
        z = mpmath.mpc(z)
        q = mpmath.expjpi(2 * z)
        M = _terms_for(abs(q), prec)
        s = -mpmath.pi * z.imag / 12
        qn = mpmath.mpc(1)
        for _ in range(M):
            qn *= q
            s += mpmath.log(abs(1 - qn))
    return s


def modular_invariant(z, prec: int = 128):
    """Im z * |eta(z)|^4, invariant under SL2(Z)."""
    e = eta(z, prec)
    with mpmath.workprec(prec + 10):
        return mpmath.mpc(z).imag * abs(e.value) ** 4


def g_invariant(D: int, prec: int = 128):
    """-(1/h) sum log(Im z |eta(z)|^4) over roots of the reduced forms."""
    forms = enumerate_reduced(D)
    with mpmath.workprec(prec + 20):
        s = mpmath.mpf(0)
        for f in forms:
            z = f.root()
            s += mpmath.log(z.imag) + 4 * log_abs_eta(z, prec)
        return -s / len(forms)


@dataclass(frozen=True)
class KroneckerCheck:
    D: int
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    residual: mpmath.mpf
    bound: mpmath.mpf
    prec: int

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound


def kronecker_limit_check(D: int, prec: int = 128) -> KroneckerCheck:
    """Compare the eta-side average with script-L_D + log 2 - gamma."""
    lhs = g_invariant(D, prec)
    rep = dirichlet_l.l_report(D, prec)
    with mpmath.workprec(prec + 20):
        rhs = rep.script_LD + mpmath.log(2) - euler_gamma(prec)
        res = abs(lhs - rhs)
        # eta side: each term carries <= 2^-(prec+6) relative error from the
        # product tail, plus rounding; L side: propagated tail bound
        bound = rep.script_LD_err + mpmath.mpf(2) ** (-prec + 12) * (1 + abs(lhs))
    return KroneckerCheck(D, lhs, rhs, res, bound, prec)
