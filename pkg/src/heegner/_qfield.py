"""Exact arithmetic in Q(sqrt D): elements r + s*sqrt(D) with rational r, s."""
from fractions import Fraction
from math import gcd

import mpmath


class QuadElt:
    __slots__ = ("r", "s", "D")

    def __init__(self, r, s=0, D=-1):
        self.r = Fraction(r)
        self.s = Fraction(s)
        self.D = D

    def _coerce(self, o):
        if isinstance(o, QuadElt):
            if o.D != self.D and o.s and self.s:
                raise ValueError("mixed quadratic fields")
            return o
        return QuadElt(o, 0, self.D)

    def __add__(self, o):
        o = self._coerce(o)
        return QuadElt(self.r + o.r, self.s + o.s, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadElt(-self.r, -self.s, self.D)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        return QuadElt(self.r * o.r + self.D * self.s * o.s, self.r * o.s + self.s * o.r, self.D)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.r * self.r - self.D * self.s * self.s

    def conj(self):
        return QuadElt(self.r, -self.s, self.D)

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadElt division by zero")
        return QuadElt(self.r / n, -self.s / n, self.D)

    def __truediv__(self, o):
        return self * self._coerce(o).inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, n: int):
        out = QuadElt(1, 0, self.D)
        base = self
        if n < 0:
            base, n = base.inverse(), -n
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o):
        if not isinstance(o, QuadElt):
            o = QuadElt(o, 0, self.D)
        return self.r == o.r and self.s == o.s

    def __hash__(self):
        return hash((self.r, self.s))

    def is_rational(self) -> bool:
        return self.s == 0

    def to_complex(self):
        """Value under the embedding sqrt(D) -> i*sqrt(|D|) (or the positive root)."""
        rt = mpmath.sqrt(mpmath.mpf(self.D)) if self.D > 0 else mpmath.mpc(0, mpmath.sqrt(-self.D))
        return mpmath.mpf(self.r.numerator) / self.r.denominator + \
            mpmath.mpf(self.s.numerator) / self.s.denominator * rt

    def __repr__(self):
        if not self.s:
            return str(self.r)
        return f"({self.r} + {self.s}*sqrt({self.D}))"


def integral_basis_coords(x: QuadElt):
    """Coordinates (u, v) of x in the basis {1, omega} of O_K, as Fractions.

    omega = (1 + sqrt D)/2 when D = 1 mod 4, else sqrt(D/4) (D fundamental).
    """
    D = x.D
    if D % 4 == 1:
        # r + s sqrt D = u + v (1 + sqrt D)/2  ->  v = 2s, u = r - s
        return x.r - x.s, 2 * x.s
    return x.r, 2 * x.s


def ideal_norm(gens) -> Fraction:
    """Norm of the fractional ideal generated by the given elements of K."""
    D = gens[0].D
    m = D // 4 if D % 4 == 0 else None
    rows = []
    for g in gens:
        u, v = integral_basis_coords(g)
        rows.append((u, v))
        # g * omega
        if D % 4 == 1:
            # omega^2 = omega + (D - 1)/4
            rows.append((v * Fraction(D - 1, 4), u + v))
        else:
            rows.append((v * m, u))
    den = 1
    for u, v in rows:
        den = den * Fraction(u).denominator // gcd(den, Fraction(u).denominator)
        den = den * Fraction(v).denominator // gcd(den, Fraction(v).denominator)
    ints = [(int(u * den), int(v * den)) for u, v in rows]
    # the 2x2 lattice index spanned by integer rows = gcd of all 2x2 minors
    g = 0
    for i in range(len(ints)):
        for j in range(i + 1, len(ints)):
            g = gcd(g, ints[i][0] * ints[j][1] - ints[i][1] * ints[j][0])
    return Fraction(g, den * den)
