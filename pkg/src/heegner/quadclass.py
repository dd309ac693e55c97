"""Imaginary quadratic discriminants, reduced forms and class groups.

Forms are triples (a, b, c) standing for a*x^2 + b*x*y + c*y^2.  Everything
here is exact integer arithmetic; complex values only appear when a
character is evaluated, at the precision the caller asks for.
"""
from dataclasses import dataclass, field
from math import gcd

import mpmath

from ._arith import DomainError, is_squarefree, xgcd


@dataclass(frozen=True)
class Discriminant:
    value: int
    is_fundamental: bool

    @classmethod
    def of(cls, d: int) -> "Discriminant":
        if d >= 0 or d % 4 not in (0, 1):
            raise DomainError(f"{d} is not a negative discriminant")
        return cls(d, is_fundamental(d))


def is_fundamental(d: int) -> bool:
    """True iff d < 0 is the discriminant of an imaginary quadratic field."""
    if d >= 0:
        raise DomainError("is_fundamental expects d < 0")
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminants(dmin: int, dmax: int) -> list:
    """Fundamental discriminants in [dmin, dmax], in decreasing order (-3, -4, ...)."""
    lo, hi = min(dmin, dmax), max(dmin, dmax)
    hi = min(hi, -3)
    return [d for d in range(hi, lo - 1, -1) if d % 4 in (0, 1) and is_fundamental(d)]


def _require_fundamental(D) -> int:
    d = D.value if isinstance(D, Discriminant) else int(D)
    if d >= 0 or not is_fundamental(d):
        raise DomainError(f"{d} is not a negative fundamental discriminant")
    return d


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def inverse(self) -> "QuadForm":
        return reduce(QuadForm(self.a, -self.b, self.c))

    def root(self):
        """The root (-b + i*sqrt|D|)/(2a) in the upper half plane."""
        return mpmath.mpc(-self.b, mpmath.sqrt(-self.disc)) / (2 * self.a)

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"


def principal_form(D: int) -> QuadForm:
    k = D % 2
    return QuadForm(1, k, (k - D) // 4)


def _normalize(a, b, c):
    # move b into (-a, a]
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def _reduce_abc(a, b, c):
    a, b, c = _normalize(a, b, c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize(c, -b, a)
    return a, b, c


def reduce(f: QuadForm) -> QuadForm:
    """The unique reduced form SL2(Z)-equivalent to a positive definite primitive f."""
    a, b, c = f
    if b * b - 4 * a * c >= 0 or a <= 0:
        raise DomainError(f"{f} is not positive definite")
    if gcd(gcd(a, b), c) != 1:
        raise DomainError(f"{f} is not primitive")
    return QuadForm(*_reduce_abc(a, b, c))


def reduce_with_matrix(f: QuadForm):
    """Reduce f and also return gamma in SL2(Z) with f = reduced o gamma.

    Concretely, if g = (p, q, r, s) then reduced(p*x + q*y, r*x + s*y) = f(x, y),
    so the root of f is mapped to the root of the reduced form by
    z -> (p*z + q)/(r*z + s).
    """
    a, b, c = f
    M = (1, 0, 0, 1)
    while True:
        r = (a - b) // (2 * a)
        # x -> x + r*y
        b, c = b + 2 * r * a, a * r * r + b * r + c
        M = (M[0], M[1] + r * M[0], M[2], M[3] + r * M[2])
        if a > c or (a == c and b < 0):
            # (x, y) -> (-y, x)
            a, b, c = c, -b, a
            M = (M[1], -M[0], M[3], -M[2])
        else:
            break
    return QuadForm(a, b, c), M


def enumerate_reduced(D) -> list:
    """All reduced primitive forms of discriminant D, sorted lexicographically."""
    d = _require_fundamental(D)
    q = -d
    out = []
    b = q % 2
    while 3 * b * b <= q:
        m = (b * b + q) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                if gcd(gcd(a, b), c) == 1:
                    out.append(QuadForm(a, b, c))
                    if 0 < b < a < c:
                        out.append(QuadForm(a, -b, c))
            a += 1
        b += 2
    out.sort()
    return out


def class_number(D) -> int:
    return len(enumerate_reduced(D))


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Reduced representative of the Dirichlet composition of f and g."""
    D = f.disc
    if g.disc != D:
        raise DomainError("compose: discriminants differ")
    a1, b1, c1 = f
    a2, b2, c2 = g
    s = (b1 + b2) // 2
    g1, x1, y1 = xgcd(a1, a2)
    e, x2, y2 = xgcd(g1, s)
    v, w = x2 * y1, y2
    A = a1 * a2 // (e * e)
    B = b2 + 2 * (a2 // e) * (v * (b1 - b2) // 2 - w * c2)
    B %= 2 * A
    C = (B * B - D) // (4 * A)
    return QuadForm(*_reduce_abc(A, B, C))


def power(f: QuadForm, n: int) -> QuadForm:
    if n < 0:
        f, n = f.inverse(), -n
    r = principal_form(f.disc)
    while n:
        if n & 1:
            r = compose(r, f)
        f = compose(f, f)
        n >>= 1
    return r


def _smith(M):
    """Smith normal form of a square integer matrix.

    Returns (diag, V, Vinv) with U*M*V = diag for some unimodular U.
    Only V and its inverse are tracked, that is all the caller needs.
    """
    n = len(M)
    A = [row[:] for row in M]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(i, j, k):
        # column i += k * column j  (and the inverse on Vi rows)
        for r in range(n):
            A[r][i] += k * A[r][j]
            V[r][i] += k * V[r][j]
        for cc in range(n):
            Vi[j][cc] -= k * Vi[i][cc]

    def col_swap(i, j):
        for r in range(n):
            A[r][i], A[r][j] = A[r][j], A[r][i]
            V[r][i], V[r][j] = V[r][j], V[r][i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_op(i, j, k):
        A[i] = [x + k * y for x, y in zip(A[i], A[j])]

    for t in range(n):
        while True:
            piv = [(abs(A[r][cc]), r, cc) for r in range(t, n) for cc in range(t, n) if A[r][cc]]
            if not piv:
                return [A[i][i] for i in range(n)], V, Vi
            _, r, cc = min(piv)
            A[t], A[r] = A[r], A[t]
            if cc != t:
                col_swap(t, cc)
            done = True
            for r in range(t + 1, n):
                q = A[r][t] // A[t][t]
                if q:
                    row_op(r, t, -q)
                if A[r][t]:
                    done = False
            for cc in range(t + 1, n):
                q = A[t][cc] // A[t][t]
                if q:
                    col_op(cc, t, -q)
                if A[t][cc]:
                    done = False
            if not done:
                continue
            bad = [(r, cc) for r in range(t + 1, n) for cc in range(t + 1, n) if A[r][cc] % A[t][t]]
            if bad:
                row_op(t, bad[0][0], 1)
                continue
            if A[t][t] < 0:
                A[t] = [-x for x in A[t]]
            break
    return [A[i][i] for i in range(n)], V, Vi


@dataclass(frozen=True)
class ClassGroup:
    discriminant: Discriminant
    reduced_forms: list
    invariant_factors: list
    generators: list
    coords: dict = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.reduced_forms)

    def identity(self) -> QuadForm:
        return principal_form(self.discriminant.value)

    def index(self, f: QuadForm) -> int:
        return self.reduced_forms.index(reduce(f))

    def element(self, exps) -> QuadForm:
        r = self.identity()
        for g, e in zip(self.generators, exps):
            r = compose(r, power(g, e))
        return r


def class_group_structure(D) -> ClassGroup:
    """Invariant factors d1 | d2 | ... and matching generators of Cl(D)."""
    d = _require_fundamental(D)
    forms = enumerate_reduced(d)
    one = principal_form(d)
    # subgroup spanned so far: form -> exponent vector over `gens`
    span = {one: ()}
    gens, rels = [], []
    for f in forms:
        if f in span:
            continue
        k, g = 1, f
        while g not in span:
            g = compose(g, f)
            k += 1
        rel = list(span[g]) + [0] * (len(gens) - len(span[g]))
        rels.append([-x for x in rel] + [k])
        new = {}
        for h, vec in span.items():
            vec = list(vec) + [0] * (len(gens) - len(vec))
            p = h
            for i in range(k):
                new[p] = tuple(vec + [i])
                p = compose(p, f)
        gens.append(f)
        span = new
    n = len(gens)
    if n == 0:
        return ClassGroup(Discriminant(d, True), forms, [], [], {one: ()})
    R = [row + [0] * (n - len(row)) for row in rels]
    diag, V, Vi = _smith(R)
    keep = [j for j in range(n) if diag[j] != 1]
    order = sorted(keep, key=lambda j: diag[j])
    new_gens = []
    for j in order:
        g = one
        for i in range(n):
            if Vi[j][i]:
                g = compose(g, power(gens[i], Vi[j][i]))
        new_gens.append(g)
    inv = [diag[j] for j in order]
    coords = {}
    for f, vec in span.items():
        vec = list(vec) + [0] * (n - len(vec))
        y = [sum(vec[i] * V[i][j] for i in range(n)) for j in range(n)]
        coords[f] = tuple(y[j] % diag[j] for j in order)
    return ClassGroup(Discriminant(d, True), forms, inv, new_gens, coords)


@dataclass(frozen=True)
class ClassCharacter:
    exponents: tuple
    invariant_factors: tuple

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def phase(self, coords) -> mpmath.mpf:
        """chi(class) = exp(2*pi*i*phase); the phase is an exact rational."""
        from fractions import Fraction
        return sum((Fraction(e * y, d) for e, y, d in zip(self.exponents, coords, self.invariant_factors)), Fraction(0)) % 1

    def value(self, G: ClassGroup, f: QuadForm, prec: int = 53):
        ph = self.phase(G.coords[reduce(f)])
        with mpmath.workprec(prec):
            return mpmath.expjpi(2 * mpmath.mpf(ph.numerator) / ph.denominator)


def characters(G: ClassGroup) -> list:
    """All h(D) characters of the class group, as exponent vectors."""
    inv = tuple(G.invariant_factors)
    out = [()]
    for d in inv:
        out = [e + (k,) for e in out for k in range(d)]
    return [ClassCharacter(e, inv) for e in out]


def siegel_ratio(D) -> float:
    return class_number(D) / abs(int(D)) ** 0.4
