"""Local epsilon factors, the sign sgn(E, D) and Shimura data.

Conventions (see the decisions log for the reasoning):
  * chi_{D,p} is the p-component of the idele class character of Q(sqrt D).
    For p | D it is the character of the prime discriminant p* on units and
    chi_{D,p}(p) = chi_{D/p*}(p).
  * The table value t_p = eps_p * chi_{D,p}(-1) is computed literally; N2
    collects the primes of N with t_p = -1, N1 the rest.
  * chi_D(N) in the global formula means prod_{p | N} chi_{D,p}(N), which is
    the Kronecker symbol when gcd(N, D) = 1.
"""
from dataclasses import dataclass, field
from itertools import product
from math import gcd

from ._arith import factorint, omega, valuation
from .dirichlet_l import kronecker
from .heegner_points import heegner_condition

UNAVAILABLE = "unavailable"


@dataclass(frozen=True)
class LocalEpsilon:
    place: object        # prime or 'inf'
    value: object        # -1, +1 or UNAVAILABLE
    provenance: str      # archimedean | unramified | table | unavailable


def prime_discriminant_part(D: int, p: int) -> int:
    """The prime discriminant p* dividing D (D fundamental, p | D)."""
    if p != 2:
        return p if p % 4 == 1 else -p
    # 2* in {-4, 8, -8}, chosen so that D / 2* = 1 mod 4
    if (D // 4) % 2:
        return -4
    return 8 if (D // 8) % 4 == 1 else -8


def _chi_star(pstar: int, u: int) -> int:
    return kronecker(pstar, u)


def chi_local(D: int, p: int, x: int) -> int:
    """chi_{D,p}(x) for a nonzero integer x."""
    if D % p:
        return kronecker(D, p) ** valuation(x, p)
    pstar = prime_discriminant_part(D, p)
    k = valuation(x, p)
    u = x // p ** k
    val = _chi_star(pstar, u)
    if k % 2:
        val *= kronecker(D // pstar, p)
    return val


def local_epsilon(E, D: int, p) -> LocalEpsilon:
    if p == "inf":
        return LocalEpsilon(p, -1, "archimedean")
    N = E.conductor
    if N % p and D % p:
        return LocalEpsilon(p, 1, "unramified")
    vN = valuation(N, p)
    if D % p == 0 and vN >= 2:
        return LocalEpsilon(p, UNAVAILABLE, "unavailable")
    t = chi_local(D, p, N)
    if D % p == 0 and vN == 1:
        from .elliptic_curve import ap
        t *= -ap(E, p)
    return LocalEpsilon(p, t * chi_local(D, p, -1), "table")


def table_value(E, D: int, p: int):
    """eps_p * chi_{D,p}(-1), or UNAVAILABLE."""
    e = local_epsilon(E, D, p)
    if e.value == UNAVAILABLE:
        return UNAVAILABLE
    return e.value * chi_local(D, p, -1)


def _square_part_meets(N, D):
    return any(e >= 2 and D % p == 0 for p, e in factorint(N).items()) if N > 1 else False


def global_sign(E, D: int):
    """-chi_D(N) prod_{p | (N, D)} (-a_p), or UNAVAILABLE."""
    N = E.conductor
    if _square_part_meets(N, D):
        return UNAVAILABLE
    from .elliptic_curve import ap
    s = -1
    for p in (factorint(N) if N > 1 else {}):
        s *= chi_local(D, p, N)
        if D % p == 0:
            s *= -ap(E, p)
    return s


def local_factors(E, D: int) -> list:
    places = sorted(set(factorint(E.conductor)) | set(factorint(abs(D))))
    return [local_epsilon(E, D, "inf")] + [local_epsilon(E, D, p) for p in places]


# ---------------------------------------------------------------------------
# Shimura data

SPLIT, UNRAMIFIED = "split", "unramified"


def ramified_tags(p: int) -> list:
    """Square classes of ramified quadratic extensions of Q_p."""
    if p == 2:
        return [("ramified", v, u) for v, u in [(0, 3), (0, 7), (1, 1), (1, 3), (1, 5), (1, 7)]]
    return [("ramified", 1), ("ramified", -1)]


def local_algebra(D: int, p: int):
    """Tag of K (x) Q_p for K = Q(sqrt D)."""
    if D % p:
        return SPLIT if kronecker(D, p) == 1 else UNRAMIFIED
    if p == 2:
        d = D // 4 if D % 4 == 0 else D
        v = valuation(d, 2)
        u = (d >> v) % 8
        return ("ramified", v % 2, u)
    return ("ramified", kronecker(D // p, p))


def _is_field(tag) -> bool:
    return tag != SPLIT


@dataclass(frozen=True)
class ShimuraDatum:
    N1: int
    N2: int
    local_ext: dict = field(hash=False)


def validate_datum(d: ShimuraDatum):
    """(ok, list of violated conditions)."""
    bad = []
    if gcd(d.N1, d.N2) != 1:
        bad.append("N1, N2 not coprime")
    f2 = factorint(d.N2) if d.N2 > 1 else {}
    f1 = factorint(d.N1) if d.N1 > 1 else {}
    for p in list(f1) + list(f2):
        if p not in d.local_ext:
            bad.append(f"no local algebra at {p}")
    for p, e in f2.items():
        tag = d.local_ext.get(p)
        if tag is not None and not _is_field(tag):
            bad.append(f"(i) K_{p} split but p | N2")
        if tag == UNRAMIFIED and e % 2 == 0:
            bad.append(f"(iii) K_{p} unramified and v_{p}(N2) even")
    if len(f2) % 2:
        bad.append("(ii) N2 has an odd number of prime factors")
    for p, e in f1.items():
        if d.local_ext.get(p) == UNRAMIFIED and e % 2:
            bad.append(f"(iv) K_{p} unramified and v_{p}(N1) odd")
    return not bad, bad


def construct_datum(E, D: int):
    """The datum of (E, D), or UNAVAILABLE if some local factor is not covered."""
    N = E.conductor
    N1 = N2 = 1
    ext = {}
    for p, e in (factorint(N).items() if N > 1 else []):
        t = table_value(E, D, p)
        if t == UNAVAILABLE:
            return UNAVAILABLE
        if t == -1:
            N2 *= p ** e
        else:
            N1 *= p ** e
        ext[p] = local_algebra(D, p)
    return ShimuraDatum(N1, N2, ext)


def sign_report(E, D: int) -> dict:
    sgn = global_sign(E, D)
    dat = construct_datum(E, D)
    out = {
        "curve": E.label, "D": D, "sign": sgn,
        "local_factors": {str(e.place): e.value for e in local_factors(E, D)},
        "heegner_condition": heegner_condition(E.conductor, D),
    }
    if dat == UNAVAILABLE:
        out["datum"] = UNAVAILABLE
    else:
        ok, why = validate_datum(dat)
        out["datum"] = {"N1": dat.N1, "N2": dat.N2, "local": {str(p): str(t) for p, t in dat.local_ext.items()},
                        "valid": ok, "violations": why}
    return out


def _tags(p: int):
    return [SPLIT, UNRAMIFIED] + ramified_tags(p)


def count_data(N: int) -> int:
    """Number of data (N1, N2, (K_p)) with N1 N2 = N satisfying all four conditions."""
    fac = sorted(factorint(N).items()) if N > 1 else []
    choices = []
    for p, e in fac:
        opts = []
        for side in (1, 2):
            for tag in _tags(p):
                opts.append((p, e, side, tag))
        choices.append(opts)
    count = 0
    for combo in product(*choices):
        N1 = N2 = 1
        ext = {}
        for p, e, side, tag in combo:
            if side == 1:
                N1 *= p ** e
            else:
                N2 *= p ** e
            ext[p] = tag
        if validate_datum(ShimuraDatum(N1, N2, ext))[0]:
            count += 1
    return count


def data_bound(N: int) -> int:
    return 15 * 7 ** omega(N)
