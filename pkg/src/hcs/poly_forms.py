"""Exact exterior calculus on a coordinate patch of R^n.

Scalar differential forms with polynomial coefficients over the rationals.
Coordinates are x1..xn; a form is stored sparsely, grouped by the bitmask of
its dx indices, each group holding a polynomial keyed by packed exponents
(16 bits per variable).  Public index tuples are 1-based and increasing.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, Mapping, Tuple, Union

from gmpy2 import mpq

__all__ = [
    "Rational",
    "to_q",
    "q_str",
    "PolyFormError",
    "DegreeMismatch",
    "VarMismatch",
    "NotTopDegree",
    "BadDegree",
    "RatPoly",
    "ScalarForm",
    "sf_add",
    "sf_sub",
    "sf_scale",
    "sf_wedge",
    "sf_d",
    "sf_integrate_cube",
    "sf_random",
    "sf_zero",
    "sf_const",
    "sf_coord",
    "sf_dx",
    "sf_from_terms",
]

Rational = mpq
RationalLike = Union[int, Fraction, str, "mpq"]

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1
MAX_VARS = 12

_ZERO = mpq(0)


class PolyFormError(ValueError):
    pass


class DegreeMismatch(PolyFormError):
    pass


class VarMismatch(PolyFormError):
    pass


class NotTopDegree(PolyFormError):
    pass


class BadDegree(PolyFormError):
    pass


def to_q(x: RationalLike) -> mpq:
    """Coerce ints, Fractions, mpq or "p/q" strings to an exact rational."""
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    return mpq(x)


def q_str(x) -> str:
    x = to_q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# --- packed monomials -------------------------------------------------------

def _pack(exps: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > EXP_MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (EXP_BITS * i)
    return key


def _unpack(key: int, n: int) -> Tuple[int, ...]:
    return tuple((key >> (EXP_BITS * i)) & EXP_MASK for i in range(n))


def _mask_of(idx: Iterable[int]) -> int:
    m = 0
    for i in idx:
        m |= 1 << (i - 1)
    return m


def _idx_of(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return tuple(out)


@lru_cache(maxsize=None)
def _wedge_sign(m1: int, m2: int) -> int:
    # transpositions needed to sort dx_I dx_J: pairs i in I, j in J with i > j
    n = 0
    j = 0
    m = m2
    while m:
        if m & 1:
            n += bin(m1 >> (j + 1)).count("1")
        m >>= 1
        j += 1
    return -1 if n & 1 else 1


def _pmul(p: Mapping[int, mpq], q: Mapping[int, mpq]) -> Dict[int, mpq]:
    out: Dict[int, mpq] = {}
    get = out.get
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = k1 + k2
            v = get(k)
            out[k] = c1 * c2 if v is None else v + c1 * c2
    return {k: v for k, v in out.items() if v}


def _padd_into(acc: Dict[int, mpq], p: Mapping[int, mpq], s: mpq) -> None:
    get = acc.get
    for k, c in p.items():
        v = get(k)
        acc[k] = c * s if v is None else v + c * s


# --- RatPoly ----------------------------------------------------------------

class RatPoly:
    """Multivariate polynomial with rational coefficients."""

    __slots__ = ("n_vars", "_t")

    def __init__(self, n_vars: int, terms: Mapping[Tuple[int, ...], RationalLike] | None = None):
        self.n_vars = n_vars
        t: Dict[int, mpq] = {}
        for exps, c in (terms or {}).items():
            if len(exps) != n_vars:
                raise VarMismatch(f"exponent vector {exps} has length != {n_vars}")
            c = to_q(c)
            if c:
                k = _pack(exps)
                t[k] = t.get(k, _ZERO) + c
        self._t = {k: v for k, v in t.items() if v}

    @classmethod
    def _raw(cls, n_vars: int, t: Dict[int, mpq]) -> "RatPoly":
        p = cls.__new__(cls)
        p.n_vars = n_vars
        p._t = t
        return p

    @property
    def terms(self) -> Dict[Tuple[int, ...], mpq]:
        return {_unpack(k, self.n_vars): c for k, c in self._t.items()}

    def is_zero(self) -> bool:
        return not self._t

    def total_degree(self) -> int:
        return max((sum(_unpack(k, self.n_vars)) for k in self._t), default=-1)

    def _check(self, other: "RatPoly") -> None:
        if other.n_vars != self.n_vars:
            raise VarMismatch(f"n_vars {self.n_vars} vs {other.n_vars}")

    def __add__(self, other: "RatPoly") -> "RatPoly":
        self._check(other)
        acc = dict(self._t)
        _padd_into(acc, other._t, mpq(1))
        return RatPoly._raw(self.n_vars, {k: v for k, v in acc.items() if v})

    def __neg__(self) -> "RatPoly":
        return RatPoly._raw(self.n_vars, {k: -v for k, v in self._t.items()})

    def __sub__(self, other: "RatPoly") -> "RatPoly":
        return self + (-other)

    def __mul__(self, other) -> "RatPoly":
        if isinstance(other, RatPoly):
            self._check(other)
            return RatPoly._raw(self.n_vars, _pmul(self._t, other._t))
        s = to_q(other)
        if not s:
            return RatPoly._raw(self.n_vars, {})
        return RatPoly._raw(self.n_vars, {k: v * s for k, v in self._t.items()})

    __rmul__ = __mul__

    def diff(self, i: int) -> "RatPoly":
        """Partial derivative in x_i (1-based)."""
        sh = EXP_BITS * (i - 1)
        out = {}
        for k, c in self._t.items():
            e = (k >> sh) & EXP_MASK
            if e:
                out[k - (1 << sh)] = c * e
        return RatPoly._raw(self.n_vars, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatPoly):
            return NotImplemented
        return self.n_vars == other.n_vars and self._t == other._t

    def __hash__(self) -> int:
        return hash((self.n_vars, frozenset(self._t.items())))

    def __repr__(self) -> str:
        return f"RatPoly({self.n_vars}, {_poly_str(self._t, self.n_vars)})"


def _poly_str(t: Mapping[int, mpq], n: int) -> str:
    if not t:
        return "0"
    parts = []
    for k in sorted(t):
        exps = _unpack(k, n)
        mono = "*".join(
            f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e
        )
        c = q_str(t[k])
        parts.append(f"{c}*{mono}" if mono else c)
    return " + ".join(parts)


# --- ScalarForm -------------------------------------------------------------

class ScalarForm:
    """Degree-p form with polynomial coefficients.

    ``_c`` maps a dx-index bitmask (bit i-1 for dx_i) to a packed polynomial.
    Degrees outside 0..n_vars give the canonical zero form; the degree is still
    kept for sign bookkeeping by callers.
    """

    __slots__ = ("n_vars", "degree", "_c")

    def __init__(self, n_vars: int, degree: int, components: Mapping[Tuple[int, ...], RatPoly | Mapping] | None = None):
        if not 0 <= n_vars <= MAX_VARS:
            raise VarMismatch(f"n_vars must lie in 0..{MAX_VARS}")
        self.n_vars = n_vars
        self.degree = degree
        c: Dict[int, Dict[int, mpq]] = {}
        if components and 0 <= degree <= n_vars:
            for idx, poly in components.items():
                idx = tuple(idx)
                if len(idx) != degree or any(b <= a for a, b in zip(idx, idx[1:])):
                    raise BadDegree(f"index tuple {idx} is not strictly increasing of length {degree}")
                if idx and not (1 <= idx[0] and idx[-1] <= n_vars):
                    raise BadDegree(f"index tuple {idx} out of range")
                if not isinstance(poly, RatPoly):
                    poly = RatPoly(n_vars, poly)
                elif poly.n_vars != n_vars:
                    raise VarMismatch("component polynomial has wrong n_vars")
                if poly._t:
                    m = _mask_of(idx)
                    acc = c.setdefault(m, {})
                    _padd_into(acc, poly._t, mpq(1))
            c = {m: {k: v for k, v in p.items() if v} for m, p in c.items()}
            c = {m: p for m, p in c.items() if p}
        self._c = c

    @classmethod
    def _raw(cls, n_vars: int, degree: int, c: Dict[int, Dict[int, mpq]]) -> "ScalarForm":
        f = cls.__new__(cls)
        f.n_vars = n_vars
        f.degree = degree
        f._c = c
        return f

    # views
    @property
    def components(self) -> Dict[Tuple[int, ...], RatPoly]:
        return {_idx_of(m): RatPoly._raw(self.n_vars, dict(p)) for m, p in self._c.items()}

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def n_terms(self) -> int:
        return sum(len(p) for p in self._c.values())

    def max_poly_degree(self) -> int:
        return max(
            (sum(_unpack(k, self.n_vars)) for p in self._c.values() for k in p), default=-1
        )

    def coefficients(self) -> Iterable[mpq]:
        for p in self._c.values():
            yield from p.values()

    def items(self):
        """Yield (index tuple, exponent tuple, coefficient) in sorted order."""
        for m in sorted(self._c):
            idx = _idx_of(m)
            p = self._c[m]
            for k in sorted(p):
                yield idx, _unpack(k, self.n_vars), p[k]

    # arithmetic sugar
    def __add__(self, other: "ScalarForm") -> "ScalarForm":
        return sf_add(self, other)

    def __sub__(self, other: "ScalarForm") -> "ScalarForm":
        return sf_sub(self, other)

    def __neg__(self) -> "ScalarForm":
        return sf_scale(self, -1)

    def __mul__(self, s) -> "ScalarForm":
        return sf_scale(self, s)

    __rmul__ = __mul__

    def __xor__(self, other: "ScalarForm") -> "ScalarForm":
        return sf_wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarForm):
            return NotImplemented
        if self.n_vars != other.n_vars:
            return False
        if not self._c and not other._c:
            return True
        return self.degree == other.degree and self._c == other._c

    def __hash__(self) -> int:
        return hash((self.n_vars, frozenset((m, frozenset(p.items())) for m, p in self._c.items())))

    def __repr__(self) -> str:
        if not self._c:
            return f"ScalarForm(n={self.n_vars}, p={self.degree}, 0)"
        parts = []
        for m in sorted(self._c):
            dx = "^".join(f"dx{i}" for i in _idx_of(m)) or "1"
            parts.append(f"({_poly_str(self._c[m], self.n_vars)}) {dx}")
        return f"ScalarForm(n={self.n_vars}, p={self.degree}, {' + '.join(parts)})"


def _check_vars(a: ScalarForm, b: ScalarForm) -> None:
    if a.n_vars != b.n_vars:
        raise VarMismatch(f"n_vars {a.n_vars} vs {b.n_vars}")


def sf_zero(n_vars: int, degree: int) -> ScalarForm:
    return ScalarForm._raw(n_vars, degree, {})


def sf_const(n_vars: int, c: RationalLike) -> ScalarForm:
    c = to_q(c)
    return ScalarForm._raw(n_vars, 0, {0: {0: c}} if c else {})


def sf_coord(n_vars: int, i: int, power: int = 1) -> ScalarForm:
    """The 0-form x_i**power."""
    return ScalarForm._raw(n_vars, 0, {0: {power << (EXP_BITS * (i - 1)): mpq(1)}})


def sf_dx(n_vars: int, i: int) -> ScalarForm:
    return ScalarForm._raw(n_vars, 1, {1 << (i - 1): {0: mpq(1)}})


def sf_from_terms(n_vars: int, degree: int, terms: Iterable[Tuple[Tuple[int, ...], Tuple[int, ...], RationalLike]]) -> ScalarForm:
    """Build a form from (index tuple, exponent tuple, coefficient) triples.

    Index tuples need not be sorted; the permutation sign is applied.
    """
    acc: Dict[int, Dict[int, mpq]] = {}
    for idx, exps, c in terms:
        idx = tuple(idx)
        if len(idx) != degree:
            raise BadDegree(f"index tuple {idx} does not have length {degree}")
        if len(set(idx)) != len(idx):
            continue
        sign = 1
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if idx[a] > idx[b]:
                    sign = -sign
        m = _mask_of(idx)
        p = acc.setdefault(m, {})
        k = _pack(exps)
        p[k] = p.get(k, _ZERO) + sign * to_q(c)
    return _finish(n_vars, degree, acc)


def _finish(n: int, degree: int, acc: Dict[int, Dict[int, mpq]]) -> ScalarForm:
    out = {}
    for m, p in acc.items():
        q = {k: v for k, v in p.items() if v}
        if q:
            out[m] = q
    return ScalarForm._raw(n, degree, out)


def sf_add(a: ScalarForm, b: ScalarForm) -> ScalarForm:
    _check_vars(a, b)
    if not b._c:
        return a
    if not a._c:
        return b
    if a.degree != b.degree:
        raise DegreeMismatch(f"cannot add degree {a.degree} and {b.degree}")
    acc = {m: dict(p) for m, p in a._c.items()}
    one = mpq(1)
    for m, p in b._c.items():
        q = acc.get(m)
        if q is None:
            acc[m] = dict(p)
        else:
            _padd_into(q, p, one)
    return _finish(a.n_vars, a.degree, acc)


def sf_scale(a: ScalarForm, s: RationalLike) -> ScalarForm:
    s = to_q(s)
    if not s or not a._c:
        return ScalarForm._raw(a.n_vars, a.degree, {})
    return ScalarForm._raw(a.n_vars, a.degree, {m: {k: v * s for k, v in p.items()} for m, p in a._c.items()})


def sf_sub(a: ScalarForm, b: ScalarForm) -> ScalarForm:
    return sf_add(a, sf_scale(b, -1))


def _wedge_into(acc: Dict[int, Dict[int, mpq]], a: ScalarForm, b: ScalarForm, s: mpq) -> None:
    """acc += s * (a ^ b); acc is a raw component map."""
    for m1, p1 in a._c.items():
        for m2, p2 in b._c.items():
            if m1 & m2:
                continue
            sg = s if _wedge_sign(m1, m2) > 0 else -s
            tgt = acc.get(m1 | m2)
            if tgt is None:
                tgt = acc[m1 | m2] = {}
            get = tgt.get
            for k1, c1 in p1.items():
                c1s = c1 * sg
                for k2, c2 in p2.items():
                    k = k1 + k2
                    v = get(k)
                    tgt[k] = c1s * c2 if v is None else v + c1s * c2


def sf_wedge(a: ScalarForm, b: ScalarForm) -> ScalarForm:
    _check_vars(a, b)
    deg = a.degree + b.degree
    if not a._c or not b._c or deg > a.n_vars:
        return ScalarForm._raw(a.n_vars, deg, {})
    acc: Dict[int, Dict[int, mpq]] = {}
    _wedge_into(acc, a, b, mpq(1))
    return _finish(a.n_vars, deg, acc)


def _d_into(acc: Dict[int, Dict[int, mpq]], a: ScalarForm, s: mpq) -> None:
    n = a.n_vars
    for m, p in a._c.items():
        for i in range(n):
            bit = 1 << i
            if m & bit:
                continue
            sh = EXP_BITS * i
            step = 1 << sh
            sg = -s if bin(m & (bit - 1)).count("1") & 1 else s
            tgt = None
            for k, c in p.items():
                e = (k >> sh) & EXP_MASK
                if e:
                    if tgt is None:
                        tgt = acc.get(m | bit)
                        if tgt is None:
                            tgt = acc[m | bit] = {}
                    kk = k - step
                    v = tgt.get(kk)
                    tgt[kk] = c * e * sg if v is None else v + c * e * sg


def sf_d(a: ScalarForm) -> ScalarForm:
    deg = a.degree + 1
    if not a._c or deg > a.n_vars:
        return ScalarForm._raw(a.n_vars, deg, {})
    acc: Dict[int, Dict[int, mpq]] = {}
    _d_into(acc, a, mpq(1))
    return _finish(a.n_vars, deg, acc)


def sf_integrate_cube(a: ScalarForm) -> mpq:
    """Integral of a top-degree form over [0,1]^n with the standard orientation."""
    if a.degree != a.n_vars:
        raise NotTopDegree(f"degree {a.degree} is not top degree {a.n_vars}")
    n = a.n_vars
    total = mpq(0)
    for p in a._c.values():
        for k, c in p.items():
            den = 1
            for e in _unpack(k, n):
                den *= e + 1
            total += c / den
    return total


def sf_random(seed, n_vars: int, degree: int, max_poly_degree: int = 2, coeff_bound: int = 3,
              density: float = 1.0, max_terms: int = 2) -> ScalarForm:
    """Seeded random form.

    Each increasing index tuple is kept with probability ``density`` and gets
    between 1 and ``max_terms`` random monomials of total degree at most
    ``max_poly_degree`` with integer coefficients in [-coeff_bound, coeff_bound].
    Uses ``random.Random(seed)``, whose output is fixed across platforms.
    """
    if not 0 <= degree <= n_vars:
        raise BadDegree(f"degree {degree} outside 0..{n_vars}")
    rng = random.Random(seed)
    acc: Dict[int, Dict[int, mpq]] = {}
    for idx in combinations(range(1, n_vars + 1), degree):
        if rng.random() >= density:
            continue
        p: Dict[int, mpq] = {}
        for _ in range(rng.randint(1, max_terms)):
            exps = [0] * n_vars
            for _ in range(rng.randint(0, max_poly_degree)):
                exps[rng.randrange(n_vars)] += 1
            c = rng.randint(-coeff_bound, coeff_bound)
            k = _pack(exps)
            p[k] = p.get(k, _ZERO) + c
        acc[_mask_of(idx)] = p
    return _finish(n_vars, degree, acc)
