"""Generalized differential forms of type N=1 and N=2.

A type N=1 p-form is a + a1 ξ with a g-valued of degree p and a1 h-valued of
degree p+1; ξ has degree -1 and dξ = k.  Type N=2 adds ξ¹, ξ² with h-valued
coefficients and an l-valued ξ¹ξ² coefficient.  The engine stores only the
coefficient tuples and applies closed-form product/derivative formulas.
``XiExpr`` is an independent oracle in the free ξ exterior algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from gmpy2 import mpq

from .algebra import PairingData
from .avforms import (
    AVForm,
    MissingPairing,
    SlotMismatch,
    av_add,
    av_alpha,
    av_beta,
    av_d,
    av_random,
    av_scale,
    av_wedge_action,
    av_wedge_bracket,
    av_wedge_peiffer,
    av_zero,
    pair_forms,
)
from .poly_forms import ScalarForm, sf_add, sf_d, sf_scale, sf_wedge, sf_zero, to_q

__all__ = [
    "ConstantMismatch",
    "g1_leibniz_residual",
    "g2_leibniz_residual",
    "GenForm1",
    "GenForm2",
    "gen1_random",
    "gen2_random",
    "gen1_zero",
    "gen2_zero",
    "g1_add",
    "g1_scale",
    "g1_wedge",
    "g1_d",
    "g1_bracket",
    "g1_pair",
    "g2_add",
    "g2_scale",
    "g2_wedge",
    "g2_d",
    "g2_bracket",
    "g2_pair",
    "gg_tensor",
    "project_gg",
    "gdc1_wedge",
    "gdc1_d",
    "gdc2_wedge",
    "gdc2_d",
    "XiExpr",
    "ScalarRules",
    "ModuleRules",
    "xi_from_gen1",
    "xi_from_gen2",
    "xi_oracle_eval",
]


class ConstantMismatch(ValueError):
    pass


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def _chk(f: AVForm, slot: str, deg: int, name: str) -> None:
    if f.slot != slot and not (slot == "g" and f.slot == "gg"):
        raise SlotMismatch(f"{name}: expected slot {slot}, got {f.slot}")
    if f.degree != deg and not f.is_zero():
        raise ValueError(f"{name}: expected degree {deg}, got {f.degree}")


def _fix(f: AVForm, deg: int) -> AVForm:
    return f if f.degree == deg else av_zero(f.slot, f.dim, f.n_vars, deg)


@dataclass(frozen=True)
class GenForm1:
    """a + a1 ξ with dξ = k."""

    p: int
    part0: AVForm
    part1: AVForm
    k: mpq = mpq(-1)

    def __post_init__(self):
        _chk(self.part0, "g", self.p, "part0")
        _chk(self.part1, "h", self.p + 1, "part1")
        object.__setattr__(self, "part0", _fix(self.part0, self.p))
        object.__setattr__(self, "part1", _fix(self.part1, self.p + 1))
        object.__setattr__(self, "k", to_q(self.k))

    def parts(self) -> Tuple[AVForm, ...]:
        return (self.part0, self.part1)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.parts())

    def __eq__(self, other) -> bool:
        return isinstance(other, GenForm1) and self.k == other.k and self.parts() == other.parts()

    def __add__(self, other):
        return g1_add(self, other)

    def __sub__(self, other):
        return g1_add(self, g1_scale(other, -1))


@dataclass(frozen=True)
class GenForm2:
    """a + a1 ξ¹ + a2 ξ² + a12 ξ¹ξ² with dξ^i = k^i."""

    p: int
    part0: AVForm
    part1: AVForm
    part2: AVForm
    part12: AVForm
    k: Tuple[mpq, mpq] = (mpq(0), mpq(-1))

    def __post_init__(self):
        _chk(self.part0, "g", self.p, "part0")
        _chk(self.part1, "h", self.p + 1, "part1")
        _chk(self.part2, "h", self.p + 1, "part2")
        _chk(self.part12, "l", self.p + 2, "part12")
        object.__setattr__(self, "part0", _fix(self.part0, self.p))
        object.__setattr__(self, "part1", _fix(self.part1, self.p + 1))
        object.__setattr__(self, "part2", _fix(self.part2, self.p + 1))
        object.__setattr__(self, "part12", _fix(self.part12, self.p + 2))
        object.__setattr__(self, "k", (to_q(self.k[0]), to_q(self.k[1])))

    def parts(self) -> Tuple[AVForm, ...]:
        return (self.part0, self.part1, self.part2, self.part12)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.parts())

    def __eq__(self, other) -> bool:
        return isinstance(other, GenForm2) and self.k == other.k and self.parts() == other.parts()

    def __add__(self, other):
        return g2_add(self, other)

    def __sub__(self, other):
        return g2_add(self, g2_scale(other, -1))


def gen1_zero(m, n_vars: int, p: int, k=-1) -> GenForm1:
    return GenForm1(p, av_zero("g", m.g.dim, n_vars, p), av_zero("h", m.h.dim, n_vars, p + 1), k)


def gen2_zero(m, n_vars: int, p: int, k=(0, -1)) -> GenForm2:
    return GenForm2(p, av_zero("g", m.g.dim, n_vars, p), av_zero("h", m.h.dim, n_vars, p + 1),
                    av_zero("h", m.h.dim, n_vars, p + 1), av_zero("l", m.l.dim, n_vars, p + 2), k)


def gen1_random(seed, m, n_vars: int, p: int, k=-1, **kw) -> GenForm1:
    return GenForm1(p, av_random(f"{seed}/0", "g", m.g.dim, n_vars, p, **kw),
                    av_random(f"{seed}/1", "h", m.h.dim, n_vars, p + 1, **kw), k)


def gen2_random(seed, m, n_vars: int, p: int, k=(0, -1), **kw) -> GenForm2:
    return GenForm2(p, av_random(f"{seed}/0", "g", m.g.dim, n_vars, p, **kw),
                    av_random(f"{seed}/1", "h", m.h.dim, n_vars, p + 1, **kw),
                    av_random(f"{seed}/2", "h", m.h.dim, n_vars, p + 1, **kw),
                    av_random(f"{seed}/12", "l", m.l.dim, n_vars, p + 2, **kw), k)


def _same_k(A, B) -> None:
    if A.k != B.k:
        raise ConstantMismatch(f"constants {A.k} vs {B.k}")


def g1_add(A: GenForm1, B: GenForm1) -> GenForm1:
    _same_k(A, B)
    if A.p != B.p:
        raise ValueError("degree mismatch")
    return GenForm1(A.p, av_add(A.part0, B.part0), av_add(A.part1, B.part1), A.k)


def g1_scale(A: GenForm1, s) -> GenForm1:
    return GenForm1(A.p, av_scale(A.part0, s), av_scale(A.part1, s), A.k)


def g2_add(A: GenForm2, B: GenForm2) -> GenForm2:
    _same_k(A, B)
    if A.p != B.p:
        raise ValueError("degree mismatch")
    return GenForm2(A.p, *(av_add(x, y) for x, y in zip(A.parts(), B.parts())), A.k)


def g2_scale(A: GenForm2, s) -> GenForm2:
    return GenForm2(A.p, *(av_scale(x, s) for x in A.parts()), A.k)


# --- raw g x g products -----------------------------------------------------

def gg_tensor(A: AVForm, B: AVForm) -> AVForm:
    """Raw product A ∧ B in the tensor slot: component a*dim+b is A^a ∧ B^b."""
    if A.slot != "g" or B.slot != "g":
        raise SlotMismatch("gg_tensor expects g-valued forms")
    deg = A.degree + B.degree
    comps = [sf_wedge(x, y) for x in A.comps for y in B.comps]
    return AVForm("gg", comps, A.n_vars, deg)


def project_gg(m, T: AVForm) -> AVForm:
    """Send an antisymmetric tensor-slot form T to sum_{a<b} T_ab [X_a, X_b]."""
    if T.slot != "gg":
        raise SlotMismatch("project_gg expects a gg form")
    d = m.g.dim
    f = m.g.struct_const
    comps = [sf_zero(T.n_vars, T.degree)] * d
    for a in range(d):
        for b in range(a + 1, d):
            t = T.comps[a * d + b]
            if t.is_zero():
                continue
            for c in range(d):
                if f[a][b][c]:
                    comps[c] = sf_add(comps[c], sf_scale(t, f[a][b][c]))
    return AVForm("g", comps, T.n_vars, T.degree)


# --- N = 1 ------------------------------------------------------------------

def g1_wedge(m, A: GenForm1, B: GenForm1) -> GenForm1:
    """Generalized product: a∧b (tensor slot) + a∧▷b1 ξ."""
    _same_k(A, B)
    return GenForm1(A.p + B.p, gg_tensor(A.part0, B.part0), av_wedge_action(m, A.part0, B.part1), A.k)


def g1_d(m, A: GenForm1) -> GenForm1:
    p = A.p
    s = _sgn(p + 1) * A.k
    part0 = av_add(av_d(A.part0), av_scale(av_alpha(m, A.part1), s))
    return GenForm1(p + 1, part0, av_d(A.part1), A.k)


def g1_bracket(m, A: GenForm1, B: GenForm1) -> GenForm1:
    _same_k(A, B)
    p, q = A.p, B.p
    e = _sgn(p * q)
    part1 = av_add(av_wedge_action(m, A.part0, B.part1), av_scale(av_wedge_action(m, B.part0, A.part1), -e))
    return GenForm1(p + q, av_wedge_bracket(m, A.part0, B.part0), part1, A.k)


def _pm(pairing, kind):
    M = getattr(pairing, f"pair_{kind}") if isinstance(pairing, PairingData) else None
    if M is None:
        raise MissingPairing(f"pairing {kind} not supplied")
    return M


def g1_pair(A: GenForm1, B: GenForm1, pairing) -> ScalarForm:
    """<a, b1>_gh + <b, a1>_gh."""
    M = _pm(pairing, "gh")
    return sf_add(pair_forms("gh", A.part0, B.part1, M), pair_forms("gh", B.part0, A.part1, M))


# --- N = 2 ------------------------------------------------------------------

def g2_wedge(m, A: GenForm2, B: GenForm2) -> GenForm2:
    """a∧b + a∧▷b_i ξ^i + (a∧▷b12 + (-1)^(q+1) a1∧{,}b2) ξ¹²."""
    _same_k(A, B)
    q = B.p
    p12 = av_add(av_wedge_action(m, A.part0, B.part12), av_scale(av_wedge_peiffer(m, A.part1, B.part2), _sgn(q + 1)))
    return GenForm2(A.p + q, gg_tensor(A.part0, B.part0), av_wedge_action(m, A.part0, B.part1),
                    av_wedge_action(m, A.part0, B.part2), p12, A.k)


def g2_d(m, A: GenForm2) -> GenForm2:
    p = A.p
    k1, k2 = A.k
    part0 = av_add(av_d(A.part0), av_add(av_scale(av_alpha(m, A.part1), _sgn(p + 1) * k1),
                                          av_scale(av_alpha(m, A.part2), _sgn(p + 1) * k2)))
    bc = av_beta(m, A.part12)
    part1 = av_add(av_d(A.part1), av_scale(bc, _sgn(p + 1) * k2))
    part2 = av_add(av_d(A.part2), av_scale(bc, _sgn(p + 2) * k1))
    return GenForm2(p + 1, part0, part1, part2, av_d(A.part12), A.k)


def g2_bracket(m, A: GenForm2, B: GenForm2) -> GenForm2:
    _same_k(A, B)
    p, q = A.p, B.p
    e = _sgn(p * q)
    act = av_wedge_action

    def xi(i):
        return av_add(act(m, A.part0, B.parts()[i]), av_scale(act(m, B.part0, A.parts()[i]), -e))

    p12 = av_add(act(m, A.part0, B.part12), av_scale(act(m, B.part0, A.part12), -e))
    p12 = av_add(p12, av_scale(av_wedge_peiffer(m, A.part1, B.part2), _sgn(q + 1)))
    p12 = av_add(p12, av_scale(av_wedge_peiffer(m, B.part1, A.part2), -_sgn(p * q + p + 1)))
    return GenForm2(p + q, av_wedge_bracket(m, A.part0, B.part0), xi(1), xi(2), p12, A.k)


def g2_pair(A: GenForm2, B: GenForm2, pairing) -> ScalarForm:
    """<a, b12>_gl + <b, a12>_gl - k¹<a1, b2>_h - k²<a2, b1>_h."""
    _same_k(A, B)
    G, H = _pm(pairing, "gl"), _pm(pairing, "h")
    k1, k2 = A.k
    out = sf_add(pair_forms("gl", A.part0, B.part12, G), pair_forms("gl", B.part0, A.part12, G))
    out = sf_add(out, sf_scale(pair_forms("h", A.part1, B.part2, H), -k1))
    return sf_add(out, sf_scale(pair_forms("h", A.part2, B.part1, H), -k2))


# --- scalar-coefficient formulas ----------------------------------------------

def gdc1_wedge(a: Sequence[ScalarForm], b: Sequence[ScalarForm]) -> Tuple[ScalarForm, ScalarForm]:
    """(a + a1 ξ)(b + b1 ξ) for scalar coefficients."""
    q = b[0].degree
    return sf_wedge(a[0], b[0]), sf_add(sf_wedge(a[0], b[1]), sf_scale(sf_wedge(a[1], b[0]), _sgn(q)))


def gdc1_d(a: Sequence[ScalarForm], k) -> Tuple[ScalarForm, ScalarForm]:
    p = a[0].degree
    return sf_add(sf_d(a[0]), sf_scale(a[1], _sgn(p + 1) * to_q(k))), sf_d(a[1])


def gdc2_wedge(a: Sequence[ScalarForm], b: Sequence[ScalarForm]) -> Tuple[ScalarForm, ...]:
    """Coefficients (1, ξ¹, ξ², ξ¹ξ²) of a product of scalar type N=2 forms."""
    q = b[0].degree
    w, s = sf_wedge, _sgn(q)
    c1 = sf_add(w(a[0], b[1]), sf_scale(w(a[1], b[0]), s))
    c2 = sf_add(w(a[0], b[2]), sf_scale(w(a[2], b[0]), s))
    mixed = sf_add(w(a[1], b[2]), sf_scale(w(a[2], b[1]), -1))
    c12 = sf_add(sf_add(w(a[0], b[3]), sf_scale(mixed, -s)), w(a[3], b[0]))
    return w(a[0], b[0]), c1, c2, c12


def gdc2_d(a: Sequence[ScalarForm], k: Sequence) -> Tuple[ScalarForm, ...]:
    p = a[0].degree
    k1, k2 = to_q(k[0]), to_q(k[1])
    s = _sgn(p + 1)
    c0 = sf_add(sf_d(a[0]), sf_add(sf_scale(a[1], s * k1), sf_scale(a[2], s * k2)))
    c1 = sf_add(sf_d(a[1]), sf_scale(a[3], s * k2))
    c2 = sf_add(sf_d(a[2]), sf_scale(a[3], -s * k1))
    return c0, c1, c2, sf_d(a[3])


# --- free ξ oracle ------------------------------------------------------------

XiKey = Tuple[int, ...]


class ScalarRules:
    """Coefficient rules for scalar forms."""

    def mul(self, c1, I: XiKey, c2, J: XiKey):
        return sf_wedge(c1, c2)

    def demote(self, c):
        return c

    def d(self, c):
        return sf_d(c)

    def add(self, c1, c2):
        return sf_add(c1, c2)

    def scale(self, c, s):
        return sf_scale(c, s)

    def is_zero(self, c) -> bool:
        return c.is_zero()

    def degree(self, c) -> int:
        return c.degree


class ModuleRules:
    """Algebra-valued coefficient rules.

    Products: g·g -> tensor slot, g·h and g·l -> action, h(ξ¹)·h(ξ²) -> lifting;
    every other ordering has no meaning in the module and gives 0.
    Killing a ξ with dξ = k demotes h -> g via alpha and l -> h via beta.
    """

    def __init__(self, m):
        self.m = m

    def mul(self, c1: AVForm, I: XiKey, c2: AVForm, J: XiKey):
        if c1.slot == "g" and c2.slot == "g":
            return gg_tensor(c1, c2)
        if c1.slot == "g" and c2.slot in ("h", "l"):
            return av_wedge_action(self.m, c1, c2)
        if c1.slot == "h" and c2.slot == "h" and I == (1,) and J == (2,):
            return av_wedge_peiffer(self.m, c1, c2)
        return None

    def demote(self, c: AVForm):
        if c.slot == "h":
            return av_alpha(self.m, c)
        if c.slot == "l":
            return av_beta(self.m, c)
        raise SlotMismatch(f"cannot lower slot {c.slot}")

    def d(self, c):
        return av_d(c)

    def add(self, c1, c2):
        return av_add(c1, c2)

    def scale(self, c, s):
        return av_scale(c, s)

    def is_zero(self, c) -> bool:
        return c.is_zero()

    def degree(self, c) -> int:
        return c.degree


def _sort_sign(seq: Sequence[int]) -> Tuple[int, Optional[XiKey]]:
    if len(set(seq)) != len(seq):
        return 0, None
    s = 1
    lst = list(seq)
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                s = -s
    return s, tuple(lst)


class XiExpr:
    """Formal sum of coefficient · ξ^I in the free exterior algebra on ξ¹..ξ^N.

    Coefficients sit to the left of the ξ monomial; ξ has degree -1.
    """

    def __init__(self, rules, N: int, k: Sequence, terms: Optional[Dict[XiKey, object]] = None):
        if not 1 <= N <= 4:
            raise ValueError("oracle supports 1 <= N <= 4")
        self.rules = rules
        self.N = N
        self.k = tuple(to_q(x) for x in k)
        if len(self.k) != N:
            raise ValueError("need one constant per generator")
        self.terms: Dict[XiKey, object] = {}
        for key, c in (terms or {}).items():
            s, key2 = _sort_sign(key)
            if s and not rules.is_zero(c):
                self._acc(key2, rules.scale(c, s) if s < 0 else c)

    def _acc(self, key: XiKey, c) -> None:
        cur = self.terms.get(key)
        self.terms[key] = c if cur is None else self.rules.add(cur, c)

    def _new(self) -> "XiExpr":
        return XiExpr(self.rules, self.N, self.k)

    def coeff(self, key: XiKey, zero=None):
        return self.terms.get(tuple(key), zero)

    def __add__(self, other: "XiExpr") -> "XiExpr":
        out = self._new()
        for src in (self, other):
            for key, c in src.terms.items():
                out._acc(key, c)
        return out

    def scale(self, s) -> "XiExpr":
        out = self._new()
        for key, c in self.terms.items():
            out._acc(key, self.rules.scale(c, s))
        return out

    def __neg__(self) -> "XiExpr":
        return self.scale(-1)

    def __sub__(self, other: "XiExpr") -> "XiExpr":
        return self + (-other)

    def wedge(self, other: "XiExpr") -> "XiExpr":
        r = self.rules
        out = self._new()
        for I, c1 in self.terms.items():
            for J, c2 in other.terms.items():
                s, key = _sort_sign(I + J)
                if not s:
                    continue
                # move ξ^I right past the coefficient c2
                s *= _sgn(len(I) * r.degree(c2))
                prod = r.mul(c1, I, c2, J)
                if prod is None:
                    continue
                out._acc(key, r.scale(prod, s))
        return out

    def d(self) -> "XiExpr":
        r = self.rules
        out = self._new()
        for I, c in self.terms.items():
            out._acc(I, r.d(c))
            base = _sgn(r.degree(c))
            for j, i in enumerate(I):
                kk = self.k[i - 1]
                if not kk:
                    continue
                rest = I[:j] + I[j + 1:]
                out._acc(rest, r.scale(r.demote(c), base * _sgn(j) * kk))
        return out

    def is_zero(self) -> bool:
        return all(self.rules.is_zero(c) for c in self.terms.values())


def xi_from_gen1(A: GenForm1, rules) -> XiExpr:
    return XiExpr(rules, 1, (A.k,), {(): A.part0, (1,): A.part1})


def xi_from_gen2(A: GenForm2, rules) -> XiExpr:
    return XiExpr(rules, 2, A.k, {(): A.part0, (1,): A.part1, (2,): A.part2, (1, 2): A.part12})


def xi_oracle_eval(tree) -> XiExpr:
    """Evaluate a nested expression tree over XiExpr leaves.

    Nodes: ``("wedge", x, y)``, ``("d", x)``, ``("add", x, y)``,
    ``("sub", x, y)``, ``("scale", s, x)``.
    """
    if isinstance(tree, XiExpr):
        return tree
    op = tree[0]
    if op == "wedge":
        return xi_oracle_eval(tree[1]).wedge(xi_oracle_eval(tree[2]))
    if op == "d":
        return xi_oracle_eval(tree[1]).d()
    if op == "add":
        return xi_oracle_eval(tree[1]) + xi_oracle_eval(tree[2])
    if op == "sub":
        return xi_oracle_eval(tree[1]) - xi_oracle_eval(tree[2])
    if op == "scale":
        return xi_oracle_eval(tree[2]).scale(to_q(tree[1]))
    raise ValueError(f"unknown oracle node {op!r}")


def g1_leibniz_residual(m, A: GenForm1, B: GenForm1) -> GenForm1:
    """d[A,B] - [dA,B] - (-1)^p [A,dB]."""
    rhs = g1_bracket(m, g1_d(m, A), B) + g1_scale(g1_bracket(m, A, g1_d(m, B)), _sgn(A.p))
    return g1_d(m, g1_bracket(m, A, B)) - rhs


def g2_leibniz_residual(m, A: GenForm2, B: GenForm2) -> GenForm2:
    """d[A,B] - [dA,B] - (-1)^p [A,dB]."""
    rhs = g2_bracket(m, g2_d(m, A), B) + g2_scale(g2_bracket(m, A, g2_d(m, B)), _sgn(A.p))
    return g2_d(m, g2_bracket(m, A, B)) - rhs
