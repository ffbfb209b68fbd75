"""Higher connections, curvatures, Bianchi residuals and gauge transformations.

Group elements are exponentials g = exp(X) of polynomial-valued generators X
whose adjoint and action operators are nilpotent, so every operator below is
a finite sum with polynomial entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .algebra import D2CModule
from .avforms import (
    AVForm,
    av_add,
    av_alpha,
    av_beta,
    av_d,
    av_half_bracket,
    av_random,
    av_scale,
    av_sub,
    av_wedge_action,
    av_wedge_action_prime,
    av_wedge_bracket,
    av_wedge_peiffer,
    av_zero,
)
from .generalized import GenForm1, GenForm2, g1_bracket, g1_d, g1_scale, g2_bracket, g2_d, g2_scale
from .poly_forms import ScalarForm, _finish, _wedge_into, sf_add, sf_const, sf_random, sf_scale, sf_wedge, sf_zero

__all__ = [
    "NotNilpotent",
    "Conn2",
    "Conn3",
    "Curv2",
    "Curv3",
    "GroupElem",
    "GaugeParams",
    "conn2_random",
    "conn3_random",
    "conn2_zero",
    "conn3_zero",
    "random_generator",
    "group_exp",
    "group_identity",
    "params_random",
    "curvature2",
    "curvature3",
    "bianchi2_residual",
    "bianchi3_residual",
    "gauge2",
    "gauge3",
    "gauge2_first_kind",
    "gauge2_second_kind",
    "gauge3_first_kind",
    "gauge3_second_kind",
    "gauge3_third_kind",
    "curvature_transform_check2",
    "curvature_transform_check3",
    "gconn1",
    "gconn2",
    "gcurv1",
    "gcurv2",
    "gcurv_check1",
    "gcurv_check2",
    "gbianchi_residual",
    "apply_matrix",
]


class NotNilpotent(ValueError):
    pass


@dataclass(frozen=True)
class Conn2:
    A: AVForm
    B: AVForm

    def __post_init__(self):
        if self.A.slot != "g" or self.A.degree != 1 or self.B.slot != "h" or self.B.degree != 2:
            raise ValueError("Conn2 needs a g-valued 1-form and an h-valued 2-form")
        if self.A.n_vars != self.B.n_vars:
            raise ValueError("n_vars mismatch")

    @property
    def n_vars(self) -> int:
        return self.A.n_vars


@dataclass(frozen=True)
class Conn3:
    A: AVForm
    B: AVForm
    C: AVForm

    def __post_init__(self):
        if self.A.slot != "g" or self.A.degree != 1 or self.B.slot != "h" or self.B.degree != 2:
            raise ValueError("Conn3 needs a g-valued 1-form and an h-valued 2-form")
        if self.C.slot != "l" or self.C.degree != 3:
            raise ValueError("Conn3 needs an l-valued 3-form")
        if not self.A.n_vars == self.B.n_vars == self.C.n_vars:
            raise ValueError("n_vars mismatch")

    @property
    def n_vars(self) -> int:
        return self.A.n_vars

    def as_conn2(self) -> Conn2:
        return Conn2(self.A, self.B)


@dataclass(frozen=True)
class Curv2:
    O1: AVForm
    O2: AVForm


@dataclass(frozen=True)
class Curv3:
    O1: AVForm
    O2: AVForm
    O3: AVForm


def conn2_zero(m, n_vars: int) -> Conn2:
    return Conn2(av_zero("g", m.g.dim, n_vars, 1), av_zero("h", m.h.dim, n_vars, 2))


def conn3_zero(m, n_vars: int) -> Conn3:
    return Conn3(av_zero("g", m.g.dim, n_vars, 1), av_zero("h", m.h.dim, n_vars, 2), av_zero("l", m.l.dim, n_vars, 3))


def conn2_random(seed, m, n_vars: int, **kw) -> Conn2:
    return Conn2(av_random(f"{seed}/A", "g", m.g.dim, n_vars, 1, **kw),
                 av_random(f"{seed}/B", "h", m.h.dim, n_vars, 2, **kw))


def conn3_random(seed, m, n_vars: int, **kw) -> Conn3:
    return Conn3(av_random(f"{seed}/A", "g", m.g.dim, n_vars, 1, **kw),
                 av_random(f"{seed}/B", "h", m.h.dim, n_vars, 2, **kw),
                 av_random(f"{seed}/C", "l", m.l.dim, n_vars, 3, **kw))


# --- curvature and Bianchi --------------------------------------------------

def _omega1(m, A: AVForm, B: AVForm) -> AVForm:
    return av_sub(av_add(av_d(A), av_half_bracket(m, A)), av_alpha(m, B))


def curvature2(m, c: Conn2) -> Curv2:
    """Ω1 = dA + A∧A - α(B), Ω2 = dB + A∧▷B."""
    return Curv2(_omega1(m, c.A, c.B), av_add(av_d(c.B), av_wedge_action(m, c.A, c.B)))


def curvature3(m, c: Conn3) -> Curv3:
    O1 = _omega1(m, c.A, c.B)
    O2 = av_sub(av_add(av_d(c.B), av_wedge_action(m, c.A, c.B)), av_beta(m, c.C))
    O3 = av_add(av_add(av_d(c.C), av_wedge_action(m, c.A, c.C)), av_wedge_peiffer(m, c.B, c.B))
    return Curv3(O1, O2, O3)


def bianchi2_residual(m, c: Conn2, curv: Optional[Curv2] = None) -> Tuple[AVForm, AVForm]:
    k = curv or curvature2(m, c)
    r1 = av_add(av_add(av_d(k.O1), av_wedge_bracket(m, c.A, k.O1)), av_alpha(m, k.O2))
    r2 = av_sub(av_add(av_d(k.O2), av_wedge_action(m, c.A, k.O2)), av_wedge_action(m, k.O1, c.B))
    return r1, r2


def bianchi3_residual(m, c: Conn3, curv: Optional[Curv3] = None) -> Tuple[AVForm, AVForm, AVForm]:
    k = curv or curvature3(m, c)
    r1 = av_add(av_add(av_d(k.O1), av_wedge_bracket(m, c.A, k.O1)), av_alpha(m, k.O2))
    r2 = av_sub(av_add(av_d(k.O2), av_wedge_action(m, c.A, k.O2)), av_wedge_action(m, k.O1, c.B))
    r2 = av_add(r2, av_beta(m, k.O3))
    r3 = av_sub(av_add(av_d(k.O3), av_wedge_action(m, c.A, k.O3)), av_wedge_action(m, k.O1, c.C))
    r3 = av_sub(r3, av_add(av_wedge_peiffer(m, c.B, k.O2), av_wedge_peiffer(m, k.O2, c.B)))
    return r1, r2, r3


# --- polynomial matrices ----------------------------------------------------

PMat = List[List[ScalarForm]]


def _pm_identity(d: int, n: int) -> PMat:
    return [[sf_const(n, 1) if i == j else sf_zero(n, 0) for j in range(d)] for i in range(d)]


def _pm_mul(a: PMat, b: PMat, n: int) -> PMat:
    d_in = len(b)
    out = []
    for row in a:
        new = []
        for j in range(len(b[0]) if b else 0):
            acc: Dict = {}
            for k in range(d_in):
                if row[k]._c and b[k][j]._c:
                    _wedge_into(acc, row[k], b[k][j], mpq(1))
            new.append(_finish(n, 0, acc))
        out.append(new)
    return out


def _pm_add(a: PMat, b: PMat, s=1) -> PMat:
    return [[sf_add(x, sf_scale(y, s)) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _pm_scale(a: PMat, s) -> PMat:
    return [[sf_scale(x, s) for x in r] for r in a]


def _pm_zero(a: PMat) -> bool:
    return all(x.is_zero() for r in a for x in r)


def _pm_const(mat, n: int) -> PMat:
    return [[sf_const(n, x) for x in r] for r in mat]


def _op_matrix(t, X: AVForm, d: int) -> PMat:
    """(X ▷)_{c,b} = sum_a X^a t[a][b][c] for a polynomial-valued generator X."""
    n = X.n_vars
    out = [[sf_zero(n, 0) for _ in range(d)] for _ in range(d)]
    for a, xa in enumerate(X.comps):
        if xa.is_zero():
            continue
        for b in range(d):
            for c in range(d):
                v = t[a][b][c]
                if v:
                    out[c][b] = sf_add(out[c][b], sf_scale(xa, v))
    return out


def _pm_exp(M: PMat, n: int, sign: int, name: str) -> PMat:
    d = len(M)
    out = _pm_identity(d, n)
    term = _pm_identity(d, n)
    for k in range(1, d + 2):
        term = _pm_scale(_pm_mul(term, M, n), mpq(sign, k))
        if _pm_zero(term):
            return out
        out = _pm_add(out, term)
    raise NotNilpotent(f"{name} operator is not nilpotent")


def apply_matrix(M: PMat, A: AVForm, slot: Optional[str] = None) -> AVForm:
    """(M A)^c = sum_b M[c][b] A^b with 0-form matrix entries."""
    n, deg = A.n_vars, A.degree
    comps = []
    for row in M:
        acc: Dict = {}
        for x, a in zip(row, A.comps):
            if x._c and a._c:
                _wedge_into(acc, x, a, mpq(1))
        comps.append(_finish(n, deg, acc))
    return AVForm(slot or A.slot, comps, n, deg)


def _pm_eq(a: PMat, b: PMat) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


@dataclass
class GroupElem:
    """g = exp(X) with cached finite-sum operators."""

    X: AVForm
    Ad: PMat
    Ad_inv: PMat
    act_h: PMat
    act_h_inv: PMat
    act_l: Optional[PMat]
    act_l_inv: Optional[PMat]
    mc: AVForm  # g^{-1} dg

    def inv_on(self, A: AVForm) -> AVForm:
        """g^{-1} A g on g, g^{-1} ▷ on h and l."""
        if A.slot == "g":
            return apply_matrix(self.Ad_inv, A)
        if A.slot == "h":
            return apply_matrix(self.act_h_inv, A)
        if A.slot == "l" and self.act_l_inv is not None:
            return apply_matrix(self.act_l_inv, A)
        raise ValueError(f"cannot act on slot {A.slot}")


def group_exp(m, X: AVForm, verify: bool = True) -> GroupElem:
    """Exponentiate a 0-form generator X with nilpotent ad and actions."""
    if X.slot != "g" or X.degree != 0:
        raise ValueError("generator must be a g-valued 0-form")
    n = X.n_vars
    adX = _op_matrix(m.g.struct_const, X, m.g.dim)
    hX = _op_matrix(m.act_gh, X, m.h.dim)
    Ad, Ad_inv = _pm_exp(adX, n, 1, "ad"), _pm_exp(adX, n, -1, "ad")
    Gh, Gh_inv = _pm_exp(hX, n, 1, "h action"), _pm_exp(hX, n, -1, "h action")
    Gl = Gl_inv = None
    if isinstance(m, D2CModule):
        lX = _op_matrix(m.act_gl, X, m.l.dim)
        Gl, Gl_inv = _pm_exp(lX, n, 1, "l action"), _pm_exp(lX, n, -1, "l action")
    # g^{-1} dg = sum_k (-1)^k / (k+1)! ad_X^k dX
    dX = av_d(X)
    mc = dX
    term = dX
    for k in range(1, m.g.dim + 2):
        term = apply_matrix(adX, term)
        if term.is_zero():
            break
        mc = av_add(mc, av_scale(term, mpq((-1) ** k, factorial(k + 1))))
    g = GroupElem(X, Ad, Ad_inv, Gh, Gh_inv, Gl, Gl_inv, mc)
    if verify:
        _verify_group(m, g)
    return g


def _verify_group(m, g: GroupElem) -> None:
    n = g.X.n_vars
    for M, Mi, name in ((g.Ad, g.Ad_inv, "Ad"), (g.act_h, g.act_h_inv, "h action"), (g.act_l, g.act_l_inv, "l action")):
        if M is not None and not _pm_eq(_pm_mul(M, Mi, n), _pm_identity(len(M), n)):
            raise NotNilpotent(f"{name}: g g^-1 != 1")
    # alpha(g ▷ Y) = Ad_g alpha(Y)
    al = _pm_const(m.alpha, n)
    if not _pm_eq(_pm_mul(al, g.act_h, n), _pm_mul(g.Ad, al, n)):
        raise ValueError("mixed relation alpha(g▷Y) = Ad_g alpha(Y) fails")
    if isinstance(m, D2CModule):
        be = _pm_const(m.beta, n)
        if not _pm_eq(_pm_mul(be, g.act_l, n), _pm_mul(g.act_h, be, n)):
            raise ValueError("beta(g▷Z) = g▷beta(Z) fails")
        # g ▷ {Y_i, Y_j} = {g ▷ Y_i, g ▷ Y_j}
        dh, dl = m.h.dim, m.l.dim
        for i in range(dh):
            for j in range(dh):
                lhs = [sf_zero(n, 0)] * dl
                for c in range(dl):
                    for e in range(dl):
                        if m.peiffer[i][j][e]:
                            lhs[c] = sf_add(lhs[c], sf_scale(g.act_l[c][e], m.peiffer[i][j][e]))
                rhs = [sf_zero(n, 0)] * dl
                for a in range(dh):
                    for b in range(dh):
                        w = sf_wedge(g.act_h[a][i], g.act_h[b][j])
                        if w.is_zero():
                            continue
                        for c in range(dl):
                            if m.peiffer[a][b][c]:
                                rhs[c] = sf_add(rhs[c], sf_scale(w, m.peiffer[a][b][c]))
                if any(x != y for x, y in zip(lhs, rhs)):
                    raise ValueError("g▷{Y1,Y2} = {g▷Y1, g▷Y2} fails")


def group_identity(m, n_vars: int) -> GroupElem:
    return group_exp(m, av_zero("g", m.g.dim, n_vars, 0), verify=False)


def random_generator(seed, m, n_vars: int, nil_gens: Sequence[int], max_poly_degree: int = 1,
                     coeff_bound: int = 2) -> AVForm:
    """Polynomial generator supported on the given nilpotent basis directions."""
    comps = []
    for a in range(m.g.dim):
        if a in nil_gens:
            comps.append(sf_random(f"{seed}/X{a}", n_vars, 0, max_poly_degree=max_poly_degree,
                                   coeff_bound=coeff_bound, max_terms=2))
        else:
            comps.append(sf_zero(n_vars, 0))
    return AVForm("g", comps, n_vars, 0)


@dataclass
class GaugeParams:
    g: Optional[GroupElem] = None
    phi: Optional[AVForm] = None
    psi: Optional[AVForm] = None


def params_random(seed, m, n_vars: int, nil_gens: Sequence[int], level: int = 2, **kw) -> GaugeParams:
    X = random_generator(seed, m, n_vars, nil_gens)
    g = group_exp(m, X)
    phi = av_random(f"{seed}/phi", "h", m.h.dim, n_vars, 1, **kw)
    psi = av_random(f"{seed}/psi", "l", m.l.dim, n_vars, 2, **kw) if level == 3 else None
    return GaugeParams(g, phi, psi)


def _resolve(m, p: GaugeParams, n: int, level: int):
    g = p.g or group_identity(m, n)
    phi = p.phi if p.phi is not None else av_zero("h", m.h.dim, n, 1)
    psi = None
    if level == 3:
        psi = p.psi if p.psi is not None else av_zero("l", m.l.dim, n, 2)
    return g, phi, psi


# --- transformations --------------------------------------------------------

def _half_sq(m, phi: AVForm) -> AVForm:
    # φ∧φ = 1/2 φ∧[,]φ
    return av_half_bracket(m, phi)


def gauge2_first_kind(m, g: GroupElem, c: Conn2) -> Conn2:
    return Conn2(av_add(g.inv_on(c.A), g.mc), g.inv_on(c.B))


def gauge2_second_kind(m, phi: AVForm, c: Conn2) -> Conn2:
    A2 = av_add(c.A, av_alpha(m, phi))
    B2 = av_sub(av_add(av_add(c.B, av_d(phi)), av_wedge_action(m, A2, phi)), _half_sq(m, phi))
    return Conn2(A2, B2)


def gauge2(m, p: GaugeParams, c: Conn2) -> Conn2:
    """General 2-gauge transformation (first kind by g, then second kind by φ)."""
    g, phi, _ = _resolve(m, p, c.n_vars, 2)
    A2 = av_add(av_add(g.inv_on(c.A), g.mc), av_alpha(m, phi))
    B2 = av_add(av_add(g.inv_on(c.B), av_d(phi)), av_wedge_action(m, A2, phi))
    return Conn2(A2, av_sub(B2, _half_sq(m, phi)))


def gauge3_first_kind(m, g: GroupElem, c: Conn3) -> Conn3:
    return Conn3(av_add(g.inv_on(c.A), g.mc), g.inv_on(c.B), g.inv_on(c.C))


def gauge3_second_kind(m, phi: AVForm, c: Conn3) -> Conn3:
    A2 = av_add(c.A, av_alpha(m, phi))
    B2 = av_sub(av_add(av_add(c.B, av_d(phi)), av_wedge_action(m, A2, phi)), _half_sq(m, phi))
    C2 = av_sub(av_sub(c.C, av_wedge_peiffer(m, B2, phi)), av_wedge_peiffer(m, phi, c.B))
    return Conn3(A2, B2, C2)


def gauge3_third_kind(m, psi: AVForm, c: Conn3) -> Conn3:
    B2 = av_sub(c.B, av_beta(m, psi))
    C2 = av_sub(av_sub(c.C, av_d(psi)), av_wedge_action(m, c.A, psi))
    return Conn3(c.A, B2, C2)


def gauge3(m, p: GaugeParams, c: Conn3) -> Conn3:
    """General 3-gauge transformation, formulas as composed in closed form."""
    g, phi, psi = _resolve(m, p, c.n_vars, 3)
    gB = g.inv_on(c.B)
    A2 = av_add(av_add(g.inv_on(c.A), g.mc), av_alpha(m, phi))
    B2 = av_add(av_add(gB, av_d(phi)), av_wedge_action(m, A2, phi))
    B2 = av_sub(av_sub(B2, _half_sq(m, phi)), av_beta(m, psi))
    C2 = av_sub(g.inv_on(c.C), av_wedge_peiffer(m, B2, phi))
    C2 = av_add(C2, av_wedge_action_prime(m, phi, psi))
    C2 = av_sub(C2, av_wedge_peiffer(m, phi, gB))
    C2 = av_sub(av_sub(C2, av_d(psi)), av_wedge_action(m, A2, psi))
    return Conn3(A2, B2, C2)


def curvature_transform_check2(m, p: GaugeParams, c: Conn2) -> Tuple[AVForm, AVForm]:
    g, phi, _ = _resolve(m, p, c.n_vars, 2)
    k = curvature2(m, c)
    k2 = curvature2(m, gauge2(m, p, c))
    r1 = av_sub(k2.O1, g.inv_on(k.O1))
    r2 = av_sub(k2.O2, av_add(g.inv_on(k.O2), av_wedge_action(m, k2.O1, phi)))
    return r1, r2


def curvature_transform_check3(m, p: GaugeParams, c: Conn3) -> Tuple[AVForm, AVForm, AVForm]:
    g, phi, psi = _resolve(m, p, c.n_vars, 3)
    k = curvature3(m, c)
    k2 = curvature3(m, gauge3(m, p, c))
    r1 = av_sub(k2.O1, g.inv_on(k.O1))
    r2 = av_sub(k2.O2, av_add(g.inv_on(k.O2), av_wedge_action(m, k2.O1, phi)))
    gO2 = g.inv_on(k.O2)
    exp3 = av_sub(g.inv_on(k.O3), av_wedge_peiffer(m, k2.O2, phi))
    exp3 = av_add(exp3, av_wedge_peiffer(m, phi, gO2))
    exp3 = av_sub(exp3, av_wedge_action(m, k2.O1, psi))
    return r1, r2, av_sub(k2.O3, exp3)


# --- generalized connections ------------------------------------------------

def gconn1(m, c: Conn2, k=-1) -> GenForm1:
    """A + B ξ."""
    return GenForm1(1, c.A, c.B, k)


def gconn2(m, c: Conn3, k=(0, -1)) -> GenForm2:
    """A + B ξ¹ + B ξ² + C ξ¹ξ²."""
    return GenForm2(1, c.A, c.B, c.B, c.C, k)


def gcurv1(m, c: Conn2, k=-1) -> GenForm1:
    a = gconn1(m, c, k)
    return g1_d(m, a) + g1_scale(g1_bracket(m, a, a), mpq(1, 2))


def gcurv2(m, c: Conn3, k=(0, -1)) -> GenForm2:
    a = gconn2(m, c, k)
    return g2_d(m, a) + g2_scale(g2_bracket(m, a, a), mpq(1, 2))


def gcurv_check1(m, c: Conn2, k=-1) -> Tuple[AVForm, AVForm]:
    """Residual of the generalized curvature against Ω1 + Ω2 ξ."""
    F = gcurv1(m, c, k)
    K = curvature2(m, c)
    return av_sub(F.part0, K.O1), av_sub(F.part1, K.O2)


def gcurv_check2(m, c: Conn3, k=(0, -1)) -> Tuple[AVForm, AVForm, AVForm, AVForm]:
    """Residual against Ω1 + Ω2 ξ¹ + (Ω2 + β(C)) ξ² + Ω3 ξ¹ξ²."""
    F = gcurv2(m, c, k)
    K = curvature3(m, c)
    return (av_sub(F.part0, K.O1), av_sub(F.part1, K.O2),
            av_sub(F.part2, av_add(K.O2, av_beta(m, c.C))), av_sub(F.part12, K.O3))


def gbianchi_residual(m, level: int, c) -> Tuple[AVForm, ...]:
    """Coefficients of d𝔉 + 𝒜∧[,]𝔉 (N=1 for level 2, N=2 for level 3)."""
    if level == 1 or level == 2 and not isinstance(c, Conn3):
        a = gconn1(m, c)
        F = gcurv1(m, c)
        return (g1_d(m, F) + g1_bracket(m, a, F)).parts()
    a = gconn2(m, c)
    F = gcurv2(m, c)
    return (g2_d(m, F) + g2_bracket(m, a, F)).parts()
