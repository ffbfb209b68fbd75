"""Chern-Simons type Lagrangians, second Chern forms and Chern-Weil transgressions.

Three levels: ordinary (g-valued A with pair_g), 2-form (A, B with pair_gh)
and 3-form (A, B, C with pair_gl and pair_h).  Interpolations A^t = A0 + t·η
are carried as polynomials in t and integrated exactly over [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .avforms import (
    AVForm,
    av_add,
    av_alpha,
    av_beta,
    av_d,
    av_scale,
    av_sub,
    av_wedge_action,
    av_wedge_bracket,
    av_wedge_peiffer,
    pair_forms,
)
from .gauge import (
    Conn2,
    Conn3,
    Curv2,
    Curv3,
    GaugeParams,
    curvature2,
    curvature3,
    gauge2,
    gauge3,
    gconn1,
    gconn2,
)
from .generalized import g1_bracket, g1_d, g1_pair, g1_scale, g2_bracket, g2_d, g2_pair, g2_scale
from .poly_forms import DegreeMismatch, ScalarForm, sf_add, sf_d, sf_integrate_cube, sf_scale, sf_sub, to_q

__all__ = [
    "TPoly",
    "ActionConfig",
    "LagrangianBuilds",
    "curvature1",
    "cs_form",
    "second_chern",
    "dP_check",
    "chern_weil1",
    "lagr_cs",
    "lagr_2cs",
    "lagr_3cs",
    "q_2cs",
    "q_3cs",
    "eom_2cs",
    "eom_3cs",
    "eom_variation_residual",
    "second_chern2",
    "second_chern3",
    "gauge_invariance_check2",
    "gauge_invariance_check3",
    "dP_check2",
    "dP_check3",
    "transgression1",
    "transgression2",
    "transgression3",
    "transgression_weighted1",
    "transgression_weighted2",
    "transgression_weighted3",
    "chern_weil2",
    "chern_weil3",
    "pin_normalization",
    "variation_triviality_check",
    "action_value",
]


# --- polynomials in t ---------------------------------------------------------

class TPoly:
    """sum_k c_k t^k with AVForm or ScalarForm coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence):
        self.c = tuple(coeffs)

    @classmethod
    def line(cls, x0, eta) -> "TPoly":
        return cls((x0, eta))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __add__(self, other: "TPoly") -> "TPoly":
        n = max(len(self.c), len(other.c))
        out = []
        for k in range(n):
            if k < len(self.c) and k < len(other.c):
                out.append(self.c[k] + other.c[k])
            else:
                out.append(self.c[k] if k < len(self.c) else other.c[k])
        return TPoly(out)

    def __sub__(self, other: "TPoly") -> "TPoly":
        return self + other.scale(-1)

    def scale(self, s) -> "TPoly":
        s = to_q(s)
        return TPoly([x * s for x in self.c])

    def map(self, f: Callable) -> "TPoly":
        return TPoly([f(x) for x in self.c])

    def at(self, t):
        t = to_q(t)
        out = self.c[0]
        for k in range(1, len(self.c)):
            out = out + self.c[k] * (t ** k)
        return out

    def integrate01(self):
        """Exact integral over t in [0, 1]."""
        out = self.c[0]
        for k in range(1, len(self.c)):
            out = out + self.c[k] * mpq(1, k + 1)
        return out


def tp_bilinear(op: Callable, P: TPoly, Q: TPoly) -> TPoly:
    acc: List = [None] * (len(P.c) + len(Q.c) - 1)
    for i, x in enumerate(P.c):
        for j, y in enumerate(Q.c):
            v = op(x, y)
            acc[i + j] = v if acc[i + j] is None else acc[i + j] + v
    return TPoly(acc)


# --- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class ActionConfig:
    """Level κ of the theory; actions are reported as rational multiples of κ/(4π)."""

    kappa: mpq = mpq(1)

    def __post_init__(self):
        k = to_q(self.kappa)
        if k == 0:
            raise ValueError("level must be nonzero")
        object.__setattr__(self, "kappa", k)


@dataclass(frozen=True)
class LagrangianBuilds:
    """Generalized-pairing build, reduced BF-type form and the boundary term.

    ``build - reduced == -d(boundary)`` holds exactly; the two integrands agree
    only up to that exact form.
    """

    build: ScalarForm
    reduced: ScalarForm
    boundary: ScalarForm

    @property
    def pointwise_difference(self) -> ScalarForm:
        return sf_sub(self.build, self.reduced)

    @property
    def exact_residual(self) -> ScalarForm:
        return sf_add(self.pointwise_difference, sf_d(self.boundary))


# --- ordinary level -------------------------------------------------------------

def _half_br(m, A, B=None):
    B = A if B is None else B
    return av_scale(av_wedge_bracket(m, A, B), mpq(1, 2))


def curvature1(m, A: AVForm) -> AVForm:
    """F = dA + A∧A."""
    return av_add(av_d(A), _half_br(m, A))


def cs_form(m, A: AVForm, pairing) -> ScalarForm:
    """<A, dA + 1/3 A∧[,]A>_g."""
    return pair_forms("g", A, av_add(av_d(A), av_scale(av_wedge_bracket(m, A, A), mpq(1, 3))), pairing)


def second_chern(F: AVForm, pairing) -> ScalarForm:
    return pair_forms("g", F, F, pairing)


def dP_check(m, A: AVForm, pairing) -> ScalarForm:
    return sf_d(second_chern(curvature1(m, A), pairing))


def _curv1_t(m, At: TPoly) -> TPoly:
    return At.map(av_d) + tp_bilinear(lambda x, y: _half_br(m, x, y), At, At)


def transgression1(m, A0: AVForm, A1: AVForm, pairing, factor=2) -> ScalarForm:
    """factor * ∫ <A1 - A0, F^t> dt."""
    eta = av_sub(A1, A0)
    Ft = _curv1_t(m, TPoly.line(A0, eta))
    integrand = Ft.map(lambda f: pair_forms("g", eta, f, pairing))
    return sf_scale(integrand.integrate01(), factor)


def transgression_weighted1(m, A0: AVForm, A1: AVForm, pairing) -> ScalarForm:
    """Q = <η, J> with J = 2∫F^t dt expanded with fixed weights."""
    third = mpq(1, 3)
    J = av_add(av_d(A0), av_d(A1))
    for x, y in ((A0, A0), (A0, A1), (A1, A1)):
        J = av_add(J, av_scale(av_wedge_bracket(m, x, y), third))
    return pair_forms("g", av_sub(A1, A0), J, pairing)


def chern_weil1(m, A0: AVForm, A1: AVForm, pairing) -> Tuple[ScalarForm, ScalarForm]:
    """(Q, P1 - P0 - dQ)."""
    Q = transgression1(m, A0, A1, pairing)
    P0 = second_chern(curvature1(m, A0), pairing)
    P1 = second_chern(curvature1(m, A1), pairing)
    return Q, sf_sub(sf_sub(P1, P0), sf_d(Q))


def lagr_cs(m, A: AVForm, pairing) -> ScalarForm:
    return cs_form(m, A, pairing)


# --- level 2 ------------------------------------------------------------------

def second_chern2(cv: Curv2, pairing) -> ScalarForm:
    """P = 2<Ω1, Ω2>_gh."""
    return sf_scale(pair_forms("gh", cv.O1, cv.O2, pairing), 2)


def dP_check2(m, c: Conn2, pairing) -> ScalarForm:
    return sf_d(second_chern2(curvature2(m, c), pairing))


def gauge_invariance_check2(m, p: GaugeParams, c: Conn2, pairing) -> ScalarForm:
    return sf_sub(second_chern2(curvature2(m, gauge2(m, p, c)), pairing), second_chern2(curvature2(m, c), pairing))


def _curv2_t(m, At: TPoly, Bt: TPoly, Ct: Optional[TPoly] = None):
    O1 = _curv1_t(m, At) - Bt.map(lambda b: av_alpha(m, b))
    O2 = Bt.map(av_d) + tp_bilinear(lambda a, b: av_wedge_action(m, a, b), At, Bt)
    if Ct is None:
        return O1, O2
    O2 = O2 - Ct.map(lambda c: av_beta(m, c))
    O3 = Ct.map(av_d) + tp_bilinear(lambda a, c: av_wedge_action(m, a, c), At, Ct)
    O3 = O3 + tp_bilinear(lambda x, y: av_wedge_peiffer(m, x, y), Bt, Bt)
    return O1, O2, O3


def transgression2(m, c0: Conn2, c1: Conn2, pairing, factor=2) -> ScalarForm:
    """∫ P(η, Ω2^t) + P(Ω1^t, η̄) dt with P(x, y) = factor·<x, y>_gh."""
    eta, etab = av_sub(c1.A, c0.A), av_sub(c1.B, c0.B)
    O1, O2 = _curv2_t(m, TPoly.line(c0.A, eta), TPoly.line(c0.B, etab))
    t1 = O2.map(lambda f: pair_forms("gh", eta, f, pairing))
    t2 = O1.map(lambda f: pair_forms("gh", f, etab, pairing))
    return sf_scale((t1 + t2).integrate01(), factor)


def _j1(m, A0, A1, B0, B1):
    """2∫Ω1^t dt = dA0 + dA1 + 2/3 A0∧A0 + 1/3(A0∧A1 + A1∧A0) + 2/3 A1∧A1 - α(B0) - α(B1)."""
    J = av_add(av_d(A0), av_d(A1))
    third = mpq(1, 3)
    for x, y in ((A0, A0), (A0, A1), (A1, A1)):
        # 2/3 A∧A = 1/3 A∧[,]A and 1/3(A0∧A1 + A1∧A0) = 1/3 A0∧[,]A1 for 1-forms
        J = av_add(J, av_scale(av_wedge_bracket(m, x, y), third))
    return av_sub(J, av_add(av_alpha(m, B0), av_alpha(m, B1)))


def _weighted(op, X0, X1, Y0, Y1):
    w = ((X0, Y0, mpq(2, 3)), (X0, Y1, mpq(1, 3)), (X1, Y0, mpq(1, 3)), (X1, Y1, mpq(2, 3)))
    out = None
    for x, y, s in w:
        v = av_scale(op(x, y), s)
        out = v if out is None else av_add(out, v)
    return out


def _j2(m, A0, A1, B0, B1, C0=None, C1=None):
    J = av_add(av_add(av_d(B0), av_d(B1)), _weighted(lambda a, b: av_wedge_action(m, a, b), A0, A1, B0, B1))
    if C0 is not None:
        J = av_sub(J, av_add(av_beta(m, C0), av_beta(m, C1)))
    return J


def _j3(m, A0, A1, B0, B1, C0, C1):
    J = av_add(av_d(C0), av_d(C1))
    J = av_add(J, _weighted(lambda a, c: av_wedge_action(m, a, c), A0, A1, C0, C1))
    return av_add(J, _weighted(lambda x, y: av_wedge_peiffer(m, x, y), B0, B1, B0, B1))


def transgression_weighted2(m, c0: Conn2, c1: Conn2, pairing) -> ScalarForm:
    """<η, J2>_gh + <J1, η̄>_gh from the explicit weighted expansions."""
    J1 = _j1(m, c0.A, c1.A, c0.B, c1.B)
    J2 = _j2(m, c0.A, c1.A, c0.B, c1.B)
    return sf_add(pair_forms("gh", av_sub(c1.A, c0.A), J2, pairing), pair_forms("gh", J1, av_sub(c1.B, c0.B), pairing))


def chern_weil2(m, c0: Conn2, c1: Conn2, pairing) -> Tuple[ScalarForm, ScalarForm]:
    Q = transgression2(m, c0, c1, pairing)
    P0 = second_chern2(curvature2(m, c0), pairing)
    P1 = second_chern2(curvature2(m, c1), pairing)
    return Q, sf_sub(sf_sub(P1, P0), sf_d(Q))


def lagr_2cs(m, c: Conn2, pairing) -> LagrangianBuilds:
    """Build ≪𝒜, d𝒜 + 1/3 𝒜∧[,]𝒜≫ for 𝒜 = A + Bξ, and the reduced <2F - α(B), B>_gh."""
    a = gconn1(m, c)
    X = g1_d(m, a) + g1_scale(g1_bracket(m, a, a), mpq(1, 3))
    build = g1_pair(a, X, pairing)
    F = curvature1(m, c.A)
    reduced = pair_forms("gh", av_sub(av_scale(F, 2), av_alpha(m, c.B)), c.B, pairing)
    return LagrangianBuilds(build, reduced, pair_forms("gh", c.A, c.B, pairing))


def q_2cs(m, c: Conn2, pairing) -> ScalarForm:
    """<A, dB + 2/3 A∧▷B>_gh + <dA + 2/3 A∧A - α(B), B>_gh."""
    two3 = mpq(2, 3)
    x = av_add(av_d(c.B), av_scale(av_wedge_action(m, c.A, c.B), two3))
    y = av_sub(av_add(av_d(c.A), av_scale(_half_br(m, c.A), two3)), av_alpha(m, c.B))
    return sf_add(pair_forms("gh", c.A, x, pairing), pair_forms("gh", y, c.B, pairing))


def eom_2cs(m, c: Conn2) -> Tuple[AVForm, AVForm]:
    """Euler-Lagrange residuals (Ω1 for δB, Ω2 for δA)."""
    k = curvature2(m, c)
    return k.O1, k.O2


# --- level 3 ------------------------------------------------------------------

def second_chern3(cv: Curv3, pairing) -> ScalarForm:
    """P = 2<Ω1, Ω3>_gl + <Ω2, Ω2>_h."""
    return sf_add(sf_scale(pair_forms("gl", cv.O1, cv.O3, pairing), 2), pair_forms("h", cv.O2, cv.O2, pairing))


def dP_check3(m, c: Conn3, pairing) -> ScalarForm:
    return sf_d(second_chern3(curvature3(m, c), pairing))


def gauge_invariance_check3(m, p: GaugeParams, c: Conn3, pairing) -> ScalarForm:
    return sf_sub(second_chern3(curvature3(m, gauge3(m, p, c)), pairing), second_chern3(curvature3(m, c), pairing))


def transgression3(m, c0: Conn3, c1: Conn3, pairing, factor=2) -> ScalarForm:
    """factor·∫ <η, Ω3^t>_gl + <Ω1^t, η̃>_gl + <η̄, Ω2^t>_h dt."""
    eta, etab, etat = av_sub(c1.A, c0.A), av_sub(c1.B, c0.B), av_sub(c1.C, c0.C)
    O1, O2, O3 = _curv2_t(m, TPoly.line(c0.A, eta), TPoly.line(c0.B, etab), TPoly.line(c0.C, etat))
    t = O3.map(lambda f: pair_forms("gl", eta, f, pairing))
    t = t + O1.map(lambda f: pair_forms("gl", f, etat, pairing))
    t = t + O2.map(lambda f: pair_forms("h", etab, f, pairing))
    return sf_scale(t.integrate01(), factor)


def transgression_weighted3(m, c0: Conn3, c1: Conn3, pairing) -> ScalarForm:
    """<η, J3>_gl + <J1, η̃>_gl + <η̄, J2>_h."""
    J1 = _j1(m, c0.A, c1.A, c0.B, c1.B)
    J2 = _j2(m, c0.A, c1.A, c0.B, c1.B, c0.C, c1.C)
    J3 = _j3(m, c0.A, c1.A, c0.B, c1.B, c0.C, c1.C)
    out = pair_forms("gl", av_sub(c1.A, c0.A), J3, pairing)
    out = sf_add(out, pair_forms("gl", J1, av_sub(c1.C, c0.C), pairing))
    return sf_add(out, pair_forms("h", av_sub(c1.B, c0.B), J2, pairing))


def chern_weil3(m, c0: Conn3, c1: Conn3, pairing) -> Tuple[ScalarForm, ScalarForm]:
    Q = transgression3(m, c0, c1, pairing)
    P0 = second_chern3(curvature3(m, c0), pairing)
    P1 = second_chern3(curvature3(m, c1), pairing)
    return Q, sf_sub(sf_sub(P1, P0), sf_d(Q))


def lagr_3cs(m, c: Conn3, pairing) -> LagrangianBuilds:
    """Build via the N=2 pairing, and the reduced <2F - α(B), C>_gl + <B, Ω2>_h."""
    a = gconn2(m, c)
    X = g2_d(m, a) + g2_scale(g2_bracket(m, a, a), mpq(1, 3))
    build = g2_pair(a, X, pairing)
    F = curvature1(m, c.A)
    k = curvature3(m, c)
    reduced = sf_add(pair_forms("gl", av_sub(av_scale(F, 2), av_alpha(m, c.B)), c.C, pairing),
                     pair_forms("h", c.B, k.O2, pairing))
    return LagrangianBuilds(build, reduced, pair_forms("gl", c.A, c.C, pairing))


def q_3cs(m, c: Conn3, pairing) -> ScalarForm:
    """<A, dC + 2/3 A∧▷C + 2/3 B∧{,}B>_gl + <dA - α(B) + 2/3 A∧A, C>_gl + <B, dB - β(C) + 2/3 A∧▷B>_h."""
    two3 = mpq(2, 3)
    x = av_add(av_d(c.C), av_scale(av_add(av_wedge_action(m, c.A, c.C), av_wedge_peiffer(m, c.B, c.B)), two3))
    y = av_sub(av_add(av_d(c.A), av_scale(_half_br(m, c.A), two3)), av_alpha(m, c.B))
    z = av_add(av_sub(av_d(c.B), av_beta(m, c.C)), av_scale(av_wedge_action(m, c.A, c.B), two3))
    out = sf_add(pair_forms("gl", c.A, x, pairing), pair_forms("gl", y, c.C, pairing))
    return sf_add(out, pair_forms("h", c.B, z, pairing))


def eom_3cs(m, c: Conn3) -> Tuple[AVForm, AVForm, AVForm]:
    """Euler-Lagrange residuals (Ω1 for δC, Ω2 for δB, Ω3 for δA)."""
    k = curvature3(m, c)
    return k.O1, k.O2, k.O3


# --- variations -----------------------------------------------------------------

def _shift(c, d, eps):
    eps = to_q(eps)
    if isinstance(c, Conn3):
        return Conn3(av_add(c.A, av_scale(d.A, eps)), av_add(c.B, av_scale(d.B, eps)), av_add(c.C, av_scale(d.C, eps)))
    return Conn2(av_add(c.A, av_scale(d.A, eps)), av_add(c.B, av_scale(d.B, eps)))


def _first_variation(f: Callable, c, d) -> ScalarForm:
    """d/dε f(c + ε d) at ε = 0, exact for f of degree <= 4 in ε."""
    vals = {e: f(_shift(c, d, e)) for e in (-2, -1, 1, 2)}
    out = sf_sub(sf_scale(vals[1], 8), sf_scale(vals[-1], 8))
    out = sf_add(out, sf_sub(vals[-2], vals[2]))
    return sf_scale(out, mpq(1, 12))


def eom_variation_residual(m, c, d, pairing) -> ScalarForm:
    """δL minus the Euler-Lagrange pairing and the boundary term.

    Level 2: δL = 2<δA, Ω2>_gh + 2<Ω1, δB>_gh + d(2<δA, B>_gh).
    Level 3: δL = 2<δA, Ω3>_gl + 2<δB, Ω2>_h + 2<Ω1, δC>_gl + d(2<δA, C>_gl + <B, δB>_h).
    """
    if isinstance(c, Conn3):
        k = curvature3(m, c)
        dL = _first_variation(lambda x: lagr_3cs(m, x, pairing).reduced, c, d)
        el = sf_add(pair_forms("gl", d.A, k.O3, pairing), pair_forms("h", d.B, k.O2, pairing))
        el = sf_scale(sf_add(el, pair_forms("gl", k.O1, d.C, pairing)), 2)
        bd = sf_add(sf_scale(pair_forms("gl", d.A, c.C, pairing), 2), pair_forms("h", c.B, d.B, pairing))
    else:
        k = curvature2(m, c)
        dL = _first_variation(lambda x: lagr_2cs(m, x, pairing).reduced, c, d)
        el = sf_scale(sf_add(pair_forms("gh", d.A, k.O2, pairing), pair_forms("gh", k.O1, d.B, pairing)), 2)
        bd = sf_scale(pair_forms("gh", d.A, c.B, pairing), 2)
    return sf_sub(sf_sub(dL, el), sf_d(bd))


def variation_triviality_check(m, level: int, c, d, pairing) -> Tuple[ScalarForm, ScalarForm]:
    """Returns (δP - dK, δP - dK - Bianchi pairing terms).

    δP is the ε-derivative of the second Chern form along c + ε·d, computed by
    exact finite differences; K is the integration-by-parts boundary term
    (2<δA, Ω2> + 2<Ω1, δB> at level 2; 2<δA, Ω3> + 2<Ω1, δC> + 2<δB, Ω2> at
    level 3).  Both residuals vanish exactly.
    """
    if level == 2:
        k = curvature2(m, c)
        dP = _first_variation(lambda x: second_chern2(curvature2(m, x), pairing), c, d)
        K = sf_scale(sf_add(pair_forms("gh", d.A, k.O2, pairing), pair_forms("gh", k.O1, d.B, pairing)), 2)
        r1 = av_add(av_add(av_d(k.O1), av_wedge_bracket(m, c.A, k.O1)), av_alpha(m, k.O2))
        r2 = av_sub(av_add(av_d(k.O2), av_wedge_action(m, c.A, k.O2)), av_wedge_action(m, k.O1, c.B))
        bianchi = sf_scale(sf_sub(pair_forms("gh", d.A, r2, pairing), pair_forms("gh", r1, d.B, pairing)), 2)
    elif level == 3:
        k = curvature3(m, c)
        dP = _first_variation(lambda x: second_chern3(curvature3(m, x), pairing), c, d)
        K = sf_add(pair_forms("gl", d.A, k.O3, pairing), pair_forms("gl", k.O1, d.C, pairing))
        K = sf_scale(sf_add(K, pair_forms("h", d.B, k.O2, pairing)), 2)
        bianchi = None
    else:
        raise ValueError("level must be 2 or 3")
    res = sf_sub(dP, sf_d(K))
    return res, (sf_sub(res, bianchi) if bianchi is not None else res)


def pin_normalization(m, level: int, c0, c1, pairing, candidates=(1, 2)) -> List[int]:
    """Candidate factors in front of the transgression integral that make P1 - P0 - dQ vanish."""
    if level == 1:
        P0 = second_chern(curvature1(m, c0), pairing)
        P1 = second_chern(curvature1(m, c1), pairing)
        Qf = lambda f: transgression1(m, c0, c1, pairing, f)  # noqa: E731
    elif level == 2:
        P0 = second_chern2(curvature2(m, c0), pairing)
        P1 = second_chern2(curvature2(m, c1), pairing)
        Qf = lambda f: transgression2(m, c0, c1, pairing, f)  # noqa: E731
    else:
        P0 = second_chern3(curvature3(m, c0), pairing)
        P1 = second_chern3(curvature3(m, c1), pairing)
        Qf = lambda f: transgression3(m, c0, c1, pairing, f)  # noqa: E731
    diff = sf_sub(P1, P0)
    return [f for f in candidates if sf_sub(diff, sf_d(Qf(f))).is_zero()]


def action_value(m, theory: str, c, pairing, config: ActionConfig = ActionConfig()) -> mpq:
    """κ·∫_{[0,1]^n} L; the action is this rational times 1/(4π).

    The 2CS and 3CS Lagrangians are the generalized-pairing builds.
    """
    if theory == "cs":
        L = cs_form(m, c, pairing)
    elif theory == "2cs":
        L = lagr_2cs(m, c, pairing).build
    elif theory == "3cs":
        L = lagr_3cs(m, c, pairing).build
    else:
        raise ValueError(f"unknown theory {theory!r}")
    if L.degree != L.n_vars:
        raise DegreeMismatch(f"{theory} Lagrangian has degree {L.degree} but n_vars = {L.n_vars}")
    return config.kappa * sf_integrate_cube(L)
