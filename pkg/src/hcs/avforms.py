"""Algebra-valued differential forms A = sum_a A^a X_a and their composite wedges.

Every bilinear operation is the double sum over basis components with the
coefficient forms wedged in the written order, so e.g.
``A ∧[,] A' = sum A^a ∧ A'^b [X_a, X_b]``.  Pairings carry no extra sign.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .algebra import D2CModule, PairingData
from .poly_forms import (
    ScalarForm,
    _finish,
    _wedge_into,
    sf_add,
    sf_d,
    sf_random,
    sf_scale,
    sf_zero,
    to_q,
)

__all__ = [
    "AVFormError",
    "SlotMismatch",
    "NoLifting",
    "MissingPairing",
    "EvenDegreeSquare",
    "AVForm",
    "slot_dim",
    "av_zero",
    "av_from",
    "av_random",
    "av_add",
    "av_sub",
    "av_scale",
    "av_d",
    "av_wedge_bracket",
    "av_wedge_action",
    "av_wedge_peiffer",
    "av_wedge_action_prime",
    "av_half_bracket",
    "av_alpha",
    "av_beta",
    "av_scalar_wedge",
    "pair_forms",
    "bilinear_forms",
]


class AVFormError(ValueError):
    pass


class SlotMismatch(AVFormError):
    pass


class NoLifting(AVFormError):
    pass


class MissingPairing(AVFormError):
    pass


class EvenDegreeSquare(AVFormError):
    pass


# "gg" holds raw products A^a ∧ B^b at index a * dim g + b
SLOTS = ("g", "h", "l", "gg")


class AVForm:
    """Immutable algebra-valued p-form with one ScalarForm per basis vector."""

    __slots__ = ("slot", "n_vars", "degree", "comps")

    def __init__(self, slot: str, comps: Sequence[ScalarForm], n_vars: Optional[int] = None,
                 degree: Optional[int] = None):
        if slot not in SLOTS:
            raise SlotMismatch(f"unknown slot {slot!r}")
        comps = tuple(comps)
        if comps:
            n_vars = comps[0].n_vars if n_vars is None else n_vars
            degree = comps[0].degree if degree is None else degree
        if n_vars is None or degree is None:
            raise AVFormError("empty AVForm needs explicit n_vars and degree")
        fixed = []
        for c in comps:
            if c.n_vars != n_vars:
                raise AVFormError("components disagree on n_vars")
            if c.degree != degree:
                if c.is_zero():
                    c = sf_zero(n_vars, degree)
                else:
                    raise AVFormError("components disagree on degree")
            fixed.append(c)
        self.slot = slot
        self.n_vars = n_vars
        self.degree = degree
        self.comps: Tuple[ScalarForm, ...] = tuple(fixed)

    @property
    def dim(self) -> int:
        return len(self.comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __add__(self, other: "AVForm") -> "AVForm":
        return av_add(self, other)

    def __sub__(self, other: "AVForm") -> "AVForm":
        return av_sub(self, other)

    def __neg__(self) -> "AVForm":
        return av_scale(self, -1)

    def __mul__(self, s) -> "AVForm":
        return av_scale(self, s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, AVForm):
            return NotImplemented
        if self.slot != other.slot or self.dim != other.dim:
            return False
        return all(a == b for a, b in zip(self.comps, other.comps))

    def __hash__(self) -> int:
        return hash((self.slot, self.comps))

    def __repr__(self) -> str:
        return f"AVForm({self.slot}, deg={self.degree}, {list(self.comps)!r})"


def slot_dim(m, slot: str) -> int:
    if slot == "g":
        return m.g.dim
    if slot == "h":
        return m.h.dim
    if slot == "l":
        if m.l is None:
            raise NoLifting("module has no l algebra")
        return m.l.dim
    raise SlotMismatch(f"unknown slot {slot!r}")


def av_zero(slot: str, dim: int, n_vars: int, degree: int) -> AVForm:
    z = sf_zero(n_vars, degree)
    return AVForm(slot, [z] * dim, n_vars, degree)


def av_from(slot: str, comps: Sequence[ScalarForm]) -> AVForm:
    return AVForm(slot, comps)


def av_random(seed, slot: str, dim: int, n_vars: int, degree: int, **kw) -> AVForm:
    """Seeded random algebra-valued form; ``kw`` is passed to ``sf_random``.

    Degrees outside 0..n_vars give the zero form.
    """
    if not 0 <= degree <= n_vars:
        return av_zero(slot, dim, n_vars, degree)
    return AVForm(slot, [sf_random(f"{seed}/{slot}{a}", n_vars, degree, **kw) for a in range(dim)], n_vars, degree)


def _same(a: AVForm, b: AVForm) -> None:
    if a.slot != b.slot or a.dim != b.dim:
        raise SlotMismatch(f"slot {a.slot}[{a.dim}] vs {b.slot}[{b.dim}]")


def av_add(a: AVForm, b: AVForm) -> AVForm:
    _same(a, b)
    comps = [sf_add(x, y) for x, y in zip(a.comps, b.comps)]
    deg = a.degree if not a.is_zero() else b.degree
    return AVForm(a.slot, comps, a.n_vars, deg)


def av_scale(a: AVForm, s) -> AVForm:
    s = to_q(s)
    return AVForm(a.slot, [sf_scale(c, s) for c in a.comps], a.n_vars, a.degree)


def av_sub(a: AVForm, b: AVForm) -> AVForm:
    return av_add(a, av_scale(b, -1))


def av_d(a: AVForm) -> AVForm:
    return AVForm(a.slot, [sf_d(c) for c in a.comps], a.n_vars, a.degree + 1)


def bilinear_forms(sparse, P: Sequence[ScalarForm], Q: Sequence[ScalarForm], dim_out: int,
                   n_vars: int, degree: int, scale=1) -> List[ScalarForm]:
    """sum_{a,b} P^a ∧ Q^b t[a][b] for a sparse tensor [(a, b, ((c, coef), ...))]."""
    accs: List[Dict[int, Dict[int, mpq]]] = [{} for _ in range(dim_out)]
    s0 = to_q(scale)
    if degree <= n_vars:
        for a, b, outs in sparse:
            pa, qb = P[a], Q[b]
            if not pa._c or not qb._c:
                continue
            for c, coef in outs:
                _wedge_into(accs[c], pa, qb, coef * s0)
    return [_finish(n_vars, degree, acc) for acc in accs]


def _apply(sparse, A: AVForm, B: AVForm, slot: str, dim_out: int) -> AVForm:
    if A.n_vars != B.n_vars:
        raise AVFormError("n_vars mismatch")
    deg = A.degree + B.degree
    return AVForm(slot, bilinear_forms(sparse, A.comps, B.comps, dim_out, A.n_vars, deg), A.n_vars, deg)


def _alg(m, slot: str):
    return {"g": m.g, "h": m.h, "l": m.l}[slot]


def av_wedge_bracket(m, A1: AVForm, A2: AVForm) -> AVForm:
    """A1 ∧[,] A2 in the slot algebra shared by both arguments."""
    _same(A1, A2)
    L = _alg(m, A1.slot)
    if L is None or L.dim != A1.dim:
        raise SlotMismatch(f"slot {A1.slot} does not match module")
    return _apply(L.sparse, A1, A2, A1.slot, L.dim)


def av_wedge_action(m, A: AVForm, P: AVForm) -> AVForm:
    """A ∧▷ P with A g-valued and P h- or l-valued."""
    if A.slot != "g" or A.dim != m.g.dim:
        raise SlotMismatch("first argument must be g-valued")
    if P.slot == "h" and P.dim == m.h.dim:
        return _apply(m.sp_act_gh, A, P, "h", m.h.dim)
    if P.slot == "l" and isinstance(m, D2CModule) and P.dim == m.l.dim:
        return _apply(m.sp_act_gl, A, P, "l", m.l.dim)
    raise SlotMismatch(f"cannot act on slot {P.slot}")


def av_wedge_peiffer(m, B: AVForm, B2: AVForm) -> AVForm:
    """B ∧{,} B' (h x h -> l)."""
    if not isinstance(m, D2CModule):
        raise NoLifting("module has no Peiffer lifting")
    if B.slot != "h" or B2.slot != "h" or B.dim != m.h.dim or B2.dim != m.h.dim:
        raise SlotMismatch("both arguments must be h-valued")
    return _apply(m.sp_peiffer, B, B2, "l", m.l.dim)


def av_wedge_action_prime(m, B: AVForm, C: AVForm) -> AVForm:
    """B ∧▷' C with Y ▷' Z = -{beta(Z), Y}."""
    if not isinstance(m, D2CModule):
        raise NoLifting("module has no Peiffer lifting")
    if B.slot != "h" or C.slot != "l" or B.dim != m.h.dim or C.dim != m.l.dim:
        raise SlotMismatch("expected (h, l) arguments")
    return _apply(m.sp_act_prime, B, C, "l", m.l.dim)


def av_half_bracket(m, A: AVForm) -> AVForm:
    """A ∧ A in matrix notation, implemented as 1/2 A ∧[,] A (odd degree only)."""
    if A.degree % 2 == 0:
        raise EvenDegreeSquare("A∧A is only defined here for odd-degree forms")
    return av_scale(av_wedge_bracket(m, A, A), mpq(1, 2))


def _push(mat, A: AVForm, slot: str, rows: int) -> AVForm:
    comps = []
    for i in range(rows):
        acc: Dict[int, Dict[int, mpq]] = {}
        for j, c in enumerate(A.comps):
            x = mat[i][j]
            if x and c._c:
                for mask, p in c._c.items():
                    tgt = acc.setdefault(mask, {})
                    for k, v in p.items():
                        tgt[k] = tgt.get(k, 0) + x * v
        comps.append(_finish(A.n_vars, A.degree, acc))
    return AVForm(slot, comps, A.n_vars, A.degree)


def av_alpha(m, B: AVForm) -> AVForm:
    if B.slot != "h" or B.dim != m.h.dim:
        raise SlotMismatch("alpha expects an h-valued form")
    return _push(m.alpha, B, "g", m.g.dim)


def av_beta(m, C: AVForm) -> AVForm:
    if not isinstance(m, D2CModule):
        raise NoLifting("module has no beta map")
    if C.slot != "l" or C.dim != m.l.dim:
        raise SlotMismatch("beta expects an l-valued form")
    return _push(m.beta, C, "h", m.h.dim)


def av_scalar_wedge(w: ScalarForm, A: AVForm, left: bool = True) -> AVForm:
    """w ∧ A (left) or A ∧ w (right) for a scalar form w."""
    deg = w.degree + A.degree
    comps = []
    for c in A.comps:
        acc: Dict[int, Dict[int, mpq]] = {}
        if left:
            _wedge_into(acc, w, c, mpq(1))
        else:
            _wedge_into(acc, c, w, mpq(1))
        comps.append(_finish(A.n_vars, deg, acc))
    return AVForm(A.slot, comps, A.n_vars, deg)


_KINDS = {"g": ("g", "g"), "gh": ("g", "h"), "h": ("h", "h"), "gl": ("g", "l")}


def pair_forms(kind: str, P: AVForm, Q: AVForm, pairing) -> ScalarForm:
    """sum_{a,b} P^a ∧ Q^b <e_a, e_b>_kind.

    ``pairing`` is a PairingData or a bare matrix.
    """
    if kind not in _KINDS:
        raise SlotMismatch(f"unknown pairing kind {kind!r}")
    if (P.slot, Q.slot) != _KINDS[kind]:
        raise SlotMismatch(f"pairing {kind} needs slots {_KINDS[kind]}, got ({P.slot}, {Q.slot})")
    M = getattr(pairing, f"pair_{kind}") if isinstance(pairing, PairingData) else pairing
    if M is None:
        raise MissingPairing(f"pairing {kind} not supplied")
    if len(M) != P.dim or any(len(r) != Q.dim for r in M):
        raise SlotMismatch(f"pairing {kind} has wrong shape")
    deg = P.degree + Q.degree
    acc: Dict[int, Dict[int, mpq]] = {}
    if deg <= P.n_vars:
        for a, row in enumerate(M):
            if not P.comps[a]._c:
                continue
            for b, x in enumerate(row):
                if x and Q.comps[b]._c:
                    _wedge_into(acc, P.comps[a], Q.comps[b], to_q(x))
    return _finish(P.n_vars, deg, acc)
