"""Differential crossed modules and 2-crossed modules as structure-constant data.

Validators check every axiom on basis tuples (all axioms are multilinear, so
this is equivalent to the axiom).  Also: Peiffer commutators, balancing
extensions, exact solvers for invariant bilinear forms, the shipped example
catalog and a JSON loader.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import gcd
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from .poly_forms import to_q

__all__ = [
    "mutation_sites",
    "mutate_entry",
    "random_mutation",
    "AlgebraError",
    "DimensionMismatch",
    "InvalidInput",
    "NotBalanced",
    "ParseError",
    "LieAlgebraData",
    "DCModule",
    "D2CModule",
    "PairingData",
    "Violation",
    "ValidationReport",
    "validate_lie",
    "validate_dcm",
    "validate_d2cm",
    "peiffer_commutator",
    "action_prime",
    "balance_dcm",
    "balance_d2cm",
    "nullspace",
    "bareiss_det",
    "solve_invariant_forms_dcm",
    "solve_invariant_forms_d2cm",
    "check_pairing",
    "mat_mul",
    "mat_identity",
    "nilpotent_exp",
    "is_nilpotent",
    "lie_so3",
    "lie_oscillator",
    "lie_heisenberg",
    "lie_abelian",
    "adjoint_dcm",
    "coadjoint_dcm",
    "l0_extension",
    "abelian_complex",
    "nilpotent_d2cm",
    "adjoint_d2cm",
    "Example",
    "EXAMPLES",
    "get_example",
    "module_from_dict",
    "load_module",
    "module_to_dict",
]

Vec = Tuple[mpq, ...]
Mat = List[List[mpq]]
Tensor3 = Tuple[Tuple[Tuple[mpq, ...], ...], ...]


class AlgebraError(ValueError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class InvalidInput(AlgebraError):
    pass


class NotBalanced(AlgebraError):
    pass


class ParseError(AlgebraError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


# --- shape helpers ----------------------------------------------------------

def _mat(data, rows: int, cols: int, name: str) -> Tuple[Tuple[mpq, ...], ...]:
    if data is None:
        data = [[0] * cols for _ in range(rows)]
    if len(data) != rows or any(len(r) != cols for r in data):
        raise DimensionMismatch(f"{name}: expected {rows}x{cols} matrix")
    return tuple(tuple(to_q(x) for x in r) for r in data)


def _t3(data, d1: int, d2: int, d3: int, name: str) -> Tensor3:
    if data is None:
        data = [[[0] * d3 for _ in range(d2)] for _ in range(d1)]
    if len(data) != d1 or any(len(r) != d2 for r in data) or any(len(c) != d3 for r in data for c in r):
        raise DimensionMismatch(f"{name}: expected {d1}x{d2}x{d3} tensor")
    return tuple(tuple(tuple(to_q(x) for x in c) for c in r) for r in data)


def _sparse3(t: Tensor3):
    """[(a, b, ((c, coef), ...)), ...] over nonzero fibres."""
    out = []
    for a, ra in enumerate(t):
        for b, rb in enumerate(ra):
            nz = tuple((c, v) for c, v in enumerate(rb) if v)
            if nz:
                out.append((a, b, nz))
    return tuple(out)


def _bil(t: Tensor3, u: Sequence, v: Sequence, dim_out: int) -> Vec:
    out = [mpq(0)] * dim_out
    for a, ua in enumerate(u):
        if not ua:
            continue
        for b, vb in enumerate(v):
            if not vb:
                continue
            s = ua * vb
            for c, x in enumerate(t[a][b]):
                if x:
                    out[c] += s * x
    return tuple(out)


def _lin(m, v: Sequence, rows: int) -> Vec:
    # m is rows x len(v): result_i = sum_j m[i][j] v[j]
    return tuple(sum((m[i][j] * v[j] for j in range(len(v)) if v[j]), mpq(0)) for i in range(rows))


def _basis(d: int, i: int) -> Vec:
    return tuple(mpq(1) if j == i else mpq(0) for j in range(d))


def _add(*vs: Sequence) -> Vec:
    return tuple(sum(xs, mpq(0)) for xs in zip(*vs))


def _neg(v: Sequence) -> Vec:
    return tuple(-x for x in v)


def _scale(s, v: Sequence) -> Vec:
    return tuple(s * x for x in v)


def _nz(v: Sequence) -> bool:
    return any(v)


# --- data types -------------------------------------------------------------

class LieAlgebraData:
    """Lie algebra given by structure constants f[a][b][c]: [X_a, X_b] = sum_c f[a][b][c] X_c."""

    def __init__(self, dim: int, struct_const=None, name: str = ""):
        if dim < 0:
            raise DimensionMismatch("dimension must be non-negative")
        self.dim = dim
        self.struct_const = _t3(struct_const, dim, dim, dim, "struct_const")
        self.name = name

    @cached_property
    def sparse(self):
        return _sparse3(self.struct_const)

    def bracket(self, u: Sequence, v: Sequence) -> Vec:
        return _bil(self.struct_const, u, v, self.dim)

    def ad_matrix(self, x: Sequence) -> Mat:
        """Matrix of [x, .] acting on column vectors."""
        d = self.dim
        return [[sum((x[a] * self.struct_const[a][b][c] for a in range(d)), mpq(0)) for b in range(d)] for c in range(d)]

    def is_abelian(self) -> bool:
        return not self.sparse

    def __eq__(self, other) -> bool:
        return isinstance(other, LieAlgebraData) and self.dim == other.dim and self.struct_const == other.struct_const

    def __repr__(self) -> str:
        return f"LieAlgebraData(dim={self.dim}{', ' + self.name if self.name else ''})"


@dataclass(eq=False)
class DCModule:
    """Differential crossed module (h, g; alpha, act).

    ``alpha`` is dim g x dim h (alpha(Y_j) = sum_i alpha[i][j] X_i) and
    ``act_gh[a][b][c]`` gives X_a |> Y_b = sum_c act_gh[a][b][c] Y_c.
    """

    g: LieAlgebraData
    h: LieAlgebraData
    alpha: Any = None
    act_gh: Any = None
    name: str = ""

    def __post_init__(self):
        self.alpha = _mat(self.alpha, self.g.dim, self.h.dim, "alpha")
        self.act_gh = _t3(self.act_gh, self.g.dim, self.h.dim, self.h.dim, "act_gh")

    level = 2

    @property
    def l(self) -> Optional[LieAlgebraData]:
        return None

    @cached_property
    def sp_act_gh(self):
        return _sparse3(self.act_gh)

    def dims(self) -> Tuple[int, ...]:
        return (self.g.dim, self.h.dim)

    def alpha_of(self, y: Sequence) -> Vec:
        return _lin(self.alpha, y, self.g.dim)

    def act_h(self, x: Sequence, y: Sequence) -> Vec:
        return _bil(self.act_gh, x, y, self.h.dim)

    def __eq__(self, other) -> bool:
        return (isinstance(other, DCModule) and self.g == other.g and self.h == other.h
                and self.alpha == other.alpha and self.act_gh == other.act_gh)


@dataclass(eq=False)
class D2CModule:
    """Differential 2-crossed module (l, h, g; beta, alpha, act, lifting).

    ``beta`` is dim h x dim l, ``act_gl`` acts g on l and ``peiffer[a][b][c]``
    gives {Y_a, Y_b} = sum_c peiffer[a][b][c] Z_c.
    """

    g: LieAlgebraData
    h: LieAlgebraData
    l: LieAlgebraData
    alpha: Any = None
    beta: Any = None
    act_gh: Any = None
    act_gl: Any = None
    peiffer: Any = None
    fine: bool = False
    name: str = ""

    def __post_init__(self):
        dg, dh, dl = self.g.dim, self.h.dim, self.l.dim
        self.alpha = _mat(self.alpha, dg, dh, "alpha")
        self.beta = _mat(self.beta, dh, dl, "beta")
        self.act_gh = _t3(self.act_gh, dg, dh, dh, "act_gh")
        self.act_gl = _t3(self.act_gl, dg, dl, dl, "act_gl")
        self.peiffer = _t3(self.peiffer, dh, dh, dl, "peiffer")

    level = 3

    @cached_property
    def sp_act_gh(self):
        return _sparse3(self.act_gh)

    @cached_property
    def sp_act_gl(self):
        return _sparse3(self.act_gl)

    @cached_property
    def sp_peiffer(self):
        return _sparse3(self.peiffer)

    @cached_property
    def act_prime_tensor(self) -> Tensor3:
        """t'[a][b][c]: Y_a |>' Z_b = -{beta(Z_b), Y_a} = sum_c t'[a][b][c] Z_c."""
        dh, dl = self.h.dim, self.l.dim
        out = []
        for a in range(dh):
            row = []
            for b in range(dl):
                bz = self.beta_of(_basis(dl, b))
                row.append(_neg(_bil(self.peiffer, bz, _basis(dh, a), dl)))
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def sp_act_prime(self):
        return _sparse3(self.act_prime_tensor)

    def dims(self) -> Tuple[int, ...]:
        return (self.g.dim, self.h.dim, self.l.dim)

    def alpha_of(self, y: Sequence) -> Vec:
        return _lin(self.alpha, y, self.g.dim)

    def beta_of(self, z: Sequence) -> Vec:
        return _lin(self.beta, z, self.h.dim)

    def act_h(self, x: Sequence, y: Sequence) -> Vec:
        return _bil(self.act_gh, x, y, self.h.dim)

    def act_l(self, x: Sequence, z: Sequence) -> Vec:
        return _bil(self.act_gl, x, z, self.l.dim)

    def lift(self, y1: Sequence, y2: Sequence) -> Vec:
        return _bil(self.peiffer, y1, y2, self.l.dim)

    def as_dcm(self) -> DCModule:
        return DCModule(self.g, self.h, self.alpha, self.act_gh, name=self.name)

    def __eq__(self, other) -> bool:
        return (isinstance(other, D2CModule) and self.g == other.g and self.h == other.h and self.l == other.l
                and self.alpha == other.alpha and self.beta == other.beta and self.act_gh == other.act_gh
                and self.act_gl == other.act_gl and self.peiffer == other.peiffer)


Module = Union[DCModule, D2CModule]


@dataclass
class PairingData:
    pair_g: Any = None
    pair_gh: Any = None
    pair_h: Any = None
    pair_gl: Any = None

    def normalized(self, m: Module) -> "PairingData":
        dg, dh = m.g.dim, m.h.dim
        dl = m.l.dim if m.l is not None else 0
        return PairingData(
            _mat(self.pair_g, dg, dg, "pair_g") if self.pair_g is not None else None,
            _mat(self.pair_gh, dg, dh, "pair_gh") if self.pair_gh is not None else None,
            _mat(self.pair_h, dh, dh, "pair_h") if self.pair_h is not None else None,
            _mat(self.pair_gl, dg, dl, "pair_gl") if self.pair_gl is not None else None,
        )


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: Tuple[int, ...]
    residual: Tuple[mpq, ...]


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    checked: Dict[str, int] = field(default_factory=dict)
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms_violated(self) -> List[str]:
        return sorted({v.axiom for v in self.violations})

    def _check(self, axiom: str, idx: Tuple[int, ...], residual: Sequence) -> None:
        self.checked[axiom] = self.checked.get(axiom, 0) + 1
        if _nz(residual):
            self.violations.append(Violation(axiom, tuple(idx), tuple(residual)))

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        self.violations.extend(other.violations)
        for k, v in other.checked.items():
            self.checked[k] = self.checked.get(k, 0) + v
        self.notes.update(other.notes)
        return self


# --- validators -------------------------------------------------------------

def validate_lie(L: LieAlgebraData, tag: str = "g") -> ValidationReport:
    rep = ValidationReport()
    d = L.dim
    E = [_basis(d, i) for i in range(d)]
    for a, b in product(range(d), repeat=2):
        rep._check(f"antisym_{tag}", (a, b), _add(L.bracket(E[a], E[b]), L.bracket(E[b], E[a])))
    for a, b, c in product(range(d), repeat=3):
        if a < b < c or (d <= 2 and a <= b <= c):
            r = _add(L.bracket(E[a], L.bracket(E[b], E[c])), L.bracket(E[b], L.bracket(E[c], E[a])),
                     L.bracket(E[c], L.bracket(E[a], E[b])))
            rep._check(f"jacobi_{tag}", (a, b, c), r)
    return rep


def _validate_action(rep: ValidationReport, g: LieAlgebraData, h: LieAlgebraData, act, tag: str) -> None:
    dg, dh = g.dim, h.dim
    X = [_basis(dg, i) for i in range(dg)]
    Y = [_basis(dh, i) for i in range(dh)]

    def a(x, y):
        return _bil(act, x, y, dh)

    # X |> [Y1, Y2] = [X |> Y1, Y2] + [Y1, X |> Y2]
    for i, j, k in product(range(dg), range(dh), range(dh)):
        r = _add(a(X[i], h.bracket(Y[j], Y[k])), _neg(h.bracket(a(X[i], Y[j]), Y[k])), _neg(h.bracket(Y[j], a(X[i], Y[k]))))
        rep._check(f"XY1Y2_{tag}", (i, j, k), r)
    # [X1, X2] |> Y = X1 |> (X2 |> Y) - X2 |> (X1 |> Y)
    for i, j, k in product(range(dg), range(dg), range(dh)):
        r = _add(a(g.bracket(X[i], X[j]), Y[k]), _neg(a(X[i], a(X[j], Y[k]))), a(X[j], a(X[i], Y[k])))
        rep._check(f"X1X2Y_{tag}", (i, j, k), r)


def _validate_crossed(rep: ValidationReport, m: Module, peiffer: bool) -> None:
    g, h = m.g, m.h
    dg, dh = g.dim, h.dim
    X = [_basis(dg, i) for i in range(dg)]
    Y = [_basis(dh, i) for i in range(dh)]
    for i, j in product(range(dh), repeat=2):
        rep._check("alpha_hom", (i, j), _add(m.alpha_of(h.bracket(Y[i], Y[j])), _neg(g.bracket(m.alpha_of(Y[i]), m.alpha_of(Y[j])))))
    for i, j in product(range(dg), range(dh)):
        rep._check("XxY", (i, j), _add(m.alpha_of(m.act_h(X[i], Y[j])), _neg(g.bracket(X[i], m.alpha_of(Y[j])))))
    if peiffer:
        for i, j in product(range(dh), repeat=2):
            rep._check("YyY'", (i, j), peiffer_commutator(m, Y[i], Y[j]))


def validate_dcm(m: DCModule) -> ValidationReport:
    if not isinstance(m, (DCModule, D2CModule)):
        raise DimensionMismatch("expected a DCModule")
    rep = validate_lie(m.g, "g").merge(validate_lie(m.h, "h"))
    _validate_action(rep, m.g, m.h, m.act_gh, "gh")
    _validate_crossed(rep, m, peiffer=True)
    return rep


def validate_d2cm(m: D2CModule) -> ValidationReport:
    if not isinstance(m, D2CModule):
        raise DimensionMismatch("expected a D2CModule")
    g, h, l = m.g, m.h, m.l
    dg, dh, dl = g.dim, h.dim, l.dim
    rep = validate_lie(g, "g").merge(validate_lie(h, "h")).merge(validate_lie(l, "l"))
    _validate_action(rep, g, h, m.act_gh, "gh")
    _validate_action(rep, g, l, m.act_gl, "gl")
    _validate_crossed(rep, m, peiffer=m.fine)
    X = [_basis(dg, i) for i in range(dg)]
    Y = [_basis(dh, i) for i in range(dh)]
    Z = [_basis(dl, i) for i in range(dl)]
    br_h, br_l, lift, beta = h.bracket, l.bracket, m.lift, m.beta_of
    for k in range(dl):
        rep._check("ax1_alpha_beta", (k,), m.alpha_of(beta(Z[k])))
    for i, k in product(range(dg), range(dl)):
        rep._check("ax1_beta_equiv", (i, k), _add(beta(m.act_l(X[i], Z[k])), _neg(m.act_h(X[i], beta(Z[k])))))
    for j, k in product(range(dl), repeat=2):
        rep._check("beta_hom", (j, k), _add(beta(br_l(Z[j], Z[k])), _neg(br_h(beta(Z[j]), beta(Z[k])))))
    for i, j in product(range(dh), repeat=2):
        rep._check("ax2", (i, j), _add(beta(lift(Y[i], Y[j])), _neg(peiffer_commutator(m, Y[i], Y[j]))))
    for j, k in product(range(dl), repeat=2):
        rep._check("ax3", (j, k), _add(br_l(Z[j], Z[k]), _neg(lift(beta(Z[j]), beta(Z[k])))))
    for i, j, k in product(range(dh), repeat=3):
        y1, y2, y3 = Y[i], Y[j], Y[k]
        lhs = lift(br_h(y1, y2), y3)
        rhs = _add(m.act_l(m.alpha_of(y1), lift(y2, y3)), lift(y1, br_h(y2, y3)),
                   _neg(m.act_l(m.alpha_of(y2), lift(y1, y3))), _neg(lift(y2, br_h(y1, y3))))
        rep._check("ax4", (i, j, k), _add(lhs, _neg(rhs)))
        lhs5 = lift(y1, br_h(y2, y3))
        rhs5 = _add(lift(beta(lift(y1, y2)), y3), _neg(lift(beta(lift(y1, y3)), y2)))
        rep._check("ax5", (i, j, k), _add(lhs5, _neg(rhs5)))
    for i, k in product(range(dh), range(dl)):
        r = _add(lift(beta(Z[k]), Y[i]), lift(Y[i], beta(Z[k])), m.act_l(m.alpha_of(Y[i]), Z[k]))
        rep._check("ax6", (i, k), r)
    for x, i, j in product(range(dg), range(dh), range(dh)):
        r = _add(m.act_l(X[x], lift(Y[i], Y[j])), _neg(lift(m.act_h(X[x], Y[i]), Y[j])), _neg(lift(Y[i], m.act_h(X[x], Y[j]))))
        rep._check("eq12", (x, i, j), r)
    if m.fine:
        for i, k in product(range(dh), range(dl)):
            rep._check("fine", (i, k), _add(m.act_l(m.alpha_of(Y[i]), Z[k]), _neg(action_prime(m, Y[i], Z[k]))))
    return rep


def peiffer_commutator(m: Module, y: Sequence, y2: Sequence) -> Vec:
    """[[Y, Y']] = [Y, Y'] - alpha(Y) |> Y'."""
    if len(y) != m.h.dim or len(y2) != m.h.dim:
        raise DimensionMismatch("peiffer_commutator: vectors must have length dim h")
    y, y2 = tuple(map(to_q, y)), tuple(map(to_q, y2))
    return _add(m.h.bracket(y, y2), _neg(m.act_h(m.alpha_of(y), y2)))


def action_prime(m: D2CModule, y: Sequence, z: Sequence) -> Vec:
    """Y |>' Z = -{beta(Z), Y}."""
    if len(y) != m.h.dim or len(z) != m.l.dim:
        raise DimensionMismatch("action_prime: dimension mismatch")
    y, z = tuple(map(to_q, y)), tuple(map(to_q, z))
    return _neg(m.lift(m.beta_of(z), y))


# --- balancing --------------------------------------------------------------

def _pad_lie(L: LieAlgebraData, extra: int) -> LieAlgebraData:
    d = L.dim + extra
    f = [[[mpq(0)] * d for _ in range(d)] for _ in range(d)]
    for a, b, c in product(range(L.dim), repeat=3):
        f[a][b][c] = L.struct_const[a][b][c]
    return LieAlgebraData(d, f, L.name + f"+w{extra}" if L.name else "")


def _pad3(t: Tensor3, d1: int, d2: int, d3: int):
    out = [[[mpq(0)] * d3 for _ in range(d2)] for _ in range(d1)]
    for a, ra in enumerate(t):
        for b, rb in enumerate(ra):
            for c, v in enumerate(rb):
                out[a][b][c] = v
    return out


def _pad2(mx, r: int, c: int):
    out = [[mpq(0)] * c for _ in range(r)]
    for i, row in enumerate(mx):
        for j, v in enumerate(row):
            out[i][j] = v
    return out


def balance_dcm(m: DCModule) -> DCModule:
    if not validate_dcm(m).ok:
        raise InvalidInput("balance_dcm: input is not a valid differential crossed module")
    dg, dh = m.g.dim, m.h.dim
    if dg == dh:
        return m
    if dg < dh:
        g2 = _pad_lie(m.g, dh - dg)
        return DCModule(g2, m.h, _pad2(m.alpha, dh, dh), _pad3(m.act_gh, dh, dh, dh), name=m.name + "~")
    h2 = _pad_lie(m.h, dg - dh)
    return DCModule(m.g, h2, _pad2(m.alpha, dg, dg), _pad3(m.act_gh, dg, dg, dg), name=m.name + "~")


def balance_d2cm(m: D2CModule) -> D2CModule:
    if not validate_d2cm(m).ok:
        raise InvalidInput("balance_d2cm: input is not a valid differential 2-crossed module")
    dg, dh, dl = m.g.dim, m.h.dim, m.l.dim
    if dg == dl:
        return m
    if dg < dl:
        g2 = _pad_lie(m.g, dl - dg)
        return D2CModule(g2, m.h, m.l, _pad2(m.alpha, dl, dh), m.beta, _pad3(m.act_gh, dl, dh, dh),
                         _pad3(m.act_gl, dl, dl, dl), m.peiffer, fine=m.fine, name=m.name + "~")
    l2 = _pad_lie(m.l, dg - dl)
    return D2CModule(m.g, m.h, l2, m.alpha, _pad2(m.beta, dh, dg), m.act_gh, _pad3(m.act_gl, dg, dg, dg),
                     _pad3(m.peiffer, dh, dh, dg), fine=m.fine, name=m.name + "~")


# --- exact linear algebra ---------------------------------------------------

def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


def _int_row(row: Sequence) -> List[int]:
    qs = [to_q(x) for x in row]
    den = 1
    for q in qs:
        den = _lcm(den, int(q.denominator))
    return [int(q * den) for q in qs]


def _primitive(v: List[int]) -> List[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return [x // g for x in v] if g > 1 else v


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[Vec]:
    """Exact nullspace basis by fraction-free Gaussian elimination.

    Pivots are chosen on the first nonzero column, taking the smallest row
    index; each basis vector is scaled to primitive integer form with a
    positive entry in its free column.
    """
    M = [_primitive(_int_row(r)) for r in rows]
    for r in M:
        if len(r) != ncols:
            raise DimensionMismatch("nullspace: row length mismatch")
    M = [r for r in M if any(r)]
    pivots: List[int] = []
    top = 0
    for c in range(ncols):
        piv = next((i for i in range(top, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[top], M[piv] = M[piv], M[top]
        p = M[top]
        for i in range(len(M)):
            if i != top and M[i][c]:
                f = M[i][c]
                M[i] = _primitive([p[c] * a - f * b for a, b in zip(M[i], p)])
        pivots.append(c)
        top += 1
        if top == len(M):
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for r, pc in enumerate(pivots):
            v[pc] = mpq(-M[r][f], M[r][pc])
        iv = _primitive(_int_row(v))
        if iv[f] < 0:
            iv = [-x for x in iv]
        basis.append(tuple(mpq(x) for x in iv))
    return basis


def bareiss_det(mat: Sequence[Sequence]) -> mpq:
    n = len(mat)
    if n == 0:
        return mpq(1)
    den = 1
    rows = []
    for r in mat:
        ir = _int_row(r)
        rows.append(ir)
        qs = [to_q(x) for x in r]
        d = 1
        for q in qs:
            d = _lcm(d, int(q.denominator))
        den *= d
    M = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if M[i][k]), None)
            if sw is None:
                return mpq(0)
            M[k], M[sw] = M[sw], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return mpq(sign * M[n - 1][n - 1], den)


def mat_identity(n: int) -> Mat:
    return [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Mat:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner) if a[i][k]), mpq(0)) for j in range(cols)] for i in range(len(a))]


def _transpose(a: Sequence[Sequence]) -> Mat:
    return [list(r) for r in zip(*a)] if a else []


def is_nilpotent(a: Sequence[Sequence]) -> bool:
    n = len(a)
    p = [list(r) for r in a]
    for _ in range(n):
        if not any(any(r) for r in p):
            return True
        p = mat_mul(p, a)
    return not any(any(r) for r in p)


def nilpotent_exp(a: Sequence[Sequence], sign: int = 1) -> Mat:
    """exp(sign * a) for a nilpotent rational matrix."""
    n = len(a)
    out = mat_identity(n)
    term = mat_identity(n)
    k = 0
    while True:
        k += 1
        term = [[x * sign / k for x in r] for r in mat_mul(term, a)]
        if not any(any(r) for r in term):
            return out
        if k > n + 1:
            raise InvalidInput("matrix is not nilpotent")
        out = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(out, term)]


def _rep_matrix(t: Tensor3, x: Sequence, d: int) -> Mat:
    # (X |>)_{c,b} = sum_a x_a t[a][b][c]
    return [[sum((x[a] * t[a][b][c] for a in range(len(x)) if x[a]), mpq(0)) for b in range(d)] for c in range(d)]


# --- invariant-form solvers -------------------------------------------------

@dataclass
class FormCandidate:
    pair_gh: Optional[Mat] = None
    pair_h: Optional[Mat] = None
    pair_gl: Optional[Mat] = None
    nonsingular: bool = False
    pair_h_nondegenerate: Optional[bool] = None


def _dcm_constraints(m: Module) -> Tuple[List[List[mpq]], int]:
    dg, dh = m.g.dim, m.h.dim
    f, t, al = m.g.struct_const, m.act_gh, m.alpha

    def u(a, b):
        return a * dh + b

    rows = []
    n = dg * dh
    for a1, a2, b in product(range(dg), range(dg), range(dh)):
        r = [mpq(0)] * n
        for c in range(dg):
            r[u(c, b)] += f[a1][a2][c]
        for c in range(dh):
            r[u(a2, c)] += t[a1][b][c]
        rows.append(r)
    for b1, b2 in product(range(dh), repeat=2):
        if b1 >= b2:
            continue
        r = [mpq(0)] * n
        for a in range(dg):
            r[u(a, b2)] += al[a][b1]
            r[u(a, b1)] -= al[a][b2]
        rows.append(r)
    return rows, n


def solve_invariant_forms_dcm(m: DCModule) -> List[FormCandidate]:
    """Basis of pair_gh matrices satisfying (XXY) and (XY)."""
    dg, dh = m.g.dim, m.h.dim
    if dg != dh:
        raise NotBalanced(f"dim g = {dg} != dim h = {dh}")
    rows, n = _dcm_constraints(m)
    out = []
    for v in nullspace(rows, n):
        M = [[v[a * dh + b] for b in range(dh)] for a in range(dg)]
        out.append(FormCandidate(pair_gh=M, nonsingular=bareiss_det(M) != 0))
    return out


def _d2cm_constraints(m: D2CModule) -> Tuple[List[List[mpq]], int]:
    dg, dh, dl = m.g.dim, m.h.dim, m.l.dim
    fg, fh = m.g.struct_const, m.h.struct_const
    th, tl, al, be, pf = m.act_gh, m.act_gl, m.alpha, m.beta, m.peiffer
    nH = dh * dh
    n = nH + dg * dl

    def H(i, j):
        return i * dh + j

    def G(a, z):
        return nH + a * dl + z

    rows = []

    def new():
        return [mpq(0)] * n

    for i, j in product(range(dh), repeat=2):
        if i <= j:
            r = new()
            r[H(i, j)] += 1
            r[H(j, i)] += 1
            rows.append(r)
    # <[Y, Y1], Y2> + <Y1, [Y, Y2]> = 0
    for y, y1, y2 in product(range(dh), repeat=3):
        r = new()
        for c in range(dh):
            r[H(c, y2)] += fh[y][y1][c]
            r[H(y1, c)] += fh[y][y2][c]
        rows.append(r)
    # (YX): <Y, X |> Y1> - <Y1, X |> Y> = 0
    for x, y, y1 in product(range(dg), range(dh), range(dh)):
        r = new()
        for c in range(dh):
            r[H(y, c)] += th[x][y1][c]
            r[H(y1, c)] -= th[x][y][c]
        rows.append(r)
    # (XZ)
    for x1, x2, z in product(range(dg), range(dg), range(dl)):
        r = new()
        for c in range(dg):
            r[G(c, z)] += fg[x1][x2][c]
        for c in range(dl):
            r[G(x2, c)] += tl[x1][z][c]
        rows.append(r)
    # (YZ): <alpha(Y), Z> + <beta(Z), Y>_h = 0
    for y, z in product(range(dh), range(dl)):
        r = new()
        for a in range(dg):
            r[G(a, z)] += al[a][y]
        for c in range(dh):
            r[H(c, y)] += be[c][z]
        rows.append(r)
    # (XYY): <X, {Y1, Y2}> - 1/2 <Y2, X |> Y1>_h = 0
    half = mpq(1, 2)
    for x, y1, y2 in product(range(dg), range(dh), range(dh)):
        r = new()
        for c in range(dl):
            r[G(x, c)] += pf[y1][y2][c]
        for c in range(dh):
            r[H(y2, c)] -= half * th[x][y1][c]
        rows.append(r)
    return [r for r in rows if any(r)], n


def solve_invariant_forms_d2cm(m: D2CModule) -> List[FormCandidate]:
    """Basis of (pair_h, pair_gl) pairs satisfying the invariance conditions.

    Requires dim l = dim g; the degenerate case l = 0 is accepted and yields
    pair_h solutions with an empty pair_gl.
    """
    dg, dh, dl = m.g.dim, m.h.dim, m.l.dim
    if dl != dg and dl != 0:
        raise NotBalanced(f"dim g = {dg} != dim l = {dl}")
    rows, n = _d2cm_constraints(m)
    out = []
    for v in nullspace(rows, n):
        Hm = [[v[i * dh + j] for j in range(dh)] for i in range(dh)]
        Gm = [[v[dh * dh + a * dl + z] for z in range(dl)] for a in range(dg)]
        out.append(FormCandidate(
            pair_h=Hm, pair_gl=Gm,
            nonsingular=(dl == dg and bareiss_det(Gm) != 0),
            pair_h_nondegenerate=bareiss_det(Hm) != 0,
        ))
    return out


# --- pairing checks ---------------------------------------------------------

def _nilpotent_samples(m: Module) -> List[Vec]:
    """Constant g elements whose adjoint and action operators are all nilpotent."""
    dg = m.g.dim
    cands = [_basis(dg, i) for i in range(dg)]
    cands += [_add(_basis(dg, i), _basis(dg, j)) for i in range(dg) for j in range(i + 1, dg)]
    out = []
    for x in cands:
        mats = [m.g.ad_matrix(x), _rep_matrix(m.act_gh, x, m.h.dim)]
        if m.l is not None:
            mats.append(_rep_matrix(m.act_gl, x, m.l.dim))
        if all(is_nilpotent(a) for a in mats) and any(any(r) for a in mats for r in a):
            out.append(x)
    return out


def _bilinear(M, u, v) -> mpq:
    return sum((u[i] * M[i][j] * v[j] for i in range(len(u)) if u[i] for j in range(len(v)) if v[j]), mpq(0))


def check_pairing(m: Module, p: PairingData) -> ValidationReport:
    """Exhaustive basis-tuple check of every applicable invariance axiom."""
    p = p.normalized(m)
    rep = ValidationReport()
    g, h = m.g, m.h
    dg, dh = g.dim, h.dim
    X = [_basis(dg, i) for i in range(dg)]
    Y = [_basis(dh, i) for i in range(dh)]
    l = m.l
    dl = l.dim if l is not None else 0
    Z = [_basis(dl, i) for i in range(dl)]
    if p.pair_g is not None:
        Mg = p.pair_g
        for i, j in product(range(dg), repeat=2):
            rep._check("sym_g", (i, j), (Mg[i][j] - Mg[j][i],))
        for i, j, k in product(range(dg), repeat=3):
            rep._check("Sg", (i, j, k), (_bilinear(Mg, g.bracket(X[i], X[j]), X[k]) + _bilinear(Mg, X[j], g.bracket(X[i], X[k])),))
        rep.notes["pair_g_nonsingular"] = bareiss_det(Mg) != 0
    if p.pair_gh is not None:
        M = p.pair_gh
        for i, j, k in product(range(dg), range(dg), range(dh)):
            rep._check("XXY", (i, j, k), (_bilinear(M, g.bracket(X[i], X[j]), Y[k]) + _bilinear(M, X[j], m.act_h(X[i], Y[k])),))
        for i, j in product(range(dh), repeat=2):
            rep._check("XY", (i, j), (_bilinear(M, m.alpha_of(Y[i]), Y[j]) - _bilinear(M, m.alpha_of(Y[j]), Y[i]),))
        rep.notes["pair_gh_nonsingular"] = dg == dh and bareiss_det(M) != 0
    if p.pair_h is not None:
        Hm = p.pair_h
        for i, j in product(range(dh), repeat=2):
            rep._check("antisym_h", (i, j), (Hm[i][j] + Hm[j][i],))
        for i, j, k in product(range(dh), repeat=3):
            rep._check("h_invariance", (i, j, k), (_bilinear(Hm, h.bracket(Y[i], Y[j]), Y[k]) + _bilinear(Hm, Y[j], h.bracket(Y[i], Y[k])),))
        for x, i, j in product(range(dg), range(dh), range(dh)):
            rep._check("YX", (x, i, j), (_bilinear(Hm, Y[i], m.act_h(X[x], Y[j])) - _bilinear(Hm, Y[j], m.act_h(X[x], Y[i])),))
        rep.notes["pair_h_nondegenerate"] = bareiss_det(Hm) != 0
    if p.pair_gl is not None and l is not None:
        G = p.pair_gl
        for i, j, k in product(range(dg), range(dg), range(dl)):
            rep._check("XZ", (i, j, k), (_bilinear(G, g.bracket(X[i], X[j]), Z[k]) + _bilinear(G, X[j], m.act_l(X[i], Z[k])),))
        if p.pair_h is not None:
            Hm = p.pair_h
            for i, k in product(range(dh), range(dl)):
                rep._check("YZ", (i, k), (_bilinear(G, m.alpha_of(Y[i]), Z[k]) + _bilinear(Hm, m.beta_of(Z[k]), Y[i]),))
            for x, i, j in product(range(dg), range(dh), range(dh)):
                rep._check("XYY", (x, i, j), (_bilinear(G, X[x], m.lift(Y[i], Y[j])) - _bilinear(Hm, Y[j], m.act_h(X[x], Y[i])) / 2,))
        rep.notes["pair_gl_nonsingular"] = dg == dl and bareiss_det(G) != 0
    # exponential invariance for constant nilpotent samples
    samples = _nilpotent_samples(m)
    rep.notes["gin_samples"] = len(samples)
    for s, x in enumerate(samples):
        Ad = nilpotent_exp(g.ad_matrix(x))
        Gh = nilpotent_exp(_rep_matrix(m.act_gh, x, dh))
        if p.pair_g is not None:
            _check_mat(rep, "gin_g", s, mat_mul(mat_mul(_transpose(Ad), p.pair_g), Ad), p.pair_g)
        if p.pair_gh is not None:
            _check_mat(rep, "gin_gh", s, mat_mul(mat_mul(_transpose(Ad), p.pair_gh), Gh), p.pair_gh)
        if p.pair_h is not None:
            _check_mat(rep, "gin_h", s, mat_mul(mat_mul(_transpose(Gh), p.pair_h), Gh), p.pair_h)
        if p.pair_gl is not None and l is not None and dl:
            Gl = nilpotent_exp(_rep_matrix(m.act_gl, x, dl))
            _check_mat(rep, "gin_gl", s, mat_mul(mat_mul(_transpose(Ad), p.pair_gl), Gl), p.pair_gl)
    return rep


def _check_mat(rep: ValidationReport, axiom: str, s: int, a, b) -> None:
    res = tuple(x - y for ra, rb in zip(a, b) for x, y in zip(ra, rb))
    rep._check(axiom, (s,), res)


# --- example catalog --------------------------------------------------------

def _struct(d: int, rels: Dict[Tuple[int, int], Dict[int, Any]]):
    f = [[[mpq(0)] * d for _ in range(d)] for _ in range(d)]
    for (a, b), out in rels.items():
        for c, v in out.items():
            f[a][b][c] += to_q(v)
            f[b][a][c] -= to_q(v)
    return f


def lie_abelian(d: int) -> LieAlgebraData:
    return LieAlgebraData(d, None, f"abelian{d}")


def lie_so3() -> LieAlgebraData:
    """Cross-product algebra: [e1, e2] = e3 and cyclic."""
    return LieAlgebraData(3, _struct(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}), "so3")


def lie_oscillator() -> LieAlgebraData:
    """Basis (e, p, q, z): [e, p] = p, [e, q] = -q, [p, q] = z."""
    return LieAlgebraData(4, _struct(4, {(0, 1): {1: 1}, (0, 2): {2: -1}, (1, 2): {3: 1}}), "osc")


def lie_heisenberg() -> LieAlgebraData:
    """Basis (x, w, a): [x, w] = a."""
    return LieAlgebraData(3, _struct(3, {(0, 1): {2: 1}}), "heis")


def adjoint_dcm(L: LieAlgebraData) -> DCModule:
    d = L.dim
    return DCModule(L, L, mat_identity(d), L.struct_const, name=f"adjoint_{L.name}")


def coadjoint_dcm(L: LieAlgebraData) -> DCModule:
    """h = g* (abelian), alpha = 0, coadjoint action."""
    d = L.dim
    f = L.struct_const
    t = [[[-f[a][c][b] for c in range(d)] for b in range(d)] for a in range(d)]
    return DCModule(L, lie_abelian(d), None, t, name=f"coadjoint_{L.name}")


def l0_extension(m: DCModule) -> D2CModule:
    return D2CModule(m.g, m.h, lie_abelian(0), m.alpha, None, m.act_gh, None, None, fine=True, name=m.name + "_l0")


def abelian_complex(dg: int = 2, dh: int = 2, dl: int = 2) -> D2CModule:
    return D2CModule(lie_abelian(dg), lie_abelian(dh), lie_abelian(dl), name=f"abelian_complex_{dg}{dh}{dl}")


def nilpotent_d2cm(c: int = 1, d: int = 2) -> D2CModule:
    """Nilpotent fine 2-crossed module with dims 3/2/3.

    g = heis (x, w, a), h = span(y1, y2) abelian, l = span(z1, z2, z3) abelian;
    alpha(y2) = a, beta(z1) = y1; x |> y2 = c y1, w |> y2 = d y1;
    x |> z1 = z3, w |> z1 = -z2; {y2, y2} = -(c/2) z2 - (d/2) z3.
    """
    g, h, l = lie_heisenberg(), lie_abelian(2), lie_abelian(3)
    alpha = [[0, 0], [0, 0], [0, 1]]
    beta = [[1, 0, 0], [0, 0, 0]]
    act_gh = _pad3((), 3, 2, 2)
    act_gh[0][1][0] = mpq(c)
    act_gh[1][1][0] = mpq(d)
    act_gl = _pad3((), 3, 3, 3)
    act_gl[0][0][2] = mpq(1)
    act_gl[1][0][1] = mpq(-1)
    pf = _pad3((), 2, 2, 3)
    pf[1][1][1] = mpq(-c, 2)
    pf[1][1][2] = mpq(-d, 2)
    return D2CModule(g, h, l, alpha, beta, act_gh, act_gl, pf, fine=True, name="nilpotent")


def adjoint_d2cm(L: LieAlgebraData) -> D2CModule:
    """l = h = g = L, beta = id, alpha = 0, adjoint actions, {Y1, Y2} = [Y1, Y2]."""
    d = L.dim
    return D2CModule(L, L, L, None, mat_identity(d), L.struct_const, L.struct_const, L.struct_const,
                     name=f"adjoint2_{L.name}")


@dataclass
class Example:
    name: str
    module: Module
    pairing: PairingData
    nil_gens: Tuple[int, ...]
    description: str


def _catalog() -> Dict[str, Example]:
    osc = lie_oscillator()
    osc_metric = [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    so3 = lie_so3()
    heis = lie_heisenberg()
    ex = [
        Example("adjoint", adjoint_dcm(so3), PairingData(pair_g=mat_identity(3), pair_gh=mat_identity(3)), (),
                "adjoint crossed module over the cross-product algebra"),
        Example("adjoint_osc", adjoint_dcm(osc), PairingData(pair_g=osc_metric, pair_gh=osc_metric,
                pair_h=[[0] * 4 for _ in range(4)], pair_gl=[[] for _ in range(4)]), (1, 2, 3),
                "adjoint crossed module over the oscillator algebra"),
        Example("coadjoint", coadjoint_dcm(heis), PairingData(pair_gh=mat_identity(3)), (0, 1, 2),
                "alpha = 0 module: Heisenberg algebra acting on its dual"),
        Example("l0", l0_extension(adjoint_dcm(osc)), PairingData(pair_g=osc_metric, pair_gh=osc_metric,
                pair_h=[[0] * 4 for _ in range(4)], pair_gl=[[] for _ in range(4)]), (1, 2, 3),
                "l = 0 reduction of the oscillator adjoint module"),
        Example("abelian_complex", abelian_complex(), PairingData(pair_g=mat_identity(2), pair_gh=mat_identity(2),
                pair_h=[[0, 1], [-1, 0]], pair_gl=mat_identity(2)), (0, 1),
                "abelian three-term complex with zero maps"),
        Example("nilpotent", nilpotent_d2cm(), PairingData(pair_h=[[0, 1], [-1, 0]],
                pair_gl=[[0, 1, 0], [0, 0, 1], [-1, 0, 0]]), (0, 1, 2),
                "nilpotent fine 2-crossed module, dims 3/2/3"),
        Example("adjoint2_osc", adjoint_d2cm(osc), PairingData(), (1, 2, 3),
                "l = h = g = oscillator, beta = id, lifting = bracket"),
    ]
    return {e.name: e for e in ex}


EXAMPLES: Dict[str, Example] = _catalog()


def get_example(name: str) -> Example:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise InvalidInput(f"unknown example module {name!r}; choose from {sorted(EXAMPLES)}") from None


# --- JSON documents ---------------------------------------------------------

def _q(x, path: str) -> mpq:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ParseError(path, f"expected integer or 'p/q' string, got {x!r}")
    try:
        return to_q(x)
    except (ValueError, ZeroDivisionError):
        raise ParseError(path, f"bad rational {x!r}") from None


def _arr(x, shape: Tuple[int, ...], path: str):
    if not shape:
        return _q(x, path)
    if not isinstance(x, list) or len(x) != shape[0]:
        raise ParseError(path, f"expected array of length {shape[0]}")
    return [_arr(v, shape[1:], f"{path}[{i}]") for i, v in enumerate(x)]


def _alg(doc: dict, key: str) -> LieAlgebraData:
    if key not in doc or not isinstance(doc[key], dict):
        raise ParseError(f"$.{key}", "missing algebra object")
    a = doc[key]
    dim = a.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise ParseError(f"$.{key}.dim", "expected non-negative integer")
    s = a.get("struct")
    st = _arr(s, (dim, dim, dim), f"$.{key}.struct") if s is not None else None
    return LieAlgebraData(dim, st, a.get("name", key))


def module_from_dict(doc: dict) -> Tuple[Module, PairingData, Tuple[int, ...]]:
    """Parse a module document; returns (module, pairing, nilpotent generator indices)."""
    if not isinstance(doc, dict):
        raise ParseError("$", "expected an object")
    g, h = _alg(doc, "g"), _alg(doc, "h")
    dg, dh = g.dim, h.dim
    alpha = _arr(doc["alpha"], (dg, dh), "$.alpha") if "alpha" in doc else None
    act_gh = _arr(doc["act_gh"], (dg, dh, dh), "$.act_gh") if "act_gh" in doc else None
    name = str(doc.get("name", "document"))
    if "l" in doc:
        l = _alg(doc, "l")
        dl = l.dim
        beta = _arr(doc["beta"], (dh, dl), "$.beta") if "beta" in doc else None
        act_gl = _arr(doc["act_gl"], (dg, dl, dl), "$.act_gl") if "act_gl" in doc else None
        pf = _arr(doc["peiffer"], (dh, dh, dl), "$.peiffer") if "peiffer" in doc else None
        m: Module = D2CModule(g, h, l, alpha, beta, act_gh, act_gl, pf, fine=bool(doc.get("fine", False)), name=name)
    else:
        for k in ("beta", "act_gl", "peiffer"):
            if k in doc:
                raise ParseError(f"$.{k}", "given without an l algebra")
        dl = 0
        m = DCModule(g, h, alpha, act_gh, name=name)
    pd = doc.get("pairing", {}) or {}
    if not isinstance(pd, dict):
        raise ParseError("$.pairing", "expected an object")
    shapes = {"pair_g": (dg, dg), "pair_gh": (dg, dh), "pair_h": (dh, dh), "pair_gl": (dg, dl)}
    kw = {}
    for k, v in pd.items():
        if k not in shapes:
            raise ParseError(f"$.pairing.{k}", "unknown pairing")
        kw[k] = _arr(v, shapes[k], f"$.pairing.{k}")
    nil = doc.get("nilpotent_generators", [])
    if not isinstance(nil, list) or any(not isinstance(i, int) or not 0 <= i < dg for i in nil):
        raise ParseError("$.nilpotent_generators", "expected list of g basis indices")
    return m, PairingData(**kw), tuple(nil)


def load_module(src: Union[str, Path]) -> Tuple[Module, PairingData, Tuple[int, ...]]:
    """Load a built-in example by name or a JSON document by path."""
    s = str(src)
    if s in EXAMPLES:
        e = EXAMPLES[s]
        return e.module, e.pairing, e.nil_gens
    path = Path(s)
    if not path.exists():
        raise InvalidInput(f"no example or file named {s!r}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"invalid JSON in {s}: {exc.msg} at line {exc.lineno}") from None
    return module_from_dict(doc)


def _enc(x):
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    q = to_q(x)
    return int(q) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def module_to_dict(m: Module, p: Optional[PairingData] = None, nil: Sequence[int] = ()) -> dict:
    doc: Dict[str, Any] = {"name": m.name}
    for k in ("g", "h") + (("l",) if m.l is not None else ()):
        a = getattr(m, k)
        doc[k] = {"dim": a.dim, "struct": _enc(a.struct_const)}
    doc["alpha"] = _enc(m.alpha)
    doc["act_gh"] = _enc(m.act_gh)
    if isinstance(m, D2CModule):
        doc["beta"] = _enc(m.beta)
        doc["act_gl"] = _enc(m.act_gl)
        doc["peiffer"] = _enc(m.peiffer)
        doc["fine"] = m.fine
    if p is not None:
        pd = {k: _enc(v) for k, v in vars(p).items() if v is not None}
        if pd:
            doc["pairing"] = pd
    if nil:
        doc["nilpotent_generators"] = list(nil)
    return doc


# --- mutations ----------------------------------------------------------------

def _tensor_fields(m: Module) -> List[str]:
    out = ["g.struct", "h.struct", "alpha", "act_gh"]
    if isinstance(m, D2CModule):
        out += ["l.struct", "beta", "act_gl", "peiffer"]
    return out


def _get_tensor(m: Module, name: str):
    if name.endswith(".struct"):
        return getattr(m, name[0]).struct_const
    return getattr(m, name)


def _listify(t):
    return [_listify(x) for x in t] if isinstance(t, (tuple, list)) else t


def _entries(t, prefix=()):
    if isinstance(t, (tuple, list)):
        for i, x in enumerate(t):
            yield from _entries(x, prefix + (i,))
    else:
        yield prefix


def mutation_sites(m: Module) -> List[Tuple[str, Tuple[int, ...]]]:
    """All (tensor, index) pairs that a single-entry mutation can touch."""
    return [(f, idx) for f in _tensor_fields(m) for idx in _entries(_get_tensor(m, f)) if idx]


def mutate_entry(m: Module, field_name: str, idx: Tuple[int, ...], delta=1) -> Module:
    """Copy of ``m`` with one tensor entry shifted by ``delta``."""
    t = _listify(_get_tensor(m, field_name))
    ref = t
    for i in idx[:-1]:
        ref = ref[i]
    ref[idx[-1]] = mpq(ref[idx[-1]]) + mpq(delta)
    kw: Dict[str, Any] = {}
    if field_name.endswith(".struct"):
        k = field_name[0]
        kw[k] = LieAlgebraData(getattr(m, k).dim, t, getattr(m, k).name)
    else:
        kw[field_name] = t
    if isinstance(m, D2CModule):
        base = dict(g=m.g, h=m.h, l=m.l, alpha=m.alpha, beta=m.beta, act_gh=m.act_gh, act_gl=m.act_gl,
                    peiffer=m.peiffer, fine=m.fine, name=m.name + "*")
        base.update(kw)
        return D2CModule(**base)
    base = dict(g=m.g, h=m.h, alpha=m.alpha, act_gh=m.act_gh, name=m.name + "*")
    base.update(kw)
    return DCModule(**base)


def random_mutation(m: Module, seed) -> Tuple[Module, str, Tuple[int, ...], int]:
    """Seeded single-entry mutation; returns (module, tensor, index, delta)."""
    rng = random.Random(f"mutate/{seed}")
    sites = mutation_sites(m)
    if not sites:
        raise InvalidInput("module has no tensor entries to mutate")
    f, idx = rng.choice(sites)
    delta = rng.choice((-2, -1, 1, 2))
    return mutate_entry(m, f, idx, delta), f, idx, delta
