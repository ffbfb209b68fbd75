"""Independent oracles shared by the unit tests and the acceptance suite.

Nothing here calls into the engine's own axiom, solver or form code.
"""

import random
from itertools import product

import sympy as sp

from hcs.algebra import D2CModule


# axioms evaluated on random integer vectors

def bil(t, u, v):
    out = [0] * len(t[0][0]) if t and t[0] else []
    for a, x in enumerate(u):
        if x:
            for b, y in enumerate(v):
                if y:
                    for c, z in enumerate(t[a][b]):
                        out[c] += x * y * z
    return out


def lin(M, v):
    return [sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M))]


def add(*vs):
    return [sum(xs) for xs in zip(*vs)]


def neg(v):
    return [-x for x in v]


def oracle_violations(m, samples=4, seed=0):
    """Names of axioms broken on random integer vectors."""
    rng = random.Random(seed)
    bad = set()
    dg, dh = m.g.dim, m.h.dim
    dl = m.l.dim if isinstance(m, D2CModule) else 0

    def vec(d):
        return [rng.randint(-5, 5) for _ in range(d)]

    def chk(name, v):
        if any(v):
            bad.add(name)

    fg, fh = m.g.struct_const, m.h.struct_const
    bg = lambda u, v: bil(fg, u, v)  # noqa: E731
    bh = lambda u, v: bil(fh, u, v)  # noqa: E731
    act = lambda x, y: bil(m.act_gh, x, y)  # noqa: E731
    al = lambda y: lin(m.alpha, y)  # noqa: E731
    for _ in range(samples):
        X1, X2, X3 = vec(dg), vec(dg), vec(dg)
        Y1, Y2, Y3 = vec(dh), vec(dh), vec(dh)
        for name, br, a, b, c in (("g", bg, X1, X2, X3), ("h", bh, Y1, Y2, Y3)):
            chk(name, add(br(a, b), br(b, a)))
            chk(name, add(br(a, br(b, c)), br(b, br(c, a)), br(c, br(a, b))))
        chk("act", add(act(X1, act(X2, Y1)), neg(act(X2, act(X1, Y1))), neg(act(bg(X1, X2), Y1))))
        chk("act", add(act(X1, bh(Y1, Y2)), neg(bh(act(X1, Y1), Y2)), neg(bh(Y1, act(X1, Y2)))))
        chk("equiv", add(al(act(X1, Y1)), neg(bg(X1, al(Y1)))))
        if not isinstance(m, D2CModule) or m.fine:
            chk("peiffer", add(act(al(Y1), Y2), neg(bh(Y1, Y2))))
        if not isinstance(m, D2CModule):
            continue
        fl = m.l.struct_const
        bl = lambda u, v: bil(fl, u, v)  # noqa: E731
        actl = lambda x, z: bil(m.act_gl, x, z)  # noqa: E731
        be = lambda z: lin(m.beta, z)  # noqa: E731
        lift = lambda y, y2: bil(m.peiffer, y, y2)  # noqa: E731
        Z1, Z2, Z3 = vec(dl), vec(dl), vec(dl)
        chk("l", add(bl(Z1, Z2), bl(Z2, Z1)))
        chk("l", add(bl(Z1, bl(Z2, Z3)), bl(Z2, bl(Z3, Z1)), bl(Z3, bl(Z1, Z2))))
        chk("actl", add(actl(X1, actl(X2, Z1)), neg(actl(X2, actl(X1, Z1))), neg(actl(bg(X1, X2), Z1))))
        chk("actl", add(actl(X1, bl(Z1, Z2)), neg(bl(actl(X1, Z1), Z2)), neg(bl(Z1, actl(X1, Z2)))))
        chk("complex", al(be(Z1)))
        chk("beta_equiv", add(be(actl(X1, Z1)), neg(act(X1, be(Z1)))))
        chk("beta_hom", add(be(bl(Z1, Z2)), neg(bh(be(Z1), be(Z2)))))
        chk("lift_equiv", add(actl(X1, lift(Y1, Y2)), neg(lift(act(X1, Y1), Y2)), neg(lift(Y1, act(X1, Y2)))))
        chk("2", add(be(lift(Y1, Y2)), neg(bh(Y1, Y2)), act(al(Y1), Y2)))
        chk("3", add(bl(Z1, Z2), neg(lift(be(Z1), be(Z2)))))
        chk("4", add(lift(bh(Y1, Y2), Y3), neg(actl(al(Y1), lift(Y2, Y3))), neg(lift(Y1, bh(Y2, Y3))),
                     actl(al(Y2), lift(Y1, Y3)), lift(Y2, bh(Y1, Y3))))
        chk("5", add(lift(Y1, bh(Y2, Y3)), neg(lift(be(lift(Y1, Y2)), Y3)), lift(be(lift(Y1, Y3)), Y2)))
        chk("6", add(lift(be(Z1), Y1), lift(Y1, be(Z1)), actl(al(Y1), Z1)))
        if m.fine:
            chk("fine", add(actl(al(Y1), Z1), lift(be(Z1), Y1)))
    return bad


def oracle_pair_gh_space(m):
    dg, dh = m.g.dim, m.h.dim
    P = sp.Matrix(dg, dh, lambda a, b: sp.Symbol(f"p_{a}_{b}"))
    eqs = []
    for a1, a2, b in product(range(dg), range(dg), range(dh)):
        br = sum(m.g.struct_const[a1][a2][c] * P[c, b] for c in range(dg))
        ac = sum(m.act_gh[a1][b][c] * P[a2, c] for c in range(dh))
        eqs.append(br + ac)
    A = sp.Matrix(dg, dh, lambda i, j: m.alpha[i][j])
    S = A.T * P
    eqs += [S[i, j] - S[j, i] for i in range(dh) for j in range(dh)]
    syms = list(P)
    M, _ = sp.linear_eq_to_matrix([sp.nsimplify(e) for e in eqs], syms)
    return M.nullspace()


def sympy_pinned_action():
    # independent: build <A, dB> + <dA - B, B> with sympy differential forms on R^4
    x = sp.symbols("x1:5")

    def sign(seq):
        s = 1
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] > seq[j]:
                    s = -s
        return s

    def d(f):
        out = {}
        for idx, c in f.items():
            for v in range(1, 5):
                if v not in idx:
                    k = tuple(sorted((v,) + idx))
                    out[k] = out.get(k, 0) + sign((v,) + idx) * sp.diff(c, x[v - 1])
        return out

    def w(f, g):
        out = {}
        for i, a in f.items():
            for j, b in g.items():
                if not set(i) & set(j):
                    k = tuple(sorted(i + j))
                    out[k] = out.get(k, 0) + sign(i + j) * a * b
        return out

    def plus(*fs):
        out = {}
        for f in fs:
            for k, v in f.items():
                out[k] = out.get(k, 0) + v
        return out

    A = {(1,): x[3]}
    B = {(2, 3): x[0] * x[1]}
    minusB = {k: -v for k, v in B.items()}
    L = plus(w(A, d(B)), w(plus(d(A), minusB), B))
    top = sp.expand(L.get((1, 2, 3, 4), 0))
    return sp.integrate(top, *[(xi, 0, 1) for xi in x])
