import pytest
from gmpy2 import mpq

from hcs.algebra import EXAMPLES, PairingData
from hcs.avforms import (
    EvenDegreeSquare,
    MissingPairing,
    SlotMismatch,
    av_add,
    av_alpha,
    av_beta,
    av_d,
    av_half_bracket,
    av_random,
    av_scale,
    av_wedge_action,
    av_wedge_bracket,
    av_wedge_peiffer,
    pair_forms,
)
from hcs.poly_forms import sf_add, sf_scale, sf_wedge, sf_zero

from conftest import KW

ADJ = EXAMPLES["adjoint_osc"]
NIL = EXAMPLES["nilpotent"]


def comp_bracket(f, A, B, dim):
    # component formula written out directly from the structure constants
    out = [sf_zero(A.n_vars, A.degree + B.degree) for _ in range(dim)]
    for a in range(len(A.comps)):
        for b in range(len(B.comps)):
            for c in range(dim):
                if f[a][b][c]:
                    out[c] = sf_add(out[c], sf_scale(sf_wedge(A.comps[a], B.comps[b]), f[a][b][c]))
    return out


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 1), (0, 3)])
def test_bracket_componentwise(seed, p, q):
    m = ADJ.module
    A = av_random(f"{seed}a", "g", 4, 5, p, **KW)
    B = av_random(f"{seed}b", "g", 4, 5, q, **KW)
    assert list(av_wedge_bracket(m, A, B).comps) == comp_bracket(m.g.struct_const, A, B, 4)
    # graded antisymmetry
    assert av_wedge_bracket(m, A, B) == av_scale(av_wedge_bracket(m, B, A), -((-1) ** (p * q)))


@pytest.mark.parametrize("seed", range(10))
def test_action_and_peiffer_componentwise(seed):
    m = NIL.module
    A = av_random(f"{seed}a", "g", 3, 5, 1, **KW)
    B = av_random(f"{seed}b", "h", 2, 5, 2, **KW)
    B2 = av_random(f"{seed}c", "h", 2, 5, 1, **KW)
    assert list(av_wedge_action(m, A, B).comps) == comp_bracket(m.act_gh, A, B, 2)
    assert list(av_wedge_peiffer(m, B, B2).comps) == comp_bracket(m.peiffer, B, B2, 3)


@pytest.mark.parametrize("seed", range(10))
def test_pairing_identities(seed):
    m, P = ADJ.module, ADJ.pairing
    A = av_random(f"{seed}a", "g", 4, 6, 1, **KW)
    B = av_random(f"{seed}b", "h", 4, 6, 2, **KW)
    # <A, A |> B> = <A [,] A, B>
    lhs = pair_forms("gh", A, av_wedge_action(m, A, B), P)
    assert lhs == pair_forms("gh", av_wedge_bracket(m, A, A), B, P)
    # alpha is equivariant at form level
    assert av_alpha(m, av_wedge_action(m, A, B)) == av_wedge_bracket(m, A, av_alpha(m, B))


@pytest.mark.parametrize("seed", range(10))
def test_d_is_a_derivation_of_the_bracket(seed):
    m = ADJ.module
    A = av_random(f"{seed}a", "g", 4, 5, 1, **KW)
    B = av_random(f"{seed}b", "g", 4, 5, 2, **KW)
    lhs = av_d(av_wedge_bracket(m, A, B))
    rhs = av_add(av_wedge_bracket(m, av_d(A), B), av_scale(av_wedge_bracket(m, A, av_d(B)), -1))
    assert lhs == rhs


def test_half_bracket():
    m = ADJ.module
    A = av_random("h", "g", 4, 5, 1, **KW)
    assert av_half_bracket(m, A) == av_scale(av_wedge_bracket(m, A, A), mpq(1, 2))
    with pytest.raises(EvenDegreeSquare):
        av_half_bracket(m, av_random("h2", "g", 4, 5, 2, **KW))


def test_complex_property():
    m = NIL.module
    C = av_random("c", "l", 3, 5, 3, **KW)
    assert av_alpha(m, av_beta(m, C)).is_zero()


def test_slot_and_pairing_errors():
    m = ADJ.module
    A = av_random("a", "g", 4, 5, 1, **KW)
    B = av_random("b", "h", 4, 5, 2, **KW)
    with pytest.raises(SlotMismatch):
        av_add(A, B)
    with pytest.raises(SlotMismatch):
        pair_forms("gh", B, A, ADJ.pairing)
    with pytest.raises(MissingPairing):
        pair_forms("h", B, B, PairingData())
    with pytest.raises(SlotMismatch):
        av_wedge_action(m, B, A)


def test_zero_for_out_of_range_degree():
    A = av_random("a", "g", 4, 3, 2, **KW)
    B = av_random("b", "g", 4, 3, 2, **KW)
    assert av_wedge_bracket(ADJ.module, A, B).is_zero()
