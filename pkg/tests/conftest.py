import pytest

from hcs.algebra import EXAMPLES

# sparse random forms keep the randomized sweeps fast
KW = dict(density=0.5, max_terms=1, max_poly_degree=2, coeff_bound=3)

SHIPPED = ("adjoint", "coadjoint", "l0", "abelian_complex", "nilpotent")
LEVEL2 = ("adjoint_osc", "coadjoint")
LEVEL3 = ("nilpotent", "abelian_complex", "l0")


def all_zero(r):
    if isinstance(r, (tuple, list)):
        return all(all_zero(x) for x in r)
    return r.is_zero()


@pytest.fixture(params=SHIPPED)
def shipped(request):
    return EXAMPLES[request.param]


# acceptance lines are collected here and printed once at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
