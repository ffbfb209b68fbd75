"""Command-line front end: `hcs <validate|identities|chern|invariant-forms>`.

Reports are JSON documents with rationals as "p/q" strings.  Records are
sorted by (check, trial) so the output is byte-identical for a fixed config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from gmpy2 import mpq

from . import __version__
from .algebra import (
    AlgebraError,
    D2CModule,
    DCModule,
    LieAlgebraData,
    PairingData,
    ParseError,
    balance_d2cm,
    balance_dcm,
    check_pairing,
    load_module,
    random_mutation,
    solve_invariant_forms_d2cm,
    solve_invariant_forms_dcm,
    validate_d2cm,
    validate_dcm,
)
from .avforms import AVForm, av_from, av_random
from .chern import (
    ActionConfig,
    action_value,
    chern_weil1,
    chern_weil2,
    chern_weil3,
    cs_form,
    dP_check,
    dP_check2,
    dP_check3,
    eom_2cs,
    eom_3cs,
    gauge_invariance_check2,
    gauge_invariance_check3,
    lagr_2cs,
    lagr_3cs,
    q_2cs,
    q_3cs,
    transgression1,
    transgression2,
    transgression3,
    transgression_weighted1,
    transgression_weighted2,
    transgression_weighted3,
    variation_triviality_check,
)
from .gauge import (
    Conn2,
    bianchi2_residual,
    bianchi3_residual,
    conn2_random,
    conn2_zero,
    conn3_random,
    conn3_zero,
    curvature_transform_check2,
    curvature_transform_check3,
    gauge2,
    gauge3,
    gbianchi_residual,
    gcurv_check1,
    gcurv_check2,
    params_random,
)
from .generalized import GenForm1, GenForm2, g1_d, g1_leibniz_residual, g2_d, g2_leibniz_residual, gen1_random, gen2_random
from .poly_forms import ScalarForm, sf_from_terms, sf_sub

COMMANDS = ("validate", "identities", "chern", "invariant-forms")


@dataclass(frozen=True)
class RunConfig:
    command: str
    module: str
    n_vars: int = 6
    seed: int = 0
    trials: int = 3
    max_poly_degree: int = 2
    coeff_bound: int = 3
    theory: Optional[str] = None
    mutate: bool = False
    out: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.n_vars <= 10:
            raise ValueError("n_vars must be in 1..10")

    def form_kw(self) -> Dict[str, Any]:
        return dict(max_poly_degree=self.max_poly_degree, coeff_bound=self.coeff_bound, density=0.5, max_terms=1)


def qstr(x) -> str:
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


# --- residual summaries -----------------------------------------------------------

def _scalar_coeffs(f: ScalarForm) -> Iterable[mpq]:
    for poly in f._c.values():
        yield from poly.values()


def _coeffs(r) -> Iterable[mpq]:
    if r is None:
        return
    if isinstance(r, ScalarForm):
        yield from _scalar_coeffs(r)
    elif isinstance(r, AVForm):
        for c in r.comps:
            yield from _scalar_coeffs(c)
    elif isinstance(r, (GenForm1, GenForm2)):
        for p in r.parts():
            yield from _coeffs(p)
    elif isinstance(r, (tuple, list)):
        for x in r:
            yield from _coeffs(x)
    else:
        raise TypeError(f"cannot summarize {type(r).__name__}")


def summarize(r) -> Dict[str, Any]:
    cs = [c for c in _coeffs(r) if c]
    if not cs:
        return {"terms": 0}
    return {"terms": len(cs), "max_abs_coeff": qstr(max(abs(c) for c in cs))}


class Recorder:
    def __init__(self, cfg: RunConfig, module_name: str):
        self.cfg = cfg
        self.module_name = module_name
        self.records: List[Dict[str, Any]] = []

    def _digest(self, check: str, trial: int) -> str:
        c = self.cfg
        key = f"{self.module_name}|{check}|{trial}|{c.seed}|{c.n_vars}|{c.max_poly_degree}|{c.coeff_bound}"
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def add(self, check: str, identity: str, trial: int, residual, mutation: bool = False,
            gating: Optional[bool] = None, **extra) -> None:
        s = summarize(residual)
        self._push(check, identity, trial, s["terms"] == 0, mutation, gating, residual=s, **extra)

    def add_status(self, check: str, identity: str, trial: int, ok: bool, mutation: bool = False,
                   gating: Optional[bool] = None, **extra) -> None:
        self._push(check, identity, trial, ok, mutation, gating, **extra)

    def _push(self, check, identity, trial, ok, mutation, gating, **extra) -> None:
        # mutation and informational records never decide the exit status
        rec = {"check": check, "identity": identity, "trial": trial, "inputs": self._digest(check, trial),
               "status": "exact-zero" if ok else "violated", "mutation": mutation,
               "gating": (not mutation) if gating is None else gating}
        rec.update(extra)
        self.records.append(rec)

    def report(self, **extra) -> Dict[str, Any]:
        recs = sorted(self.records, key=lambda r: (r["check"], r["trial"]))
        ok = all(r["status"] == "exact-zero" for r in recs if r["gating"])
        doc = {"command": self.cfg.command, "module": self.module_name, "engine_version": __version__,
               "seed": self.cfg.seed, "config": {"n_vars": self.cfg.n_vars, "trials": self.cfg.trials,
                                                 "max_poly_degree": self.cfg.max_poly_degree,
                                                 "coeff_bound": self.cfg.coeff_bound, "theory": self.cfg.theory,
                                                 "mutate": self.cfg.mutate},
               "pass": ok, "records": recs}
        doc.update(extra)
        return doc


def _validate(m):
    return validate_d2cm(m) if isinstance(m, D2CModule) else validate_dcm(m)


def _has_pairing(p: PairingData) -> bool:
    return any(getattr(p, k) is not None for k in ("pair_g", "pair_gh", "pair_h", "pair_gl"))


def _mutation_records(rec: Recorder, m, cfg: RunConfig, body: Optional[Callable] = None) -> None:
    for t in range(cfg.trials):
        mm, f, idx, delta = random_mutation(m, f"{cfg.seed}/{t}")
        rep = _validate(mm)
        site = {"tensor": f, "index": list(idx), "delta": delta}
        rec.add_status("mutation/validate", "axioms on mutated module", t, rep.ok, mutation=True,
                       site=site, axioms=rep.axioms_violated())
        if body is not None:
            body(mm, t, site)


# --- commands -----------------------------------------------------------------

def cmd_validate(cfg: RunConfig) -> Dict[str, Any]:
    m, p, _ = load_module(cfg.module)
    rec = Recorder(cfg, m.name or cfg.module)
    rep = _validate(m)
    bad = set(rep.axioms_violated())
    for ax in sorted(rep.checked):
        rec.add_status(f"axiom/{ax}", ax, 0, ax not in bad, cases=rep.checked[ax])
    if _has_pairing(p):
        prep = check_pairing(m, p)
        pbad = set(prep.axioms_violated())
        for ax in sorted(prep.checked):
            rec.add_status(f"pairing/{ax}", ax, 0, ax not in pbad, cases=prep.checked[ax])
    if cfg.mutate:
        _mutation_records(rec, m, cfg)
    return rec.report()


def _identities_level2(rec: Recorder, m, nil, cfg: RunConfig, t: int, mutation=False, tag="") -> None:
    n, kw, s = cfg.n_vars, cfg.form_kw(), f"{cfg.seed}/{t}"
    c = conn2_random(s, m, n, **kw)
    rec.add(tag + "bianchi2", "2-form Bianchi identities", t, bianchi2_residual(m, c), mutation)
    rec.add(tag + "gconn1/curvature", "generalized curvature of A + Bξ", t, gcurv_check1(m, c), mutation)
    rec.add(tag + "gconn1/bianchi", "generalized Bianchi identity, N=1", t, gbianchi_residual(m, 2, c), mutation)
    for p in (0, 1):
        A = gen1_random(f"{s}/a{p}", m, n, p, **kw)
        B = gen1_random(f"{s}/b{p}", m, n, 1 - p, **kw)
        rec.add(tag + f"gdc1/d2/p{p}", "d∘d = 0 on N=1 forms", t, g1_d(m, g1_d(m, A)), mutation)
        rec.add(tag + f"gdc1/leibniz/p{p}", "graded Leibniz, N=1 bracket", t, g1_leibniz_residual(m, A, B), mutation)
    if not mutation:
        prm = params_random(s, m, n, nil, level=2, **kw)
        rec.add(tag + "gauge2/curvature", "curvature covariance, level 2", t,
                curvature_transform_check2(m, prm, c), mutation)


def _identities_level3(rec: Recorder, m, nil, cfg: RunConfig, t: int, mutation=False, tag="") -> None:
    n, kw, s = cfg.n_vars, cfg.form_kw(), f"{cfg.seed}/{t}"
    c = conn3_random(s, m, n, **kw)
    rec.add(tag + "bianchi3", "3-form Bianchi identities", t, bianchi3_residual(m, c), mutation)
    rec.add(tag + "gconn2/curvature", "generalized curvature of A + Bξ¹ + Bξ² + Cξ¹²", t, gcurv_check2(m, c), mutation)
    rec.add(tag + "gconn2/bianchi", "generalized Bianchi identity, N=2", t, gbianchi_residual(m, 3, c), mutation)
    for p in (0, 1):
        A = gen2_random(f"{s}/a{p}", m, n, p, **kw)
        B = gen2_random(f"{s}/b{p}", m, n, 1 - p, **kw)
        rec.add(tag + f"gdc2/d2/p{p}", "d∘d = 0 on N=2 forms", t, g2_d(m, g2_d(m, A)), mutation)
        rec.add(tag + f"gdc2/leibniz/p{p}", "graded Leibniz, N=2 bracket", t, g2_leibniz_residual(m, A, B), mutation)
    if not mutation:
        prm = params_random(s, m, n, nil, level=3, **kw)
        rec.add(tag + "gauge3/curvature", "curvature covariance, level 3", t,
                curvature_transform_check3(m, prm, c), mutation)
        if m.fine:
            _identities_level2(rec, m.as_dcm(), nil, cfg, t, tag="level2/")


def cmd_identities(cfg: RunConfig) -> Dict[str, Any]:
    m, _, nil = load_module(cfg.module)
    rec = Recorder(cfg, m.name or cfg.module)
    lvl3 = isinstance(m, D2CModule)
    run = _identities_level3 if lvl3 else _identities_level2
    for t in range(cfg.trials):
        run(rec, m, nil, cfg, t)
    if cfg.mutate:
        _mutation_records(rec, m, cfg, lambda mm, t, site: run(rec, mm, (), cfg, t, mutation=True, tag="mutation/"))
    return rec.report()


def _chern_cs(rec: Recorder, m, p, cfg: RunConfig, t: int) -> None:
    n, kw, s = cfg.n_vars, cfg.form_kw(), f"{cfg.seed}/{t}"
    A0 = av_random(f"{s}/A0", "g", m.g.dim, n, 1, **kw)
    A1 = av_random(f"{s}/A1", "g", m.g.dim, n, 1, **kw)
    rec.add("cs/closure", "d<F,F> = 0", t, dP_check(m, A1, p))
    Q, res = chern_weil1(m, A0, A1, p)
    rec.add("cs/chern_weil", "P1 - P0 = dQ", t, res)
    rec.add("cs/weighted_route", "weighted expansion of the transgression", t,
            sf_sub(Q, transgression_weighted1(m, A0, A1, p)))
    zero = av_random("zero", "g", m.g.dim, n, 1, density=0)
    rec.add("cs/specialization", "transgression from 0 is the CS form", t,
            sf_sub(transgression1(m, zero, A1, p), cs_form(m, A1, p)))


def _chern_2cs(rec: Recorder, m, p, nil, cfg: RunConfig, t: int) -> None:
    n, kw, s = cfg.n_vars, cfg.form_kw(), f"{cfg.seed}/{t}"
    c0, c1 = conn2_random(f"{s}/c0", m, n, **kw), conn2_random(f"{s}/c1", m, n, **kw)
    rec.add("2cs/closure", "d P = 0, level 2", t, dP_check2(m, c1, p))
    prm = params_random(s, m, n, nil, level=2, **kw)
    rec.add("2cs/gauge_invariance", "P invariant under gauge transformations, level 2", t,
            gauge_invariance_check2(m, prm, c1, p))
    Q, res = chern_weil2(m, c0, c1, p)
    rec.add("2cs/chern_weil", "P1 - P0 = dQ, level 2", t, res)
    rec.add("2cs/weighted_route", "weighted expansion of the level-2 transgression", t,
            sf_sub(Q, transgression_weighted2(m, c0, c1, p)))
    rec.add("2cs/specialization", "transgression from 0 is the 2CS form", t,
            sf_sub(transgression2(m, conn2_zero(m, n), c1, p), q_2cs(m, c1, p)))
    L = lagr_2cs(m, c1, p)
    rec.add("2cs/action_mod_exact", "build - <2F - α(B), B> + d<A, B> = 0", t, L.exact_residual)
    rec.add("2cs/action_pointwise", "build - <2F - α(B), B> (informational)", t, L.pointwise_difference,
            gating=False)
    rec.add("2cs/eom_pure_gauge", "pure gauge is flat, level 2", t,
            eom_2cs(m, gauge2(m, prm, conn2_zero(m, n))))
    d = conn2_random(f"{s}/dir", m, n, **kw)
    rec.add("2cs/variation", "δP - dK = 0, level 2", t, variation_triviality_check(m, 2, c1, d, p))


def _chern_3cs(rec: Recorder, m, p, nil, cfg: RunConfig, t: int) -> None:
    n, kw, s = cfg.n_vars, cfg.form_kw(), f"{cfg.seed}/{t}"
    c0, c1 = conn3_random(f"{s}/c0", m, n, **kw), conn3_random(f"{s}/c1", m, n, **kw)
    rec.add("3cs/closure", "d P = 0, level 3", t, dP_check3(m, c1, p))
    prm = params_random(s, m, n, nil, level=3, **kw)
    rec.add("3cs/gauge_invariance", "P invariant under gauge transformations, level 3", t,
            gauge_invariance_check3(m, prm, c1, p))
    Q, res = chern_weil3(m, c0, c1, p)
    rec.add("3cs/chern_weil", "P1 - P0 = dQ, level 3", t, res)
    rec.add("3cs/weighted_route", "weighted expansion of the level-3 transgression", t,
            sf_sub(Q, transgression_weighted3(m, c0, c1, p)))
    rec.add("3cs/specialization", "transgression from 0 is the 3CS form", t,
            sf_sub(transgression3(m, conn3_zero(m, n), c1, p), q_3cs(m, c1, p)))
    L = lagr_3cs(m, c1, p)
    rec.add("3cs/action_mod_exact", "build - <2F - α(B), C> - <B, Ω2> + d<A, C> = 0", t, L.exact_residual)
    rec.add("3cs/action_pointwise", "build - <2F - α(B), C> - <B, Ω2> (informational)", t,
            L.pointwise_difference, gating=False)
    rec.add("3cs/eom_pure_gauge", "pure gauge is flat, level 3", t,
            eom_3cs(m, gauge3(m, prm, conn3_zero(m, n))))
    d = conn3_random(f"{s}/dir", m, n, **kw)
    rec.add("3cs/variation", "δP - dK = 0, level 3", t, variation_triviality_check(m, 3, c1, d, p))


def _action_records(rec: Recorder, m, p, cfg: RunConfig, theory: str) -> Dict[str, str]:
    n = {"cs": 3, "2cs": 4, "3cs": 5}[theory]
    kw = cfg.form_kw()
    out = {}
    for t in range(cfg.trials):
        s = f"{cfg.seed}/{t}/action"
        if theory == "cs":
            c = av_random(f"{s}/A", "g", m.g.dim, n, 1, **kw)
        elif theory == "2cs":
            c = conn2_random(s, m, n, **kw)
        else:
            c = conn3_random(s, m, n, **kw)
        out[str(t)] = qstr(action_value(m, theory, c, p, ActionConfig()))
    return out


def reference_2cs_action() -> mpq:
    """Action of A = x4 dx1·X, B = x1 x2 dx2∧dx3·Y on R^4 (1-dim g, h, α(Y) = X, trivial action)."""
    m = DCModule(LieAlgebraData(1), LieAlgebraData(1), [[1]], [[[0]]], name="reference")
    A = av_from("g", [sf_from_terms(4, 1, [((1,), (0, 0, 0, 1), 1)])])
    B = av_from("h", [sf_from_terms(4, 2, [((2, 3), (1, 1, 0, 0), 1)])])
    return action_value(m, "2cs", Conn2(A, B), PairingData(pair_g=[[1]], pair_gh=[[1]]))


def _default_theory(m) -> str:
    return "3cs" if isinstance(m, D2CModule) else "2cs"


def cmd_chern(cfg: RunConfig) -> Dict[str, Any]:
    m, p, nil = load_module(cfg.module)
    rec = Recorder(cfg, m.name or cfg.module)
    theory = cfg.theory or _default_theory(m)
    if theory == "3cs" and not isinstance(m, D2CModule):
        raise AlgebraError("theory 3cs needs a 2-crossed module")
    for t in range(cfg.trials):
        if theory == "cs":
            _chern_cs(rec, m, p, cfg, t)
        elif theory == "2cs":
            _chern_2cs(rec, m.as_dcm() if isinstance(m, D2CModule) else m, p, nil, cfg, t)
        else:
            _chern_3cs(rec, m, p, nil, cfg, t)
    extra = {"theory": theory, "actions_over_4pi": _action_records(rec, m, p, cfg, theory)}
    if theory == "2cs":
        extra["reference_action_over_4pi"] = qstr(reference_2cs_action())
    return rec.report(**extra)


def _mat_str(M) -> List[List[str]]:
    return [[qstr(x) for x in row] for row in M] if M is not None else None


def cmd_invariant_forms(cfg: RunConfig) -> Dict[str, Any]:
    m, _, _ = load_module(cfg.module)
    rec = Recorder(cfg, m.name or cfg.module)
    lvl3 = isinstance(m, D2CModule)
    notes = []
    balanced = (m.l.dim == m.g.dim or m.l.dim == 0) if lvl3 else m.h.dim == m.g.dim
    if not balanced:
        dims = m.dims()
        m = balance_d2cm(m) if lvl3 else balance_dcm(m)
        notes.append(f"input dims {list(dims)} not balanced; solved on the extension with dims {list(m.dims())}")
    sols = solve_invariant_forms_d2cm(m) if lvl3 else solve_invariant_forms_dcm(m)
    basis = []
    for i, c in enumerate(sols):
        pd = PairingData(pair_gh=c.pair_gh, pair_h=c.pair_h, pair_gl=c.pair_gl)
        rep = check_pairing(m, pd)
        rec.add_status("solver/check_pairing", "solver output is an invariant pairing", i, rep.ok,
                       axioms=rep.axioms_violated())
        basis.append({"pair_gh": _mat_str(c.pair_gh), "pair_h": _mat_str(c.pair_h), "pair_gl": _mat_str(c.pair_gl),
                      "nonsingular": c.nonsingular, "pair_h_nondegenerate": c.pair_h_nondegenerate})
    return rec.report(dimension=len(sols), basis=basis, notes=notes, balanced_dims=list(m.dims()))


_DISPATCH = {"validate": cmd_validate, "identities": cmd_identities, "chern": cmd_chern,
             "invariant-forms": cmd_invariant_forms}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hcs", description="Exact identity checks over differential (2-)crossed modules.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--module", required=True, help="built-in example name or path to a JSON module document")
    ap.add_argument("--nvars", type=int, default=None, help="coordinates of the base R^n")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--max-poly-degree", type=int, default=2)
    ap.add_argument("--coeff-bound", type=int, default=3)
    ap.add_argument("--theory", choices=("cs", "2cs", "3cs"))
    ap.add_argument("--mutate", action="store_true", help="add expected-violation records from mutated modules")
    ap.add_argument("--out", help="write the report here instead of stdout")
    return ap


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    a = build_parser().parse_args(argv)
    n = a.nvars
    if n is None:
        n = {"cs": 5, "2cs": 6, "3cs": 7}.get(a.theory or "", 7 if a.command == "chern" else 6)
    return RunConfig(a.command, a.module, n, a.seed, a.trials, a.max_poly_degree, a.coeff_bound, a.theory,
                     a.mutate, a.out)


def run(cfg: RunConfig) -> Dict[str, Any]:
    return _DISPATCH[cfg.command](cfg)


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
        report = run(cfg)
    except ParseError as exc:
        print(f"hcs: parse error at {exc.path}: {exc}", file=sys.stderr)
        return 2
    except (AlgebraError, ValueError) as exc:
        print(f"hcs: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
