"""Command-line front end.

Subcommands: verify, table, akivis, sigma, rank, orbit, catalog.
Exit codes: 0 all checks passed, 1 a verification failed or a cap was hit,
2 invalid input.  Reports are byte-for-byte deterministic for a fixed spec
and seed; LOOPFORGE_THREADS caps the worker count of the exhaustive
verifiers without changing any output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import akivis, catalog, geometry, right_action
from .errors import (
    CapExceeded,
    EligibilityFailed,
    InvalidParams,
    LoopforgeError,
    NumericEligibilityLost,
    SpecFileError,
)
from .loops import (
    Loop,
    cayley_table,
    find_nonassoc_witness,
    inverse_property_witnesses,
    left_translation_group_report,
    theta_subspace,
    verify_loop_axioms,
    verify_sharp_transitivity,
)
from .linalg import format_vector
from .specfile import dump_spec_json, load_spec_file

OK, VIOLATION, BAD_INPUT = 0, 1, 2


def _load_loop(path: str) -> Loop:
    kind, payload = load_spec_file(path)
    if kind == "loop":
        return Loop(payload)
    family, params = payload
    result = catalog.build(family, params)
    if result.kind != "loop":
        raise SpecFileError(
            f"family {family} is numeric; use the akivis/catalog commands"
        )
    return result.loop


def _print_check(name: str, ok: bool, detail: str = ""):
    mark = "PASS" if ok else "FAIL"
    line = f"[{mark}] {name}"
    if detail:
        line += f": {detail}"
    print(line)
    return ok


def cmd_verify(args) -> int:
    loop = _load_loop(args.spec)
    selected = {
        "eligibility": args.eligibility,
        "axioms": args.axioms,
        "inverse_props": args.inverse_props,
        "theta": args.theta,
        "orbit": args.orbit,
        "sharp": args.sharp,
    }
    if not any(selected.values()):
        selected = {k: True for k in selected}
    all_ok = True
    rep = loop.eligibility
    if selected["eligibility"]:
        detail = (
            f"group order {len(loop.closure)}, is_group={rep.is_group}, "
            f"M0 witness={'yes' if rep.witness_M0 is not None else 'no'}"
        )
        if not rep.eligible:
            m, d = rep.violations[0]
            detail = f"{len(rep.violations)} eigenvalue-1 matrices, first at M={m!r}"
        all_ok &= _print_check("eligibility", rep.eligible, detail)
    if not rep.eligible:
        return VIOLATION
    if selected["axioms"]:
        try:
            ax = verify_loop_axioms(loop)
            detail = f"{ax.pairs_checked} pairs"
            if ax.failures:
                detail = ax.failures[0]
            all_ok &= _print_check("loop axioms", ax.passed, detail)
        except CapExceeded as exc:
            print(f"[SKIP] loop axioms: {exc}")
    if selected["inverse_props"]:
        try:
            witness = find_nonassoc_witness(loop)
            inv = inverse_property_witnesses(loop)
            if rep.is_group:
                ok = witness is None and inv.lip is None and inv.rip is None
                detail = "group: associative, no inverse-property violations"
            else:
                ok = witness is not None and inv.lip is not None and inv.rip is not None
                detail = (
                    f"proper loop: nonassoc witness {witness}, "
                    f"lip witness {inv.lip}, rip witness {inv.rip}"
                )
            all_ok &= _print_check("properness and inverse properties", ok, detail)
        except CapExceeded as exc:
            print(f"[SKIP] properness and inverse properties: {exc}")
    if selected["theta"]:
        basis = theta_subspace(loop)
        shown = ", ".join(format_vector(v) for v in basis) or "trivial"
        all_ok &= _print_check("theta subspace", True, f"dim V = {len(basis)} ({shown})")
        try:
            tg = left_translation_group_report(loop)
            detail = (
                f"|T_B'|={tg.order_tb_prime} full={tg.tb_prime_full}, "
                f"|Delta'|={tg.order_delta_prime}, |Theta n Delta'|="
                f"{tg.order_theta_cap_delta_prime}, |Delta|={tg.order_delta}"
            )
            consistent = tg.tb_prime_full == rep.tb_prime_full
            all_ok &= _print_check("left translation group", consistent, detail)
        except CapExceeded as exc:
            print(f"[SKIP] left translation group: {exc}")
    if selected["orbit"]:
        regular = geometry.is_regular_orbit(loop)
        meets = geometry.transversal_intersection_check(loop)
        all_ok &= _print_check(
            "transversal intersections", meets,
            f"regular orbit: {regular}; det(B - C) != 0 on the orbit: {meets}",
        )
        try:
            stab = geometry.stabilizer_of_QA(loop)
            ok = stab.equals_H == regular
            all_ok &= _print_check(
                "stabilizer of Q_A", ok,
                f"order {stab.order}, equals H: {stab.equals_H}",
            )
        except CapExceeded as exc:
            print(f"[SKIP] stabilizer of Q_A: {exc}")
    if selected["sharp"]:
        try:
            sh = verify_sharp_transitivity(loop)
            all_ok &= _print_check(
                "sharp transitivity", sh.passed,
                f"{sh.cosets} cosets, closed form {sh.closed_form_ok}, counts {sh.counts_ok}",
            )
        except CapExceeded as exc:
            print(f"[SKIP] sharp transitivity: {exc}")
    return OK if all_ok else VIOLATION


def cmd_table(args) -> int:
    loop = _load_loop(args.spec)
    table = cayley_table(loop)
    csv = table.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv)
        print(f"wrote {len(table.labels)}x{len(table.labels)} table to {args.out}")
    else:
        sys.stdout.write(csv)
    return OK


def _unit_triple(data: akivis.LieData, rng):
    out = []
    for _ in range(3):
        x = rng.normal(size=data.n)
        m = rng.normal(size=data.dim)
        scale = np.sqrt(np.sum(x**2) + np.sum(m**2))
        out.append(data.element(x / scale, m / scale))
    return out


def cmd_akivis(args) -> int:
    kind, payload = load_spec_file(args.spec) if args.spec else ("family", (args.family, {}))
    if kind != "family":
        raise SpecFileError("akivis needs a numeric family spec")
    family, params = payload
    if args.family:
        family = args.family
    result = catalog.build(family, params)
    if result.lie_data is None:
        raise SpecFileError(f"family {family} has no tangent-algebra data")
    data = result.lie_data
    rng = np.random.Generator(np.random.Philox(args.seed))
    ok = True
    if args.check_identity or not args.limits:
        worst = akivis.IdentityResiduals(0.0, 0.0, 0.0)
        for _ in range(100):
            a1, a2, a3 = _unit_triple(data, rng)
            res = akivis.akivis_identity_check(data, a1, a2, a3)
            worst = akivis.IdentityResiduals(
                max(worst.lhs_rhs, res.lhs_rhs),
                max(worst.lhs_closed, res.lhs_closed),
                max(worst.rhs_closed, res.rhs_closed),
            )
        ok &= worst.lhs_rhs <= 1e-8 and worst.lhs_closed <= 1e-8
        print(f"identity residuals over 100 unit triples: "
              f"|LHS-RHS|={worst.lhs_rhs:.3e} |LHS-closed|={worst.lhs_closed:.3e} "
              f"|RHS-closed|={worst.rhs_closed:.3e}")
        p5 = akivis.prop5_checks(data, seed=args.seed)
        print(f"projection homomorphism residual: {p5.gamma_hom_residual:.3e}; "
              f"kernel bracket residual: {p5.kernel_bracket_residual:.3e}; "
              f"reduced-bracket case: {p5.lie_criterion_holds}")
        ok &= p5.gamma_hom_residual <= 1e-12
    if args.limits:
        a1, a2, a3 = _unit_triple(data, rng)
        com_closed = akivis.commutator(data, a1, a2)
        com_limit = akivis.numeric_commutator_limit(data, a1, a2)
        cerr = np.sqrt(np.sum((com_closed.x - com_limit.x) ** 2)
                       + np.sum((com_closed.m - com_limit.m) ** 2))
        crel = cerr / max(com_closed.norm(), 1e-30)
        asc_closed = akivis.associator(data, a1, a2, a3)
        asc_limit = akivis.numeric_associator_limit(data, a1, a2, a3)
        aerr = np.sqrt(np.sum((asc_closed.x - asc_limit.x) ** 2)
                       + np.sum((asc_closed.m - asc_limit.m) ** 2))
        arel = aerr / max(asc_closed.norm(), 1e-30)
        ok &= crel <= 1e-6 and arel <= 1e-5
        print(f"commutator limit rel. error: {crel:.3e}")
        print(f"associator limit rel. error: {arel:.3e}")
        if args.out:
            rows = akivis.convergence_rows(data, "commutator", (a1, a2))
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(akivis.convergence_csv(rows))
            print(f"wrote convergence table to {args.out}")
    return OK if ok else VIOLATION


def cmd_sigma(args) -> int:
    loop = _load_loop(args.spec)
    sys.stdout.write(right_action.sigma_report_text(loop))
    return OK


def cmd_rank(args) -> int:
    loop = _load_loop(args.spec)
    print(right_action.phi_family_rank(loop))
    return OK


def cmd_orbit(args) -> int:
    loop = _load_loop(args.spec)
    sys.stdout.write(geometry.orbit_report(loop))
    return OK


def cmd_catalog(args) -> int:
    if args.action == "list":
        for fam in catalog.list_families():
            print(fam)
        return OK
    params = json.loads(args.params) if args.params else {}
    result = catalog.build(args.family, params)
    print(f"family {result.family}: kind={result.kind}, "
          f"proper={result.proper_expected}, geometric={result.geometric_expected}")
    if result.kind == "loop":
        rep = result.loop.eligibility
        print(f"eligible: {rep.eligible}; is_group: {rep.is_group}; "
              f"carrier: {result.loop.carrier_size()}")
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(dump_spec_json(result.loop_spec))
            print(f"wrote spec to {args.out}")
    elif args.out:
        payload = {"family": args.family, "params": params}
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote spec to {args.out}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopforge",
        description="exact-arithmetic workbench for loops built on K^n x| Gamma_0",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run construction verifications on a spec")
    p.add_argument("spec")
    for flag in ("axioms", "eligibility", "inverse-props", "theta", "orbit", "sharp"):
        p.add_argument(f"--{flag}", action="store_true",
                       dest=flag.replace("-", "_"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="emit the Cayley table as CSV")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("akivis", help="tangent-algebra checks for numeric families")
    p.add_argument("spec", nargs="?")
    p.add_argument("--check-identity", action="store_true", dest="check_identity")
    p.add_argument("--limits", action="store_true")
    p.add_argument("--family")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_akivis)

    p = sub.add_parser("sigma", help="right-translation group report")
    p.add_argument("spec")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("rank", help="rank of the per-fiber operator family")
    p.add_argument("spec")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("orbit", help="orbit report for the transversal realization")
    p.add_argument("spec")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("catalog", help="list or build the known families")
    p.add_argument("action", choices=["list", "build"])
    p.add_argument("family", nargs="?")
    p.add_argument("--params")
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog" and args.action == "build" and not args.family:
        parser.error("catalog build needs a family id")
    if args.command == "akivis" and not args.spec and not args.family:
        parser.error("akivis needs a spec file or --family")
    try:
        return args.func(args)
    except (SpecFileError, InvalidParams) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (CapExceeded, EligibilityFailed, NumericEligibilityLost) as exc:
        print(f"verification stopped: {exc}", file=sys.stderr)
        return VIOLATION
    except LoopforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VIOLATION
    except json.JSONDecodeError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
