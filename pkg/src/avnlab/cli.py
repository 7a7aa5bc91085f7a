"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verification or I/O failure, 2 a usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from avnlab import __version__, avn, ghzlab, hvsearch
from avnlab.errors import AvnError
from avnlab.qcore import ATOL
from avnlab.report import noise_sweep, run_verification, write_sweep_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} is outside [0, 1]")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}")
        return value
    return parse


def _signs(text: str) -> tuple[int, int, int]:
    if len(text) != 3 or any(c not in "+-" for c in text):
        raise argparse.ArgumentTypeError("signs must be three characters from '+-', e.g. ++-")
    return tuple(1 if c == "+" else -1 for c in text)


def _fmt_sign(v: int) -> str:
    return "+1" if v > 0 else "-1"


def cmd_verify(args) -> int:
    report = run_verification(args.tolerance)
    if args.format == "json":
        print(report.to_json())
    else:
        print(f"avnlab {report.tool_version} verification (tolerance {args.tolerance:g})")
        for name, section in report.sections.items():
            print(f"[{section.status.upper()}] {name}")
            for key, value in section.metrics.items():
                print(f"    {key} = {value:.6g}" if isinstance(value, float) else f"    {key} = {value}")
        print(f"overall: {report.status.upper()}")
    return EXIT_OK if report.status == "pass" else EXIT_FAIL


def cmd_hv(args) -> int:
    system = hvsearch.lhv_system() if args.model == "lhv" else hvsearch.nchv_system()
    bound_op = "O" if args.model == "lhv" else "O'"
    res = hvsearch.enumerate_satisfying(system)
    cert = hvsearch.parity_certificate(system)
    terms = hvsearch.mermin_terms(bound_op)
    constrained = hvsearch.classical_bound(terms, hvsearch.triple_constraint())
    unconstrained = hvsearch.classical_bound(terms)
    print(f"{system.name} system ({len(system.labels)} labels):")
    for eq in system.equations:
        print("    " + " ".join(f"v({l})" for l in eq.labels) + f" = {eq.required_product:+d}")
    verdict = "parity-unsatisfiable" if cert.unsatisfiable else "not parity-blocked"
    print(f"{res.count} / {res.total} satisfying; {verdict}; "
          f"bound(constrained)={constrained.max_value}; bound(unconstrained)={unconstrained.max_value}")
    print(f"certificate: {cert.reason}")
    if args.list_witnesses:
        if not res.witnesses:
            print("witnesses: none")
        for w in res.witnesses:
            print("witness: " + " ".join(f"{k}={v:+d}" for k, v in w.values.items()))
    ok = res.count == 0 and cert.unsatisfiable and constrained.max_value == 2
    return EXIT_OK if ok else EXIT_FAIL


def cmd_noise(args) -> int:
    if not args.start < args.stop:
        print("error: --from must be smaller than --to", file=sys.stderr)
        return EXIT_USAGE
    rows = noise_sweep(args.start, args.stop, args.steps)
    try:
        if args.out == "-":
            write_sweep_csv(rows, sys.stdout)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                write_sweep_csv(rows, fh)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    threshold = avn.violation_threshold(2.0)
    print(f"threshold F = {threshold:.9f} (|<O>| = 2)", file=sys.stderr if args.out == "-" else sys.stdout)
    return EXIT_OK


def cmd_swap(args) -> int:
    dec = ghzlab.decompose_swap(avn.build_psi())
    matches, phase = ghzlab.match_printed_swap(dec)
    print("|Psi> = sum c * Phi(2,4,6) (x) Phi(1,3,5):")
    for g, h, c in dec.support():
        print(f"    {g.unicode}(2,4,6) ⊗ {h.unicode}(1,3,5): {c.real:+.9f}{c.imag:+.9f}i")
    print(f"printed sign pattern {'matches' if matches else 'does NOT match'} "
          f"up to global phase {phase.real:+.6f}{phase.imag:+.6f}i")
    return EXIT_OK if matches and len(dec.support()) == 8 else EXIT_FAIL


def cmd_table1(args) -> int:
    table = ghzlab.ghz_eigen_table()
    print("      " + " ".join(f"{c:>7}" for c in ghzlab.TABLE_COLUMNS))
    for g in ghzlab.GHZ_ORDER:
        print(f"{g.unicode}: " + " ".join(_fmt_sign(v) for v in table[g.position]))
    ok = bool((table == ghzlab.PRINTED_EIGEN_TABLE).all() and (table.prod(axis=1) == -1).all())
    print("matches printed table" if ok else "MISMATCH with printed table")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_context(args) -> int:
    identities = [args.identity] if args.identity else [1, 2, 3, 4]
    sign_sets = [args.signs] if args.signs else [
        (a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    ok = True
    for i in identities:
        for signs in sign_sets:
            run = ghzlab.contextuality_run(i, signs)
            support = ",".join(g.unicode for g in sorted(run.support))
            sign_text = "".join("+" if s > 0 else "-" for s in signs)
            verdict = "identity holds" if run.identity_holds else "identity FAILS"
            print(f"identity {i} signs {sign_text}: support {{{support}}}; "
                  f"{run.triple}={run.triple_value:+d}; {verdict}; "
                  f"P(identifiable)={run.identifiable_probability:.2f}")
            ok &= run.identity_holds
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sample(args) -> int:
    res = ghzlab.sample_shots(args.shots, args.seed, avn.NoiseParams(args.fidelity),
                              args.policy, args.setting)
    print(f"estimate <O> = {res.estimate:.6f} ± {res.std_error:.6f}")
    print(f"accepted {res.accepted} / {res.n_shots} (fraction {res.acceptance_fraction:.5f})")
    print(f"closed form -4F^3 = {avn.expectation_O_closed_form(args.fidelity):.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avnlab",
        description="Verify the all-versus-nothing proof built on three singlets and a GHZ analyzer.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every check and report pass/fail")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--tolerance", type=_positive_float, default=ATOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hv", help="hidden-variable searches and classical bounds")
    p.add_argument("--model", choices=("lhv", "nchv"), required=True)
    p.add_argument("--list-witnesses", action="store_true")
    p.set_defaults(func=cmd_hv)

    p = sub.add_parser("noise", help="sweep <O> over Werner fidelity and write CSV")
    p.add_argument("--from", dest="start", type=_fraction, default=0.0)
    p.add_argument("--to", dest="stop", type=_fraction, default=1.0)
    p.add_argument("--steps", type=_int_at_least(2), default=11)
    p.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("swap", help="GHZ entanglement-swapping expansion of the state")
    p.set_defaults(func=cmd_swap)

    p = sub.add_parser("table1", help="triple-operator eigenvalues on the GHZ basis")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("context", help="product-eigenstate contextuality runs")
    p.add_argument("--identity", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--signs", type=_signs)
    p.set_defaults(func=cmd_context)

    p = sub.add_parser("sample", help="Monte-Carlo simulation of the post-selected experiment")
    p.add_argument("--shots", type=_int_at_least(1), default=100_000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--fidelity", type=_fraction, default=1.0)
    p.add_argument("--policy", choices=ghzlab.SETTING_POLICIES, default="round-robin")
    p.add_argument("--setting", type=int, choices=(1, 2, 3, 4), default=1)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except AvnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
