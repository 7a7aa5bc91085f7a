"""End-to-end verification run, its JSON report, and the noise-sweep CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Iterable, Optional, TextIO

import numpy as np

from avnlab import __version__, avn, ghzlab, hvsearch
from avnlab.qcore import ATOL, PauliString, expectation, random_state

SCHEMA_VERSION = 1

SECTION_NAMES = (
    "eigenequations",
    "identities",
    "hv_lhv",
    "hv_nchv",
    "mermin",
    "table1",
    "swap",
    "contextuality",
)

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "tool_version", "timestamp", "status", "sections"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool_version": {"type": "string"},
        "timestamp": {"type": "string", "format": "date-time"},
        "status": {"enum": ["pass", "fail"]},
        "sections": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["status", "metrics", "details"],
                "additionalProperties": False,
                "properties": {
                    "status": {"enum": ["pass", "fail"]},
                    "metrics": {"type": "object", "additionalProperties": {"type": "number"}},
                    "details": {},
                },
            },
        },
    },
}


@dataclass
class Section:
    status: str
    metrics: dict[str, float]
    details: Any = None

    @classmethod
    def check(cls, ok: bool, metrics: dict[str, float], details: Any = None) -> Section:
        return cls("pass" if ok else "fail", metrics, details)


@dataclass
class VerificationReport:
    sections: dict[str, Section]
    tool_version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def status(self) -> str:
        return "fail" if any(s.status == "fail" for s in self.sections.values()) else "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "status": self.status,
            "sections": {
                name: {"status": s.status, "metrics": s.metrics, "details": s.details}
                for name, s in self.sections.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VerificationReport:
        sections = {name: Section(s["status"], dict(s["metrics"]), s["details"])
                    for name, s in data["sections"].items()}
        return cls(sections, data["tool_version"], data["timestamp"])


def _eigen_section(tol: float) -> Section:
    results = avn.verify_eigenequations(avn.build_psi())
    residuals = [r.residual for r in results]
    metrics = {"max_residual": max(residuals)}
    metrics.update({f"residual_{i + 1}": r for i, r in enumerate(residuals)})
    details = [{"operator": r.operator_label, "eigenvalue": r.expected_eigenvalue} for r in results]
    return Section.check(max(residuals) < tol, metrics, details)


def _identity_section(tol: float) -> Section:
    devs = avn.verify_identities()
    signs = [ident.sign for ident in avn.operator_identities()]
    metrics = {"max_deviation": max(d for _, d in devs)}
    metrics.update({f"deviation_{i + 1}": d for i, (_, d) in enumerate(devs)})
    details = [{"identity": label, "rhs": f"{'+' if s > 0 else '-'}I"}
               for (label, _), s in zip(devs, signs)]
    return Section.check(metrics["max_deviation"] < tol, metrics, details)


def _hv_section(system: hvsearch.ConstraintSystem, bound_terms: str) -> Section:
    enum_res = hvsearch.enumerate_satisfying(system)
    cert = hvsearch.parity_certificate(system)
    control = system.with_product(len(system.equations) - 1,
                                  -system.equations[-1].required_product)
    control_count = hvsearch.enumerate_satisfying(control).count
    terms = hvsearch.mermin_terms(bound_terms)
    constrained = hvsearch.classical_bound(terms, hvsearch.triple_constraint()).max_value
    unconstrained = hvsearch.classical_bound(terms).max_value
    twice = all(c == 2 for c in system.occurrences().values())
    ok = (enum_res.count == 0 and cert.unsatisfiable and control_count > 0
          and constrained == 2 and unconstrained == 4 and twice)
    metrics = {
        "satisfying": enum_res.count,
        "assignments": enum_res.total,
        "parity_unsatisfiable": int(cert.unsatisfiable),
        "control_satisfying": control_count,
        "bound_constrained": constrained,
        "bound_unconstrained": unconstrained,
        "labels_appear_twice": int(twice),
    }
    details = {
        "equations": [{"labels": list(eq.labels), "product": eq.required_product}
                      for eq in system.equations],
        "parity_reason": cert.reason,
        "bound_operator": bound_terms,
    }
    return Section.check(ok, metrics, details)


def _mermin_section(tol: float, n_random: int = 100, seed: int = 2024) -> Section:
    psi = avn.build_psi()
    value = expectation(avn.mermin_O(), psi)
    o_prime = avn.mermin_Oprime()
    eye = np.eye(8)
    term_dev = max(float(np.max(np.abs(p.matrix() - eye))) for _, p in o_prime.terms)
    rng = np.random.default_rng(seed)
    prime_dev = max(abs(expectation(o_prime, random_state(3, rng)) - 4.0) for _ in range(n_random))
    metrics = {
        "expectation_O": value,
        "deviation_O": abs(value + 4.0),
        "Oprime_max_term_deviation": term_dev,
        "Oprime_random_state_deviation": prime_dev,
    }
    ok = metrics["deviation_O"] < tol and term_dev < tol and prime_dev < tol
    return Section.check(ok, metrics, {"O_terms": [p.label for _, p in avn.mermin_O().terms],
                                       "Oprime_terms": [p.label for _, p in o_prime.terms]})


def _table_section(tol: float) -> Section:
    table = ghzlab.ghz_eigen_table()
    mismatches = int(np.sum(table != ghzlab.PRINTED_EIGEN_TABLE))
    row_products = np.prod(table, axis=1)
    max_dev = 0.0
    for col, label in enumerate(ghzlab.TABLE_COLUMNS):
        op = PauliString.parse(label, avn.DEBBIE)
        for g in ghzlab.GHZ_ORDER:
            max_dev = max(max_dev, abs(expectation(op, ghzlab.ghz_state(g)) - float(table[g.position, col])))
    ok = mismatches == 0 and bool(np.all(row_products == -1)) and max_dev < tol
    metrics = {"mismatches": mismatches, "max_expectation_deviation": max_dev,
               "rows_with_product_minus_one": int(np.sum(row_products == -1))}
    details = {
        "columns": list(ghzlab.TABLE_COLUMNS),
        "rows": {g.ascii: [int(v) for v in table[g.position]] for g in ghzlab.GHZ_ORDER},
    }
    return Section.check(ok, metrics, details)


def _swap_section(tol: float) -> Section:
    psi = avn.build_psi()
    dec = ghzlab.decompose_swap(psi)
    support = dec.support()
    mag_dev = max(abs(abs(c) - 1 / math.sqrt(8)) for _, _, c in support)
    pairs_ok = {(g, h) for g, h, _ in support} == set(ghzlab.PRINTED_SWAP_SIGNS)
    sign_ok, phase = ghzlab.match_printed_swap(dec, tol)
    recon = float(np.max(np.abs(dec.reconstruct().amplitudes - psi.amplitudes)))
    norm_dev = abs(float(np.sum(np.abs(dec.coefficients) ** 2)) - 1.0)
    ok = len(support) == 8 and mag_dev < tol and pairs_ok and sign_ok and recon < tol and norm_dev < tol
    metrics = {
        "nonzero": len(support),
        "max_magnitude_deviation": mag_dev,
        "reconstruction_deviation": recon,
        "norm_deviation": norm_dev,
        "pairing_matches": int(pairs_ok),
        "sign_pattern_matches": int(sign_ok),
        "global_phase_re": round(phase.real, 12) + 0.0,
        "global_phase_im": round(phase.imag, 12) + 0.0,
    }
    details = [{"debbie": g.ascii, "remote": h.ascii,
                "re": round(c.real, 12) + 0.0, "im": round(c.imag, 12) + 0.0}
               for g, h, c in support]
    return Section.check(ok, metrics, details)


SIGN_TUPLES = tuple((a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1))


def _context_section(tol: float) -> Section:
    runs = [ghzlab.contextuality_run(i, s) for i in range(1, 5) for s in SIGN_TUPLES]
    holds = sum(r.identity_holds for r in runs)
    p_dev = 0.0
    coeff_dev = 0.0
    support_ok = True
    for i, printed in ghzlab.PRINTED_EXPANSIONS.items():
        r = ghzlab.contextuality_run(i, (1, 1, 1))
        support_ok &= r.support == frozenset(printed)
        p_dev = max(p_dev, abs(r.identifiable_probability - 0.25))
        want = np.array([printed.get(g, 0) for g in ghzlab.GHZ_ORDER], dtype=complex)
        coeff_dev = max(coeff_dev, float(np.max(np.abs(np.array(r.coefficients) - want))))
    ok = holds == len(runs) and support_ok and p_dev < tol
    metrics = {
        "runs": len(runs),
        "identity_holds": holds,
        "printed_supports_match": int(support_ok),
        "max_identifiable_probability_deviation": p_dev,
        "max_printed_coefficient_deviation": coeff_dev,
    }
    details = [{"identity": r.identity_index, "signs": list(r.signs), "triple": r.triple,
                "triple_value": r.triple_value,
                "support": [g.ascii for g in sorted(r.support)]} for r in runs]
    return Section.check(ok, metrics, details)


def run_verification(tolerance: float = ATOL, timestamp: Optional[str] = None) -> VerificationReport:
    """Run every check; a section passes iff its deviations are below ``tolerance``."""
    sections = {
        "eigenequations": _eigen_section(tolerance),
        "identities": _identity_section(tolerance),
        "hv_lhv": _hv_section(hvsearch.lhv_system(), "O"),
        "hv_nchv": _hv_section(hvsearch.nchv_system(), "O'"),
        "mermin": _mermin_section(tolerance),
        "table1": _table_section(tolerance),
        "swap": _swap_section(tolerance),
        "contextuality": _context_section(tolerance),
    }
    report = VerificationReport(sections)
    if timestamp is not None:
        report.timestamp = timestamp
    return report


@dataclass(frozen=True)
class SweepRow:
    F: float
    expectation_O: float
    lhv_bound: float = 2.0

    @property
    def violates(self) -> bool:
        return abs(self.expectation_O) > self.lhv_bound


SWEEP_HEADER = ("F", "expectation_O", "lhv_bound", "violates")


def noise_sweep(start: float, stop: float, steps: int) -> list[SweepRow]:
    grid = np.linspace(start, stop, steps)
    return [SweepRow(float(F), avn.expectation_O_noisy(avn.NoiseParams(float(F)))) for F in grid]


def write_sweep_csv(rows: Iterable[SweepRow], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        writer.writerow([f"{r.F:.9f}", f"{r.expectation_O:.12g}", f"{r.lhv_bound:g}",
                         "true" if r.violates else "false"])


def read_sweep_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
