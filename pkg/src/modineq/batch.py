"""Claim evaluation over instances, producing flat result rows.

A row is a dict with keys ``id, claim, s, lhs, rhs, gap, scale, pass``.
Which claims run depends on the functionals an instance carries:

* ``eta, phi``: ``main``, ``corollary`` and ``swap`` per ``s``; ``lemma_ec``
  when ``phi <= eta``; ``equality`` when the instance metadata says it was
  built as an equality instance.
* ``phi1, phi2, eta, psi``: ``diff_monotonicity`` per ``s``.
* ``phi, chi, eta``: ``continuity`` per ``s``.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .algebra import leq
from .errors import PreconditionError
from .inequalities import (
    VerificationReport,
    certify_equality,
    verify_continuity,
    verify_corollary,
    verify_diff_monotonicity,
    verify_lemma_ec,
    verify_main,
)
from .numerics import DEFAULT_TOL, TolerancePolicy
from .sampling import Instance

__all__ = ["ROW_FIELDS", "instance_rows", "run_batch", "summarize"]

ROW_FIELDS = ("id", "claim", "s", "lhs", "rhs", "gap", "scale", "pass")
EQUALITY_TOL = 1e-9
SWAP_TOL = 1e-10


def _row(ident: str, report: VerificationReport, s) -> dict:
    return {
        "id": ident, "claim": report.name, "s": s, "lhs": report.lhs, "rhs": report.rhs,
        "gap": report.gap, "scale": report.scale, "pass": bool(report.passed),
    }


def _bounded(ident, claim, s, value, limit, scale) -> dict:
    """Row for a claim of the form ``value <= limit``."""
    return {"id": ident, "claim": claim, "s": s, "lhs": value, "rhs": limit,
            "gap": limit - value, "scale": scale, "pass": value <= limit}


def instance_rows(inst: Instance, s_grid: Sequence[float], tol: TolerancePolicy = DEFAULT_TOL, n_max: int = 64) -> list[dict]:
    fs = inst.functionals
    rows: list[dict] = []
    if {"eta", "phi"} <= fs.keys():
        eta, phi = fs["eta"], fs["phi"]
        ordered = leq(phi, eta, tol)
        equality = inst.metadata.get("kind") == "equality"
        cert = certify_equality(eta, phi, tol) if equality else None
        for s in s_grid:
            main = verify_main(eta, phi, s, tol)
            rows.append(_row(inst.id, main, s))
            cor = verify_corollary(eta, phi, s, tol)
            rows.append(_row(inst.id, cor, s))
            rows.append(_bounded(inst.id, "swap", s, cor.details["swap_residual"], SWAP_TOL * cor.scale, cor.scale))
            if ordered:
                report, consistent = verify_lemma_ec(eta, phi, s, tol)
                row = _row(inst.id, report, s)
                row["pass"] = row["pass"] and consistent
                rows.append(row)
            if cert is not None:
                row = _bounded(inst.id, "equality", s, abs(main.gap), EQUALITY_TOL * main.scale, main.scale)
                row["pass"] = row["pass"] and cert.verdict
                rows.append(row)
    if {"phi1", "phi2", "eta", "psi"} <= fs.keys():
        for s in s_grid:
            try:
                report = verify_diff_monotonicity(fs["phi1"], fs["phi2"], fs["eta"], fs["psi"], s, tol)
            except PreconditionError as exc:
                raise PreconditionError(f"{inst.id}: {exc}") from None
            rows.append(_row(inst.id, report, s))
    if {"phi", "chi", "eta"} <= fs.keys():
        for s in s_grid:
            rows.append(_row(inst.id, verify_continuity(fs["phi"], fs["chi"], fs["eta"], s, n_max, tol), s))
    return rows


def run_batch(instances: Iterable[Instance], s_grid: Sequence[float], tol: TolerancePolicy = DEFAULT_TOL, n_max: int = 64) -> list[dict]:
    rows: list[dict] = []
    for inst in instances:
        rows.extend(instance_rows(inst, s_grid, tol, n_max))
    return rows


INEQUALITY_CLAIMS = ("main", "corollary", "diff_monotonicity", "lemma_ec")


def summarize(rows: Sequence[dict]) -> dict:
    """Scale-normalised minimum gap, where it occurs, and the failure count.

    The minimum is taken over the inequality claims when any are present;
    tolerance-bounded claims (``swap``, ``equality``, ``continuity``) would
    otherwise dominate it with their thresholds.
    """
    if not rows:
        return {"min_gap": None, "argmin": None, "argmin_claim": None, "failures": 0, "rows": 0}
    pool = [r for r in rows if r["claim"] in INEQUALITY_CLAIMS] or list(rows)
    worst = min(pool, key=lambda r: r["gap"] / r["scale"])
    return {
        "min_gap": worst["gap"] / worst["scale"],
        "argmin": worst["id"],
        "argmin_claim": worst["claim"],
        "failures": sum(1 for r in rows if not r["pass"]),
        "rows": len(rows),
    }
