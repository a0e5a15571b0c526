"""Scenario loading and report assembly behind the command-line interface."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .analytic import analytic_spectrum, fit_offset, offset_constant
from .eigensolver import jacobi_eigh
from .fock import build_basis
from .hamiltonian import ModelParams, build_H0, build_total
from .modes import (
    InvalidPotential,
    PotentialSpec,
    check_regime,
    integrals_from_potential,
    potential_from_dict,
    refinement_deltas,
    solve_trap,
)
from .perturbation import DegenerateSpectrum, detect_degeneracies, perturbation_report

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("twomode").joinpath("scenario.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True, eq=False)
class Scenario:
    params: ModelParams | None = None
    potential: PotentialSpec | None = None
    theta: float = 0.0
    N: int = 0
    solver: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @property
    def tol(self) -> float:
        return float(self.solver.get("tol", 1e-13))

    @property
    def max_sweeps(self) -> int:
        return int(self.solver.get("max_sweeps", 60))

    @property
    def degeneracy_rel_tol(self) -> float:
        return float(self.solver.get("degeneracy_rel_tol", 1e-8))

    @property
    def elements(self) -> str:
        return self.solver.get("elements", "closed_form")

    @property
    def stencil(self) -> int:
        return int(self.solver.get("stencil", 5))

    @property
    def split(self) -> float:
        return float(self.solver.get("split", 0.0))


def parse_scenario(doc: Any) -> Scenario:
    try:
        jsonschema.validate(doc, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"scenario invalid at {where}: {exc.message}") from None
    common = dict(solver=doc.get("solver", {}), output=doc.get("output", {}))
    try:
        if "params" in doc:
            return Scenario(params=ModelParams(**doc["params"]), **common)
        spec = potential_from_dict(doc["potential"])
    except (InvalidPotential, ValueError) as exc:
        raise ScenarioError(f"scenario invalid: {exc}") from None
    return Scenario(potential=spec, theta=float(doc["theta"]), N=int(doc["N"]), **common)


def load_scenario(path: str | Path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON in {path}: {exc}") from None
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    return parse_scenario(doc)


def _regime(params: ModelParams, output: dict) -> dict:
    r = check_regime(params, output.get("pass_below", 0.1), output.get("warn_below", 0.5))
    return {"ratio": r.ratio, "tunneling_estimate": r.tunneling_estimate, "status": r.status,
            "pass_below": r.pass_below, "warn_below": r.warn_below}


def _resolve_params(sc: Scenario) -> tuple[ModelParams, dict | None]:
    if sc.params is not None:
        return sc.params, None
    modes, rep = integrals_from_potential(sc.potential, sc.theta, sc.N, stencil=sc.stencil, split=sc.split)
    return rep.params, {"integrals": rep.integrals.as_dict(), "couplings": rep.couplings.as_dict(),
                        "omega": rep.omega, "left_mass_a": modes.left_mass_a,
                        "right_mass_b": modes.right_mass_b}


def run_spectrum(sc: Scenario, exact: bool = False) -> dict:
    """Analytic vs Jacobi spectrum of ``H0`` plus perturbative corrections.

    ``E_numeric`` are eigenvalues of ``H0``; ``E_exact_total`` are eigenvalues
    of ``H0 + H' + H''``. Both are paired with states in ascending order.
    Residual columns are deviations after removing the best common offset.
    """
    p, derived = _resolve_params(sc)
    basis = build_basis(p.N)
    an = analytic_spectrum(basis, p)
    order = np.argsort(an.energies, kind="stable")
    E_an = an.energies[order]

    num = jacobi_eigh(build_H0(basis, p), sc.tol, sc.max_sweeps).eigenvalues
    C = fit_offset(num, E_an)
    total = jacobi_eigh(build_total(basis, p), sc.tol, sc.max_sweeps).eigenvalues

    degenerate = detect_degeneracies(p, sc.degeneracy_rel_tol) if p.N >= 1 else []
    try:
        pt = perturbation_report(p, sc.degeneracy_rel_tol, sc.elements)
        pt_status = "ok"
    except DegenerateSpectrum:
        if not exact:
            raise
        pt, pt_status = None, "degenerate: exact diagonalization only"

    if pt is not None:
        E_pt = pt.total[order]
        C_total = fit_offset(total, E_pt)
    rows = []
    for k, j in enumerate(order):
        s = basis.states[j]
        row = {"n1": s.n1, "n2": s.n2, "E_analytic": E_an[k], "E_numeric": num[k],
               "residual": num[k] - E_an[k] - C, "E_exact_total": total[k]}
        if pt is not None:
            row.update(E1=pt.E1[j], E2=pt.E2[j], E_perturbative=E_pt[k],
                       pt_residual=total[k] - E_pt[k] - C_total)
        else:
            row.update(E1=None, E2=None, E_perturbative=None, pt_residual=None)
        if sc.output.get("eigenvectors"):
            row["eigenvector"] = an.eigenvectors[:, j].tolist()
        rows.append(row)

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "params": p.as_dict(),
        "offset": {"fitted": C, "closed_form": offset_constant(p.N, p.A2),
                   "spread": float(np.ptp(num - E_an)) if num.size else 0.0},
        "regime": _regime(p, sc.output),
        "degenerate_pairs": [[str(a), str(b)] for a, b in degenerate],
        "perturbation": {"elements": sc.elements, "status": pt_status},
        "rows": rows,
    }
    if derived is not None:
        report["derived"] = derived
    return report


def run_integrals(sc: Scenario, self_check: bool = False) -> dict:
    if sc.potential is None:
        raise ScenarioError("the integrals command needs a potential scenario")
    spec = sc.potential
    if self_check:
        solve_trap(spec.reference(), stencil=sc.stencil, self_check=True)
    modes, rep = integrals_from_potential(spec, sc.theta, sc.N, stencil=sc.stencil, split=sc.split)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "integrals",
        "grid": {"xmin": float(spec.x[0]), "xmax": float(spec.x[-1]), "points": spec.points,
                 "kind": spec.kind},
        "modes": {"ES": modes.ES, "EA": modes.EA, "left_mass_a": modes.left_mass_a,
                  "right_mass_b": modes.right_mass_b},
        "integrals": rep.integrals.as_dict(),
        "couplings": rep.couplings.as_dict(),
        "params": rep.params.as_dict(),
        "omega": rep.omega,
        "refinement": refinement_deltas(spec, sc.theta, stencil=sc.stencil, split=sc.split),
        "regime": _regime(rep.params, sc.output),
    }


def _plain(obj):
    """Recursively convert to JSON-native types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(v) -> str:
    # repr gives the shortest round-trip decimal, matching json
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(report: dict) -> str:
    plain = _plain(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if plain["command"] == "spectrum":
        columns = ["n1", "n2", "E_analytic", "E_numeric", "residual", "E1", "E2",
                   "E_perturbative", "E_exact_total", "pt_residual"]
        writer.writerow(columns)
        for row in plain["rows"]:
            writer.writerow([_cell(row[c]) for c in columns])
    else:
        writer.writerow(["section", "key", "value"])
        for section in ("grid", "modes", "integrals", "couplings", "params", "refinement", "regime"):
            for key, value in sorted(plain[section].items()):
                writer.writerow([section, key, _cell(value)])
        writer.writerow(["", "omega", _cell(plain["omega"])])
    return buf.getvalue()
