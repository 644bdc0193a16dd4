"""
Command-line interface.

    zenopure spectrum --scenario fig2a [--sweep 0:3:0.01] [--out DIR] [--tol 1e-8]
    zenopure purify   --scenario fig4  [--out DIR]
    zenopure optimize --scenario scenarios/fig4_optimize.ini
    zenopure scenario list

Tables are CSV with a one-line header and floats at 6 decimals. Without
``--out`` they go to stdout. Exit status: 0 ok, 1 invalid input, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidSpec, ParseError, ValidationError, ZenoError
from .linalg import DEFAULT_DEGENERACY_TOL, evolve, hermitian_eigendecompose
from .protocols import TauGrid, optimize_tau, run_purification
from .qubits import build_hamiltonian, probe_vector
from .scenario import ScenarioFile, bundled_names, load_scenario, parse_grid
from .spectral import SpectralReport, projected_evolution, spectral_report

Table = Tuple[List[str], List[list]]

SPECTRUM_HEADER = [
    "tau",
    "n",
    "re",
    "im",
    "modulus",
    "gap_ratio",
    "unique_max",
    "nondegenerate_max",
    "optimal_modulus",
    "diagonalizable",
]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    s = f"{float(x):.6f}"
    return "0.000000" if s == "-0.000000" else s


def render_csv(table: Table) -> str:
    header, rows = table
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _report_rows(tau: float, report: SpectralReport) -> List[list]:
    f = report.flags
    return [
        [tau, n, lam.real, lam.imag, mod, report.gap_ratio, f.unique_max, f.nondegenerate_max,
         f.optimal_modulus, f.diagonalizable]
        for n, (lam, mod) in enumerate(zip(report.eigenvalues, report.moduli))
    ]


def _scenario_tau(scn: ScenarioFile, tol: float) -> float:
    if scn.tau is not None:
        return scn.tau
    return optimize_tau(scn.hamiltonian, scn.probe, scn.grid, tol).tau


def spectrum_table(scn: ScenarioFile, tol: float = DEFAULT_DEGENERACY_TOL) -> Table:
    """One row per eigenvalue of the projected operator at the scenario's tau."""
    tau = _scenario_tau(scn, tol)
    report = spectral_report(scn.run_config(tau).projected(), tol)
    return SPECTRUM_HEADER, _report_rows(tau, report)


def sweep_table(scn: ScenarioFile, grid: TauGrid, tol: float = DEFAULT_DEGENERACY_TOL) -> Table:
    """Eigenvalue moduli (descending) and gap ratio as functions of tau."""
    es = hermitian_eigendecompose(build_hamiltonian(scn.hamiltonian))
    phi = probe_vector(scn.probe)
    rest = scn.hamiltonian.dim // 2
    header = ["tau"] + [f"modulus_{k}" for k in range(rest)] + ["gap_ratio"]
    rows = []
    for tau in grid.values():
        tau = float(tau)
        report = spectral_report(projected_evolution(evolve(es, tau), phi), tol)
        rows.append([tau, *report.moduli, report.gap_ratio])
    return header, rows


def purify_table(scn: ScenarioFile, tol: float = DEFAULT_DEGENERACY_TOL) -> Table:
    tau = _scenario_tau(scn, tol)
    trace = run_purification(scn.run_config(tau), tol)
    rows = [[n, f, p] for n, (f, p) in enumerate(zip(trace.fidelity, trace.probability))]
    return ["N", "fidelity", "probability"], rows


def optimize_table(scn: ScenarioFile, tol: float = DEFAULT_DEGENERACY_TOL) -> Table:
    if not scn.needs_optimization:
        raise ValidationError(f"scenario {scn.name!r} does not set tau = optimize")
    result = optimize_tau(scn.hamiltonian, scn.probe, scn.grid, tol)
    return SPECTRUM_HEADER, _report_rows(result.tau, result.report)


def _emit(table: Table, out_dir: Optional[str], filename: str) -> None:
    text = render_csv(table)
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / filename
    target.write_text(text, encoding="utf-8")
    print(target)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenopure", description="Purification through repeated probe confirmations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario file path or bundled scenario name")
        p.add_argument("--out", default=None, help="output directory (default: print to stdout)")
        p.add_argument("--tol", type=float, default=DEFAULT_DEGENERACY_TOL, help="spectral tolerance")

    p = sub.add_parser("spectrum", help="eigenvalues of the projected operator")
    common(p)
    p.add_argument("--sweep", default=None, metavar="START:STOP:STEP", help="tabulate moduli over a tau grid")
    common(sub.add_parser("purify", help="fidelity and success probability per step"))
    common(sub.add_parser("optimize", help="grid search for the fastest purification"))

    p = sub.add_parser("scenario", help="bundled scenarios")
    p.add_argument("action", choices=["list"])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "scenario":
            for name in bundled_names():
                print(name)
            return 0
        scn = load_scenario(args.scenario)
        if args.command == "spectrum":
            if args.sweep:
                _emit(sweep_table(scn, parse_grid(args.sweep), args.tol), args.out, f"{scn.name}_sweep.csv")
            else:
                name = scn.outputs.get("spectrum_csv", f"{scn.name}_spectrum.csv")
                _emit(spectrum_table(scn, args.tol), args.out, name)
        elif args.command == "purify":
            with warnings.catch_warnings():
                warnings.simplefilter("always")
                name = scn.outputs.get("trace_csv", f"{scn.name}_trace.csv")
                _emit(purify_table(scn, args.tol), args.out, name)
        elif args.command == "optimize":
            _emit(optimize_table(scn, args.tol), args.out, f"{scn.name}_optimize.csv")
    except (ParseError, ValidationError, InvalidSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ZenoError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
