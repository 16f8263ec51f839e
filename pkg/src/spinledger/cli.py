"""Batch command line: run the models, emit machine-readable tables.

Six subcommands (ideal, measure, thermal, decohere, satellite, streak)
write CSV by default or JSON on request, each with a metadata header
echoing the full configuration, the package version, the PRNG identity,
and the active tolerances, so any output file can be reproduced
byte-for-byte by re-running its own header.

Exit codes: 0 success, 1 configuration error, 2 numerical-invariant
failure (a conservation audit tripping inside a run is a broken build,
never a result, and is surfaced loudly).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .angular import angular_spread, bloch_vector
from .apparatus import (
    build_measurement_unitary,
    decompose_branches,
    extract_error_amplitudes,
    premeasure,
    thermal_orientation_uncertainty,
    verify_matching_equations,
)
from .config import NUMERICS
from .decoherence import EnvironmentConfig, amplify_record, macroscopic_cross_term, overlap_decay_curve
from .experiments import PRNG_ID, lucky_streak_j2, satellite_run
from .ideal import classify_violation, ideal_forced_cross_terms
from .kernel import ConservationError, Operator, bracket, expectation

__all__ = ["main"]

OUTDIR_ENV = "SPINLEDGER_OUTDIR"


def _fmt(x) -> str:
    """Fixed 17-significant-digit formatting for stable diffs."""
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, complex):
        return f"{format(x.real, '.17g')}{'+' if x.imag >= 0 else '-'}{format(abs(x.imag), '.17g')}j"
    return str(x)


def _metadata(args, extra=None) -> dict:
    # echo a re-runnable command line: subcommand first, then flags
    flags = []
    for k, v in sorted(vars(args).items()):
        if k in ("func", "command", "output", "format", "jobs") or v is None:
            continue
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        flags.append(f"--{k.replace('_', '-')} {v}")
    meta = {
        "version": __version__,
        "prng": PRNG_ID,
        "tolerances": (
            f"state={NUMERICS.state_atol:g},operator={NUMERICS.operator_atol:g},"
            f"conservation={NUMERICS.conservation_atol:g}"
        ),
        "config": " ".join([args.command] + flags),
    }
    if extra:
        meta.update(extra)
    return meta


def _write_table(args, meta: dict, columns: list[str], rows: list[list]) -> None:
    if args.format == "json":
        payload = {
            "metadata": meta,
            "columns": columns,
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        for key in sorted(meta):
            buf.write(f"# {key} = {meta[key]}\n")
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        text = buf.getvalue()
    if args.output:
        path = args.output
        outdir = os.environ.get(OUTDIR_ENV)
        if outdir and not os.path.isabs(path):
            path = os.path.join(outdir, path)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spinor(args) -> tuple[complex, complex]:
    a = complex(args.a_re, args.a_im)
    b = complex(args.b_re, args.b_im)
    nrm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if nrm < 1e-12:
        raise ValueError("spinor amplitudes are all zero")
    return a / nrm, b / nrm


def _cmd_ideal(args) -> None:
    a, b = _spinor(args)
    brackets = ideal_forced_cross_terms(a, b)
    u_s = bloch_vector(a, b).as_array()
    initial = 0.5 * u_s

    # classifier demo on the same data: ideal account stores the
    # transverse books in the cross terms
    cross_contrib = a.conjugate() * b * brackets.cross()
    ideal_report = classify_violation(
        initial,
        [(a, brackets.diag_u), (b, brackets.diag_d)],
        cross_contrib,
        labels=["up", "dn"],
    )
    sys_model = build_measurement_unitary(args.L)
    final = premeasure(a, b, sys_model)
    decomp = decompose_branches(final, sys_model)
    branches = []
    for coeff, state, label in decomp.branches:
        per_j = np.array([expectation(state, jk).real for jk in sys_model.j_pa])
        branches.append(((coeff, per_j), label))
    init_j = initial + np.array([0.0, 0.0, float(sys_model.L)])
    model_report = classify_violation(
        init_j,
        [bv for bv, _ in branches],
        np.zeros(3, dtype=complex),
        labels=[lbl for _, lbl in branches],
    )

    meta = _metadata(args, {
        "ideal_classification": ideal_report.kind.value,
        "apparatus_classification": model_report.kind.value,
    })
    rows = [
        ["x", brackets.cross_x.real, brackets.cross_x.imag, brackets.max_residual],
        ["y", brackets.cross_y.real, brackets.cross_y.imag, brackets.max_residual],
        ["z", brackets.cross_z.real, brackets.cross_z.imag, brackets.max_residual],
    ]
    _write_table(args, meta, ["component", "cross_re", "cross_im", "max_residual"], rows)


def _measure_row(L: float) -> list:
    sys_model = build_measurement_unitary(L)
    amps = extract_error_amplitudes(sys_model)
    residuals = verify_matching_equations(sys_model)
    spread = angular_spread(sys_model.apparatus_state, sys_model.spin_app)
    mag = abs(bracket(amps.u, sys_model.j_pa[0], amps.u_err))
    return [
        L, amps.C, amps.D, amps.E, amps.F,
        float(np.max(np.abs(residuals))),
        mag, spread.delta_l, 1.0 / spread.delta_theta,
    ]


def _cmd_measure(args) -> None:
    l_values = args.L
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_measure_row, l_values))
    else:
        rows = [_measure_row(L) for L in l_values]
    meta = _metadata(args)
    _write_table(args, meta, [
        "L", "C", "D", "E", "F", "matching_residual_max",
        "bracket_jx_mag", "delta_L", "inv_delta_theta",
    ], rows)


def _cmd_thermal(args) -> None:
    thermal = thermal_orientation_uncertainty(args.I, args.T)
    meta = _metadata(args, {"note": thermal.note})
    rows = [[thermal.moment_of_inertia, thermal.temperature, thermal.ikt,
             thermal.delta_l, thermal.delta_theta]]
    _write_table(args, meta, ["I", "T", "IkT", "delta_L", "delta_theta"], rows)


def _cmd_decohere(args) -> None:
    sys_model = build_measurement_unitary(args.L)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    final = premeasure(inv_sqrt2, inv_sqrt2, sys_model)
    # particle sigma_x extended over the apparatus: couples the two
    # total-j manifolds, so its record-sector bracket is nonzero at n=0
    probe = Operator(
        np.kron(np.array([[0, 1], [1, 0]], dtype=complex),
                np.eye(sys_model.dims[1])),
        hermitian=True,
    )
    baseline = macroscopic_cross_term(
        final, probe, sys_model, EnvironmentConfig(0, args.overlap)
    )
    rows = []
    for n_q, bound in overlap_decay_curve(args.overlap, args.n_env):
        env = EnvironmentConfig(n_q, args.overlap)
        amplified = amplify_record(final, sys_model, env)
        measured = macroscopic_cross_term(amplified, probe, sys_model, env)
        rows.append([n_q, bound, abs(measured), abs(baseline) * bound,
                     abs(abs(measured) - abs(baseline) * bound)])
    meta = _metadata(args, {"baseline_cross_term": _fmt(abs(baseline))})
    _write_table(args, meta, [
        "n_env", "bound", "measured_cross_mag", "predicted_cross_mag", "deviation",
    ], rows)


def _cmd_satellite(args) -> None:
    a, b = _spinor(args)
    run = satellite_run(args.n, args.L, a, b, args.seed)
    meta = _metadata(args, {"seed": str(args.seed), **{
        k: v for k, v in run.metadata.items() if k not in ("prng", "seed")
    }})
    rows = []
    for s in run.trajectory:
        rows.append([
            s.step, s.outcome, s.branch_weight,
            *s.per_branch_j, *s.ideal_ledger_j, *s.full_ledger_j,
            s.audit_deviation,
        ])
    _write_table(args, meta, [
        "step", "outcome", "branch_weight",
        "branch_jx", "branch_jy", "branch_jz",
        "ideal_x", "ideal_y", "ideal_z",
        "full_x", "full_y", "full_z",
        "audit_deviation",
    ], rows)


def _cmd_streak(args) -> None:
    report = lucky_streak_j2(args.n, args.L, args.mode, K=args.K, seed=args.seed)
    meta = _metadata(args, {
        "pattern": report.pattern,
        "j2_band": f"{_fmt(report.j2_band[0])}..{_fmt(report.j2_band[1])}",
        **{k: str(v) for k, v in report.metadata.items() if k != "prng"},
    })
    rows = []
    for k in range(len(report.postselected_j2)):
        ledger = (report.combined_jz_ledger[k]
                  if report.combined_jz_ledger is not None else "")
        weight = report.step_weights[k - 1] if k >= 1 else ""
        rows.append([k, report.postselected_j2[k], report.postselected_jz[k],
                     ledger, weight])
    _write_table(args, meta, [
        "k", "postselected_j2", "postselected_jz", "combined_jz_ledger",
        "step_weight",
    ], rows)


def _parse_l(value: str) -> list[float]:
    out = []
    for part in value.split(","):
        L = float(part)
        if L < 0.5 or abs(2 * L - round(2 * L)) > 1e-9:
            raise argparse.ArgumentTypeError(
                f"L must be a half-integer >= 1/2, got {part!r}"
            )
        out.append(L)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinledger",
        description="Angular-momentum bookkeeping for quantum spin measurement",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def add_common(p):
        p.add_argument("--output", help="output path (default: stdout); relative "
                       f"paths resolve under ${OUTDIR_ENV} when set")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    def add_spinor(p):
        p.add_argument("--a-re", type=float, default=1.0 / math.sqrt(2.0))
        p.add_argument("--a-im", type=float, default=0.0)
        p.add_argument("--b-re", type=float, default=1.0 / math.sqrt(2.0))
        p.add_argument("--b-im", type=float, default=0.0)

    p = sub.add_parser("ideal", formatter_class=fmt, help="forced ideal cross terms plus classifier demo")
    add_spinor(p)
    p.add_argument("--L", type=float, default=4.0, help="apparatus spin for the demo")
    add_common(p)
    p.set_defaults(func=_cmd_ideal)

    p = sub.add_parser("measure", formatter_class=fmt, help="apparatus model: amplitudes, matching residuals, scaling")
    p.add_argument("--L", type=_parse_l, default=[1.0],
                   help="apparatus spin, or comma list for a sweep")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for sweeps")
    add_common(p)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("thermal", formatter_class=fmt, help="SI orientation-uncertainty estimate")
    p.add_argument("--I", type=float, default=0.01, help="moment of inertia, kg m^2")
    p.add_argument("--T", type=float, default=300.0, help="temperature, K")
    add_common(p)
    p.set_defaults(func=_cmd_thermal)

    p = sub.add_parser("decohere", formatter_class=fmt, help="cross-term suppression under record amplification")
    p.add_argument("--L", type=float, default=2.0)
    p.add_argument("--overlap", type=float, default=0.8,
                   help="per-qubit conditional overlap in [0, 1)")
    p.add_argument("--n-env", type=int, default=8, help="max environment qubits")
    add_common(p)
    p.set_defaults(func=_cmd_decohere)

    p = sub.add_parser("satellite", formatter_class=fmt, help="repeated measurements with dual ledgers")
    p.add_argument("--n", type=int, default=100, help="number of particles")
    p.add_argument("--L", type=float, default=8.0)
    add_spinor(p)
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(func=_cmd_satellite)

    p = sub.add_parser("streak", formatter_class=fmt, help="post-selected J^2 growth, external vs internal source")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--L", type=float, default=4.0)
    p.add_argument("--mode", choices=["external", "internal"], default="external")
    p.add_argument("--K", type=float, default=None, help="source spin (internal mode)")
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(func=_cmd_streak)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep config errors at 1
        return 1 if exc.code not in (0, None) else 0
    try:
        args.func(args)
    except ConservationError as exc:
        print(f"spinledger: conservation audit failed: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"spinledger: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
