"""Command-line entry points.

Exit codes: 0 success, 1 usage error (bad flags), 2 data error (unreadable
snapshot, impossible layout, ...).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict

from . import pipeline
from .calio import (
    SynthProfile,
    convert_snapshot,
    load_config,
    load_snapshot,
    synth_snapshot,
    write_results,
    write_snapshot,
)
from .circuits import PulseAssignment
from .errors import EngineError
from .layout import FilterThresholds
from .qsim import StatePrep

USAGE_EXIT = 1
DATA_EXIT = 2

# The cumulative readout/2q-error tightening used when no stage file is given.
DEFAULT_CASCADE_STAGES = [
    pipeline.BASELINE_THRESHOLDS,
    FilterThresholds(t1_min=30, t2_min=15, e1q_max=0.01, e2q_max=0.10, ero_max=0.05),
    FilterThresholds(t1_min=30, t2_min=15, e1q_max=0.01, e2q_max=0.01, ero_max=0.05),
    FilterThresholds(t1_min=30, t2_min=15, e1q_max=0.01, e2q_max=0.005, ero_max=0.05),
    FilterThresholds(t1_min=30, t2_min=15, e1q_max=0.01, e2q_max=0.003, ero_max=0.05),
]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _add_common(p, snapshot_required=True):
    p.add_argument("--snapshot", required=snapshot_required, help="snapshot JSON path")
    p.add_argument("--theta", type=float, default=math.pi / 2, help="prep polar angle")
    p.add_argument("--phi", type=float, default=0.0, help="prep azimuthal angle")
    p.add_argument("--ns", default="1.0", help="noise scale (comma list for sweep)")
    p.add_argument("--seed", type=int, default=pipeline.DEFAULT_SEED)
    p.add_argument("--repeats", type=int, default=1, help="CSV row duplication (schema mirror only)")
    p.add_argument("--out", help="write results CSV here")
    p.add_argument("--config", help="engine config JSON (shape factors, durations)")


def build_parser() -> _Parser:
    parser = _Parser(prog="telefid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one pipeline configuration")
    _add_common(p_run)
    p_run.add_argument("--mode", choices=("physical", "encoded"), default="physical")
    p_run.add_argument("--layout", help="explicit physical qubits, comma separated")
    p_run.add_argument("--pulse", default="square,square,square",
                       help="sx,cz,measure pulse shapes")

    p_wf = sub.add_parser("waterfall", help="baseline / +L2 / +L3 fidelity trace")
    _add_common(p_wf)
    p_wf.add_argument("--mode", choices=("physical", "encoded"), default="physical")

    p_cas = sub.add_parser("cascade", help="cumulative threshold filter cascade")
    _add_common(p_cas)
    p_cas.add_argument("--stages", help="JSON file with a list of threshold objects")
    p_cas.add_argument("--reference-best", type=float, default=None)

    p_sweep = sub.add_parser("sweep", help="noise-scale sweep over both modes")
    _add_common(p_sweep)
    p_sweep.add_argument("--modes", default="physical,encoded")

    p_conv = sub.add_parser("convert-snapshot", help="best-effort foreign snapshot import")
    p_conv.add_argument("input", help="foreign calibration JSON")
    p_conv.add_argument("--out", required=True, help="version-1 snapshot output path")

    p_synth = sub.add_parser("synth", help="generate a synthetic snapshot")
    p_synth.add_argument("--topology", default="line:6", help="line:N | grid:RxC | ring:N")
    p_synth.add_argument("--regime", default="balanced",
                         choices=("t1_dominated", "dephasing_dominated", "balanced"))
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--snapshot", required=True)
    p_serve.add_argument("--bind", default="127.0.0.1:8000")
    p_serve.add_argument("--budget", type=int, default=10_000)
    return parser


def _parse_pulse(text: str) -> PulseAssignment:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"--pulse needs 3 comma-separated shapes, got {text!r}")
    return PulseAssignment(*parts)


def _parse_scales(text: str):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _factors(args):
    if args.config:
        return load_config(args.config).shape_factors
    from .noise import DEFAULT_SHAPE_FACTORS

    return DEFAULT_SHAPE_FACTORS


def _cmd_run(args) -> int:
    snapshot = load_snapshot(args.snapshot)
    prep = StatePrep(args.theta, args.phi)
    (ns,) = _parse_scales(args.ns) or [1.0]
    if args.layout:
        mapping = {i: int(tok) for i, tok in enumerate(args.layout.split(","))}
        from .layout import LayoutCandidate

        source = LayoutCandidate(mapping, kind="path3" if args.mode == "physical" else "subgraph6")
    else:
        source = FilterThresholds()
    config = pipeline.PipelineConfig(
        mode=args.mode, prep=prep, layout_source=source, pulse=_parse_pulse(args.pulse), ns=ns
    )
    layout = pipeline.resolve_layout(args.mode, prep, snapshot, source, args.seed)
    fidelity, accept = pipeline.run(config, snapshot, _factors(args), args.seed)
    print(f"layout={layout.label()} fidelity={fidelity!r} accept={accept!r}")
    if args.out:
        record = pipeline._record(args.mode, prep, layout, config.pulse, ns, fidelity, accept)
        write_results([record] * args.repeats, args.out)
    return 0


def _cmd_waterfall(args) -> int:
    snapshot = load_snapshot(args.snapshot)
    (ns,) = _parse_scales(args.ns) or [1.0]
    report = pipeline.waterfall(
        StatePrep(args.theta, args.phi),
        snapshot,
        mode=args.mode,
        ns=ns,
        factors=_factors(args),
        seed=args.seed,
    )
    print(f"baseline   ({report.baseline_layout}): {report.f_baseline!r}")
    print(f"+L2        ({report.selected_layout}): {report.f_after_l2!r}  delta={report.delta_l2!r}")
    print(
        f"+L2+L3     ({','.join(report.optimal_pulse.astuple())}): "
        f"{report.f_after_l3!r}  delta={report.delta_l3!r}"
    )
    print(f"total gain: {report.total!r}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["stage", "fidelity", "delta"])
            writer.writerow(["baseline", repr(report.f_baseline), repr(0.0)])
            writer.writerow(["l2", repr(report.f_after_l2), repr(report.delta_l2)])
            writer.writerow(["l3", repr(report.f_after_l3), repr(report.delta_l3)])
    return 0


def _cmd_cascade(args) -> int:
    snapshot = load_snapshot(args.snapshot)
    (ns,) = _parse_scales(args.ns) or [1.0]
    if args.stages:
        with open(args.stages) as fh:
            stages = [FilterThresholds(**doc) for doc in json.load(fh)]
    else:
        stages = DEFAULT_CASCADE_STAGES
    rows = pipeline.filter_cascade(
        snapshot,
        stages,
        StatePrep(args.theta, args.phi),
        reference_best=args.reference_best,
        ns=ns,
        factors=_factors(args),
    )
    header = ["stage", "t1_min", "t2_min", "e1q_max", "e2q_max", "ero_max",
              "path_count", "f_worst", "f_best", "band"]
    lines = [header] + [
        [
            r.stage,
            r.thresholds.t1_min,
            r.thresholds.t2_min,
            r.thresholds.e1q_max,
            r.thresholds.e2q_max,
            r.thresholds.ero_max,
            r.path_count,
            "" if r.f_worst is None else repr(r.f_worst),
            "" if r.f_best is None else repr(r.f_best),
            "" if r.band is None else repr(r.band),
        ]
        for r in rows
    ]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(lines)
    else:
        for line in lines:
            print(",".join(str(x) for x in line))
    return 0


def _cmd_sweep(args) -> int:
    snapshot = load_snapshot(args.snapshot)
    scales = sorted(_parse_scales(args.ns))
    modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
    rows = pipeline.noise_sweep(
        snapshot,
        [StatePrep(args.theta, args.phi)],
        scales,
        modes=modes,
        factors=_factors(args),
        seed=args.seed,
    )
    for row in rows:
        print(
            f"ns={row.ns} f_phys={row.f_phys!r} f_log={row.f_log!r} accept={row.accept!r}"
        )
    if args.out:
        write_results(pipeline.sweep_records(rows, repeats=args.repeats), args.out)
    return 0


def _cmd_convert(args) -> int:
    with open(args.input) as fh:
        doc = json.load(fh)
    snap = convert_snapshot(doc, origin=args.input)
    write_snapshot(snap, args.out)
    print(f"wrote {args.out}: {len(snap.qubits)} qubits, {len(snap.edges)} edges")
    return 0


def _cmd_synth(args) -> int:
    kind, _, dims = args.topology.partition(":")
    if kind == "grid":
        r, _, c = dims.partition("x")
        profile_dims = (int(r), int(c))
    else:
        profile_dims = (int(dims),)
    profile = SynthProfile(kind, profile_dims, args.regime, seed=args.seed)
    snap = synth_snapshot(profile)
    write_snapshot(snap, args.out)
    print(f"wrote {args.out}: {len(snap.qubits)} qubits, {len(snap.edges)} edges")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(args.snapshot, args.bind, budget=args.budget)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "waterfall": _cmd_waterfall,
    "cascade": _cmd_cascade,
    "sweep": _cmd_sweep,
    "convert-snapshot": _cmd_convert,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (EngineError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
