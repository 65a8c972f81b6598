"""Command-line surface: analyze | extract | generate | inspect |
evaluate | oracle | stats.

Every subcommand is a pure function of the files it reads and its flags:
no clock, locale, or environment dependence leaks into output.  Domain
errors exit 1 (as a single JSON diagnostic on stderr under
``--format json``); usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import ToolkitError
from .generators import GENERATOR_NAMES, GeneratorParams, generate
from .inspector import diagnose
from .metrics import InstanceOutcome, aggregate, load_artifacts
from .model import ObjSense, model_stats
from .mps_io import parse_mps
from .oracle import DEFAULT_MAX_POINTS, solve_exhaustive
from .scaffolds import DEFAULT_BIGM_RATIO, classify_all
from .schema import (
    EmitOptions,
    compute_cr,
    corpus_stats,
    emit_instance,
    load_instance,
    validate_instance,
)

_MAX_WORKERS = 8


def _add_parse_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dialect", choices=("auto", "fixed", "free"), default="auto",
                   help="MPS dialect handling (default: auto-sniff)")
    p.add_argument("--legacy-int-bounds", action="store_true",
                   help="integer columns without BOUNDS default to [0,1] "
                        "instead of [0,+inf)")
    p.add_argument("--objsense", choices=("min", "max"), default=None,
                   help="override the objective sense")


def _add_format_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="text",
                   help="output format (default: text)")


def _parse_model(args):
    sense = None
    if getattr(args, "objsense", None):
        sense = ObjSense.MIN if args.objsense == "min" else ObjSense.MAX
    return parse_mps(
        Path(args.mps),
        dialect=args.dialect,
        legacy_int_bounds=args.legacy_int_bounds,
        objective_sense=sense,
    )


def _report_table(report) -> str:
    lines = [
        f"model: {report.model_name or '(unnamed)'}",
        f"size: {report.stats.n_vars} vars + {report.stats.n_rows} rows "
        f"({report.stats.n_nonzeros} nonzeros)",
        f"variable groups: {report.n_variable_groups}",
    ]
    for g in report.groups:
        lines.append(f"  {g.base or '(no base)'}[{g.arity}] x{len(g.members)}")
    lines.append(f"constraint families: {report.n_constraint_families}")
    header = f"  {'family':<14} {'rows':>6} {'atomic type':<24} {'scaffold':<20} form"
    lines.append(header)
    for fr in report.families:
        fam = fr.family
        label = fr.label.value if fr.label else "AMBIGUOUS"
        form = ""
        if fr.label:
            from .scaffolds import CANONICAL_FORMS

            form = CANONICAL_FORMS[fr.label]
        lines.append(
            f"  {fam.base or f'f{fam.id}':<14} {fam.size:>6} "
            f"{fr.atomic_type.value:<24} {label:<20} {form}"
        )
        if fr.evidence:
            ev = {k: v for k, v in fr.evidence.to_json().items() if v}
            if ev:
                lines.append(f"  {'':<14} {'':>6} evidence: "
                             f"{json.dumps(ev, sort_keys=True)}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    for a, b, score in report.similar_families:
        lines.append(f"near-duplicate templates: families {a} and {b} "
                     f"(jaccard {score})")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    model = _parse_model(args)
    report = classify_all(model, bigm_ratio=args.bigm_ratio)
    if args.format == "json":
        json.dump(report.to_json(), sys.stdout, indent=2)
        print()
    else:
        sys.stdout.write(_report_table(report))
    return 0


def cmd_extract(args) -> int:
    source = Path(args.mps)
    model = _parse_model(args)
    report = classify_all(model, bigm_ratio=args.bigm_ratio)
    instance_id = args.id or source.stem
    record = emit_instance(
        report,
        model,
        args.out,
        EmitOptions(
            instance_id=instance_id,
            mps_text=source.read_text(encoding="utf-8"),
        ),
    )
    violations = validate_instance(args.out)
    out = {
        "instance": record.to_json(),
        "violations": [
            {"code": v.code, "detail": v.detail} for v in violations
        ],
    }
    if args.format == "json":
        json.dump(out, sys.stdout, indent=2)
        print()
    else:
        print(f"emitted {instance_id} -> {args.out}")
        print(f"files: {[f.path for f in record.files]}")
        print(f"violations: {len(violations)}")
        for v in violations:
            print(f"  {v.code}: {v.detail}")
    return 0 if not violations else 1


def cmd_generate(args) -> int:
    params = GeneratorParams(
        name=args.name,
        seed=args.seed,
        n_nodes=args.n_nodes,
        n_commodities=args.n_commodities,
        density=args.density,
        n_people=args.n_people,
        n_periods=args.n_periods,
        window=args.window,
        cap=args.cap,
        min_staff=args.min_staff,
        fixed_assignments=args.fixed_assignments,
        n_elements=args.n_elements,
        n_sets=args.n_sets,
        cover_density=args.cover_density,
        n_items=args.n_items,
        capacity_ratio=args.capacity_ratio,
        n_jobs=args.n_jobs,
        separation=args.separation,
        big_m=args.big_m,
    )
    out_dir = Path(args.out)
    instance = generate(params, out_dir)
    summary = {
        "id": instance.record.id,
        "dir": str(out_dir),
        "declared_scaffolds": {
            k: v.value for k, v in sorted(instance.declared_labels.items())
        },
        "declared_counts": dict(sorted(instance.declared_counts.items())),
        "verification": instance.record.verification.status,
        "optimal_value": instance.record.optimal_value,
    }
    if args.format == "json":
        json.dump(summary, sys.stdout, indent=2)
        print()
    else:
        print(f"generated {summary['id']} -> {out_dir}")
        for base, label in summary["declared_scaffolds"].items():
            print(f"  {base}: {label} x{summary['declared_counts'][base]}")
    return 0


def cmd_inspect(args) -> int:
    candidate = parse_mps(Path(args.candidate))
    reference = parse_mps(Path(args.reference))
    cand_sol = json.loads(Path(args.cand_sol).read_text("utf-8"))
    ref_sol = (
        json.loads(Path(args.ref_sol).read_text("utf-8")) if args.ref_sol else None
    )
    name_map = (
        json.loads(Path(args.name_map).read_text("utf-8")) if args.name_map else None
    )
    report = diagnose(
        candidate,
        reference,
        cand_sol,
        ref_sol=ref_sol,
        ref_objective=args.ref_objective,
        sense=ObjSense.MIN if args.sense == "min" else ObjSense.MAX,
        rel_tol=args.rel_tol,
        name_map=name_map,
    )
    json.dump(report.to_json(), sys.stdout, indent=2)
    print()
    return 0


def _load_outcome(instance_dir: Path, by_instance: dict) -> InstanceOutcome:
    record = load_instance(instance_dir)
    size = record.metadata.get("size_summary", {})
    total = int(size.get("n_vars", 0)) + int(size.get("n_rows", 0))
    return InstanceOutcome(
        instance_id=record.id,
        truth=record.optimal_value,
        status=record.verification.status,
        size=total,
        artifacts=tuple(by_instance.get(record.id, ())),
    )


def _instance_dirs(root: Path) -> list[Path]:
    if (root / "instance.json").exists():
        return [root]
    return sorted(
        p.parent for p in root.glob("*/instance.json")
    )


def cmd_evaluate(args) -> int:
    artifacts = load_artifacts(args.results)
    by_instance: dict[str, list] = {}
    for a in artifacts:
        by_instance.setdefault(a.instance_id, []).append(a)
    dirs = _instance_dirs(Path(args.instances))
    with ThreadPoolExecutor(max_workers=_MAX_WORKERS) as pool:
        outcomes = list(pool.map(lambda d: _load_outcome(d, by_instance), dirs))
    table = aggregate(outcomes, n=args.n, rel_tol=args.rel_tol)
    if args.format == "json":
        json.dump(table.to_json(), sys.stdout, indent=2)
        print()
    else:
        sys.stdout.write(table.to_text())
    return 0


def cmd_oracle(args) -> int:
    model = parse_mps(Path(args.mps))
    result = solve_exhaustive(model, max_points=args.max_points)
    json.dump(result.to_json(), sys.stdout, indent=2)
    print()
    return 0


def cmd_stats(args) -> int:
    dirs: list[Path] = []
    for d in args.dirs:
        dirs.extend(_instance_dirs(Path(d)))
    stats = corpus_stats(dirs)
    doc = stats.to_json()
    if args.kib:
        div = 1024.0
        doc["median_mps_kb"] = stats.median_mps_bytes / div
        doc["median_data_kb"] = stats.median_data_bytes / div
    else:
        doc["median_mps_kb"] = stats.median_mps_bytes / 1000.0
        doc["median_data_kb"] = stats.median_data_bytes / 1000.0
    if args.format == "json":
        json.dump(doc, sys.stdout, indent=2)
        print()
    else:
        for key, value in doc.items():
            print(f"{key}: {value}")
        with ThreadPoolExecutor(max_workers=_MAX_WORKERS) as pool:
            crs = list(pool.map(lambda d: (d, compute_cr(d)), dirs))
        for d, comp in sorted(crs, key=lambda t: str(t[0])):
            print(f"  {d}: cr={comp.cr:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mipstruct",
        description="Recover loop structure from flat MPS models, package "
                    "compact instances, generate synthetic ones, and check "
                    "candidate models against ground truth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="mine and classify one MPS model")
    p.add_argument("mps", help="path to the MPS file")
    _add_parse_flags(p)
    _add_format_flag(p)
    p.add_argument("--bigm-ratio", type=float, default=DEFAULT_BIGM_RATIO,
                   help="median-magnitude multiple that counts as big-M")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("extract", help="compile an MPS model into an "
                                       "instance artifact directory")
    p.add_argument("mps", help="path to the MPS file")
    p.add_argument("--out", required=True, help="target instance directory")
    p.add_argument("--id", default=None, help="instance id (default: file stem)")
    _add_parse_flags(p)
    _add_format_flag(p)
    p.add_argument("--bigm-ratio", type=float, default=DEFAULT_BIGM_RATIO,
                   help="median-magnitude multiple that counts as big-M")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("generate", help="emit a synthetic instance")
    p.add_argument("--name", required=True, choices=GENERATOR_NAMES,
                   help="generator family")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed")
    p.add_argument("--out", required=True, help="target instance directory")
    _add_format_flag(p)
    p.add_argument("--n-nodes", type=int, default=4, help="network nodes")
    p.add_argument("--n-commodities", type=int, default=2,
                   help="network commodities")
    p.add_argument("--density", type=float, default=1.0, help="arc density")
    p.add_argument("--n-people", type=int, default=4, help="roster people")
    p.add_argument("--n-periods", type=int, default=12, help="roster periods")
    p.add_argument("--window", type=int, default=4, help="roster window width")
    p.add_argument("--cap", type=int, default=2, help="roster window cap")
    p.add_argument("--min-staff", type=int, default=1,
                   help="roster per-period staffing floor")
    p.add_argument("--fixed-assignments", action="store_true",
                   help="pin the first-period roster assignments")
    p.add_argument("--n-elements", type=int, default=8, help="cover elements")
    p.add_argument("--n-sets", type=int, default=6, help="cover sets")
    p.add_argument("--cover-density", type=float, default=0.4,
                   help="membership probability")
    p.add_argument("--n-items", type=int, default=6, help="knapsack items")
    p.add_argument("--capacity-ratio", type=float, default=0.5,
                   help="knapsack capacity as a fraction of total weight")
    p.add_argument("--n-jobs", type=int, default=4, help="pairwise jobs")
    p.add_argument("--separation", type=int, default=2,
                   help="pairwise separation gap")
    p.add_argument("--big-m", type=float, default=1000.0,
                   help="pairwise disjunction constant")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("inspect", help="diagnose a candidate model against "
                                       "a reference")
    p.add_argument("--candidate", required=True, help="candidate MPS path")
    p.add_argument("--reference", required=True, help="reference MPS path")
    p.add_argument("--cand-sol", required=True,
                   help="candidate solution JSON (name -> value)")
    p.add_argument("--ref-sol", default=None,
                   help="reference solution JSON (name -> value)")
    p.add_argument("--ref-objective", type=float, default=None,
                   help="stored reference optimum when no solution is given")
    p.add_argument("--name-map", default=None,
                   help="JSON map of reference names to candidate names")
    p.add_argument("--sense", choices=("min", "max"), default="min",
                   help="objective sense of both models")
    p.add_argument("--rel-tol", type=float, default=1e-6,
                   help="relative comparison tolerance")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("evaluate", help="score run artifacts against stored "
                                        "ground truth")
    p.add_argument("--results", required=True,
                   help="JSON-lines run artifacts")
    p.add_argument("--instances", required=True,
                   help="instance directory or root of instance directories")
    p.add_argument("--n", type=int, default=1, help="attempts per instance")
    p.add_argument("--rel-tol", type=float, default=1e-6,
                   help="relative comparison tolerance")
    _add_format_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle", help="exact solve by exhaustive enumeration")
    p.add_argument("--mps", required=True, help="path to the MPS file")
    p.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS,
                   help="refuse enumerations beyond this many points")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stats", help="corpus statistics over instance "
                                     "directories")
    p.add_argument("dirs", nargs="+",
                   help="instance directories (or roots of them)")
    p.add_argument("--kib", action="store_true",
                   help="report KB columns as bytes/1024 instead of bytes/1000")
    _add_format_flag(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToolkitError as exc:
        if getattr(args, "format", "text") == "json":
            json.dump(exc.to_json(), sys.stderr)
            sys.stderr.write("\n")
        else:
            print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        if getattr(args, "format", "text") == "json":
            json.dump({"error": "IO", "message": str(exc)}, sys.stderr)
            sys.stderr.write("\n")
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
