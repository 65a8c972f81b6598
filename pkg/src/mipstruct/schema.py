"""Unified benchmark-instance artifact: emit, load, validate, measure.

One instance is one directory::

    <id>/
      instance.json   -- the record binding everything together
      model.md        -- index-explicit mathematical formulation
      generator.py    -- deterministic regeneration entry point (or stub)
      solve.py        -- solver entry point (desk-scale exact solve)
      data/*.csv      -- numeric tables factored out of the model
      logs/           -- solver output (empty until something runs)
      model.mps       -- flat formulation, when available

The natural-language ``abstract_problem`` is a deterministic template
rendering of the recovered scaffold -- one sentence per variable group, the
objective, and each constraint family with its loop scope.  File and
parameter references are backtick-quoted so the validator can resolve them.

Compression ratio convention: the NL size is the UTF-8 byte length of the
emitted ``abstract_problem`` text; data size is the total size of ``data/``;
KB columns divide by 1000 (pass ``kib=True`` for 1024).
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingMpsSizeError
from .mining import VARIES, ConstraintFamily, tokenize_name
from .model import INF, Integrality, Model, ObjSense
from .scaffolds import ScaffoldLabel, ScaffoldReport

VERIFICATION_STATUSES = ("OPTIMAL", "INFEASIBLE", "UNBOUNDED", "OPEN", "UNKNOWN")


@dataclass(frozen=True)
class FileRef:
    path: str
    description: str
    schema: tuple[str, ...] = ()  # column names for tabular files

    def to_json(self) -> dict:
        return {
            "path": self.path,
            "description": self.description,
            "schema": list(self.schema),
        }


@dataclass(frozen=True)
class VerificationBlock:
    status: str = "UNKNOWN"
    runtime_seconds: float | None = None
    gap: float | None = None
    log_paths: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "runtime": self.runtime_seconds,
            "gap": self.gap,
            "log_paths": list(self.log_paths),
        }


@dataclass(frozen=True)
class InstanceRecord:
    id: str
    major_category: str
    subcategory: str
    abstract_problem: str
    parameters: dict
    files: tuple[FileRef, ...]
    concrete_problem: str | None
    mathematical_formulation: str
    solver_code: str
    generator_code: str
    optimal_value: float | None
    verification: VerificationBlock
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "problem_type": {
                "major_category": self.major_category,
                "subcategory": self.subcategory,
            },
            "abstract_problem": self.abstract_problem,
            "parameters": dict(sorted(self.parameters.items())),
            "files": [f.to_json() for f in self.files],
            "concrete_problem": self.concrete_problem,
            "mathematical_formulation": self.mathematical_formulation,
            "solver_code": self.solver_code,
            "generator_code": self.generator_code,
            "optimal_value": self.optimal_value,
            "verification": self.verification.to_json(),
            "metadata": dict(sorted(self.metadata.items())),
        }

    @staticmethod
    def from_json(doc: dict) -> "InstanceRecord":
        problem_type = doc.get("problem_type", {})
        verification = doc.get("verification", {})
        return InstanceRecord(
            id=doc["id"],
            major_category=problem_type.get("major_category", ""),
            subcategory=problem_type.get("subcategory", ""),
            abstract_problem=doc.get("abstract_problem", ""),
            parameters=dict(doc.get("parameters", {})),
            files=tuple(
                FileRef(f["path"], f.get("description", ""),
                        tuple(f.get("schema", [])))
                for f in doc.get("files", [])
            ),
            concrete_problem=doc.get("concrete_problem"),
            mathematical_formulation=doc.get("mathematical_formulation", ""),
            solver_code=doc.get("solver_code", ""),
            generator_code=doc.get("generator_code", ""),
            optimal_value=doc.get("optimal_value"),
            verification=VerificationBlock(
                status=verification.get("status", "UNKNOWN"),
                runtime_seconds=verification.get("runtime"),
                gap=verification.get("gap"),
                log_paths=tuple(verification.get("log_paths", [])),
            ),
            metadata=dict(doc.get("metadata", {})),
        )


@dataclass(frozen=True)
class SchemaViolation:
    code: str
    detail: str


@dataclass(frozen=True)
class CompressionRecord:
    mps_bytes: int
    nl_bytes: int
    data_bytes: int

    @property
    def cr(self) -> float:
        return self.mps_bytes / (self.nl_bytes + self.data_bytes)

    def kb(self, kib: bool = False) -> dict:
        div = 1024.0 if kib else 1000.0
        return {
            "mps_kb": self.mps_bytes / div,
            "nl_kb": self.nl_bytes / div,
            "data_kb": self.data_bytes / div,
            "cr": self.cr,
        }


def compression_ratio(mps_bytes: float, nl_bytes: float, data_bytes: float) -> float:
    """mps size over (NL size + auxiliary data size); unit-invariant."""
    denom = nl_bytes + data_bytes
    if denom <= 0:
        raise ValueError("NL + data size must be positive")
    return mps_bytes / denom


# ---------------------------------------------------------------------------
# emission


@dataclass
class EmitOptions:
    instance_id: str
    major_category: str = "Synthetic / Prototype MILPs"
    subcategory: str = "Synthetic Examples / Prototypes"
    parameters: dict = field(default_factory=dict)
    # caller-supplied tables override auto-factoring:
    # list of (relative path under data/, header tuple, rows, description)
    tables: list | None = None
    abstract_problem: str | None = None
    concrete_problem: str | None = None
    verification: VerificationBlock = field(default_factory=VerificationBlock)
    optimal_value: float | None = None
    metadata: dict = field(default_factory=dict)
    mps_text: str | None = None
    generator_code_text: str | None = None
    solver_code_text: str | None = None


def _fmt_cell(x) -> str:
    if isinstance(x, float):
        if x == int(x) and abs(x) < 1e16:
            return str(int(x))
        return repr(x)
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(x) for x in row])


_INTEGRALITY_WORD = {
    Integrality.CONTINUOUS: "continuous",
    Integrality.INTEGER: "integer",
    Integrality.BINARY: "binary",
}


def _default_bounds(kind: Integrality) -> tuple[float, float]:
    if kind is Integrality.BINARY:
        return 0.0, 1.0
    return 0.0, INF


def _group_table(model: Model, report: ScaffoldReport, group):
    """Per-member table: indices, objective coefficient, non-default bounds,
    and the coefficients of any single-row family the group feeds."""
    obj = {j: c for j, c in model.objective.terms}
    members = list(group.members)
    has_obj = any(obj.get(j) for j in members)
    nondefault = any(
        (model.variables[j].lower, model.variables[j].upper)
        != _default_bounds(model.variables[j].integrality)
        for j in members
    )
    single_row_cols = []
    for fr in report.families:
        fam = fr.family
        if fam.size != 1:
            continue
        row = model.rows[fam.rows[0]]
        coeffs = {j: c for j, c in row.terms if j in set(members)}
        if len(coeffs) >= 2 and len(set(coeffs.values())) > 1:
            single_row_cols.append((fam.base or f"f{fam.id}", coeffs))

    if not (has_obj or nondefault or single_row_cols):
        return None

    header = [f"idx_{p + 1}" for p in range(group.arity)] or ["name"]
    if has_obj:
        header.append("objective")
    if nondefault:
        header += ["lower", "upper"]
    for base, _ in single_row_cols:
        header.append(f"coeff_{base}")

    rows = []
    for j in members:
        var = model.variables[j]
        tok = tokenize_name(var.name)
        rec = list(tok.indices) if group.arity else [var.name]
        if has_obj:
            rec.append(obj.get(j, 0.0))
        if nondefault:
            rec.append(var.lower if var.lower != -INF else "-inf")
            rec.append(var.upper if var.upper != INF else "inf")
        for _, coeffs in single_row_cols:
            rec.append(coeffs.get(j, 0.0))
        rows.append(rec)
    return header, rows


def _family_key_columns(model: Model, family: ConstraintFamily):
    """Row-name index tokens as the tabulation key; None when inconsistent."""
    tokens = [tokenize_name(model.rows[i].name) for i in family.rows]
    arities = {t.arity for t in tokens}
    if len(arities) != 1 or arities == {0}:
        return None
    return [list(t.indices) for t in tokens]


def _family_tables(model: Model, family, gid_of, groups):
    """(filename stem, header, rows, description) tables for one family,
    plus a warning string when the family is unfactorable."""
    sig = family.signature
    needs_rhs = sig.rhs_class is VARIES
    has_varying_bucket = any(
        coeff is VARIES or count is VARIES
        for _gid, _sign, coeff, count in sig.term_pattern
    )
    if family.size <= 1 or not (needs_rhs or has_varying_bucket):
        return [], None

    base = family.base or f"f{family.id}"
    keys = _family_key_columns(model, family)
    warning = None
    if keys is None:
        warning = (
            f"family {base}: no consistent row index key; "
            "tabulated by raw row name"
        )
        key_header = ["row"]
        keys = [[model.rows[i].name] for i in family.rows]
    else:
        key_header = [f"key_{p + 1}" for p in range(len(keys[0]))]

    group_by_id = {g.id: g for g in groups}
    gid_buckets = [g for g, _s, _c, _n in sig.term_pattern]
    tables = []

    main_header = list(key_header)
    main_cols = []
    member_tables = []
    for gid, sign, coeff, count in sig.term_pattern:
        gbase = group_by_id[gid].base or f"g{gid}"
        col_name = f"coeff_{gbase}"
        if gid_buckets.count(gid) > 1:
            col_name += "_pos" if sign > 0 else "_neg"
        bucket_rows = []
        for row_id in family.rows:
            row = model.rows[row_id]
            bucket_rows.append(
                [(j, c) for j, c in row.terms
                 if gid_of[j] == gid and (c > 0) == (sign > 0)]
            )
        counts = {len(b) for b in bucket_rows}
        if count is VARIES or counts != {1}:
            if coeff is VARIES or count is VARIES:
                # irregular supports: long-form membership listing
                arity = group_by_id[gid].arity
                if arity:
                    member_cols = [f"{gbase}_idx_{p + 1}" for p in range(arity)]
                else:
                    member_cols = [f"{gbase}_name"]
                mh = list(key_header) + member_cols
                uniform = len({c for b in bucket_rows for _, c in b}) <= 1
                if not uniform:
                    mh.append("coeff")
                mrows = []
                for key, bucket in zip(keys, bucket_rows):
                    for j, c in bucket:
                        tok = tokenize_name(model.variables[j].name)
                        rec = list(key) + (
                            list(tok.indices) if arity else [model.variables[j].name]
                        )
                        if not uniform:
                            rec.append(c)
                        mrows.append(rec)
                member_tables.append(
                    (
                        f"family_{base}_{gbase}_members",
                        mh,
                        mrows,
                        f"members of group {gbase} appearing in each row of "
                        f"family {base}",
                    )
                )
            continue
        if coeff is VARIES:
            main_cols.append((col_name, [b[0][1] for b in bucket_rows]))

    main_rows = []
    if needs_rhs or main_cols:
        if needs_rhs:
            main_header.append("rhs")
        main_header += [name for name, _ in main_cols]
        for r, key in enumerate(keys):
            rec = list(key)
            if needs_rhs:
                rec.append(model.rows[family.rows[r]].rhs)
            for _, col in main_cols:
                rec.append(col[r])
            main_rows.append(rec)
        tables.append(
            (
                f"family_{base}",
                main_header,
                main_rows,
                f"per-row data of constraint family {base}",
            )
        )
    tables.extend(member_tables)
    return tables, warning


def _objective_sentence(model: Model, report: ScaffoldReport) -> str:
    verb = "minimize" if model.objective_sense is ObjSense.MIN else "maximize"
    obj_vars = {j for j, _ in model.objective.terms}
    bases = sorted(
        {g.base or "unnamed" for g in report.groups if obj_vars & set(g.members)}
    )
    if not bases:
        return f"The objective is to {verb} a constant."
    return (
        f"The objective is to {verb} a weighted sum over variable "
        f"group(s) {', '.join(bases)}."
    )


_SCAFFOLD_PHRASE = {
    ScaffoldLabel.GLOBAL: "a single global row over its variables",
    ScaffoldLabel.SINGLE_LOOP: "one row per value of one index set",
    ScaffoldLabel.NESTED_LOOP: "one row per combination of several index sets",
    ScaffoldLabel.SUBSET_INDEXED: "one row per predefined subset of variables",
    ScaffoldLabel.TEMPORAL_COUPLED: "rows linking consecutive index values",
    ScaffoldLabel.CYCLIC_MODULAR: "rows over a cyclic index with wrap-around",
    ScaffoldLabel.SLIDING_WINDOW: "rows summing a sliding index window",
    ScaffoldLabel.PAIRWISE_ALL_PAIRS: "one row per pair of entities",
    ScaffoldLabel.EXTRA_DIMENSION: "identical blocks replicated over one index",
}


def _render_abstract(model: Model, report: ScaffoldReport,
                     file_names: list[str], parameters: dict) -> str:
    stats = report.stats
    lines = [
        f"This optimization instance has {stats.n_vars} decision variables in "
        f"{report.n_variable_groups} indexed group(s) and {stats.n_rows} "
        f"constraints in {report.n_constraint_families} family(ies)."
    ]
    for g in report.groups:
        kinds = sorted(
            {_INTEGRALITY_WORD[model.variables[j].integrality] for j in g.members}
        )
        lines.append(
            f"Variable group {g.base or 'unnamed'} contains {len(g.members)} "
            f"{'/'.join(kinds)} variable(s) indexed by {g.arity} position(s)."
        )
    lines.append(_objective_sentence(model, report))
    for fr in report.families:
        fam = fr.family
        label = fr.label.value if fr.label else "AMBIGUOUS"
        phrase = _SCAFFOLD_PHRASE.get(fr.label, "rows of unresolved loop shape")
        lines.append(
            f"Constraint family {fam.base or f'f{fam.id}'} has {fam.size} "
            f"{fam.signature.sense.value}-row(s) of type "
            f"{fr.atomic_type.value} with scaffold {label}: {phrase}."
        )
    if parameters:
        names = ", ".join(f"`{k}`" for k in sorted(parameters))
        lines.append(f"Structural parameters: {names}.")
    if file_names:
        refs = ", ".join(f"`{name}`" for name in file_names)
        lines.append(f"Numeric data lives in {refs}.")
    return "\n".join(lines) + "\n"


def _render_model_md(model: Model, report: ScaffoldReport, instance_id: str) -> str:
    out = [f"# {instance_id}: mathematical formulation", ""]
    out.append("## Index sets and variable groups")
    for g in report.groups:
        doms = []
        for p, d in enumerate(g.index_domains):
            if d.all_numeric:
                doms.append(f"position {p + 1} in [{d.numeric_min}, {d.numeric_max}]")
            else:
                doms.append(f"position {p + 1} with {len(d.values)} symbolic values")
        dom_text = "; ".join(doms) if doms else "no indices"
        kinds = sorted(
            {_INTEGRALITY_WORD[model.variables[j].integrality] for j in g.members}
        )
        out.append(
            f"- `{g.base or 'unnamed'}`: {len(g.members)} {'/'.join(kinds)} "
            f"variable(s); {dom_text}"
        )
    out.append("")
    out.append("## Objective")
    out.append(f"- {_objective_sentence(model, report)}")
    out.append("")
    out.append("## Constraint families")
    for fr in report.families:
        fam = fr.family
        label = fr.label.value if fr.label else "AMBIGUOUS"
        rhs = fam.signature.rhs_class
        rhs_text = "rhs from data" if rhs is VARIES else f"rhs = {rhs}"
        out.append(
            f"### `{fam.base or f'f{fam.id}'}` ({fam.size} rows, sense "
            f"{fam.signature.sense.value}, {label})"
        )
        out.append(f"- atomic type: {fr.atomic_type.value}; {rhs_text}")
        if fr.evidence is not None:
            ev = {k: v for k, v in fr.evidence.to_json().items() if v}
            if ev:
                out.append(f"- evidence: {json.dumps(ev, sort_keys=True)}")
    out.append("")
    return "\n".join(out)


_GENERATOR_STUB = '''\
"""Regeneration entry point.

{body}
"""

if __name__ == "__main__":
    print({message!r})
'''

_SOLVER_STUB = '''\
"""Exact desk-scale solve of the bundled flat model.

Enumerates all integer assignments; refuses models beyond the point budget.
"""

import json
import sys
from pathlib import Path

from mipstruct.mps_io import parse_mps
from mipstruct.oracle import solve_exhaustive

if __name__ == "__main__":
    here = Path(__file__).resolve().parent
    model = parse_mps(here / "model.mps")
    result = solve_exhaustive(model)
    json.dump(result.to_json(), sys.stdout, indent=2)
    print()
'''


def instance_json_bytes(record: InstanceRecord) -> bytes:
    return (json.dumps(record.to_json(), indent=2) + "\n").encode("utf-8")


def emit_instance(report: ScaffoldReport, model: Model, target_dir,
                  options: EmitOptions) -> InstanceRecord:
    """Write the full artifact directory and return its record.

    Tables come either from ``options.tables`` (generator-supplied, e.g. the
    network-design file set) or from auto-factoring: per-group tables for
    objective coefficients and non-default bounds, per-family tables for rhs
    and coefficients that vary across rows, membership listings for
    irregular supports.
    """
    target = Path(target_dir)
    (target / "data").mkdir(parents=True, exist_ok=True)
    (target / "logs").mkdir(exist_ok=True)

    warnings: list[str] = []
    tables: list[tuple[str, list, list, str]] = []
    if options.tables is not None:
        tables = [tuple(t) for t in options.tables]
    else:
        mined = report.mining
        gid_of = mined.gid_of if mined else {}
        for g in report.groups:
            made = _group_table(model, report, g)
            if made:
                header, rows = made
                tables.append(
                    (
                        f"group_{g.base or f'g{g.id}'}",
                        header,
                        rows,
                        f"per-member data of variable group {g.base or g.id}",
                    )
                )
        for fr in report.families:
            fam_tables, warning = _family_tables(
                model, fr.family, gid_of, list(report.groups)
            )
            tables.extend(fam_tables)
            if warning:
                warnings.append(warning)

    file_refs = []
    for stem, header, rows, description in tables:
        name = stem if stem.endswith(".csv") else f"{stem}.csv"
        _write_csv(target / "data" / name, header, rows)
        file_refs.append(
            FileRef(path=f"data/{name}", description=description,
                    schema=tuple(header))
        )
    file_refs.sort(key=lambda f: f.path)

    parameters = dict(options.parameters)
    for g in report.groups:
        parameters.setdefault(f"n_{g.base or f'g{g.id}'}", len(g.members))

    abstract = options.abstract_problem or _render_abstract(
        model, report, [f.path for f in file_refs], parameters
    )

    if options.mps_text is not None:
        (target / "model.mps").write_text(options.mps_text, encoding="utf-8")

    metadata = dict(options.metadata)
    metadata.setdefault("n_variable_groups", report.n_variable_groups)
    metadata.setdefault("n_constraint_families", report.n_constraint_families)
    metadata.setdefault("size_summary", {
        "n_vars": report.stats.n_vars,
        "n_rows": report.stats.n_rows,
        "n_nonzeros": report.stats.n_nonzeros,
    })
    if warnings:
        metadata["emit_warnings"] = sorted(warnings)
    if report.warnings:
        metadata["classifier_warnings"] = list(report.warnings)

    record = InstanceRecord(
        id=options.instance_id,
        major_category=options.major_category,
        subcategory=options.subcategory,
        abstract_problem=abstract,
        parameters=parameters,
        files=tuple(file_refs),
        concrete_problem=options.concrete_problem,
        mathematical_formulation="model.md",
        solver_code="solve.py",
        generator_code="generator.py",
        optimal_value=options.optimal_value,
        verification=options.verification,
        metadata=metadata,
    )

    (target / "model.md").write_text(
        _render_model_md(model, report, options.instance_id), encoding="utf-8"
    )
    gen_text = options.generator_code_text or _GENERATOR_STUB.format(
        body="This instance was extracted from a flat model; see model.mps.",
        message=f"{options.instance_id}: regenerate by re-running the "
                "extraction pipeline on model.mps",
    )
    (target / "generator.py").write_text(gen_text, encoding="utf-8")
    (target / "solve.py").write_text(
        options.solver_code_text or _SOLVER_STUB, encoding="utf-8"
    )
    (target / "instance.json").write_bytes(instance_json_bytes(record))
    return record


def load_instance(instance_dir) -> InstanceRecord:
    doc = json.loads((Path(instance_dir) / "instance.json").read_text("utf-8"))
    return InstanceRecord.from_json(doc)


# ---------------------------------------------------------------------------
# validation


_REQUIRED_FIELDS = (
    "id",
    "problem_type",
    "abstract_problem",
    "parameters",
    "files",
    "mathematical_formulation",
    "solver_code",
    "generator_code",
    "verification",
)


def _backtick_refs(text: str) -> list[str]:
    refs = []
    parts = text.split("`")
    # odd positions are inside backticks
    for i in range(1, len(parts), 2):
        refs.append(parts[i])
    return refs


def validate_instance(instance_dir) -> list[SchemaViolation]:
    """Check one artifact directory; violations are the return value."""
    target = Path(instance_dir)
    out: list[SchemaViolation] = []
    json_path = target / "instance.json"
    if not json_path.exists():
        return [SchemaViolation("MISSING_FILE", "instance.json")]
    try:
        doc = json.loads(json_path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        return [SchemaViolation("BAD_JSON", str(exc))]

    for fieldname in _REQUIRED_FIELDS:
        if fieldname not in doc:
            out.append(SchemaViolation("MISSING_FIELD", fieldname))
    if "problem_type" in doc:
        for sub in ("major_category", "subcategory"):
            if sub not in doc["problem_type"]:
                out.append(SchemaViolation("MISSING_FIELD", f"problem_type.{sub}"))
    if not doc.get("id"):
        out.append(SchemaViolation("MISSING_FIELD", "id (empty)"))

    known_refs = set(doc.get("parameters", {}).keys())
    for f in doc.get("files", []):
        path = f.get("path", "")
        known_refs.add(path)
        known_refs.add(Path(path).name)
        full = target / path
        if not full.exists():
            out.append(SchemaViolation("MISSING_FILE", path))
        if not f.get("description"):
            out.append(SchemaViolation("MISSING_DESCRIPTION", path))
        if path.endswith(".csv"):
            schema = f.get("schema", [])
            if not schema:
                out.append(SchemaViolation("MISSING_SCHEMA", path))
            elif full.exists():
                with open(full, encoding="utf-8", newline="") as fh:
                    header = next(csv.reader(fh), [])
                if list(header) != list(schema):
                    out.append(
                        SchemaViolation(
                            "COLUMN_MISMATCH",
                            f"{path}: header {header} != schema {list(schema)}",
                        )
                    )

    for key in ("mathematical_formulation", "solver_code", "generator_code"):
        rel = doc.get(key)
        if rel and not (target / rel).exists():
            out.append(SchemaViolation("MISSING_FILE", rel))

    for ref in _backtick_refs(doc.get("abstract_problem", "")):
        if ref not in known_refs:
            out.append(SchemaViolation("BAD_REFERENCE", ref))

    status = doc.get("verification", {}).get("status")
    if status is not None and status not in VERIFICATION_STATUSES:
        out.append(SchemaViolation("BAD_STATUS", str(status)))
    optimal = doc.get("optimal_value")
    if status == "OPTIMAL" and optimal is None:
        out.append(
            SchemaViolation("STATUS_VALUE_CONFLICT", "OPTIMAL without optimal_value")
        )
    if status in ("INFEASIBLE", "OPEN", "UNBOUNDED") and optimal is not None:
        out.append(
            SchemaViolation("STATUS_VALUE_CONFLICT", f"{status} with optimal_value")
        )
    return out


# ---------------------------------------------------------------------------
# size measurement and corpus statistics


def compute_cr(instance_dir) -> CompressionRecord:
    """Byte sizes measured on disk, uncompressed; the flat-model size comes
    from model.mps or, failing that, recorded metadata."""
    target = Path(instance_dir)
    record = load_instance(target)
    mps_path = target / "model.mps"
    if mps_path.exists():
        mps_bytes = mps_path.stat().st_size
    elif "mps_bytes" in record.metadata:
        mps_bytes = int(record.metadata["mps_bytes"])
    else:
        raise MissingMpsSizeError(
            f"{target}: no model.mps and no recorded mps_bytes"
        )
    nl_bytes = len(record.abstract_problem.encode("utf-8"))
    data_dir = target / "data"
    data_bytes = sum(
        p.stat().st_size for p in sorted(data_dir.rglob("*")) if p.is_file()
    ) if data_dir.exists() else 0
    return CompressionRecord(mps_bytes, nl_bytes, data_bytes)


@dataclass(frozen=True)
class CorpusStats:
    n_instances: int
    median_mps_bytes: float
    max_mps_bytes: int
    median_data_bytes: float
    max_data_bytes: int
    median_variable_groups: float
    max_variable_groups: int
    median_constraint_families: float
    max_constraint_families: int
    median_cr: float
    max_cr: float
    scale_buckets: dict

    def to_json(self) -> dict:
        return {
            "n_instances": self.n_instances,
            "median_mps_bytes": self.median_mps_bytes,
            "max_mps_bytes": self.max_mps_bytes,
            "median_data_bytes": self.median_data_bytes,
            "max_data_bytes": self.max_data_bytes,
            "median_variable_groups": self.median_variable_groups,
            "max_variable_groups": self.max_variable_groups,
            "median_constraint_families": self.median_constraint_families,
            "max_constraint_families": self.max_constraint_families,
            "median_cr": self.median_cr,
            "max_cr": self.max_cr,
            "scale_buckets": dict(sorted(self.scale_buckets.items())),
        }


def corpus_stats(instance_dirs) -> CorpusStats:
    from .metrics import bucket_by_scale  # local import; no cycle at module load

    dirs = sorted(Path(d) for d in instance_dirs)
    if not dirs:
        raise ValueError("corpus_stats needs at least one instance")
    mps_sizes, data_sizes, crs = [], [], []
    n_groups, n_families = [], []
    buckets = {"SMALL": 0, "MEDIUM": 0, "LARGE": 0, "VERY_LARGE": 0}
    for d in dirs:
        record = load_instance(d)
        comp = compute_cr(d)
        mps_sizes.append(comp.mps_bytes)
        data_sizes.append(comp.data_bytes)
        crs.append(comp.cr)
        n_groups.append(int(record.metadata.get("n_variable_groups", 0)))
        n_families.append(int(record.metadata.get("n_constraint_families", 0)))
        size = record.metadata.get("size_summary", {})
        total = int(size.get("n_vars", 0)) + int(size.get("n_rows", 0))
        buckets[bucket_by_scale(total)] += 1
    return CorpusStats(
        n_instances=len(dirs),
        median_mps_bytes=statistics.median(mps_sizes),
        max_mps_bytes=max(mps_sizes),
        median_data_bytes=statistics.median(data_sizes),
        max_data_bytes=max(data_sizes),
        median_variable_groups=statistics.median(n_groups),
        max_variable_groups=max(n_groups),
        median_constraint_families=statistics.median(n_families),
        max_constraint_families=max(n_families),
        median_cr=statistics.median(crs),
        max_cr=max(crs),
        scale_buckets=buckets,
    )
