"""Annual reports, year-over-year comparison, replacement scenarios, rendering.

Arithmetic stays at full precision everywhere; only the human-facing formats
(markdown, CSV) round to 0.1 kgCO2e. JSON keeps exact values so reports can
be re-read and compared without drift.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass

from .engine import EmissionLine, EngineConfig, aggregate_uncertainty, compute_fleet
from .errors import FleetParseError, ScenarioError
from .factors import GROUPS, SCOPES, FactorDatabase, category
from .inventory import Asset, Fleet, asset_from_csv_fields

#: Fixed wording embedded in rendered reports; deliberately timestamp-free so
#: identical inputs produce identical bytes.
GENERATED_NOTE = (
    "Figures are order-of-magnitude estimates built from per-category factors; "
    "use them to compare years and options, not as exact measurements."
)

EXTERNAL_GROUP = "external"


@dataclass(frozen=True)
class Report:
    """Aggregated totals for one reporting year over one declared perimeter."""

    reporting_year: int
    perimeter_description: str
    totals_by_scope: dict
    totals_by_group: dict
    external_total_kgco2e: float
    grand_total_kgco2e: float
    abs_uncertainty_kgco2e: float
    line_count: int
    factor_db_hash: str = ""
    generated_note: str = GENERATED_NOTE


@dataclass(frozen=True)
class YearComparison:
    """Reports of successive years side by side, with consecutive deltas."""

    years: tuple[int, ...]
    perimeter_description: str
    totals_by_scope: dict
    grand_totals: tuple[float, ...]
    deltas_kgco2e: tuple[float, ...]
    deltas_pct: tuple[float | None, ...]
    per_scope_deltas: dict
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScenarioAction:
    """One fleet edit: remove an asset, add one, or replace one with another."""

    op: str
    target_asset_id: str | None = None
    new_asset: Asset | None = None

    def __post_init__(self):
        if self.op not in ("remove", "add", "replace"):
            raise ValueError(f"op must be remove|add|replace, got {self.op!r}")
        if self.op in ("remove", "replace") and not self.target_asset_id:
            raise ValueError(f"{self.op} requires target_asset_id")
        if self.op in ("add", "replace") and self.new_asset is None:
            raise ValueError(f"{self.op} requires new_asset")
        if self.op == "remove" and self.new_asset is not None:
            raise ValueError("remove takes no new_asset")


@dataclass(frozen=True)
class ScenarioResult:
    """Baseline vs variant reports plus the replacement-decision figures."""

    baseline: Report
    variant: Report
    delta_kgco2e: float
    payback_years: float | None
    verdict: str


def factor_db_identity(name: str, text: str) -> str:
    """Stable identity of a factor file, embedded in reports so a changed
    factor set cannot masquerade as a fleet improvement."""
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
    return f"{name}:sha256:{digest}"


def _group_of_subject(fleet: Fleet) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for bulk in fleet.cable_bulks:
        mapping[bulk.category] = "bulk"
    for asset in fleet.assets:
        mapping[asset.id] = category(asset.category).group
    for room in fleet.rooms:
        mapping[room.id] = "server_room"
    for campaign in fleet.campaigns:
        mapping[campaign.id] = "compute"
    for entry in fleet.external_services:
        mapping[entry.id] = EXTERNAL_GROUP
    return mapping


def aggregate(lines: list[EmissionLine], fleet: Fleet, factor_db_hash: str = "") -> Report:
    """Fold emission lines into per-scope and per-group totals.

    Declared external entries land in the pseudo-group 'external', kept apart
    from equipment groups so grand_total = sum(scopes) = sum(groups) + external.
    """
    group_of = _group_of_subject(fleet)
    by_scope = {s: 0.0 for s in SCOPES}
    by_group = {g: 0.0 for g in GROUPS}
    external = 0.0
    for line in lines:
        by_scope[line.scope] += line.kgco2e
        group = group_of[line.subject_id]
        if group == EXTERNAL_GROUP:
            external += line.kgco2e
        else:
            by_group[group] += line.kgco2e
    _, uncertainty = aggregate_uncertainty(lines)
    return Report(
        reporting_year=fleet.reporting_year,
        perimeter_description=fleet.perimeter_description,
        totals_by_scope=by_scope,
        totals_by_group=by_group,
        external_total_kgco2e=external,
        grand_total_kgco2e=sum(by_scope.values()),
        abs_uncertainty_kgco2e=uncertainty,
        line_count=len(lines),
        factor_db_hash=factor_db_hash,
    )


def compare_years(reports: list[Report]) -> YearComparison:
    """Line up reports by year and compute consecutive deltas.

    Requires at least two reports with distinct years; mismatched perimeters
    or factor sets do not block the comparison but are flagged as warnings.
    """
    if len(reports) < 2:
        raise ValueError("need at least two reports to compare")
    ordered = sorted(reports, key=lambda r: r.reporting_year)
    years = tuple(r.reporting_year for r in ordered)
    if len(set(years)) != len(years):
        raise ValueError(f"reporting years must be distinct, got {years}")

    warnings: list[str] = []
    perimeters = {r.perimeter_description for r in ordered}
    if len(perimeters) > 1:
        warnings.append(
            "perimeter mismatch: " + " / ".join(sorted(perimeters))
        )
    hashes = {r.factor_db_hash for r in ordered if r.factor_db_hash}
    if len(hashes) > 1:
        warnings.append("factor set changed between years: " + " / ".join(sorted(hashes)))

    grand = tuple(r.grand_total_kgco2e for r in ordered)
    deltas = tuple(b - a for a, b in zip(grand, grand[1:]))
    pcts = tuple(
        None if a == 0 else (b - a) / a * 100.0 for a, b in zip(grand, grand[1:])
    )
    return YearComparison(
        years=years,
        perimeter_description=ordered[0].perimeter_description,
        totals_by_scope={s: tuple(r.totals_by_scope[s] for r in ordered) for s in SCOPES},
        grand_totals=grand,
        deltas_kgco2e=deltas,
        deltas_pct=pcts,
        per_scope_deltas={
            s: tuple(
                ordered[i + 1].totals_by_scope[s] - ordered[i].totals_by_scope[s]
                for i in range(len(ordered) - 1)
            )
            for s in SCOPES
        },
        warnings=tuple(warnings),
    )


def apply_scenario(fleet: Fleet, actions: list[ScenarioAction]) -> Fleet:
    """Apply actions to a copy of the fleet; the baseline is never touched.

    A replacement's new asset is acquired now: its acquisition year is forced
    to the reporting year so its fabrication is charged to the variant.
    """
    assets = list(fleet.assets)

    def _index_of(asset_id: str) -> int:
        for i, a in enumerate(assets):
            if a.id == asset_id:
                return i
        raise ScenarioError(f"unknown target asset id: {asset_id}")

    for action in actions:
        if action.op == "remove":
            del assets[_index_of(action.target_asset_id)]
        else:
            new = action.new_asset
            if action.op == "replace":
                del assets[_index_of(action.target_asset_id)]
                try:
                    new = dataclasses.replace(new, acquisition_year=fleet.reporting_year)
                except ValueError as exc:
                    raise ScenarioError(f"replacement asset {new.id}: {exc}") from None
            if any(a.id == new.id for a in assets):
                raise ScenarioError(f"added asset id already exists: {new.id}")
            assets.append(new)
    return dataclasses.replace(fleet, assets=tuple(assets))


def evaluate_scenario(
    fleet: Fleet,
    actions: list[ScenarioAction],
    db: FactorDatabase,
    config: EngineConfig,
) -> ScenarioResult:
    """Compare the fleet before and after the actions under identical settings.

    Payback answers the replacement dilemma: how many years of electricity
    savings repay the fabrication of the newly added equipment. It is absent
    when the variant saves no usage emissions.
    """
    variant_fleet = apply_scenario(fleet, actions)
    baseline_lines = compute_fleet(fleet, db, config)
    variant_lines = compute_fleet(variant_fleet, db, config)
    baseline = aggregate(baseline_lines, fleet)
    variant = aggregate(variant_lines, variant_fleet)

    added_ids = {a.new_asset.id for a in actions if a.new_asset is not None}
    added_fabrication = sum(
        l.kgco2e
        for l in variant_lines
        if l.phase == "fabrication_transport" and l.subject_id in added_ids
    )
    savings = baseline.totals_by_scope["S2"] - variant.totals_by_scope["S2"]
    payback = added_fabrication / savings if savings > 0 else None

    if not actions:
        verdict = "no actions: variant is identical to the baseline"
    elif payback is not None:
        verdict = (
            f"usage savings {savings:.1f} kgCO2e/year; fabrication of added "
            f"equipment pays back in {payback:.2f} years"
        )
    else:
        verdict = "no annual usage savings; added fabrication is not recovered"
    return ScenarioResult(
        baseline=baseline,
        variant=variant,
        delta_kgco2e=variant.grand_total_kgco2e - baseline.grand_total_kgco2e,
        payback_years=payback,
        verdict=verdict,
    )


def parse_actions_csv(text: str) -> tuple[ScenarioAction, ...]:
    """Parse scenario actions: rows 'op,target_id,<asset fields...>'.

    The asset fields reuse the fleet-CSV asset column order (id, category,
    quantity, acquisition_year, disposal_year, status, measured_power_w,
    vendor_fab_kgco2e, extra). remove rows may stop after the target id.
    Structural problems raise FleetParseError; whether a target exists is
    only known against a fleet, so that check lives in apply_scenario.
    """
    actions: list[ScenarioAction] = []
    for rownum, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = next(csv.reader([raw]))
        if fields[0] == "op":
            continue
        op = fields[0]
        if op == "remove":
            if len(fields) < 2 or not fields[1]:
                raise FleetParseError("remove requires a target id", row=rownum)
            if any(f != "" for f in fields[2:]):
                raise FleetParseError("remove takes no asset fields", row=rownum)
            actions.append(ScenarioAction("remove", target_asset_id=fields[1]))
        elif op in ("add", "replace"):
            if len(fields) != 11:
                raise FleetParseError(
                    f"{op} requires 11 fields (op, target_id, 9 asset fields)", row=rownum
                )
            if op == "add" and fields[1]:
                raise FleetParseError("add takes no target id", row=rownum)
            asset = asset_from_csv_fields(fields[2:], rownum)
            actions.append(
                ScenarioAction(op, target_asset_id=fields[1] or None, new_asset=asset)
            )
        else:
            raise FleetParseError(f"unknown op {op!r}", row=rownum)
    return tuple(actions)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_SCOPE_LABELS = {
    "S1": "S1 (direct fugitive)",
    "S2": "S2 (purchased electricity)",
    "S3": "S3 (fabrication, end of life, declared)",
}


def _report_dict(report: Report) -> dict:
    return {
        "reporting_year": report.reporting_year,
        "perimeter": report.perimeter_description,
        "totals_by_scope": {s: report.totals_by_scope[s] for s in SCOPES},
        "totals_by_group": {g: report.totals_by_group[g] for g in GROUPS},
        "external_total": report.external_total_kgco2e,
        "grand_total_kgco2e": report.grand_total_kgco2e,
        "abs_uncertainty_kgco2e": report.abs_uncertainty_kgco2e,
        "line_count": report.line_count,
        "factor_db_hash": report.factor_db_hash,
    }


def parse_report_json(text: str) -> Report:
    """Rebuild a Report from its JSON rendering."""
    data = json.loads(text)
    missing = [k for k in _report_dict(_EMPTY_REPORT) if k not in data]
    if missing:
        raise ValueError(f"report JSON lacks key(s): {', '.join(missing)}")
    return Report(
        reporting_year=data["reporting_year"],
        perimeter_description=data["perimeter"],
        totals_by_scope={s: float(data["totals_by_scope"][s]) for s in SCOPES},
        totals_by_group={g: float(data["totals_by_group"][g]) for g in GROUPS},
        external_total_kgco2e=float(data["external_total"]),
        grand_total_kgco2e=float(data["grand_total_kgco2e"]),
        abs_uncertainty_kgco2e=float(data["abs_uncertainty_kgco2e"]),
        line_count=data["line_count"],
        factor_db_hash=data["factor_db_hash"],
    )


_EMPTY_REPORT = Report(
    reporting_year=0,
    perimeter_description="-",
    totals_by_scope={s: 0.0 for s in SCOPES},
    totals_by_group={g: 0.0 for g in GROUPS},
    external_total_kgco2e=0.0,
    grand_total_kgco2e=0.0,
    abs_uncertainty_kgco2e=0.0,
    line_count=0,
)


def _render_report_markdown(report: Report) -> str:
    out = [
        f"# Annual IT fleet CO₂e assessment ({report.reporting_year})",
        "",
        f"**Perimeter:** {report.perimeter_description}",
        "",
        "| Scope | kgCO₂e |",
        "|---|---:|",
    ]
    for s in SCOPES:
        out.append(f"| {_SCOPE_LABELS[s]} | {report.totals_by_scope[s]:.1f} |")
    out += ["", "| Equipment group | kgCO₂e |", "|---|---:|"]
    for g in GROUPS:
        out.append(f"| {g} | {report.totals_by_group[g]:.1f} |")
    out.append(f"| external (declared) | {report.external_total_kgco2e:.1f} |")
    out += [
        "",
        f"**Grand total: {report.grand_total_kgco2e:.1f} "
        f"± {report.abs_uncertainty_kgco2e:.1f} kgCO₂e** "
        f"({report.line_count} emission lines)",
        "",
        report.generated_note,
        "",
        f"Factor set: {report.factor_db_hash or 'unspecified'}",
        "",
    ]
    return "\n".join(out)


def _render_report_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["year", "scope", "group", "kgco2e", "uncertainty"])
    for s in SCOPES:
        writer.writerow([report.reporting_year, s, "", f"{report.totals_by_scope[s]:.1f}", ""])
    for g in GROUPS:
        writer.writerow([report.reporting_year, "", g, f"{report.totals_by_group[g]:.1f}", ""])
    writer.writerow(
        [report.reporting_year, "", EXTERNAL_GROUP, f"{report.external_total_kgco2e:.1f}", ""]
    )
    writer.writerow(
        [
            report.reporting_year,
            "",
            "",
            f"{report.grand_total_kgco2e:.1f}",
            f"{report.abs_uncertainty_kgco2e:.1f}",
        ]
    )
    return buf.getvalue()


def _pct_text(pct: float | None) -> str:
    return "n/a" if pct is None else f"{pct:+.1f}%"


def _render_comparison_markdown(cmp: YearComparison) -> str:
    out = [
        "# Year-over-year comparison",
        "",
        f"**Perimeter:** {cmp.perimeter_description}",
        "",
        "| Year | S1 | S2 | S3 | Total | Delta | Delta % |",
        "|---:|---:|---:|---:|---:|---:|---:|",
    ]
    for i, year in enumerate(cmp.years):
        delta = "" if i == 0 else f"{cmp.deltas_kgco2e[i - 1]:+.1f}"
        pct = "" if i == 0 else _pct_text(cmp.deltas_pct[i - 1])
        cells = [
            str(year),
            *(f"{cmp.totals_by_scope[s][i]:.1f}" for s in SCOPES),
            f"{cmp.grand_totals[i]:.1f}",
            delta,
            pct,
        ]
        out.append("| " + " | ".join(cells) + " |")
    out.append("")
    for w in cmp.warnings:
        out.append(f"Warning: {w}")
    if cmp.warnings:
        out.append("")
    return "\n".join(out)


def _render_comparison_csv(cmp: YearComparison) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["year", "S1", "S2", "S3", "grand_total", "delta_kgco2e", "delta_pct"])
    for i, year in enumerate(cmp.years):
        writer.writerow(
            [
                year,
                *(f"{cmp.totals_by_scope[s][i]:.1f}" for s in SCOPES),
                f"{cmp.grand_totals[i]:.1f}",
                "" if i == 0 else f"{cmp.deltas_kgco2e[i - 1]:.1f}",
                "" if i == 0 else _pct_text(cmp.deltas_pct[i - 1]),
            ]
        )
    return buf.getvalue()


def _comparison_dict(cmp: YearComparison) -> dict:
    return {
        "years": list(cmp.years),
        "perimeter": cmp.perimeter_description,
        "totals_by_scope": {s: list(cmp.totals_by_scope[s]) for s in SCOPES},
        "grand_totals": list(cmp.grand_totals),
        "deltas": [
            {
                "from_year": cmp.years[i],
                "to_year": cmp.years[i + 1],
                "delta_kgco2e": cmp.deltas_kgco2e[i],
                "delta_pct": cmp.deltas_pct[i],
            }
            for i in range(len(cmp.years) - 1)
        ],
        "warnings": list(cmp.warnings),
    }


def _render_scenario_markdown(res: ScenarioResult) -> str:
    payback = "n/a" if res.payback_years is None else f"{res.payback_years:.2f} years"
    out = [
        f"# Replacement scenario ({res.baseline.reporting_year})",
        "",
        f"**Perimeter:** {res.baseline.perimeter_description}",
        "",
        "| Metric | Baseline | Variant |",
        "|---|---:|---:|",
    ]
    for s in SCOPES:
        out.append(
            f"| {_SCOPE_LABELS[s]} | {res.baseline.totals_by_scope[s]:.1f} "
            f"| {res.variant.totals_by_scope[s]:.1f} |"
        )
    out += [
        f"| Grand total (kgCO₂e) | {res.baseline.grand_total_kgco2e:.1f} "
        f"| {res.variant.grand_total_kgco2e:.1f} |",
        "",
        f"Delta: {res.delta_kgco2e:+.1f} kgCO₂e for the reporting year",
        f"Payback: {payback}",
        f"Verdict: {res.verdict}",
        "",
    ]
    return "\n".join(out)


def _render_scenario_csv(res: ScenarioResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "value"])
    writer.writerow(["baseline_grand_total_kgco2e", f"{res.baseline.grand_total_kgco2e:.1f}"])
    writer.writerow(["variant_grand_total_kgco2e", f"{res.variant.grand_total_kgco2e:.1f}"])
    for s in SCOPES:
        writer.writerow([f"baseline_{s}_kgco2e", f"{res.baseline.totals_by_scope[s]:.1f}"])
        writer.writerow([f"variant_{s}_kgco2e", f"{res.variant.totals_by_scope[s]:.1f}"])
    writer.writerow(["delta_kgco2e", f"{res.delta_kgco2e:.1f}"])
    writer.writerow(
        ["payback_years", "n/a" if res.payback_years is None else f"{res.payback_years:.2f}"]
    )
    return buf.getvalue()


def _scenario_dict(res: ScenarioResult) -> dict:
    return {
        "baseline": _report_dict(res.baseline),
        "variant": _report_dict(res.variant),
        "delta_kgco2e": res.delta_kgco2e,
        "payback_years": res.payback_years,
        "verdict": res.verdict,
    }


def render(obj: Report | YearComparison | ScenarioResult, fmt: str) -> str:
    """Render a report, comparison or scenario as json, csv or markdown.

    Output is byte-stable: fixed key order, no timestamps, '\\n' line endings.
    """
    if fmt not in ("json", "csv", "markdown"):
        raise ValueError(f"format must be json|csv|markdown, got {fmt!r}")
    if isinstance(obj, Report):
        if fmt == "json":
            return json.dumps(_report_dict(obj), indent=2) + "\n"
        if fmt == "csv":
            return _render_report_csv(obj)
        return _render_report_markdown(obj)
    if isinstance(obj, YearComparison):
        if fmt == "json":
            return json.dumps(_comparison_dict(obj), indent=2) + "\n"
        if fmt == "csv":
            return _render_comparison_csv(obj)
        return _render_comparison_markdown(obj)
    if isinstance(obj, ScenarioResult):
        if fmt == "json":
            return json.dumps(_scenario_dict(obj), indent=2) + "\n"
        if fmt == "csv":
            return _render_scenario_csv(obj)
        return _render_scenario_markdown(obj)
    raise TypeError(f"cannot render {type(obj).__name__}")
