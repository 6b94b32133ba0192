"""Command-line entry point.

Exit codes are a stable contract: 0 success, 1 for I/O, parse or usage
failures, 2 for validation failures. No command ever mutates an input file.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import samples
from .engine import compute_fleet, config_for
from .errors import EcodiagError, FactorParseError, FleetParseError, ScenarioError
from .factors import FactorDatabase, load_factor_db, merge_factors, reliability_rank
from .inventory import (
    Fleet,
    Issue,
    parse_fleet_csv,
    parse_glpi_export,
    parse_mapping_rules,
    validate_fleet,
)
from .report import (
    aggregate,
    compare_years,
    evaluate_scenario,
    factor_db_identity,
    parse_actions_csv,
    parse_report_json,
    render,
)

FACTORS_ENV_VAR = "ECODIAG_FACTORS"

_INIT_FILES = {
    "factors.txt": lambda: samples.SAMPLE_FACTOR_FILE,
    "fleet.csv": samples.sample_fleet_csv,
    "mapping_rules.csv": lambda: samples.SAMPLE_MAPPING_RULES,
}


@dataclass(frozen=True)
class CliConfig:
    """Resolved command-line inputs shared by compute-like commands."""

    factors_path: str
    inventory_path: str
    reporting_year: int
    perimeter_description: str
    grid_override: float | None = None
    output_format: str = "markdown"
    output_path: str | None = None

    def __post_init__(self):
        if self.grid_override is not None and self.grid_override <= 0:
            raise ValueError(f"grid override must be > 0, got {self.grid_override}")
        if self.output_format not in ("json", "csv", "markdown"):
            raise ValueError(f"unknown output format: {self.output_format}")


class _Parser(argparse.ArgumentParser):
    # Usage failures must exit 1, not argparse's default 2 (2 is reserved for
    # validation failures).
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ecodiag", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_fleet_flags(p):
        p.add_argument("--inventory", required=True, help="fleet CSV or GLPI export path")
        p.add_argument("--year", type=int, required=True, help="reporting year")
        p.add_argument("--perimeter", required=True, help="declared perimeter description")
        p.add_argument("--glpi", action="store_true", help="treat inventory as a GLPI export")
        p.add_argument("--rules", help="mapping rules path (required with --glpi)")
        p.add_argument("--factors", help=f"factor file path (default: ${FACTORS_ENV_VAR})")
        p.add_argument("--grid-factor", type=float, dest="grid_factor",
                       help="override the factor file's grid kgCO2e/kWh")
        add_output_flags(p)

    def add_output_flags(p):
        p.add_argument("--format", choices=("json", "csv", "markdown"), default="markdown")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("compute", help="compute the annual report for one fleet")
    add_fleet_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("validate", help="check a fleet against the factor database")
    add_fleet_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="compare two or more report JSON files")
    p.add_argument("reports", nargs="+", help="report JSON paths (two or more)")
    add_output_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scenario", help="evaluate what-if fleet changes")
    add_fleet_flags(p)
    p.add_argument("--actions", required=True, help="actions CSV path")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("factors", help="list the merged factor database")
    p.add_argument("--factors", help=f"factor file path (default: ${FACTORS_ENV_VAR})")
    p.add_argument("--out", help="write output here instead of stdout")
    p.set_defaults(func=cmd_factors)

    p = sub.add_parser("init", help="write sample factor, fleet and rules files")
    p.add_argument("directory", nargs="?", default=".", help="target directory")
    p.set_defaults(func=cmd_init)
    return parser


def _fail(message: str) -> None:
    print(f"ecodiag: error: {message}", file=sys.stderr)


def _factors_path(args) -> str:
    path = args.factors or os.environ.get(FACTORS_ENV_VAR)
    if not path:
        raise FactorParseError(f"no factor file given (--factors or ${FACTORS_ENV_VAR})")
    return path


def _cli_config(args) -> CliConfig:
    return CliConfig(
        factors_path=_factors_path(args),
        inventory_path=args.inventory,
        reporting_year=args.year,
        perimeter_description=args.perimeter,
        grid_override=args.grid_factor,
        output_format=args.format,
        output_path=args.out,
    )


def _load_db(path: str) -> tuple[FactorDatabase, str]:
    text = Path(path).read_text(encoding="utf-8")
    return merge_factors(load_factor_db(text)), factor_db_identity(Path(path).name, text)


def _load_fleet(args) -> Fleet:
    text = Path(args.inventory).read_text(encoding="utf-8")
    if args.glpi:
        if not args.rules:
            raise FleetParseError("--glpi requires --rules <mapping rules path>")
        rules = parse_mapping_rules(Path(args.rules).read_text(encoding="utf-8"))
        fleet, unmapped = parse_glpi_export(text, rules, args.year, args.perimeter)
        for record in unmapped:
            print(
                f"warning: GLPI row {record.row_number} not imported ({record.reason})",
                file=sys.stderr,
            )
        return fleet
    return parse_fleet_csv(text, args.year, args.perimeter)


def _print_issues(issues: list[Issue], stream) -> None:
    for issue in issues:
        print(f"{issue.severity}: {issue.subject_id}: {issue.message}", file=stream)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_compute(args) -> int:
    cfg = _cli_config(args)
    db, db_id = _load_db(cfg.factors_path)
    fleet = _load_fleet(args)
    issues = validate_fleet(fleet, db)
    errors = [i for i in issues if i.severity == "error"]
    _print_issues(issues if errors else [i for i in issues if i.severity == "warning"], sys.stderr)
    if errors:
        return 2
    config = config_for(db, cfg.grid_override)
    lines = compute_fleet(fleet, db, config)
    _emit(render(aggregate(lines, fleet, db_id), cfg.output_format), cfg.output_path)
    return 0


def cmd_validate(args) -> int:
    cfg = _cli_config(args)
    db, _ = _load_db(cfg.factors_path)
    fleet = _load_fleet(args)
    issues = validate_fleet(fleet, db)
    _print_issues(issues, sys.stdout)
    if not issues:
        print("no issues")
    return 2 if any(i.severity == "error" for i in issues) else 0


def cmd_compare(args) -> int:
    if len(args.reports) < 2:
        _fail("compare needs at least two report files")
        return 1
    reports = [parse_report_json(Path(p).read_text(encoding="utf-8")) for p in args.reports]
    comparison = compare_years(reports)
    for warning in comparison.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    _emit(render(comparison, args.format), args.out)
    return 0


def cmd_scenario(args) -> int:
    cfg = _cli_config(args)
    db, _ = _load_db(cfg.factors_path)
    fleet = _load_fleet(args)
    issues = validate_fleet(fleet, db)
    errors = [i for i in issues if i.severity == "error"]
    if errors:
        _print_issues(errors, sys.stderr)
        return 2
    actions = parse_actions_csv(Path(args.actions).read_text(encoding="utf-8"))
    config = config_for(db, cfg.grid_override)
    result = evaluate_scenario(fleet, list(actions), db, config)
    _emit(render(result, cfg.output_format), cfg.output_path)
    return 0


def cmd_factors(args) -> int:
    db, db_id = _load_db(_factors_path(args))
    rows = [
        (
            f.category,
            f"{f.fab_transport_kgco2e:g}",
            f"{f.eol_kgco2e:g}",
            f"{f.typical_power_w:g}",
            f"{f.rel_uncertainty:g}",
            f"{f.source.name} ({f.source.year}, {f.source.kind}, rank {reliability_rank(f.source)})",
        )
        for f in db.factors
    ]
    header = ("category", "fab+transport", "end-of-life", "power W", "rel unc", "winning source")
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    out_lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
        *("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows),
        "",
        f"grid factor: {db.default_grid_factor_kgco2e_per_kwh} kgCO2e/kWh",
        f"gwp fluids: {', '.join(g.fluid for g in db.gwp_table) or 'none'}",
        f"factor set: {db_id}",
    ]
    _emit("\n".join(out_lines) + "\n", args.out)
    return 0


def cmd_init(args) -> int:
    target = Path(args.directory)
    target.mkdir(parents=True, exist_ok=True)
    for name in _INIT_FILES:
        if (target / name).exists():
            _fail(f"refusing to overwrite existing {target / name}")
            return 1
    for name, content in _INIT_FILES.items():
        (target / name).write_text(content(), encoding="utf-8")
        print(f"wrote {target / name}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        _fail(str(exc))
        return 2
    except (EcodiagError, OSError, ValueError) as exc:
        _fail(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
