"""Annual CO2-equivalent assessment of an IT fleet.

Feed an equipment inventory and an emission-factor file to compute_fleet and
aggregate; compare successive years or evaluate replacement scenarios on top.
"""
from .engine import (
    EmissionLine,
    EngineConfig,
    GridFactor,
    aggregate_uncertainty,
    compute_fleet,
    config_for,
    usage_hours,
)
from .errors import (
    EcodiagError,
    FactorParseError,
    FleetParseError,
    MissingFactorError,
    ScenarioError,
    UnknownFluidError,
)
from .factors import (
    CATEGORIES,
    DEFAULT_GRID_FACTOR,
    EmissionFactor,
    EquipmentCategory,
    FactorDatabase,
    GwpEntry,
    SourceMeta,
    load_factor_db,
    lookup_factor,
    merge_factors,
    reliability_rank,
    render_factor_file,
)
from .inventory import (
    Asset,
    CableBulk,
    ComputeCampaign,
    ExternalServiceEntry,
    Fleet,
    Issue,
    MappingRule,
    ServerRoom,
    UnmappedRecord,
    parse_fleet_csv,
    parse_glpi_export,
    parse_mapping_rules,
    render_fleet_csv,
    validate_fleet,
)
from .report import (
    Report,
    ScenarioAction,
    ScenarioResult,
    YearComparison,
    aggregate,
    apply_scenario,
    compare_years,
    evaluate_scenario,
    factor_db_identity,
    parse_actions_csv,
    parse_report_json,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "Asset",
    "CATEGORIES",
    "CableBulk",
    "ComputeCampaign",
    "DEFAULT_GRID_FACTOR",
    "EcodiagError",
    "EmissionFactor",
    "EmissionLine",
    "EngineConfig",
    "EquipmentCategory",
    "ExternalServiceEntry",
    "FactorDatabase",
    "FactorParseError",
    "Fleet",
    "FleetParseError",
    "GridFactor",
    "GwpEntry",
    "Issue",
    "MappingRule",
    "MissingFactorError",
    "Report",
    "ScenarioAction",
    "ScenarioError",
    "ScenarioResult",
    "ServerRoom",
    "SourceMeta",
    "UnknownFluidError",
    "UnmappedRecord",
    "YearComparison",
    "aggregate",
    "aggregate_uncertainty",
    "apply_scenario",
    "compare_years",
    "compute_fleet",
    "config_for",
    "evaluate_scenario",
    "factor_db_identity",
    "load_factor_db",
    "lookup_factor",
    "merge_factors",
    "parse_actions_csv",
    "parse_fleet_csv",
    "parse_glpi_export",
    "parse_mapping_rules",
    "parse_report_json",
    "reliability_rank",
    "render",
    "render_factor_file",
    "render_fleet_csv",
    "usage_hours",
    "validate_fleet",
]
