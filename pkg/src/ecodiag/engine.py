"""Emission computation: turns a fleet plus a factor database into emission lines.

Rules in force:
  * usage electricity (scope 2) = quantity x power x yearly hours / 1000 x grid,
    with measured power preferred over the factor's typical power;
  * fabrication and transport (scope 3) count only in the acquisition year,
    end-of-life only in the disposal year, both at annual granularity;
  * refrigerant leaks (scope 1) = leaked kg x fluid GWP;
  * whole-room metering replaces per-asset usage for server-room equipment,
    otherwise a UPS overhead fraction applies to the room load;
  * uncertainties add linearly within one factor source (fully correlated)
    and in quadrature across sources; measured or declared values carry none.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .factors import (
    EmissionFactor,
    FactorDatabase,
    GwpEntry,
    category,
    gwp_value,
    lookup_factor,
)
from .inventory import Asset, CableBulk, ComputeCampaign, ExternalServiceEntry, Fleet, ServerRoom

PHASES = ("fabrication_transport", "usage", "end_of_life", "fugitive", "declared")

WORK_YEAR_HOURS = 1607.0
CONTINUOUS_HOURS = 8760.0

#: factor_source labels for lines that carry no factor uncertainty.
MEASURED_SOURCE = "measured"
DECLARED_SOURCE = "declared"
VENDOR_SOURCE = "vendor_fiche"


@dataclass(frozen=True)
class GridFactor:
    """Carbon intensity of purchased electricity, kgCO2e per kWh."""

    kgco2e_per_kwh: float
    source_note: str = ""

    def __post_init__(self):
        if not math.isfinite(self.kgco2e_per_kwh) or self.kgco2e_per_kwh <= 0:
            raise ValueError(f"grid factor must be finite and > 0, got {self.kgco2e_per_kwh}")


@dataclass(frozen=True)
class EmissionLine:
    """One atomic result: a subject emitted kgco2e under one scope and phase."""

    subject_id: str
    scope: str
    phase: str
    kgco2e: float
    abs_uncertainty_kgco2e: float
    factor_source: str

    def __post_init__(self):
        if self.scope not in ("S1", "S2", "S3"):
            raise ValueError(f"scope must be S1|S2|S3, got {self.scope!r}")
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase: {self.phase!r}")
        if not math.isfinite(self.kgco2e) or self.kgco2e < 0:
            raise ValueError(f"kgco2e must be finite and >= 0, got {self.kgco2e}")
        if not math.isfinite(self.abs_uncertainty_kgco2e) or self.abs_uncertainty_kgco2e < 0:
            raise ValueError("abs_uncertainty_kgco2e must be finite and >= 0")


@dataclass(frozen=True)
class EngineConfig:
    """Computation constants: grid intensity and the two yearly hour profiles."""

    grid: GridFactor = GridFactor(0.119, "configured default")
    work_year_hours: float = WORK_YEAR_HOURS
    continuous_hours: float = CONTINUOUS_HOURS

    def __post_init__(self):
        if not 0 < self.work_year_hours <= self.continuous_hours <= 8784:
            raise ValueError(
                "hour profiles must satisfy 0 < work_year_hours <= continuous_hours <= 8784"
            )


def config_for(db: FactorDatabase, grid_override: float | None = None) -> EngineConfig:
    """Build a config from a database's grid factor, optionally overridden."""
    if grid_override is not None:
        return EngineConfig(grid=GridFactor(grid_override, "command-line override"))
    return EngineConfig(
        grid=GridFactor(db.default_grid_factor_kgco2e_per_kwh, "factor file")
    )


def usage_hours(asset: Asset, config: EngineConfig) -> float:
    """Yearly powered-on hours for one asset; stored equipment runs zero."""
    if asset.status == "stored":
        return 0.0
    profile = asset.hour_profile_override or category(asset.category).hour_profile_default
    return config.work_year_hours if profile == "work_year" else config.continuous_hours


def _usage_kwh(asset: Asset, factor: EmissionFactor, config: EngineConfig) -> float:
    power = asset.measured_power_w if asset.measured_power_w is not None else factor.typical_power_w
    return asset.quantity * power * usage_hours(asset, config) / 1000.0


def scope2_usage(asset: Asset, factor: EmissionFactor, config: EngineConfig) -> EmissionLine | None:
    """Electricity consumption line for one asset, None when it draws nothing.

    Measured power is trusted as-is (zero uncertainty); the factor's typical
    power carries the factor's relative uncertainty.
    """
    kwh = _usage_kwh(asset, factor, config)
    if kwh == 0:
        return None
    kgco2e = kwh * config.grid.kgco2e_per_kwh
    measured = asset.measured_power_w is not None
    return EmissionLine(
        subject_id=asset.id,
        scope="S2",
        phase="usage",
        kgco2e=kgco2e,
        abs_uncertainty_kgco2e=0.0 if measured else kgco2e * factor.rel_uncertainty,
        factor_source=MEASURED_SOURCE if measured else factor.source.name,
    )


def scope3_fabrication(
    asset: Asset, factor: EmissionFactor, reporting_year: int
) -> EmissionLine | None:
    """Fabrication and transport line, only in the acquisition year.

    A vendor-declared per-device value overrides the generic factor and is
    treated as exact.
    """
    if asset.acquisition_year != reporting_year:
        return None
    vendor = asset.vendor_fab_transport_kgco2e
    if vendor is not None:
        kgco2e = asset.quantity * vendor
        return EmissionLine(asset.id, "S3", "fabrication_transport", kgco2e, 0.0, VENDOR_SOURCE)
    kgco2e = asset.quantity * factor.fab_transport_kgco2e
    return EmissionLine(
        asset.id,
        "S3",
        "fabrication_transport",
        kgco2e,
        kgco2e * factor.rel_uncertainty,
        factor.source.name,
    )


def scope3_eol(asset: Asset, factor: EmissionFactor, reporting_year: int) -> EmissionLine | None:
    """End-of-life treatment line, only in the disposal year."""
    if asset.disposal_year is None or asset.disposal_year != reporting_year:
        return None
    kgco2e = asset.quantity * factor.eol_kgco2e
    return EmissionLine(
        asset.id, "S3", "end_of_life", kgco2e, kgco2e * factor.rel_uncertainty, factor.source.name
    )


def scope1_refrigerant(room: ServerRoom, gwp_table: tuple[GwpEntry, ...]) -> EmissionLine | None:
    """Fugitive refrigerant line for a room; None when nothing leaked."""
    if room.refrigerant_leak_kg_per_year == 0:
        return None
    gwp = gwp_value(gwp_table, room.refrigerant_fluid or "")
    return EmissionLine(
        subject_id=room.id,
        scope="S1",
        phase="fugitive",
        kgco2e=room.refrigerant_leak_kg_per_year * gwp,
        abs_uncertainty_kgco2e=0.0,
        factor_source=f"gwp:{room.refrigerant_fluid}",
    )


def _room_pool(fleet: Fleet) -> tuple[Asset, ...]:
    # Assets are not tied to a specific room; every server_room-group asset
    # belongs to the fleet's room pool.
    return tuple(a for a in fleet.assets if category(a.category).group == "server_room")


def _any_room_metered(fleet: Fleet) -> bool:
    return any(r.measured_room_kwh_per_year is not None for r in fleet.rooms)


def scope2_room_overheads(
    room: ServerRoom, fleet: Fleet, db: FactorDatabase, config: EngineConfig
) -> list[EmissionLine]:
    """Room-level electricity lines.

    A whole-room meter wins over everything: its single line replaces the
    per-asset usage lines of the server-room pool (compute_fleet applies the
    suppression). Without metering anywhere, the UPS overhead fraction is
    charged on top of the pool's consumption, inheriting its uncertainty.
    """
    if room.measured_room_kwh_per_year is not None:
        return [
            EmissionLine(
                subject_id=room.id,
                scope="S2",
                phase="usage",
                kgco2e=room.measured_room_kwh_per_year * config.grid.kgco2e_per_kwh,
                abs_uncertainty_kgco2e=0.0,
                factor_source=MEASURED_SOURCE,
            )
        ]
    if _any_room_metered(fleet) or room.ups_overhead_fraction == 0:
        return []
    pool_kgco2e = 0.0
    pool_uncertainty = 0.0
    for asset in _room_pool(fleet):
        line = scope2_usage(asset, lookup_factor(db, asset.category), config)
        if line is not None:
            pool_kgco2e += line.kgco2e
            pool_uncertainty += line.abs_uncertainty_kgco2e
    overhead = room.ups_overhead_fraction * pool_kgco2e
    if overhead == 0:
        return []
    return [
        EmissionLine(
            subject_id=room.id,
            scope="S2",
            phase="usage",
            kgco2e=overhead,
            abs_uncertainty_kgco2e=room.ups_overhead_fraction * pool_uncertainty,
            factor_source=f"room_overhead:{room.id}",
        )
    ]


def scope2_campaign(campaign: ComputeCampaign, config: EngineConfig) -> EmissionLine:
    """Electricity line for a compute campaign; direct kWh beats the core-hour model."""
    if campaign.kwh is not None:
        kwh = campaign.kwh
    elif campaign.core_hours is not None and campaign.watts_per_core is not None:
        kwh = campaign.core_hours * campaign.watts_per_core / 1000.0 * campaign.pue
    else:
        raise ValueError(f"campaign {campaign.id}: no energy declaration")
    return EmissionLine(
        subject_id=campaign.id,
        scope="S2",
        phase="usage",
        kgco2e=kwh * config.grid.kgco2e_per_kwh,
        abs_uncertainty_kgco2e=0.0,
        factor_source=DECLARED_SOURCE,
    )


def scope3_cables(bulk: CableBulk, factor: EmissionFactor) -> EmissionLine | None:
    """Fabrication line for cables bought this year; None when none were."""
    if bulk.count_acquired_this_year == 0:
        return None
    kgco2e = bulk.count_acquired_this_year * factor.fab_transport_kgco2e
    return EmissionLine(
        subject_id=bulk.category,
        scope="S3",
        phase="fabrication_transport",
        kgco2e=kgco2e,
        abs_uncertainty_kgco2e=kgco2e * factor.rel_uncertainty,
        factor_source=factor.source.name,
    )


def declared_external(entry: ExternalServiceEntry) -> EmissionLine:
    """Pass-through line for a provider-declared figure."""
    return EmissionLine(
        subject_id=entry.id,
        scope=entry.scope_label,
        phase="declared",
        kgco2e=entry.declared_kgco2e,
        abs_uncertainty_kgco2e=0.0,
        factor_source=DECLARED_SOURCE,
    )


def compute_fleet(fleet: Fleet, db: FactorDatabase, config: EngineConfig) -> list[EmissionLine]:
    """Compute every emission line for a fleet under a merged factor database.

    Output is sorted by (subject_id, scope, phase) so identical inputs always
    produce identical output.
    """
    lines: list[EmissionLine] = []
    metered = _any_room_metered(fleet)

    for asset in fleet.assets:
        cat = category(asset.category)
        factor = lookup_factor(db, asset.category)
        if "S2" in cat.scope_mask and not (metered and cat.group == "server_room"):
            line = scope2_usage(asset, factor, config)
            if line is not None:
                lines.append(line)
        if "S3" in cat.scope_mask:
            for line in (
                scope3_fabrication(asset, factor, fleet.reporting_year),
                scope3_eol(asset, factor, fleet.reporting_year),
            ):
                if line is not None:
                    lines.append(line)

    for room in fleet.rooms:
        line = scope1_refrigerant(room, db.gwp_table)
        if line is not None:
            lines.append(line)
        lines.extend(scope2_room_overheads(room, fleet, db, config))

    for campaign in fleet.campaigns:
        lines.append(scope2_campaign(campaign, config))

    for bulk in fleet.cable_bulks:
        line = scope3_cables(bulk, lookup_factor(db, bulk.category))
        if line is not None:
            lines.append(line)

    for entry in fleet.external_services:
        lines.append(declared_external(entry))

    lines.sort(key=lambda l: (l.subject_id, l.scope, l.phase))
    return lines


def aggregate_uncertainty(lines: list[EmissionLine]) -> tuple[float, float]:
    """Total kgco2e and its absolute uncertainty.

    Lines sharing a factor_source are fully correlated (their uncertainties
    add); distinct sources are independent (group sums combine in quadrature).
    """
    total = sum(l.kgco2e for l in lines)
    groups: dict[str, float] = {}
    for l in lines:
        groups[l.factor_source] = groups.get(l.factor_source, 0.0) + l.abs_uncertainty_kgco2e
    return total, math.sqrt(sum(g * g for g in groups.values()))
