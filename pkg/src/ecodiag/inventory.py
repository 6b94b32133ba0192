"""Fleet model (the declared perimeter) and inventory parsers.

Two input paths: the native fleet CSV, and GLPI-style exports mapped through
user rules. Parsing is pure; a Fleet never mutates after construction.
"""
from __future__ import annotations

import csv
import fnmatch
import io
import logging
import math
import re
from dataclasses import dataclass, field

from .errors import FleetParseError, MissingFactorError
from .factors import (
    ASSET_CATEGORIES,
    CABLE_CATEGORIES,
    FactorDatabase,
    category,
    check_text_field,
    lookup_factor,
)

logger = logging.getLogger(__name__)

STATUSES = ("in_use", "stored")
HOUR_PROFILES = ("work_year", "continuous")

#: GLPI status text normalized to the two inventory statuses. Unknown labels
#: fall back to in_use so electricity is over- rather than under-counted.
GLPI_STATUS_ALIASES = {
    "en service": "in_use",
    "used": "in_use",
    "in use": "in_use",
    "stock": "stored",
    "storage": "stored",
    "réserve": "stored",
}


def _check_optional_nonneg(value: float | None, name: str) -> None:
    if value is not None and (not math.isfinite(value) or value < 0):
        raise ValueError(f"{name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class Asset:
    """One inventory line: a quantity of identical devices of one category."""

    id: str
    category: str
    quantity: int
    acquisition_year: int
    disposal_year: int | None = None
    status: str = "in_use"
    measured_power_w: float | None = None
    vendor_fab_transport_kgco2e: float | None = None
    hour_profile_override: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("asset id must be non-empty")
        check_text_field(self.id, "asset id")
        if self.category not in ASSET_CATEGORIES:
            raise ValueError(f"unknown or non-asset category: {self.category}")
        if self.quantity < 1:
            raise ValueError(f"quantity must be >= 1, got {self.quantity}")
        if self.disposal_year is not None and self.disposal_year < self.acquisition_year:
            raise ValueError(
                f"disposal_year {self.disposal_year} earlier than "
                f"acquisition_year {self.acquisition_year}"
            )
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")
        _check_optional_nonneg(self.measured_power_w, "measured_power_w")
        _check_optional_nonneg(self.vendor_fab_transport_kgco2e, "vendor_fab_transport_kgco2e")
        if self.hour_profile_override is not None and self.hour_profile_override not in HOUR_PROFILES:
            raise ValueError(f"hour_profile_override must be one of {HOUR_PROFILES}")


@dataclass(frozen=True)
class ServerRoom:
    """A machine room: refrigerant leakage, UPS overhead, optional whole-room meter."""

    id: str
    refrigerant_fluid: str | None = None
    refrigerant_leak_kg_per_year: float = 0.0
    ups_overhead_fraction: float = 0.0
    measured_room_kwh_per_year: float | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("room id must be non-empty")
        check_text_field(self.id, "room id")
        leak = self.refrigerant_leak_kg_per_year
        if not math.isfinite(leak) or leak < 0:
            raise ValueError(f"refrigerant_leak_kg_per_year must be >= 0, got {leak}")
        if leak > 0 and not self.refrigerant_fluid:
            raise ValueError("refrigerant_fluid required when leak > 0")
        frac = self.ups_overhead_fraction
        if not math.isfinite(frac) or not 0 <= frac <= 1:
            raise ValueError(f"ups_overhead_fraction must be in [0, 1], got {frac}")
        _check_optional_nonneg(self.measured_room_kwh_per_year, "measured_room_kwh_per_year")


@dataclass(frozen=True)
class ComputeCampaign:
    """A compute campaign, declared either as kWh or as core-hours at a wattage.

    Completeness of the energy declaration is checked by validate_fleet, not
    at construction, so malformed campaigns surface as issues rather than
    parse crashes.
    """

    id: str
    kwh: float | None = None
    core_hours: float | None = None
    watts_per_core: float | None = None
    pue: float = 1.0

    def __post_init__(self):
        if not self.id:
            raise ValueError("campaign id must be non-empty")
        check_text_field(self.id, "campaign id")
        _check_optional_nonneg(self.kwh, "kwh")
        _check_optional_nonneg(self.core_hours, "core_hours")
        _check_optional_nonneg(self.watts_per_core, "watts_per_core")
        if not math.isfinite(self.pue) or self.pue < 1:
            raise ValueError(f"pue must be >= 1, got {self.pue}")

    @property
    def has_energy_declaration(self) -> bool:
        return self.kwh is not None or (
            self.core_hours is not None and self.watts_per_core is not None
        )


@dataclass(frozen=True)
class ExternalServiceEntry:
    """A hosted service whose provider declared a CO2e figure for our usage."""

    id: str
    declared_kgco2e: float
    scope_label: str
    note: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("external service id must be non-empty")
        check_text_field(self.id, "external service id")
        if not math.isfinite(self.declared_kgco2e) or self.declared_kgco2e < 0:
            raise ValueError(f"declared_kgco2e must be >= 0, got {self.declared_kgco2e}")
        if self.scope_label not in ("S2", "S3"):
            raise ValueError(f"scope_label must be S2 or S3, got {self.scope_label!r}")
        check_text_field(self.note, "note")
        if any(ch in self.note for ch in ";,="):
            raise ValueError(f"note must not contain ';', ',' or '=': {self.note!r}")


@dataclass(frozen=True)
class CableBulk:
    """Cables bought this year, counted in bulk (fabrication only)."""

    category: str
    count_acquired_this_year: int

    def __post_init__(self):
        if self.category not in CABLE_CATEGORIES:
            raise ValueError(f"not a cable category: {self.category}")
        if self.count_acquired_this_year < 0:
            raise ValueError("cable count must be >= 0")


@dataclass(frozen=True)
class Fleet:
    """The declared perimeter for one reporting year.

    The perimeter description is mandatory: a CO2e figure without its
    perimeter is meaningless for year-over-year comparison.
    """

    perimeter_description: str
    reporting_year: int
    assets: tuple[Asset, ...] = ()
    rooms: tuple[ServerRoom, ...] = ()
    campaigns: tuple[ComputeCampaign, ...] = ()
    external_services: tuple[ExternalServiceEntry, ...] = ()
    cable_bulks: tuple[CableBulk, ...] = ()

    def __post_init__(self):
        if not self.perimeter_description.strip():
            raise ValueError("perimeter_description must be non-empty")
        for name in ("assets", "rooms", "campaigns", "external_services", "cable_bulks"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for label, items in (
            ("asset", self.assets),
            ("room", self.rooms),
            ("campaign", self.campaigns),
            ("external service", self.external_services),
        ):
            seen: set[str] = set()
            for item in items:
                if item.id in seen:
                    raise ValueError(f"duplicate {label} id: {item.id}")
                seen.add(item.id)


@dataclass(frozen=True)
class MappingRule:
    """First-match-wins rule turning a GLPI record into an asset category."""

    match_field: str
    pattern: str
    target_category: str

    def __post_init__(self):
        if self.match_field not in ("type", "model", "name"):
            raise ValueError(f"match_field must be type|model|name, got {self.match_field!r}")
        if not self.pattern:
            raise ValueError("pattern must be non-empty")
        if self.target_category not in ASSET_CATEGORIES:
            raise ValueError(f"unknown or non-asset category: {self.target_category}")

    def matches(self, record: dict[str, str]) -> bool:
        value = (record.get(self.match_field) or "").lower()
        pattern = self.pattern.lower()
        if any(ch in pattern for ch in "*?["):
            return fnmatch.fnmatchcase(value, pattern)
        return pattern in value


@dataclass(frozen=True)
class UnmappedRecord:
    """A GLPI record no rule claimed; returned rather than silently dropped."""

    row_number: int
    record: dict = field(compare=False)
    reason: str = ""


@dataclass(frozen=True)
class Issue:
    """One validation finding; severity is 'error' or 'warning'."""

    severity: str
    subject_id: str
    message: str


FLEET_CSV_COLUMNS = (
    "kind,id,category,quantity,acquisition_year,disposal_year,status,"
    "measured_power_w,vendor_fab_kgco2e,extra"
).split(",")

_EXTRA_KEYS = {
    "asset": ("hours",),
    "room": ("fluid", "leak_kg", "ups_overhead", "room_kwh"),
    "campaign": ("kwh", "core_hours", "watts_per_core", "pue"),
    "external": ("kgco2e", "scope", "note"),
    "cable": (),
}


def _parse_extra(text: str, kind: str, rownum: int) -> dict[str, str]:
    out: dict[str, str] = {}
    if not text:
        return out
    for part in text.split(";"):
        key, sep, value = part.partition("=")
        if not sep:
            raise FleetParseError(f"extra field {part!r} is not key=value", row=rownum)
        if key not in _EXTRA_KEYS[kind]:
            raise FleetParseError(f"unknown extra key {key!r} for kind {kind}", row=rownum)
        if key in out:
            raise FleetParseError(f"duplicate extra key {key!r}", row=rownum)
        out[key] = value
    return out


def _opt_float(text: str, name: str, rownum: int) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise FleetParseError(f"field {name}: not a number: {text!r}", row=rownum) from None


def _req_int(text: str, name: str, rownum: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise FleetParseError(f"field {name}: not an integer: {text!r}", row=rownum) from None


def _require_empty(fields: list[str], names: list[str], kind: str, rownum: int) -> None:
    for value, name in zip(fields, names):
        if value != "":
            raise FleetParseError(
                f"field {name} must be empty for kind {kind}, got {value!r}", row=rownum
            )


def asset_from_csv_fields(fields: list[str], rownum: int = 0) -> Asset:
    """Build an Asset from the nine fleet-CSV columns after 'kind'."""
    if len(fields) != 9:
        raise FleetParseError(f"expected 9 asset fields, got {len(fields)}", row=rownum)
    extra = _parse_extra(fields[8], "asset", rownum)
    try:
        return Asset(
            id=fields[0],
            category=fields[1],
            quantity=_req_int(fields[2], "quantity", rownum),
            acquisition_year=_req_int(fields[3], "acquisition_year", rownum),
            disposal_year=None if fields[4] == "" else _req_int(fields[4], "disposal_year", rownum),
            status=fields[5],
            measured_power_w=_opt_float(fields[6], "measured_power_w", rownum),
            vendor_fab_transport_kgco2e=_opt_float(fields[7], "vendor_fab_kgco2e", rownum),
            hour_profile_override=extra.get("hours"),
        )
    except ValueError as exc:
        raise FleetParseError(str(exc), row=rownum) from None


def _room_from_fields(fields: list[str], rownum: int) -> ServerRoom:
    _require_empty(fields[1:8], FLEET_CSV_COLUMNS[2:9], "room", rownum)
    extra = _parse_extra(fields[8], "room", rownum)
    leak = _opt_float(extra.get("leak_kg", ""), "leak_kg", rownum)
    ups = _opt_float(extra.get("ups_overhead", ""), "ups_overhead", rownum)
    try:
        return ServerRoom(
            id=fields[0],
            refrigerant_fluid=extra.get("fluid") or None,
            refrigerant_leak_kg_per_year=0.0 if leak is None else leak,
            ups_overhead_fraction=0.0 if ups is None else ups,
            measured_room_kwh_per_year=_opt_float(extra.get("room_kwh", ""), "room_kwh", rownum),
        )
    except ValueError as exc:
        raise FleetParseError(str(exc), row=rownum) from None


def _campaign_from_fields(fields: list[str], rownum: int) -> ComputeCampaign:
    _require_empty(fields[1:8], FLEET_CSV_COLUMNS[2:9], "campaign", rownum)
    extra = _parse_extra(fields[8], "campaign", rownum)
    pue = _opt_float(extra.get("pue", ""), "pue", rownum)
    try:
        return ComputeCampaign(
            id=fields[0],
            kwh=_opt_float(extra.get("kwh", ""), "kwh", rownum),
            core_hours=_opt_float(extra.get("core_hours", ""), "core_hours", rownum),
            watts_per_core=_opt_float(extra.get("watts_per_core", ""), "watts_per_core", rownum),
            pue=1.0 if pue is None else pue,
        )
    except ValueError as exc:
        raise FleetParseError(str(exc), row=rownum) from None


def _external_from_fields(fields: list[str], rownum: int) -> ExternalServiceEntry:
    _require_empty(fields[1:8], FLEET_CSV_COLUMNS[2:9], "external", rownum)
    extra = _parse_extra(fields[8], "external", rownum)
    value = _opt_float(extra.get("kgco2e", ""), "kgco2e", rownum)
    if value is None:
        raise FleetParseError("external entry requires extra kgco2e=<value>", row=rownum)
    try:
        return ExternalServiceEntry(
            id=fields[0],
            declared_kgco2e=value,
            scope_label=extra.get("scope", ""),
            note=extra.get("note", ""),
        )
    except ValueError as exc:
        raise FleetParseError(str(exc), row=rownum) from None


def _cable_from_fields(fields: list[str], rownum: int) -> CableBulk:
    if fields[0] != "":
        raise FleetParseError(f"field id must be empty for kind cable, got {fields[0]!r}", row=rownum)
    _require_empty(fields[3:8], FLEET_CSV_COLUMNS[4:9], "cable", rownum)
    if fields[8] != "":
        raise FleetParseError("field extra must be empty for kind cable", row=rownum)
    try:
        return CableBulk(
            category=fields[1],
            count_acquired_this_year=_req_int(fields[2], "quantity", rownum),
        )
    except ValueError as exc:
        raise FleetParseError(str(exc), row=rownum) from None


def parse_fleet_csv(text: str, reporting_year: int, perimeter_description: str) -> Fleet:
    """Parse the native fleet CSV into a Fleet.

    Rows are dispatched on the 'kind' column: asset, room, campaign,
    external, or cable. Blank lines and '#' comments are skipped; empty
    input yields an empty (still valid) fleet.
    """
    assets: list[Asset] = []
    rooms: list[ServerRoom] = []
    campaigns: list[ComputeCampaign] = []
    externals: list[ExternalServiceEntry] = []
    cables: list[CableBulk] = []
    seen_ids: dict[str, set[str]] = {"asset": set(), "room": set(), "campaign": set(), "external": set()}
    header_seen = False

    for rownum, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = next(csv.reader([raw]))
        if not header_seen:
            if fields != FLEET_CSV_COLUMNS:
                raise FleetParseError(
                    f"expected header {','.join(FLEET_CSV_COLUMNS)!r}", row=rownum
                )
            header_seen = True
            continue
        if len(fields) != len(FLEET_CSV_COLUMNS):
            raise FleetParseError(
                f"expected {len(FLEET_CSV_COLUMNS)} fields, got {len(fields)}", row=rownum
            )
        kind, rest = fields[0], fields[1:]
        if kind in seen_ids and rest[0] in seen_ids[kind]:
            raise FleetParseError(f"duplicate {kind} id: {rest[0]}", row=rownum)
        if kind == "asset":
            assets.append(asset_from_csv_fields(rest, rownum))
        elif kind == "room":
            rooms.append(_room_from_fields(rest, rownum))
        elif kind == "campaign":
            campaigns.append(_campaign_from_fields(rest, rownum))
        elif kind == "external":
            externals.append(_external_from_fields(rest, rownum))
        elif kind == "cable":
            cables.append(_cable_from_fields(rest, rownum))
        else:
            raise FleetParseError(f"unknown kind: {kind!r}", row=rownum)
        if kind in seen_ids:
            seen_ids[kind].add(rest[0])

    try:
        return Fleet(
            perimeter_description=perimeter_description,
            reporting_year=reporting_year,
            assets=tuple(assets),
            rooms=tuple(rooms),
            campaigns=tuple(campaigns),
            external_services=tuple(externals),
            cable_bulks=tuple(cables),
        )
    except ValueError as exc:
        raise FleetParseError(str(exc)) from None


def _fmt_opt(value) -> str:
    return "" if value is None else str(value)


def _extra_text(pairs: list[tuple[str, object]]) -> str:
    return ";".join(f"{k}={v}" for k, v in pairs if v is not None and v != "")


def render_fleet_csv(fleet: Fleet) -> str:
    """Serialize a fleet to canonical CSV; inverse of parse_fleet_csv."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FLEET_CSV_COLUMNS)
    for a in fleet.assets:
        writer.writerow(
            [
                "asset", a.id, a.category, a.quantity, a.acquisition_year,
                _fmt_opt(a.disposal_year), a.status, _fmt_opt(a.measured_power_w),
                _fmt_opt(a.vendor_fab_transport_kgco2e),
                _extra_text([("hours", a.hour_profile_override)]),
            ]
        )
    for r in fleet.rooms:
        extra = _extra_text(
            [
                ("fluid", r.refrigerant_fluid),
                ("leak_kg", r.refrigerant_leak_kg_per_year or None),
                ("ups_overhead", r.ups_overhead_fraction or None),
                ("room_kwh", r.measured_room_kwh_per_year),
            ]
        )
        writer.writerow(["room", r.id, "", "", "", "", "", "", "", extra])
    for c in fleet.campaigns:
        extra = _extra_text(
            [
                ("kwh", c.kwh),
                ("core_hours", c.core_hours),
                ("watts_per_core", c.watts_per_core),
                ("pue", None if c.pue == 1.0 else c.pue),
            ]
        )
        writer.writerow(["campaign", c.id, "", "", "", "", "", "", "", extra])
    for e in fleet.external_services:
        extra = _extra_text([("kgco2e", e.declared_kgco2e), ("scope", e.scope_label), ("note", e.note)])
        writer.writerow(["external", e.id, "", "", "", "", "", "", "", extra])
    for b in fleet.cable_bulks:
        writer.writerow(["cable", "", b.category, b.count_acquired_this_year, "", "", "", "", "", ""])
    return buf.getvalue()


def parse_mapping_rules(text: str) -> tuple[MappingRule, ...]:
    """Parse mapping-rule rows 'match_field,pattern,target_category'; order matters."""
    rules: list[MappingRule] = []
    for rownum, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = next(csv.reader([raw]))
        if len(fields) != 3:
            raise FleetParseError(f"expected 3 fields, got {len(fields)}", row=rownum)
        try:
            rules.append(MappingRule(fields[0], fields[1], fields[2]))
        except ValueError as exc:
            raise FleetParseError(str(exc), row=rownum) from None
    return tuple(rules)


_GLPI_REQUIRED = ("name", "type", "model", "purchase_date", "status")
_ISO_DATE = re.compile(r"^(\d{4})(?:-\d{2}-\d{2})?$")
_FR_DATE = re.compile(r"^\d{2}[/-]\d{2}[/-](\d{4})$")


def _year_from_date(text: str) -> int | None:
    text = text.strip()
    m = _ISO_DATE.match(text)
    if m:
        return int(m.group(1))
    m = _FR_DATE.match(text)
    if m:
        return int(m.group(1))
    return None


def parse_glpi_export(
    text: str,
    rules: tuple[MappingRule, ...],
    reporting_year: int,
    perimeter_description: str,
) -> tuple[Fleet, tuple[UnmappedRecord, ...]]:
    """Map a GLPI CSV export to a fleet of single-unit assets.

    Every input record lands either in the fleet or in the unmapped list,
    never nowhere. Records are matched against the rules in order; the first
    match decides the category.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return Fleet(perimeter_description, reporting_year), ()
    missing = [c for c in _GLPI_REQUIRED if c not in reader.fieldnames]
    if missing:
        raise FleetParseError(f"missing required column(s): {', '.join(missing)}")

    assets: list[Asset] = []
    unmapped: list[UnmappedRecord] = []
    used_ids: dict[str, int] = {}
    for rownum, record in enumerate(reader, start=2):
        record = {k: (v or "") for k, v in record.items() if k is not None}
        rule = next((r for r in rules if r.matches(record)), None)
        if rule is None:
            unmapped.append(UnmappedRecord(rownum, record, "no matching rule"))
            continue
        year = _year_from_date(record["purchase_date"])
        if year is None:
            unmapped.append(
                UnmappedRecord(rownum, record, f"unparsable purchase_date: {record['purchase_date']!r}")
            )
            continue
        status_text = record["status"].strip().lower()
        status = GLPI_STATUS_ALIASES.get(status_text)
        if status is None:
            logger.warning("GLPI row %d: unknown status %r, assuming in_use", rownum, record["status"])
            status = "in_use"
        base_id = record["name"].strip() or f"glpi-row-{rownum}"
        count = used_ids.get(base_id, 0)
        used_ids[base_id] = count + 1
        asset_id = base_id if count == 0 else f"{base_id}#{count + 1}"
        assets.append(
            Asset(
                id=asset_id,
                category=rule.target_category,
                quantity=1,
                acquisition_year=year,
                status=status,
            )
        )
    fleet = Fleet(perimeter_description, reporting_year, assets=tuple(assets))
    return fleet, tuple(unmapped)


def validate_fleet(
    fleet: Fleet, db: FactorDatabase, age_warning_years: int = 10
) -> list[Issue]:
    """Check a fleet against a merged factor database.

    Errors block computation (missing factor, unknown refrigerant, campaign
    without an energy declaration); warnings flag data worth a second look.
    """
    issues: list[Issue] = []
    gwp_fluids = {g.fluid for g in db.gwp_table}

    used = sorted({a.category for a in fleet.assets} | {b.category for b in fleet.cable_bulks})
    for cat_id in used:
        try:
            lookup_factor(db, cat_id)
        except MissingFactorError:
            issues.append(Issue("error", cat_id, f"missing factor: {cat_id}"))

    for room in fleet.rooms:
        if room.refrigerant_leak_kg_per_year > 0 and room.refrigerant_fluid not in gwp_fluids:
            issues.append(
                Issue("error", room.id, f"unknown refrigerant fluid: {room.refrigerant_fluid}")
            )
    for campaign in fleet.campaigns:
        if not campaign.has_energy_declaration:
            issues.append(
                Issue(
                    "error",
                    campaign.id,
                    "campaign declares neither kwh nor (core_hours, watts_per_core)",
                )
            )

    for asset in fleet.assets:
        age = fleet.reporting_year - asset.acquisition_year
        if age > age_warning_years:
            issues.append(
                Issue("warning", asset.id, f"asset age {age} years (replacement candidate)")
            )
        if asset.status == "in_use" and asset.measured_power_w is None:
            try:
                factor = lookup_factor(db, asset.category)
            except MissingFactorError:
                continue
            if factor.typical_power_w == 0 and "S2" in category(asset.category).scope_mask:
                issues.append(
                    Issue(
                        "warning",
                        asset.id,
                        "zero-power factor and no measured power: no usage emissions",
                    )
                )
    return issues
