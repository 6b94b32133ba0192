"""Bundled sample data: factor file, demo fleet, GLPI mapping rules.

All factor and GWP values here are ILLUSTRATIVE. They have plausible orders
of magnitude but are not a published reference set; replace them with your
own before drawing real conclusions.
"""
from __future__ import annotations

from .inventory import (
    Asset,
    CableBulk,
    ComputeCampaign,
    ExternalServiceEntry,
    Fleet,
    ServerRoom,
    render_fleet_csv,
)

SAMPLE_YEAR = 2019
SAMPLE_PERIMETER = (
    "Sample research unit: one site, office fleet, one air-conditioned and "
    "UPS-backed server room, shared printing, ToIP and wifi"
)

SAMPLE_FACTOR_FILE = """\
# Sample emission-factor file.
# VALUES ARE ILLUSTRATIVE PLACEHOLDERS, not a published reference set.
# Edit freely; computations always treat this file as input data.
#
# [factors] columns:
#   category,fab_transport_kgco2e,eol_kgco2e,typical_power_w,rel_uncertainty,
#   source_name,source_year,source_kind,commissioner_neutral,peer_reviewed
[factors]
desktop,330.0,4.0,120.0,0.35,sample-base,2019,public_base,true,false
laptop,156.0,2.5,30,0.30,sample-base,2019,public_base,true,false
tablet,90.0,1.5,10.0,0.35,sample-base,2019,public_base,true,false
screen,250.0,3.0,25.0,0.30,sample-base,2019,public_base,true,false
keyboard,15.0,0.4,0.5,0.40,sample-base,2019,public_base,true,false
mouse,10.0,0.3,0.3,0.40,sample-base,2019,public_base,true,false
office_printer,120.0,2.0,15.0,0.40,sample-base,2019,public_base,true,false
usb_key,6.0,0.1,0.2,0.50,sample-base,2019,public_base,true,false
external_hdd,25.0,0.5,5.0,0.40,sample-base,2019,public_base,true,false
ip_phone,40.0,0.8,3.0,0.40,sample-base,2019,public_base,true,false
mobile_phone,55.0,0.8,2.0,0.35,sample-base,2019,public_base,true,false
server,1100.0,12.0,250.0,0.40,sample-survey,2018,peer_reviewed,true,true
workstation_24x7,600.0,6.0,180.0,0.40,sample-survey,2018,peer_reviewed,true,true
network_switch,180.0,3.0,60.0,0.40,sample-survey,2018,peer_reviewed,true,true
router,150.0,2.5,40.0,0.40,sample-survey,2018,peer_reviewed,true,true
storage_array,900.0,10.0,300.0,0.45,sample-survey,2018,peer_reviewed,true,true
ups,350.0,8.0,0.0,0.45,sample-survey,2018,peer_reviewed,true,true
air_conditioner,700.0,9.0,2000.0,0.45,sample-measure,2020,internal_measure,true,false
videoprojector,94.0,1.2,220.0,0.35,sample-base,2019,public_base,true,false
visio_system,300.0,4.0,80.0,0.40,sample-base,2019,public_base,true,false
wifi_ap,50.0,1.0,8.0,0.40,sample-base,2019,public_base,true,false
multifunction_copier,600.0,8.0,90.0,0.35,sample-base,2019,public_base,true,false
cable_cat5,1.2,0.05,0.0,0.50,sample-base,2019,public_base,true,false
cable_hdmi,2.4,0.08,0.0,0.50,sample-base,2019,public_base,true,false

# Refrigerant global warming potentials, kgCO2e per kg leaked.
# Common published 100-year values; edit to match your reference.
[gwp]
R410A,2088.0
R134a,1430.0
R32,675.0
R407C,1774.0
R404A,3922.0

# Grid carbon intensity, kgCO2e per kWh (French mix).
[grid]
grid_factor_kgco2e_per_kwh,0.119
"""

SAMPLE_MAPPING_RULES = """\
# GLPI mapping rules: match_field,pattern,target_category
# First matching rule wins; order them from specific to generic.
type,laptop,laptop
type,notebook,laptop
type,desktop,desktop
type,workstation,desktop
type,server,server
type,switch,network_switch
type,router,router
type,screen,screen
type,monitor,screen
type,printer,office_printer
type,copier,multifunction_copier
type,phone,ip_phone
type,smartphone,mobile_phone
type,tablet,tablet
type,projector,videoprojector
model,latitude,laptop
model,thinkpad,laptop
model,optiplex,desktop
name,wifi*,wifi_ap
"""


def sample_fleet() -> Fleet:
    """Demo fleet: 150 client posts, 35 servers in one cooled and UPS-backed
    room, a shared copier, individual printers and smartphones, network and
    ToIP gear, one compute campaign, one declared hosted service."""
    assets = (
        Asset("desktops", "desktop", 95, 2016),
        Asset("laptops", "laptop", 50, 2018),
        Asset("laptops-new", "laptop", 5, 2019, vendor_fab_transport_kgco2e=240.0),
        Asset("screens", "screen", 160, 2016),
        Asset("keyboards", "keyboard", 150, 2016),
        Asset("mice", "mouse", 150, 2016),
        Asset("printers", "office_printer", 6, 2017),
        Asset("copier", "multifunction_copier", 1, 2017),
        Asset("smartphones", "mobile_phone", 12, 2018),
        Asset("ip-phones", "ip_phone", 80, 2015),
        Asset("projectors", "videoprojector", 4, 2016),
        Asset("wifi-aps", "wifi_ap", 10, 2017),
        Asset("crt-stock", "screen", 3, 2008, disposal_year=2019, status="stored"),
        Asset("srv-old", "server", 14, 2005, measured_power_w=350.0),
        Asset("srv-mid", "server", 16, 2014, measured_power_w=220.0),
        Asset("srv-new", "server", 5, 2019),
        Asset("san", "storage_array", 2, 2016),
        Asset("core-switches", "network_switch", 8, 2015),
        Asset("edge-routers", "router", 2, 2015),
        Asset("ac-unit", "air_conditioner", 1, 2012),
    )
    rooms = (
        ServerRoom(
            "server-room",
            refrigerant_fluid="R410A",
            refrigerant_leak_kg_per_year=0.5,
            ups_overhead_fraction=0.08,
        ),
    )
    campaigns = (
        ComputeCampaign("hpc-2019", core_hours=120000.0, watts_per_core=12.0, pue=1.5),
    )
    externals = (
        ExternalServiceEntry(
            "mail-hosting", 85.5, "S3", note="provider environmental statement"
        ),
    )
    cables = (CableBulk("cable_cat5", 20),)
    return Fleet(
        perimeter_description=SAMPLE_PERIMETER,
        reporting_year=SAMPLE_YEAR,
        assets=assets,
        rooms=rooms,
        campaigns=campaigns,
        external_services=externals,
        cable_bulks=cables,
    )


def sample_fleet_csv() -> str:
    """The demo fleet in canonical CSV form."""
    return render_fleet_csv(sample_fleet())
