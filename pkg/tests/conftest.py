import pytest

from ecodiag import samples
from ecodiag.engine import EngineConfig
from ecodiag.factors import (
    EmissionFactor,
    FactorDatabase,
    GwpEntry,
    SourceMeta,
    load_factor_db,
    merge_factors,
)


def make_source(name="sample-base", year=2019, kind="public_base", neutral=True, peer=False):
    return SourceMeta(name, year, kind, neutral, peer)


def make_factor(category="laptop", fab=300.0, eol=2.5, power=30.0, unc=0.30, source=None):
    return EmissionFactor(category, fab, eol, power, unc, source or make_source())


def make_db(*factors, gwps=(GwpEntry("R410A", 2088.0),), grid=0.119):
    return FactorDatabase(tuple(factors), tuple(gwps), grid)


@pytest.fixture
def config():
    return EngineConfig()


@pytest.fixture
def sample_db():
    return merge_factors(load_factor_db(samples.SAMPLE_FACTOR_FILE))


@pytest.fixture
def sample_fleet():
    return samples.sample_fleet()
