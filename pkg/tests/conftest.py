import os

import pytest

from psu38.gf64 import GF64
from psu38.grp import named_groups, reference_groups
from psu38.harness import VerifyContext

CACHE_DIR = os.environ.get(
    "AMALGAM_CACHE_DIR", os.path.join(os.path.dirname(__file__), "..", ".psu38_cache")
)


@pytest.fixture(scope="session")
def field():
    return GF64()


@pytest.fixture(scope="session")
def ctx():
    return VerifyContext(cache_dir=CACHE_DIR)


@pytest.fixture(scope="session")
def ng(ctx):
    return ctx.ng


@pytest.fixture(scope="session")
def refs(ctx):
    return ctx.refs


@pytest.fixture(scope="session")
def graph(ctx):
    return ctx.graph
