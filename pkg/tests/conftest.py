"""Shared fixtures.

The order-251 series is expensive (~20 s) so it is generated once and kept
in a local disk cache (tests/.cache), loaded through the package's own
cache reader, which re-validates the file checksum and series invariants on
every run.
"""

import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from anharmonic import benderwu
from anharmonic.numerics import DEFAULT_CONTEXT
from anharmonic.strongcoupling import alpha_table

CACHE_DIR = pathlib.Path(__file__).parent / ".cache"


@pytest.fixture(scope="session")
def bw251():
    CACHE_DIR.mkdir(exist_ok=True)
    series, _ = benderwu.load_or_generate(CACHE_DIR / "bw-251.txt", 251)
    assert benderwu.verify_head(series)
    return series


@pytest.fixture(scope="session")
def bw12():
    return benderwu.generate(12)


@pytest.fixture(scope="session")
def alphas251(bw251):
    """Table of alpha_0..alpha_22 at N = 251, default precision context."""
    return alpha_table(bw251, 251, 22, ctx=DEFAULT_CONTEXT)
