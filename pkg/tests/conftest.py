"""Shared test fixtures: every test starts at the default 64-digit precision."""

import mpmath as mp
import pytest


@pytest.fixture(autouse=True)
def _reset_precision():
    mp.mp.dps = 64
    yield
    mp.mp.dps = 64
