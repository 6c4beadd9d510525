import time

import pytest

from ellfib.cli import cmd_build
from ellfib.moduli_catalog import FAMILY_NAMES

WITNESS_SEED = 1
BUILD_SECONDS = [0.0]


@pytest.fixture(scope="session")
def witnesses():
    t = time.perf_counter()
    reports = cmd_build(list(FAMILY_NAMES), seed=WITNESS_SEED, attempts=20, jobs=1)
    BUILD_SECONDS[0] = time.perf_counter() - t
    return {r["family"]: r for r in reports}
