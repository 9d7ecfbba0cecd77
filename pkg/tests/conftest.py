import warnings

import numpy as np
import pytest

from gradedbethe.chain import ChainSpec, VacuumFunctions
from gradedbethe.spectrum import classify_spectrum, diagonalize_transfer, on_shell_pair

# the Bethe residual warns near the log branch cut during wide seed sweeps;
# that is expected behaviour, not a test failure
warnings.filterwarnings("ignore", message="Bethe residual near the log branch cut")

TESTED_SECTORS = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (2, 1)]


@pytest.fixture(scope="session")
def spec4():
    return ChainSpec(M=4)


@pytest.fixture(scope="session")
def vac4(spec4):
    return VacuumFunctions(spec4)


@pytest.fixture(scope="session")
def dec4(spec4):
    return diagonalize_transfer(spec4)


@pytest.fixture(scope="session")
def classified4(dec4, vac4):
    return classify_spectrum(dec4, vac4, sectors=TESTED_SECTORS)


@pytest.fixture(scope="session")
def pairs4(dec4, classified4):
    """Matched on-shell pairs of the M=4 chain, keyed by (sector, kind)."""
    out = {}
    for c in classified4:
        if c.kind in ("primitive", "descendant"):
            out.setdefault((c.state.sector, c.kind), []).append(on_shell_pair(dec4, c))
    return out


def primitive_pairs(pairs, sector):
    return pairs.get((sector, "primitive"), [])


def descendant_pairs(pairs, sector):
    return pairs.get((sector, "descendant"), [])


def rng(seed=0):
    return np.random.default_rng(seed)
