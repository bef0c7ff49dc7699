import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from balanced_net.config import paper_params


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance-scale test")


@pytest.fixture(scope="session")
def params():
    """The shipped parameter set (n = 5000 per population)."""
    return paper_params()


@pytest.fixture(scope="session")
def params_small(params):
    """Same rates/couplings at a test-friendly population size."""
    return params.replace(n=100)
