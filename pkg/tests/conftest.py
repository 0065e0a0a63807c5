import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from safebai.env import LinearInstance, MonotonicInstance, load_instance

REPO = Path(__file__).resolve().parents[1]
INSTANCES = REPO / "instances"


@pytest.fixture(scope="session")
def linear_bench():
    """The d=10 linear benchmark instance."""
    return load_instance(INSTANCES / "linear_paper.json")


@pytest.fixture(scope="session")
def linear_bench_d5():
    return load_instance(INSTANCES / "linear_paper_d5.json")


@pytest.fixture(scope="session")
def drug():
    """The d=3 logistic drug instance (with value cap)."""
    return load_instance(INSTANCES / "drug_paper.json")


@pytest.fixture(scope="session")
def drug_noiseless(drug):
    return MonotonicInstance(theta=drug.theta, mu=drug.mu, gamma=drug.gamma,
                             eps_safe=drug.eps_safe, a0=drug.a0, sigma2=0.0,
                             cap=drug.cap)


@pytest.fixture(scope="session")
def linear_d2_noiseless():
    return LinearInstance(theta=[1.0, 0.5], mu=[1.0, 1.0], gamma=1.0,
                          a0=[0.1, 0.1], M=[1.5, 1.5], sigma2=0.0)
