"""Shared fixtures: canonical parameter sets used across the suite."""

import pytest

from lobexec import BlockShape, MarketParams, PowerLawShape, Resilience

# Figure-3 style baseline used by most tests: X0=1e5 shares over 11 trades,
# one unit of time, resilience rho=20 so a = exp(-2) per interval.
X0 = 100_000.0
Q = 5_000.0
RHO = 20.0
HORIZON = 1.0
STEPS = 10


@pytest.fixture
def fig3_params():
    return MarketParams(x0=X0, horizon=HORIZON, steps=STEPS, rho=RHO)


@pytest.fixture
def fig3_params_m2():
    return MarketParams(x0=X0, horizon=HORIZON, steps=STEPS, rho=RHO, mode=Resilience.SPREAD)


@pytest.fixture
def block():
    return BlockShape(Q)


@pytest.fixture
def loglaw():
    # alpha = 1: density q/(1+|x|), volume q*log(1+x)
    return PowerLawShape(Q, 1.0)


def rel(got, want):
    """Relative gap with a unit floor, as used by the tolerance statements."""
    return abs(got - want) / max(1.0, abs(want))
