import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from exmip.bench import bundled_fixture
from exmip.fixtures import (
    chain_rcpsp,
    contention_rcpsp,
    diamond_rcpsp,
    running_example_rcpsp,
    toy_wdp,
    twin_optimum_wdp,
)
from exmip.rcpsp import build_rcpsp_context
from exmip.solver import solve_milp
from exmip.wdp import build_wdp_context


@pytest.fixture(scope="session")
def toy_wdp_ctx():
    return build_wdp_context(toy_wdp())


@pytest.fixture(scope="session")
def toy_wdp_solved(toy_wdp_ctx):
    result = solve_milp(toy_wdp_ctx.model)
    return toy_wdp_ctx, result


@pytest.fixture(scope="session")
def twin_wdp_ctx():
    return build_wdp_context(twin_optimum_wdp())


@pytest.fixture(scope="session")
def chain_ctx():
    return build_rcpsp_context(chain_rcpsp())


@pytest.fixture(scope="session")
def diamond_ctx():
    return build_rcpsp_context(diamond_rcpsp())


@pytest.fixture(scope="session")
def contention_ctx():
    return build_rcpsp_context(contention_rcpsp())


@pytest.fixture(scope="session")
def running_ctx():
    return build_rcpsp_context(running_example_rcpsp())


@pytest.fixture(scope="session")
def running_solved(running_ctx):
    result = solve_milp(running_ctx.model)
    return running_ctx, result


@pytest.fixture(scope="session")
def demo_sm_text():
    return bundled_fixture("demo3.sm")
