import numpy as np
import pytest

from levy_orthant.model import ExpAlong, GaussianJump, JumpComponent, LevyModel, PointMasses, reserve_process


@pytest.fixture
def bm():
    return LevyModel([-1.0, -1.0], np.eye(2))


@pytest.fixture
def cl2():
    # d=2 reserve process with claim share c=(1,1), premiums (1,1), Exp(3) claims
    return reserve_process([1.0, 1.0], [1.0, 1.0], 1.0, 3.0)


@pytest.fixture
def cl1():
    # classical Cramér-Lundberg: premium 1, Poisson(1) claims ~ Exp(2)
    return reserve_process([1.0], [1.0], 1.0, 2.0)


@pytest.fixture
def corr():
    return LevyModel([-1.0, -1.0], [[1.0, 0.9], [0.9, 1.0]])


def zoo():
    """Non-degenerate models covering every jump family."""
    return {
        "bm": LevyModel([-1.0, -1.0], np.eye(2)),
        "bm_exp": LevyModel(
            [-1.0, -0.5], [[1.0, 0.3], [0.3, 0.5]], JumpComponent(0.7, ExpAlong([1.0, 0.5], 2.0))
        ),
        "bm_gauss": LevyModel(
            [-1.0, -1.0], [[0.5, 0.0], [0.0, 0.5]], JumpComponent(2.0, GaussianJump([0.2, 0.1], [[0.3, 0.1], [0.1, 0.2]]))
        ),
        "bm_points": LevyModel(
            [-1.0, -0.8], [[0.4, 0.1], [0.1, 0.3]], JumpComponent(1.5, PointMasses([[1, 0], [0, 1], [0.5, 0.5]], [0.2, 0.3, 0.5]))
        ),
        "cl1": reserve_process([1.0], [1.0], 1.0, 2.0),
        "bm3": LevyModel([-1.0, -0.5, -0.7], [[1.0, 0.2, 0.0], [0.2, 0.8, 0.1], [0.0, 0.1, 0.6]]),
    }


@pytest.fixture(params=sorted(zoo()))
def any_model(request):
    return zoo()[request.param]
