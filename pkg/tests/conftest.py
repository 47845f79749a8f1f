"""Shared fixtures."""
import numpy as np
import pytest

from lattice_mcts.models.schemas import GridConfig, MctsConfig, RolloutPolicy


@pytest.fixture
def grid5() -> GridConfig:
    return GridConfig(side_length=5)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def quick_mcts() -> MctsConfig:
    """Small loop budget so whole games stay fast."""
    return MctsConfig(loops=20, policy=RolloutPolicy())
