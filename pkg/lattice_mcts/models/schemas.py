"""Pydantic schemas for the search game, its strategies and experiment outputs."""
import math
from enum import Enum
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from lattice_mcts.config import settings


class Direction(Enum):
    """Unit lattice move. Declaration order is the neighbour order used everywhere."""
    UP = (0, 1)
    DOWN = (0, -1)
    RIGHT = (1, 0)
    LEFT = (-1, 0)

    @property
    def dx(self) -> int:
        return self.value[0]

    @property
    def dy(self) -> int:
        return self.value[1]

    @property
    def opposite(self) -> "Direction":
        return Direction((-self.dx, -self.dy))


# Index i of DIRECTIONS matches the neighbour index used by the engines
DIRECTIONS: List[Direction] = list(Direction)


class Position(BaseModel):
    """Lattice cell, 1-based on both axes."""
    model_config = ConfigDict(frozen=True)

    x: int = Field(ge=1)
    y: int = Field(ge=1)


class GridConfig(BaseModel):
    """N x N periodic lattice with an l1 vision radius and a searcher start cell."""
    model_config = ConfigDict(frozen=True)

    side_length: int = Field(ge=2)
    vision_radius: int = Field(default=0, ge=0)
    start: Position = Position(x=1, y=1)

    @model_validator(mode="after")
    def _check(self) -> "GridConfig":
        if 2 * self.vision_radius >= self.side_length:
            raise ValueError("vision_radius must be < side_length / 2")
        if not self.contains(self.start):
            raise ValueError("start must lie on the grid")
        return self

    def contains(self, pos: Position) -> bool:
        """True if both coordinates are in [1, N]."""
        return pos.x <= self.side_length and pos.y <= self.side_length


class TargetKind(str, Enum):
    DELTA = "delta"
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


class TargetDistribution(BaseModel):
    """
    Prior over the target cell.

    Delta uses (x, y) as the target cell. Gaussian uses (x, y) as the mean,
    defaulting to (N/2, N/2), and sigma as the per-axis standard deviation.
    """
    model_config = ConfigDict(frozen=True)

    kind: TargetKind
    side_length: int = Field(ge=2)
    x: Optional[float] = None
    y: Optional[float] = None
    sigma: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="before")
    @classmethod
    def _default_mean(cls, data):
        if isinstance(data, dict) and data.get("kind") == TargetKind.GAUSSIAN:
            n = data.get("side_length")
            if n is not None:
                if data.get("x") is None:
                    data = {**data, "x": n / 2}
                if data.get("y") is None:
                    data = {**data, "y": n / 2}
        return data

    @model_validator(mode="after")
    def _check(self) -> "TargetDistribution":
        n = self.side_length
        if self.kind is TargetKind.DELTA:
            if self.x is None or self.y is None:
                raise ValueError("delta target needs x and y")
            if self.x != int(self.x) or self.y != int(self.y):
                raise ValueError("delta target coordinates must be integers")
            if not (1 <= self.x <= n and 1 <= self.y <= n):
                raise ValueError("delta target must lie on the grid")
        if self.kind is TargetKind.GAUSSIAN and not math.isfinite(self.sigma):
            raise ValueError("gaussian sigma must be finite; use a uniform target for sigma=inf")
        return self

    @classmethod
    def delta(cls, pos: Position, side_length: int) -> "TargetDistribution":
        return cls(kind=TargetKind.DELTA, side_length=side_length, x=pos.x, y=pos.y)

    @classmethod
    def gaussian(
        cls,
        sigma: float,
        side_length: int,
        mean_x: Optional[float] = None,
        mean_y: Optional[float] = None,
    ) -> "TargetDistribution":
        return cls(
            kind=TargetKind.GAUSSIAN,
            side_length=side_length,
            x=mean_x,
            y=mean_y,
            sigma=sigma,
        )

    @classmethod
    def uniform(cls, side_length: int) -> "TargetDistribution":
        return cls(kind=TargetKind.UNIFORM, side_length=side_length)

    @classmethod
    def for_sigma(cls, sigma: float, side_length: int) -> "TargetDistribution":
        """Gaussian at (N/2, N/2); sigma = inf gives the uniform endpoint."""
        if math.isinf(sigma):
            return cls.uniform(side_length)
        return cls.gaussian(sigma, side_length)

    @property
    def sigma_label(self) -> float:
        """Sigma as reported in experiment rows (delta 0, uniform inf)."""
        if self.kind is TargetKind.UNIFORM:
            return math.inf
        if self.kind is TargetKind.DELTA:
            return 0.0
        return self.sigma


class PolicyKind(str, Enum):
    RW = "rw"
    LEVY = "levy"
    NSARW = "nsarw"


_POLICY_LABELS = {PolicyKind.RW: "RW", PolicyKind.LEVY: "LFS", PolicyKind.NSARW: "NSARW"}


class RolloutPolicy(BaseModel):
    """Walker used for MCTS rollouts and as a standalone baseline searcher."""
    model_config = ConfigDict(frozen=True)

    kind: PolicyKind = PolicyKind.RW
    mu: float = Field(default=2.0, gt=1.0, le=3.0)
    # None means one full wrap (N)
    l_max: Optional[int] = Field(default=None, ge=1)
    # None means settings.rollout_cap_factor * N^2
    rollout_cap: Optional[int] = Field(default=None, ge=1)
    levy_unit_cost: bool = True
    levy_midjump_detect: bool = True

    @property
    def label(self) -> str:
        return _POLICY_LABELS[self.kind]

    def lmax_for(self, side_length: int) -> int:
        return self.l_max if self.l_max is not None else side_length

    def cap_for(self, side_length: int) -> int:
        if self.rollout_cap is not None:
            return self.rollout_cap
        return settings.rollout_cap_factor * side_length * side_length


class CreditMode(str, Enum):
    REMAINING_STEPS = "remaining_steps"
    TOTAL_STEPS = "total_steps"


class FinalMove(str, Enum):
    AVG_REWARD = "avg_reward"
    MAX_VISITS = "max_visits"


class Estimator(str, Enum):
    MEAN_REWARD = "mean_reward"
    INVERSE_MEAN_STEPS = "inverse_mean_steps"


DEFAULT_LOOPS = 1000


class MctsConfig(BaseModel):
    """UCT search parameters. Exactly one of loops / time_budget_ms is active."""

    exploration_c: float = Field(default=math.sqrt(2.0), gt=0.0)
    loops: Optional[int] = Field(default=None, ge=1)
    time_budget_ms: Optional[float] = Field(default=None, gt=0.0)
    policy: RolloutPolicy = RolloutPolicy()
    reuse_stats: bool = True
    credit_mode: CreditMode = CreditMode.REMAINING_STEPS
    final_move: FinalMove = FinalMove.AVG_REWARD
    estimator: Estimator = Estimator.MEAN_REWARD
    reward_scale: float = Field(default=1.0, gt=0.0)
    # None means 4N
    selection_depth_cap: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_budget(self) -> "MctsConfig":
        if self.loops is not None and self.time_budget_ms is not None:
            raise ValueError("set either loops or time_budget_ms, not both")
        if self.loops is None and self.time_budget_ms is None:
            self.loops = DEFAULT_LOOPS
        return self

    def depth_cap_for(self, side_length: int) -> int:
        if self.selection_depth_cap is not None:
            return self.selection_depth_cap
        return 4 * side_length

    @property
    def label(self) -> str:
        return f"MCTS-{self.policy.label}"


class RolloutResult(BaseModel):
    steps: int
    found: bool


class LoopOutcome(BaseModel):
    """Result of one selection / expansion / rollout / backpropagation loop."""
    practice_target: Position
    path_length: int
    rollout_steps: int
    found: bool


class TrialRecord(BaseModel):
    """Outcome of one game (MCTS) or one baseline search."""
    trial: int = 0
    strategy: str
    seed: int = 0
    target: Position
    steps_taken: int = Field(ge=0)
    optimal_steps: int = Field(ge=0)
    wall_ms: float = 0.0
    capped: bool = False
    path: Optional[List[Position]] = None

    @property
    def excess(self) -> int:
        return self.steps_taken - self.optimal_steps


class SummaryStats(BaseModel):
    """Aggregate over trials. Excess is the headline ASOO reading, ratio the alternative."""
    n: int
    mean_steps: float
    mean_optimal: float
    mean_excess: float
    mean_ratio: float
    std: float
    ci95_half_width: float = Field(ge=0.0)
    q1: float
    median: float
    q3: float
    capped_count: int = 0


class ExperimentRow(BaseModel):
    """One cell of an experiment table; field order is the CSV column order."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    experiment: str
    strategy: str
    N: int
    sigma: Optional[float] = None
    loops: Optional[int] = None
    time_ms: Optional[float] = None
    trials: int
    mean_excess: float
    mean_ratio: float
    std: float
    ci95: float
    q1: float
    median: float
    q3: float
    capped_count: int
    base_seed: int
    mean_steps: float
    gap: Optional[float] = None


class MctsStrategy(BaseModel):
    kind: Literal["mcts"] = "mcts"
    config: MctsConfig = MctsConfig()
    label: Optional[str] = None

    @property
    def name(self) -> str:
        return self.label or self.config.label


class BaselineStrategy(BaseModel):
    kind: Literal["baseline"] = "baseline"
    policy: RolloutPolicy = RolloutPolicy()
    label: Optional[str] = None

    @property
    def name(self) -> str:
        return self.label or self.policy.label


Strategy = Annotated[Union[MctsStrategy, BaselineStrategy], Field(discriminator="kind")]


class RunConfig(BaseModel):
    """Fully resolved configuration of one experiment cell."""
    grid: GridConfig
    target: TargetDistribution
    strategy: Literal["mcts", "baseline"] = "mcts"
    policy: RolloutPolicy = RolloutPolicy()
    mcts: MctsConfig = MctsConfig()
    trials: int = Field(default=100, ge=1)
    base_seed: int = Field(default=0, ge=0)
    output: Optional[Path] = None
    workers: int = Field(default=1, ge=1)

    def build_strategy(self) -> Union[MctsStrategy, BaselineStrategy]:
        if self.strategy == "baseline":
            return BaselineStrategy(policy=self.policy)
        return MctsStrategy(config=self.mcts.model_copy(update={"policy": self.policy}))
