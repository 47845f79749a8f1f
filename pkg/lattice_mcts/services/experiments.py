"""Experiment presets: sigma sweep, budget sweep, strategy comparisons, NSARW convergence."""
import math
from typing import List, Literal, Optional, Sequence

from lattice_mcts.models.schemas import (
    BaselineStrategy,
    ExperimentRow,
    GridConfig,
    MctsConfig,
    MctsStrategy,
    PolicyKind,
    Position,
    RolloutPolicy,
    TargetDistribution,
)
from lattice_mcts.services.harness import AnyStrategy, run_cell

DEFAULT_SIGMAS = (0.0, 2.0, 5.0, 10.0, math.inf)
DEFAULT_LOOP_BUDGETS = (10, 100, 1000, 10000)
DEFAULT_TIME_BUDGETS_MS = (5.0, 20.0, 100.0, 500.0)
DEFAULT_GRID_SIZES = (11, 21, 41)


def _with_kind(policy: Optional[RolloutPolicy], kind: PolicyKind) -> RolloutPolicy:
    return (policy or RolloutPolicy()).model_copy(update={"kind": kind})


def compared_strategies(
    base: Optional[MctsConfig] = None, policy: Optional[RolloutPolicy] = None
) -> List[AnyStrategy]:
    """
    MCTS with random-walk and Levy rollouts, plus the RW, LFS and NSARW baselines.

    Walker parameters other than the kind (mu, l_max, caps, Levy toggles) come from `policy`.
    """
    base = base or MctsConfig()
    rw = _with_kind(policy, PolicyKind.RW)
    levy = _with_kind(policy, PolicyKind.LEVY)
    return [
        MctsStrategy(config=base.model_copy(update={"policy": rw})),
        MctsStrategy(config=base.model_copy(update={"policy": levy})),
        BaselineStrategy(policy=rw),
        BaselineStrategy(policy=levy),
        BaselineStrategy(policy=_with_kind(policy, PolicyKind.NSARW)),
    ]


def centre_delta(cfg: GridConfig) -> TargetDistribution:
    """Delta target at the rounded Gaussian mean (N/2, N/2)."""
    half = (cfg.side_length + 1) // 2
    return TargetDistribution.delta(Position(x=half, y=half), cfg.side_length)


def experiment_compare(
    name: str,
    cfg: GridConfig,
    dist: TargetDistribution,
    strategies: Sequence[AnyStrategy],
    trials: int,
    base_seed: int,
    workers: Optional[int] = None,
) -> List[ExperimentRow]:
    """Every strategy against one distribution, on paired targets."""
    return [
        run_cell(name, s, dist, cfg, trials, base_seed, workers)[1] for s in strategies
    ]


def experiment_gaussian_sweep(
    cfg: GridConfig,
    sigmas: Sequence[float],
    strategies: Sequence[AnyStrategy],
    trials: int,
    base_seed: int,
    workers: Optional[int] = None,
) -> List[ExperimentRow]:
    """
    Sweep the Gaussian width; sigma = inf is the uniform endpoint.

    Returns:
        One row per (sigma, strategy), sigmas outermost
    """
    rows = []
    for sigma in sigmas:
        dist = TargetDistribution.for_sigma(sigma, cfg.side_length)
        rows.extend(experiment_compare("gauss-sweep", cfg, dist, strategies, trials, base_seed, workers))
    return rows


def experiment_budget_sweep(
    cfg: GridConfig,
    budgets: Sequence[float],
    trials: int,
    base_seed: int,
    mode: Literal["loops", "time"] = "loops",
    dist: Optional[TargetDistribution] = None,
    policies: Optional[Sequence[RolloutPolicy]] = None,
    base: Optional[MctsConfig] = None,
    workers: Optional[int] = None,
) -> List[ExperimentRow]:
    """
    Sweep the per-decision budget for each rollout policy.

    Args:
        cfg: Grid configuration
        budgets: Loop counts (mode "loops") or milliseconds (mode "time")
        trials: Trials per cell
        base_seed: Batch seed shared by every cell
        mode: Which budget is swept
        dist: Target distribution; defaults to a delta at (N/2, N/2)
        policies: Rollout policies; defaults to random walk and Levy flight
        base: MCTS settings other than the budget
        workers: Worker processes

    Returns:
        One row per (budget, policy), budgets outermost
    """
    dist = dist or centre_delta(cfg)
    policies = policies or [_with_kind(None, PolicyKind.RW), _with_kind(None, PolicyKind.LEVY)]
    base = base or MctsConfig()
    experiment = "budget-loops" if mode == "loops" else "budget-time"
    rows = []
    for budget in budgets:
        if mode == "loops":
            budget_fields = {"loops": int(budget), "time_budget_ms": None}
        else:
            budget_fields = {"loops": None, "time_budget_ms": float(budget)}
        for policy in policies:
            mcfg = MctsConfig.model_validate(
                {**base.model_dump(), **budget_fields, "policy": policy}
            )
            rows.append(run_cell(experiment, MctsStrategy(config=mcfg), dist, cfg, trials, base_seed, workers)[1])
    return rows


def experiment_nsarw_convergence(
    grid_sizes: Sequence[int],
    trials: int,
    base_seed: int,
    base: Optional[MctsConfig] = None,
    vision_radius: int = 1,
    workers: Optional[int] = None,
    policy: Optional[RolloutPolicy] = None,
) -> List[ExperimentRow]:
    """
    MCTS with random-walk rollouts against the NSARW baseline on uniform targets.

    The MCTS row of each grid size carries the relative gap
    |mean_MCTS - mean_NSARW| / mean_NSARW.
    """
    base = base or MctsConfig()
    mcts = MctsStrategy(
        config=base.model_copy(update={"policy": _with_kind(policy, PolicyKind.RW), "reuse_stats": True})
    )
    nsarw = BaselineStrategy(policy=_with_kind(policy, PolicyKind.NSARW))
    rows = []
    for n in grid_sizes:
        cfg = GridConfig(side_length=n, vision_radius=vision_radius)
        dist = TargetDistribution.uniform(n)
        _, mcts_row = run_cell("nsarw-convergence", mcts, dist, cfg, trials, base_seed, workers)
        _, nsarw_row = run_cell("nsarw-convergence", nsarw, dist, cfg, trials, base_seed, workers)
        reference = nsarw_row.mean_steps
        gap = abs(mcts_row.mean_steps - reference) / reference if reference > 0 else 0.0
        rows.append(mcts_row.model_copy(update={"gap": gap}))
        rows.append(nsarw_row)
    return rows
