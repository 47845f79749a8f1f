"""
Configuration keys, key=value config files and their resolution into RunConfig.

Every accepted key is declared once in KEYS; the registry drives flag
registration, --help text, validation and the provenance header.
"""
import argparse
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from lattice_mcts.config import settings
from lattice_mcts.errors import ConfigError
from lattice_mcts.models.schemas import (
    GridConfig,
    MctsConfig,
    Position,
    RolloutPolicy,
    RunConfig,
    TargetDistribution,
)
from lattice_mcts.services.output import PROVENANCE_BANNER


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text)


def _parse_str(text: str) -> str:
    return text.strip()


@dataclass(frozen=True)
class Key:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str


KEYS: List[Key] = [
    Key("grid.size", _parse_int, None, "lattice side length N (required for run)"),
    Key("grid.vision", _parse_int, 0, "l1 vision radius r_v"),
    Key("grid.start_x", _parse_int, 1, "searcher start x"),
    Key("grid.start_y", _parse_int, 1, "searcher start y"),
    Key("target.kind", _parse_str, None, "delta | gaussian | uniform (required for run)"),
    Key("target.x", _parse_float, None, "delta x, or gaussian mean x (default N/2)"),
    Key("target.y", _parse_float, None, "delta y, or gaussian mean y (default N/2)"),
    Key("target.sigma", _parse_float, 0.0, "gaussian standard deviation"),
    Key("policy.kind", _parse_str, "rw", "rw | levy | nsarw (rollout or baseline walker)"),
    Key("policy.mu", _parse_float, 2.0, "Levy exponent, 1 < mu <= 3"),
    Key("policy.lmax", _parse_int, None, "Levy jump truncation (default N)"),
    Key("policy.cap", _parse_int, None, "rollout step cap (default 50 N^2)"),
    Key("policy.levy_unit_cost", _parse_bool, True, "a Levy jump of length l costs l steps"),
    Key("policy.levy_midjump_detect", _parse_bool, True, "detect at every cell crossed by a jump"),
    Key("mcts.c", _parse_float, math.sqrt(2.0), "UCT exploration coefficient"),
    Key("mcts.loops", _parse_int, None, "loops per decision (default 1000 unless a time budget is set)"),
    Key("mcts.time_budget_ms", _parse_float, None, "wall-clock budget per decision"),
    Key("mcts.reuse_stats", _parse_bool, True, "keep statistics across real moves"),
    Key("mcts.credit_mode", _parse_str, "remaining_steps", "remaining_steps | total_steps"),
    Key("mcts.final_move", _parse_str, "avg_reward", "avg_reward | max_visits"),
    Key("mcts.estimator", _parse_str, "mean_reward", "mean_reward | inverse_mean_steps"),
    Key("mcts.depth_cap", _parse_int, None, "selection depth cap (default 4N)"),
    Key("run.strategy", _parse_str, "mcts", "mcts | baseline"),
    Key("run.trials", _parse_int, 100, "number of trials"),
    Key("run.seed", _parse_int, 0, "base seed"),
    Key("run.workers", _parse_int, None, "worker processes (default LATTICE_MCTS_WORKERS)"),
    Key("run.output", _parse_str, None, "output CSV path (default stdout)"),
]
KEYS_BY_NAME: Dict[str, Key] = {k.name: k for k in KEYS}

# Raw values carry the config-file line they came from, if any
RawConfig = Dict[str, Tuple[str, Optional[int]]]


def add_key_arguments(parser: argparse.ArgumentParser, defaults: Optional[Dict[str, Any]] = None) -> None:
    """Register one --<key> flag per registry key; absent flags stay out of the namespace."""
    defaults = defaults or {}
    group = parser.add_argument_group("configuration keys")
    for key in KEYS:
        shown = defaults.get(key.name, key.default)
        group.add_argument(
            f"--{key.name}",
            dest=key.name,
            metavar="VALUE",
            default=argparse.SUPPRESS,
            help=f"{key.help} (default: {format_value(shown)})",
        )


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def parse_config_file(path: Path) -> RawConfig:
    """
    Read key=value lines; `#` starts a comment.

    A file that begins with the provenance banner (any output of this tool) is
    read from its `# key=value` header lines instead.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError("--config", f"cannot read {path}: {e}")
    provenance = bool(lines) and lines[0].strip() == PROVENANCE_BANNER
    raw: RawConfig = {}
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if provenance:
            if not text.startswith("#"):
                break
            text = text[1:].strip()
            if text == PROVENANCE_BANNER[1:].strip() or "=" not in text:
                continue
        else:
            text = text.split("#", 1)[0].strip()
            if not text:
                continue
        if "=" not in text:
            raise ConfigError(text, "expected key=value", number)
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in KEYS_BY_NAME:
            raise ConfigError(key, "unknown configuration key", number)
        raw[key] = (value, number)
    return raw


def parse_target_shorthand(spec: str) -> Dict[str, str]:
    """`delta:x,y`, `gaussian:sigma[,mean_x,mean_y]` or `uniform`."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    parts = [p.strip() for p in rest.split(",") if p.strip()]
    if kind == "uniform" and not parts:
        return {"target.kind": "uniform"}
    if kind == "delta" and len(parts) == 2:
        return {"target.kind": "delta", "target.x": parts[0], "target.y": parts[1]}
    if kind == "gaussian" and len(parts) in (1, 3):
        values = {"target.kind": "gaussian", "target.sigma": parts[0]}
        if len(parts) == 3:
            values.update({"target.x": parts[1], "target.y": parts[2]})
        return values
    raise ConfigError("--target", f"cannot parse target {spec!r}")


def _value(raw: RawConfig, name: str) -> Any:
    key = KEYS_BY_NAME[name]
    if name not in raw:
        return key.default
    text, line = raw[name]
    if text == "":
        return key.default
    try:
        return key.parse(text)
    except ValueError as e:
        raise ConfigError(name, str(e), line)


def _build(section: str, raw: RawConfig, fields: Dict[str, str], factory: Callable[[], Any]) -> Any:
    try:
        return factory()
    except ValidationError as e:
        error = e.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else ""
        key = fields.get(field, section)
        line = raw[key][1] if key in raw else None
        raise ConfigError(key, error["msg"], line)


def resolve(raw: RawConfig, require: Tuple[str, ...] = ("grid.size", "target.kind")) -> RunConfig:
    """Validate raw key values into a RunConfig; errors name the offending key."""
    for name in require:
        if _value(raw, name) is None:
            raise ConfigError(name, "required key is missing")

    v = lambda name: _value(raw, name)  # noqa: E731
    n = v("grid.size")
    grid = _build(
        "grid.size",
        raw,
        {
            "side_length": "grid.size",
            "vision_radius": "grid.vision",
            "x": "grid.start_x",
            "y": "grid.start_y",
        },
        lambda: GridConfig(
            side_length=n,
            vision_radius=v("grid.vision"),
            start=Position(x=v("grid.start_x"), y=v("grid.start_y")),
        ),
    )
    target = _build(
        "target.kind",
        raw,
        {"kind": "target.kind", "x": "target.x", "y": "target.y", "sigma": "target.sigma"},
        lambda: TargetDistribution(
            kind=v("target.kind"),
            side_length=n,
            x=v("target.x"),
            y=v("target.y"),
            sigma=v("target.sigma"),
        ),
    )
    policy = _build(
        "policy.kind",
        raw,
        {
            "kind": "policy.kind",
            "mu": "policy.mu",
            "l_max": "policy.lmax",
            "rollout_cap": "policy.cap",
        },
        lambda: RolloutPolicy(
            kind=v("policy.kind"),
            mu=v("policy.mu"),
            l_max=v("policy.lmax"),
            rollout_cap=v("policy.cap"),
            levy_unit_cost=v("policy.levy_unit_cost"),
            levy_midjump_detect=v("policy.levy_midjump_detect"),
        ),
    )
    mcts = _build(
        "mcts.loops",
        raw,
        {
            "exploration_c": "mcts.c",
            "loops": "mcts.loops",
            "time_budget_ms": "mcts.time_budget_ms",
            "credit_mode": "mcts.credit_mode",
            "final_move": "mcts.final_move",
            "estimator": "mcts.estimator",
            "selection_depth_cap": "mcts.depth_cap",
        },
        lambda: MctsConfig(
            exploration_c=v("mcts.c"),
            loops=v("mcts.loops"),
            time_budget_ms=v("mcts.time_budget_ms"),
            policy=policy,
            reuse_stats=v("mcts.reuse_stats"),
            credit_mode=v("mcts.credit_mode"),
            final_move=v("mcts.final_move"),
            estimator=v("mcts.estimator"),
            selection_depth_cap=v("mcts.depth_cap"),
        ),
    )
    output = v("run.output")
    return _build(
        "run.strategy",
        raw,
        {
            "strategy": "run.strategy",
            "trials": "run.trials",
            "base_seed": "run.seed",
            "workers": "run.workers",
        },
        lambda: RunConfig(
            grid=grid,
            target=target,
            strategy=v("run.strategy"),
            policy=policy,
            mcts=mcts,
            trials=v("run.trials"),
            base_seed=v("run.seed"),
            output=Path(output) if output else None,
            workers=v("run.workers") or settings.workers,
        ),
    )


def flatten(run: RunConfig) -> Dict[str, str]:
    """Fully resolved key=value view of a RunConfig, in registry order."""
    values = {
        "grid.size": run.grid.side_length,
        "grid.vision": run.grid.vision_radius,
        "grid.start_x": run.grid.start.x,
        "grid.start_y": run.grid.start.y,
        "target.kind": run.target.kind,
        "target.x": run.target.x,
        "target.y": run.target.y,
        "target.sigma": run.target.sigma,
        "policy.kind": run.policy.kind,
        "policy.mu": run.policy.mu,
        "policy.lmax": run.policy.l_max,
        "policy.cap": run.policy.rollout_cap,
        "policy.levy_unit_cost": run.policy.levy_unit_cost,
        "policy.levy_midjump_detect": run.policy.levy_midjump_detect,
        "mcts.c": run.mcts.exploration_c,
        "mcts.loops": run.mcts.loops,
        "mcts.time_budget_ms": run.mcts.time_budget_ms,
        "mcts.reuse_stats": run.mcts.reuse_stats,
        "mcts.credit_mode": run.mcts.credit_mode,
        "mcts.final_move": run.mcts.final_move,
        "mcts.estimator": run.mcts.estimator,
        "mcts.depth_cap": run.mcts.selection_depth_cap,
        "run.strategy": run.strategy,
        "run.trials": run.trials,
        "run.seed": run.base_seed,
        "run.workers": run.workers,
        "run.output": run.output,
    }
    return {name: format_value(values[name]) for name in KEYS_BY_NAME}


def collect_overrides(args: argparse.Namespace) -> RawConfig:
    """Registry-key flags present on the command line."""
    given = vars(args)
    return {name: (str(given[name]), None) for name in KEYS_BY_NAME if name in given}


# Shorthand flags and the registry key each one sets
SHORTHAND = {
    "grid": "grid.size",
    "trials": "run.trials",
    "seed": "run.seed",
    "workers": "run.workers",
    "output": "run.output",
}


def add_common_arguments(parser: argparse.ArgumentParser, defaults: Optional[Dict[str, Any]] = None) -> None:
    """Flags shared by `run` and `figure`: config file, shorthands, then every registry key."""
    parser.add_argument("--config", type=Path, metavar="FILE", help="key=value file or any output file of this tool")
    parser.add_argument("--grid", metavar="N", default=argparse.SUPPRESS, help="shorthand for --grid.size")
    parser.add_argument(
        "--target",
        metavar="SPEC",
        default=argparse.SUPPRESS,
        help="delta:x,y | gaussian:sigma[,mean_x,mean_y] | uniform",
    )
    parser.add_argument("--trials", metavar="K", default=argparse.SUPPRESS, help="shorthand for --run.trials")
    parser.add_argument("--seed", metavar="S", default=argparse.SUPPRESS, help="shorthand for --run.seed")
    parser.add_argument("--workers", metavar="W", default=argparse.SUPPRESS, help="shorthand for --run.workers")
    parser.add_argument("--output", metavar="PATH", default=argparse.SUPPRESS, help="shorthand for --run.output")
    add_key_arguments(parser, defaults)


def gather(args: argparse.Namespace, preset: Optional[Dict[str, Any]] = None) -> RawConfig:
    """
    Merge raw values; later sources win.

    Order: preset defaults, --config file, --target / shorthand flags, dotted-key flags.
    """
    raw: RawConfig = {k: (format_value(v), None) for k, v in (preset or {}).items()}
    if getattr(args, "config", None) is not None:
        _merge(raw, parse_config_file(args.config))
    given = vars(args)
    if "target" in given:
        raw = {k: v for k, v in raw.items() if not k.startswith("target.")}
        raw.update({k: (v, None) for k, v in parse_target_shorthand(given["target"]).items()})
    for flag, key in SHORTHAND.items():
        if flag in given:
            raw[key] = (str(given[flag]), None)
    _merge(raw, collect_overrides(args))
    return raw


BUDGET_KEYS = ("mcts.loops", "mcts.time_budget_ms")


def _merge(raw: RawConfig, layer: RawConfig) -> None:
    """Apply a later source; a budget it sets replaces the other budget from earlier sources."""
    for key, other in (BUDGET_KEYS, BUDGET_KEYS[::-1]):
        if layer.get(key, ("", None))[0] != "" and other not in layer:
            raw.pop(other, None)
    raw.update(layer)
