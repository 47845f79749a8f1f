"""Demo script that plays one MCTS game and prints its path."""
import numpy as np

from lattice_mcts.models.schemas import GridConfig, MctsConfig, Position, TargetDistribution
from lattice_mcts.engine.mcts import search_game


def demo():
    """Play one game on a small grid with a Gaussian prior."""
    cfg = GridConfig(side_length=15, vision_radius=1)
    dist = TargetDistribution.gaussian(2.0, 15)
    target = Position(x=9, y=6)  # Replace with any cell

    record = search_game(dist, cfg, MctsConfig(loops=300), np.random.default_rng(1), target=target, record_path=True)

    print(f"\n=== {record.strategy} on {cfg.side_length}x{cfg.side_length}, r_v={cfg.vision_radius} ===")
    print(f"Target: ({record.target.x}, {record.target.y})")
    print(f"Steps: {record.steps_taken} (shortest path {record.optimal_steps}, excess {record.excess})")
    print(f"Time: {record.wall_ms:.0f} ms")

    visited = {(p.x, p.y) for p in record.path}
    for y in range(cfg.side_length, 0, -1):
        row = ""
        for x in range(1, cfg.side_length + 1):
            if (x, y) == (record.target.x, record.target.y):
                row += "T"
            elif (x, y) == (cfg.start.x, cfg.start.y):
                row += "S"
            else:
                row += "*" if (x, y) in visited else "."
        print(f"  {row}")


if __name__ == "__main__":
    demo()
