"""Configuration management for the simulator."""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings, read from the environment or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="LATTICE_MCTS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Worker processes for trial-level parallelism (CLI fallback for --workers)
    workers: int = 1

    # Application settings
    log_level: str = "INFO"

    # Step caps, as multiples of N^2
    rollout_cap_factor: int = 50
    game_cap_factor: int = 100

    # Baseline searchers run effectively uncapped
    baseline_cap: int = 1_000_000

    # Figure presets
    figure_grid: int = 40
    figure_trials: int = 1000
    figure_loops: int = 1000
    histogram_draws: int = 10_000


settings = Settings()
