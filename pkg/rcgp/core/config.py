# load defaults from config/settings.toml; CLI flags override these

import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

import toml
from pydantic import BaseModel, ValidationError

from rcgp.core.validate import ConfigError

DEFAULT_SETTINGS_PATH = Path(__file__).resolve().parents[2] / "config" / "settings.toml"


class GenomeSettings(BaseModel):
    N_NODES: int = 50
    N_OUTPUTS: int = 1
    RECURRENT: bool = False
    PASSES: int = 1


class EvolutionSettings(BaseModel):
    LAMBDA: int = 4
    MUTATION_RATE: float = 0.1
    MAX_ITERATIONS: int = 15000
    N_RUNS: int = 10
    RECURRENT_PROB: float = 0.1
    CLASSIFY_MODE: str = "wide"
    SELECT_ON_VALIDATION: bool = False
    SEED: int = 0


class AdasynSettings(BaseModel):
    ENABLED: bool = False
    K_NEIGHBORS: int = 5
    BETA: float = 1.0
    IMBALANCE_THRESHOLD: float = 1.0
    NORMALIZE: bool = False


class SplitSettings(BaseModel):
    TRAIN_FRAC: float = 0.70
    VAL_FRAC: float = 0.15
    TEST_FRAC: float = 0.15


class CrossvalSettings(BaseModel):
    K_FOLDS: int = 10
    REPEATS: int = 10
    RUNS_PER_CELL: int = 1


class MlpSettings(BaseModel):
    HIDDEN_UNITS: int = 10
    LEARNING_RATE: float = 0.01
    EPOCHS: int = 500
    BATCH_SIZE: int = 8


class SvmSettings(BaseModel):
    REGULARIZATION: float = 1e-3
    LEARNING_RATE: float = 0.1
    EPOCHS: int = 200
    BATCH_SIZE: int = 16


class DatagenSettings(BaseModel):
    N_MINORITY: int = 39
    N_MAJORITY: int = 111
    NOISE_SD: float = 1.0


class OutputSettings(BaseModel):
    OUT_DIR: str = "results"
    JOBS: Optional[int] = None


class LoggingSettings(BaseModel):
    CONFIG_FILE: str = "config/log-config.yml"
    LEVEL: str = "INFO"


class Settings(BaseModel):
    genome_config: GenomeSettings = GenomeSettings()
    evolution_config: EvolutionSettings = EvolutionSettings()
    adasyn_config: AdasynSettings = AdasynSettings()
    split_config: SplitSettings = SplitSettings()
    crossval_config: CrossvalSettings = CrossvalSettings()
    mlp_config: MlpSettings = MlpSettings()
    svm_config: SvmSettings = SvmSettings()
    datagen_config: DatagenSettings = DatagenSettings()
    output_config: OutputSettings = OutputSettings()
    logging_config: LoggingSettings = LoggingSettings()


def load_settings(path: Optional[Path] = None) -> Settings:
    """Load settings from a TOML file, falling back to built-in defaults.

    Args:
        path: Settings file. Defaults to ``$RCGP_SETTINGS`` or
            ``config/settings.toml`` at the repository root.

    Raises:
        ConfigError: If the file exists but cannot be parsed or validated
    """
    if path is None:
        path = Path(os.environ.get("RCGP_SETTINGS", DEFAULT_SETTINGS_PATH))
    path = Path(path)
    if not path.exists():
        return Settings()
    try:
        with open(path, "r") as f:
            raw = toml.load(f)
        return Settings(**raw)
    except (toml.TomlDecodeError, ValidationError) as e:
        raise ConfigError(f"Invalid settings file {path}: {e}")


@lru_cache(maxsize=None)
def get_settings() -> Settings:
    """Settings from the default location, loaded on first use."""
    return load_settings()
