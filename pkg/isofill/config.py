import collections
import builtins
from pathlib import Path
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field
import yaml


def get_config():
    load_dotenv()
    config_file = os.environ.get("ISOFILL_CONFIG") or Path(__file__).parent.parent / "config.yml"
    return read_config(config_file=config_file)


def read_config(config_file="config.yml"):
    with open(config_file, "r") as end_file:
        isofill_config = yaml.safe_load(end_file)
    return drop_unresolved(expand_environment_variables(isofill_config))


def expand_environment_variables(config):
    """Expand environment variables in a nested config dictionary
    VENDORED FROM dask.config and tiled.
    This function will recursively search through any nested dictionaries
    and/or lists.
    Parameters
    ----------
    config : dict, iterable, or str
        Input object to search for environment variables
    Returns
    -------
    config : same type as input
    Examples
    --------
    >>> expand_environment_variables({'x': [1, 2, '$USER']})  # doctest: +SKIP
    {'x': [1, 2, 'my-username']}
    """
    if isinstance(config, collections.abc.Mapping):
        return {k: expand_environment_variables(v) for k, v in config.items()}
    elif isinstance(config, str):
        return os.path.expandvars(config)
    elif isinstance(config, (list, tuple, builtins.set)):
        return type(config)([expand_environment_variables(v) for v in config])
    else:
        return config


def drop_unresolved(config):
    """Remove mapping entries whose value is a placeholder no variable expanded.

    The typed settings below then fall back to their defaults.
    """
    if isinstance(config, collections.abc.Mapping):
        return {
            k: drop_unresolved(v)
            for k, v in config.items()
            if not (isinstance(v, str) and v.startswith("$"))
        }
    return config


class SolverSettings(BaseModel):
    budget_nodes: Optional[int] = Field(default=200_000, ge=1)
    budget_ms: Optional[int] = Field(default=60_000, ge=1)
    # full-complex certification search after the stabilization stop
    certify_max_cells: int = 4000
    canonical_ties: bool = True
    # |v| bound on Z/Q coefficients under the discrete norm; None uses max |z_e|
    discrete_value_bound: Optional[int] = None
    feasibility_check: bool = True


class HyperbolicitySettings(BaseModel):
    exact_cap: int = 300
    samples: int = 20_000
    seed: int = 0


class GrowthBands(BaseModel):
    linear: float = 1.25
    subquadratic: float = 1.75
    quadratic: float = 2.25


class ProfilerSettings(BaseModel):
    bands: GrowthBands = Field(default_factory=GrowthBands)
    min_points: int = 5
    subeuclidean_tolerance: float = 0.1
    trend_tolerance: float = 0.25
    samples: int = 200
    seed: int = 0
    coefficient_bound: int = 1


class HypfillSettings(BaseModel):
    # None means 2d + 4δ; convex truncations waive the check
    margin: Optional[float] = None
    waive_convex: bool = True


class Settings(BaseModel):
    solver: SolverSettings = Field(default_factory=SolverSettings)
    hyperbolicity: HyperbolicitySettings = Field(default_factory=HyperbolicitySettings)
    profiler: ProfilerSettings = Field(default_factory=ProfilerSettings)
    hypfill: HypfillSettings = Field(default_factory=HypfillSettings)

    @classmethod
    def load(cls, config_file=None) -> "Settings":
        config = read_config(config_file) if config_file else get_config()
        return cls.model_validate(config or {})
