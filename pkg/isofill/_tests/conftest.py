from pathlib import Path
import warnings

from prefect.testing.utilities import prefect_test_harness
import pytest

from isofill.builders.complexes import grid_complex, rips_complex, tree_complex
from isofill.formats import save_complex

warnings.filterwarnings("ignore", category=DeprecationWarning)


@pytest.fixture(autouse=True, scope="session")
def prefect_test_fixture():
    """
    Run every flow of the session against a temporary Prefect database.

    Yields:
        None
    """
    with prefect_test_harness():
        yield


@pytest.fixture
def grid3():
    complex, _ = grid_complex(3, 3)
    return complex


@pytest.fixture
def star_rips():
    """Rips complex P_3 of a star with three leaves: the full 2-skeleton of a tetrahedron."""
    _, metric = tree_complex(3, 1)
    return rips_complex(metric, 3, 2)


@pytest.fixture
def grid3_file(tmp_path: Path, grid3) -> Path:
    path = tmp_path / "grid3.cx"
    save_complex(grid3, path)
    return path
