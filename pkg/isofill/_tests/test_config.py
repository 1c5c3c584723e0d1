from pathlib import Path

from pydantic import ValidationError
import pytest

from isofill.config import Settings, get_config, read_config

CONFIG_FILE = Path(__file__).parent / "test_config.yml"


def test_config(monkeypatch):
    monkeypatch.setenv("TEST_ISOFILL_BUDGET_NODES", "5000")
    monkeypatch.delenv("TEST_ISOFILL_BUDGET_MS", raising=False)
    config = read_config(config_file=CONFIG_FILE)
    assert config["solver"]["budget_nodes"] == "5000"
    # unresolved placeholders are dropped so the typed defaults apply
    assert "budget_ms" not in config["solver"]


def test_settings_from_file(monkeypatch):
    monkeypatch.setenv("TEST_ISOFILL_BUDGET_NODES", "5000")
    monkeypatch.delenv("TEST_ISOFILL_BUDGET_MS", raising=False)
    settings = Settings.load(CONFIG_FILE)
    assert settings.solver.budget_nodes == 5000
    assert settings.solver.budget_ms == 60_000
    assert settings.solver.certify_max_cells == 500
    assert settings.profiler.min_points == 4
    assert settings.profiler.bands.linear == 1.2
    assert settings.profiler.bands.quadratic == 2.25
    assert settings.hyperbolicity.exact_cap == 300


def test_default_config(monkeypatch):
    monkeypatch.delenv("ISOFILL_CONFIG", raising=False)
    monkeypatch.delenv("ISOFILL_BUDGET_NODES", raising=False)
    monkeypatch.delenv("ISOFILL_BUDGET_MS", raising=False)
    settings = Settings.load()
    assert settings.solver.budget_nodes == 200_000
    assert settings.profiler.bands.subquadratic == 1.75
    assert settings.hypfill.waive_convex


def test_config_from_environment(monkeypatch):
    monkeypatch.setenv("ISOFILL_CONFIG", str(CONFIG_FILE))
    monkeypatch.setenv("TEST_ISOFILL_BUDGET_MS", "250")
    assert get_config()["solver"]["budget_ms"] == "250"


def test_invalid_budget(monkeypatch):
    monkeypatch.setenv("TEST_ISOFILL_BUDGET_NODES", "0")
    with pytest.raises(ValidationError):
        Settings.load(CONFIG_FILE)
