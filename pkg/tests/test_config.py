import pytest

from emscale.config import (
    SCHEMA,
    ConfigError,
    default_config,
    load_config,
    parse_config_text,
    validate_config,
)


def test_defaults_round_trip():
    cfg = default_config()
    report = parse_config_text(cfg.to_text())
    assert report.clean and not report.missing and not report.warnings
    assert report.config.values == cfg.values
    assert set(report.config.sources.values()) == {"config"}


def test_default_sources_tagged():
    cfg = default_config()
    assert cfg.sources["vehicle.m_v"] == "published"
    assert cfg.sources["vehicle.c_r"] == "default"
    assert cfg.sources["bounds.k_ax"] == "published"
    assert cfg.sources["motor.c_cu"] == "default"


def test_bound_wider_than_published_warns():
    report = parse_config_text("bounds.k_ax = 0.8, 1.5\n")
    assert report.clean
    assert "bounds.k_ax: upper bound 1.5 exceeds published bound 1.2" in report.warnings
    assert report.config.bounds["k_ax"] == (0.8, 1.5)


def test_missing_key_filled_with_tagged_default():
    report = parse_config_text("vehicle.m_v = 1200\n")
    assert "vehicle.c_r" in report.missing
    assert report.config["vehicle.c_r"] == 0.01
    assert report.config.sources["vehicle.c_r"] == "default"
    assert report.config.sources["vehicle.m_v"] == "config"
    assert any(line.startswith("missing: vehicle.c_r") and "source: default" in line for line in report.lines())


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("vehicle.mass = 1000\n")
    report = validate_config(p)
    assert not report.clean and report.unknown == ["vehicle.mass"]
    with pytest.raises(ConfigError, match="vehicle.mass"):
        load_config(p)


@pytest.mark.parametrize(
    "text",
    [
        "vehicle.m_v = -5",
        "vehicle.eta_g = 1.2",
        "bounds.k_ax = 1.2, 0.8",
        "run.iters = 0",
        "run.mode = hybrid",
        "motor.w_base0 = 2000",
        "just some words",
    ],
)
def test_bad_values_are_errors(text):
    report = parse_config_text(text)
    assert report.errors and not report.clean


def test_comments_and_blank_lines():
    report = parse_config_text("# header\n\nrun.seeds = 4, 5  # two seeds\n")
    assert report.clean
    assert report.config["run.seeds"] == (4, 5)


def test_overrides():
    cfg = default_config().with_overrides(**{"run.iters": 7, "run.mode": None})
    assert cfg["run.iters"] == 7 and cfg.sources["run.iters"] == "config"
    assert cfg["run.mode"] == "both" and cfg.modes == ("proportional", "combined")
    with pytest.raises(ConfigError):
        default_config().with_overrides(**{"run.nope": 1})


def test_typed_sections():
    cfg = default_config()
    assert cfg.vehicle.m_v == 1085.0
    assert cfg.spec.v_max == pytest.approx(50.0)
    assert cfg.reference.T_max0 == 280.0
    assert len(SCHEMA) == len(cfg.values)
