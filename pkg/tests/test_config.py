import math

import pytest

from crackforge.config import SEED_ENV, ConfigError, RunConfig, load_config, parse_pairs


def test_keys_are_dotted():
    keys = RunConfig.keys()
    assert "prop.delta_deg" in keys and "lee.d_min" in keys and "stage2.t" in keys
    assert all("." in k for k in keys)


def test_text_round_trip():
    cfg = RunConfig()
    cfg.set("prop.delta_deg", "45")
    cfg.set("synth.branching", "yes")
    cfg.set("lee.sign_convention", "inward")
    back = RunConfig.from_text(cfg.to_text())
    assert back == cfg
    assert back.synth_branching is True and back.prop_delta_deg == 45.0


def test_parse_pairs_comments_and_errors():
    assert parse_pairs("# header\n a = 1 \n\nb=x # trailing\n") == {"a": "1", "b": "x"}
    with pytest.raises(ConfigError):
        parse_pairs("novalue\n")


def test_bad_key_and_value():
    cfg = RunConfig()
    with pytest.raises(ConfigError):
        cfg.set("prop.nope", "1")
    with pytest.raises(ConfigError):
        cfg.set("prop.s_min", "three")
    with pytest.raises(ConfigError):
        cfg.set("synth.branching", "maybe")


def test_precedence(tmp_path, monkeypatch):
    path = tmp_path / "run.cfg"
    path.write_text("prop.seed=5\nprop.step_length=3\n")
    monkeypatch.setenv(SEED_ENV, "9")
    assert load_config(None).prop_seed == 9
    assert load_config(str(path)).prop_seed == 5
    assert load_config(str(path), {"prop.seed": "6"}).prop_seed == 6
    cfg = load_config(str(path), {"prop.seed": "6"}, seed=7)
    assert cfg.prop_seed == 7 and cfg.prop_step_length == 3.0
    monkeypatch.delenv(SEED_ENV)
    assert load_config(None).prop_seed == 0


def test_derived_parameter_objects():
    cfg = RunConfig()
    p = cfg.prop(seed=11)
    assert p.seed == 11 and p.delta == pytest.approx(math.pi / 2)
    assert (p.s_min, p.s_max, p.step_length) == (3, 50, 2.0)
    assert cfg.lee().d_min == 4.0
    assert cfg.weights() == (2.0, 2.0, 4.0)
    t = cfg.stage_target(1)
    assert (t.sat_mean, t.thick_mean) == (0.0281, 1.701)
    with pytest.raises(ConfigError):
        cfg.stage_target(3)
