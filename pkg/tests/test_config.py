import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from kneexo import config
from kneexo.errors import ConfigError


def test_defaults_validate():
    cfg = config.RunConfig()
    assert config.validate(cfg) == []
    assert cfg.knee_params().sliding_ratio_rho == 2.0
    assert cfg.chain_config().joint.roller_diameter_D == 64.0


def test_negative_diameter_names_the_field():
    with pytest.raises(ConfigError) as info:
        config.from_dict({"joint": {"roller_diameter_mm": -1.0}})
    assert any("roller_diameter" in p for p in info.value.problems)


def test_all_violations_reported():
    raw = {
        "joint": {"roller_diameter_mm": -1.0, "bogus": 1},
        "knee": {"semi_major_a_mm": 10.0},
        "actuator": {"k_nm_per_a": 0.0},
        "seed": -3,
    }
    with pytest.raises(ConfigError) as info:
        config.from_dict(raw)
    text = " | ".join(info.value.problems)
    for key in ("roller_diameter_mm", "joint.bogus", "semi_major_a", "k_nm_per_a", "seed"):
        assert key in text


def test_type_errors_reported():
    with pytest.raises(ConfigError) as info:
        config.from_dict({"gait": {"n_strides": 2.5}, "sweep": {"grid_step_deg": "one"}})
    text = " | ".join(info.value.problems)
    assert "gait.n_strides" in text and "sweep.grid_step_deg" in text


def test_parse_error_has_position():
    with pytest.raises(ConfigError) as info:
        config.loads('{\n  "seed": ,\n}')
    assert "line 2" in str(info.value) and "column" in str(info.value)


def test_infinite_sliding_ratio():
    cfg = config.from_dict({"knee": {"sliding_ratio_rho": "inf"}})
    assert math.isinf(cfg.knee_params().sliding_ratio_rho)
    with pytest.raises(ConfigError):
        config.from_dict({"knee": {"sliding_ratio_rho": "lots"}})


def test_alignment_override():
    cfg = config.from_dict({"chain": {"alignment": {"x_mm": 1.0, "y_mm": 12.0}}})
    al = cfg.chain_config().alignment
    assert (al.angle, al.x, al.y) == (0.0, 1.0, 12.0)


def test_digest_tracks_content():
    a, b = config.RunConfig(), config.RunConfig()
    assert a.digest() == b.digest()
    b.seed += 1
    assert a.digest() != b.digest()


@given(
    st.floats(20.0, 30.0), st.floats(1.0, 1.4), st.floats(0.0, 10.0),
    st.floats(0.0, 150.0), st.integers(0, 2 ** 64 - 1), st.floats(0.1, 5.0),
)
@settings(max_examples=40, deadline=None)
def test_round_trip(b, ratio, rho, D, seed, k):
    cfg = config.RunConfig()
    cfg.knee.semi_minor_b_mm = b
    cfg.knee.semi_major_a_mm = b * ratio
    cfg.knee.sliding_ratio_rho = rho
    cfg.joint.roller_diameter_mm = D
    cfg.actuator.k_nm_per_a = k
    cfg.seed = seed
    back = config.loads(config.dumps(cfg))
    assert back.to_dict() == cfg.to_dict()
    assert back.digest() == cfg.digest()


def test_write_and_load(tmp_path):
    p = tmp_path / "cfg.json"
    config.write_config(config.RunConfig(), p)
    assert config.load_config(p).to_dict() == config.RunConfig().to_dict()
    assert json.loads(p.read_text())["seed"] == config.RunConfig().seed


def test_partial_config_keeps_defaults():
    cfg = config.from_dict({"sweep": {"diameters_mm": [10.0]}})
    assert cfg.sweep.diameters_mm == [10.0]
    assert cfg.sweep.theta_max_deg == 120.0


def test_root_must_be_object():
    with pytest.raises(ConfigError):
        config.loads("[1, 2]")


def test_digest_ignores_output_dir():
    a, b = config.RunConfig(), config.RunConfig()
    b.output_dir = "elsewhere"
    assert a.digest() == b.digest()
