import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctsf.model import (
    BandPlan,
    ChannelSet,
    ConfigError,
    PowerAllocation,
    RicianParams,
    Scenario,
    db_to_linear,
    demo_scenario,
    dump_scenario,
    linear_to_db,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)


def test_db_conversions():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(10) == pytest.approx(10.0)
    assert db_to_linear(-3) == pytest.approx(0.501187, rel=1e-6)
    assert linear_to_db(100.0) == pytest.approx(20.0)
    assert linear_to_db(0.0) == -math.inf


def test_band_plan_checks():
    assert BandPlan(4, (0, 2), (1, 3), 0.5).violations() == []
    assert "band sets overlap" in BandPlan(3, (0, 1), (1, 2)).violations()
    assert "band sets do not cover all bands" in BandPlan(4, (0,), (1, 2)).violations()
    assert "no fake bands" in BandPlan(2, (0, 1), ()).violations()
    assert BandPlan(2, (0, 1), ()).violations(allow_pure_true=True) == []
    assert "alpha out of range" in BandPlan(2, (0,), (1,), 0.0).violations()
    assert "alpha out of range" in BandPlan(2, (0,), (1,), 1.5).violations()


def test_band_plan_masks_and_interleave():
    plan = BandPlan.interleaved(5, 0.3)
    assert plan.true_bands == (0, 2, 4)
    assert plan.fake_bands == (1, 3)
    assert plan.true_mask.tolist() == [True, False, True, False, True]
    assert (plan.true_mask ^ plan.fake_mask).all()
    assert plan.reference_band == 0


def test_channel_set_normalization_and_freezing():
    ch = ChannelSet([2.0, 4.0], [1.0, 3.0], [2.0, 2.0], [0.5, 1.0])
    n = ch.normalized()
    assert n.is_normalized
    np.testing.assert_allclose(n.bob_gain, [1.0, 2.0])
    np.testing.assert_allclose(n.eve_gain, [2.0, 3.0])
    with pytest.raises(ValueError):
        n.bob_gain[0] = 5.0
    with pytest.raises(ValueError):
        ChannelSet([1.0, 2.0], [1.0])
    assert ChannelSet([-1.0], [1.0]).violations()
    assert ChannelSet([1.0], [1.0], [0.0]).violations()


def test_channel_set_dict_roundtrip():
    ch = ChannelSet([0.3, 1.7], [2.0, 0.1], [1.0, 2.0], [1.0, 1.0])
    back = ChannelSet.from_dict(json.loads(json.dumps(ch.to_dict())))
    for name in ("bob_gain", "eve_gain", "bob_noise", "eve_noise"):
        np.testing.assert_array_equal(getattr(back, name), getattr(ch, name))


def test_power_allocation_violations():
    assert PowerAllocation([1.0, 2.0], 3.0).violations() == []
    assert "power budget exceeded" in PowerAllocation([2.0, 2.0], 3.0).violations()
    assert "negative power" in PowerAllocation([-1.0, 2.0], 3.0).violations()


def test_validate_scenario_lists_every_problem():
    bad = Scenario(BandPlan(2, (0,), (1,), 2.0), total_power=-1.0, deception_threshold=-0.1,
                   trials=0, seed=-5)
    problems = validate_scenario(bad)
    assert len(problems) == 5
    assert validate_scenario(demo_scenario()) == []


def test_config_roundtrip_demo():
    s = demo_scenario()
    assert scenario_from_dict(json.loads(dump_scenario(s))) == s


def test_config_db_keys_are_converted():
    d = scenario_to_dict(demo_scenario())
    d.pop("total_power_db", None)
    d["total_power_db"] = 20.0
    assert scenario_from_dict(d).total_power == pytest.approx(100.0)
    d.pop("total_power_db")
    d["total_power"] = 3.5
    assert scenario_from_dict(d).total_power == 3.5


def test_config_errors():
    d = scenario_to_dict(demo_scenario())
    with pytest.raises(ConfigError, match="missing"):
        scenario_from_dict({k: v for k, v in d.items() if k != "alpha"})
    with pytest.raises(ConfigError, match="unknown"):
        scenario_from_dict({**d, "colour": "red"})
    with pytest.raises(ConfigError, match="malformed"):
        scenario_from_dict({**d, "trials": "many"})
    with pytest.raises(ConfigError):
        scenario_from_dict([1, 2])


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_scenario(tmp_path / "missing.json")
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_scenario(p)


@settings(max_examples=60, deadline=None)
@given(
    power=st.floats(1e-6, 1e6, allow_nan=False),
    th=st.floats(0, 10, allow_nan=False),
    k_db=st.floats(-20, 30, allow_nan=False),
    alpha=st.floats(0.01, 1.0),
    seed=st.integers(0, 2**64 - 1),
)
def test_config_roundtrip_property(power, th, k_db, alpha, seed):
    s = Scenario(BandPlan(3, (0,), (1, 2), alpha), RicianParams(k_db), RicianParams(k_db),
                 total_power=power, deception_threshold=th, trials=7, seed=seed)
    assert scenario_from_dict(json.loads(dump_scenario(s))) == s
