from __future__ import annotations

import math

import pytest

from kplist.config import PROFILES, Config
from kplist.errors import InputError


def test_defaults_follow_log_n():
    cfg = Config()
    assert cfg.phi_for(1024) == pytest.approx(1 / 100)
    assert cfg.epsilon_for(1024) == pytest.approx(1 / 10)
    assert cfg.kappa_route_for(1024) == pytest.approx(1000)
    assert cfg.t_decomp(1024) == math.ceil(2 * 1000)


def test_explicit_targets_win():
    cfg = Config(phi_target=0.3, epsilon_target=0.2, kappa_route=5.0)
    assert cfg.phi_for(10**6) == 0.3
    assert cfg.epsilon_for(10**6) == 0.2
    assert cfg.kappa_route_for(10**6) == 5.0


@pytest.mark.parametrize(
    "bad",
    [
        {"p": 2},
        {"W": 0},
        {"B": 0},
        {"beta": 1.0},
        {"gamma": 0.5},
        {"phi_target": 1.5},
        {"epsilon_target": 0.0},
        {"kappa": -1.0},
        {"partition_retries": 0},
    ],
)
def test_rejects_invalid(bad):
    with pytest.raises(InputError):
        Config(**bad)


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(InputError, match="unknown"):
        Config.from_dict({"bogus": 1})


def test_roundtrip():
    cfg = Config(p=5, gamma=9.0)
    assert Config.from_dict(cfg.to_dict()) == cfg


def test_profiles():
    assert set(PROFILES) == {"desk", "faithful"}
    assert Config.profile("faithful").beta == 32.0
    assert Config.profile("desk", p=6).p == 6
    with pytest.raises(InputError):
        Config.profile("nope")


def test_load_cap_scales_with_p():
    cfg = Config()
    assert cfg.load_cap(256, 4) < cfg.load_cap(256, 6)
    assert cfg.load_cap(256, 4) == pytest.approx(256**0.5 * 8**3)
