from pathlib import Path

import pytest

from line_addition.config import (
    CONSTRUCTION_KEYS,
    CostTable,
    EfficiencyConfig,
    LineConstructionConfig,
    Regression,
    parse_kv_config,
)
from line_addition.errors import ConfigError, MalformedLine, MissingKey, UnknownCostMode, UnknownKey

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_partial_schema():
    schema = {k: CONSTRUCTION_KEYS[k] for k in ("p-max", "max-length")}
    assert parse_kv_config("p-max:1.5\nmax-length:35", schema) == {"p-max": 1.5, "max-length": 35}


def test_errors():
    with pytest.raises(MissingKey):
        parse_kv_config("", CONSTRUCTION_KEYS)
    with pytest.raises(MalformedLine):
        parse_kv_config("p-max:abc", {"p-max": CONSTRUCTION_KEYS["p-max"]})
    with pytest.raises(MalformedLine):
        parse_kv_config("p-max 1.5", CONSTRUCTION_KEYS)
    with pytest.raises(UnknownKey):
        parse_kv_config("p-max:1.5\ncolour:red", CONSTRUCTION_KEYS)
    with pytest.raises(MalformedLine):
        parse_kv_config("p-max:1.5\np-max:2", {"p-max": CONSTRUCTION_KEYS["p-max"]})


def test_whitespace_and_blank_lines():
    got = parse_kv_config("\n  p-max : 2 \n\n", {"p-max": CONSTRUCTION_KEYS["p-max"]})
    assert got == {"p-max": 2.0}


@pytest.mark.parametrize("case", range(1, 6))
def test_case_listings_parse(case):
    lc = LineConstructionConfig.from_file(CONFIGS / f"case{case}" / "construction.txt")
    ec = EfficiencyConfig.from_file(CONFIGS / f"case{case}" / "efficiency.txt")
    assert lc.max_length == 35 and lc.demand_adjustment_weight == 10
    assert ec.regression is Regression.LOG_LOG and ec.line_regression is Regression.LOG_LOG
    assert ec.cost_mode == "state-average-DC"
    assert ec.w_s == 0.25 and ec.w_d == 2 and ec.w_a == 2


def test_case1_values():
    lc = LineConstructionConfig.from_file(CONFIGS / "case1" / "construction.txt")
    assert (lc.rho_max, lc.min_length, lc.corridor_height, lc.target_efficiency) == (1.5, 8.2, 0.5, 150)
    ec = EfficiencyConfig.from_file(CONFIGS / "case1" / "efficiency.txt")
    assert ec.w_t == 0.0 and ec.efficiency_exponent == 4.0


def test_construction_invariants():
    base = dict(rho_max=1.5, max_length=35, min_length=8.2, corridor_height=0.5, demand_adjustment_weight=10, target_efficiency=150)
    for bad in (dict(rho_max=1.0), dict(min_length=0), dict(min_length=40), dict(corridor_height=0), dict(demand_adjustment_weight=-1)):
        with pytest.raises(ConfigError):
            LineConstructionConfig(**{**base, **bad})


def test_efficiency_invariants_and_optional_keys():
    with pytest.raises(ConfigError):
        EfficiencyConfig(adjustment_weight=-1)
    with pytest.raises(ConfigError):
        EfficiencyConfig(transfer_weight=-2)
    text = (CONFIGS / "case1" / "efficiency.txt").read_text() + "efficiency-exponent:2\nweight-mode:raw\n"
    with pytest.raises(ConfigError):
        EfficiencyConfig.from_text(text)
    ec = EfficiencyConfig.from_text(text.replace("transfer-weight:-1", "transfer-weight:2").replace("station-weight:-0.75", "station-weight:0.5"))
    assert ec.efficiency_exponent == 2 and ec.w_t == 2 and ec.w_a == 1 and ec.w_d == 1


def test_cost_table():
    t = CostTable.from_text("state-average-DC:1000000\nunit:1\n")
    assert t.per_mile("unit") == 1
    with pytest.raises(UnknownCostMode):
        t.per_mile("national")
    with pytest.raises(ConfigError):
        CostTable.from_text("unit:-3")
