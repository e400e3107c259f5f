"""Тесты схем и проверки сценариев"""
import pytest
from pydantic import ValidationError

from uavplace.models.schemas import (
    Area,
    Centroid,
    FeatureMode,
    Placement,
    Scenario,
    SolveConfig,
    User,
    validate_scenario,
)
from tests.conftest import make_scenario


class TestValidateScenario:

    def test_valid_scenario_is_ok(self):
        s = make_scenario([(1, 1, 1), (2, 2, 1), (3, 3, 2), (4, 4, 1), (5, 5, 8)], k=2)
        result = validate_scenario(s)
        assert result.ok
        assert result.violations == []

    def test_k_zero_out_of_range(self):
        s = make_scenario([(1, 1, 1), (2, 2, 1)], k=0)
        assert validate_scenario(s).codes() == ["k_out_of_range"]

    def test_k_above_user_count(self):
        s = make_scenario([(1, 1, 1), (2, 2, 1)], k=3)
        assert "k_out_of_range" in validate_scenario(s).codes()

    def test_negative_load(self):
        s = make_scenario([(1, 1, -1), (2, 2, 1)], k=1)
        result = validate_scenario(s)
        assert not result.ok
        assert result.codes() == ["non_positive_load"]
        assert result.violations[0].user_id == "u0"

    def test_all_violations_reported(self):
        users = (
            User(id="a", x=1, y=1, load=1),
            User(id="a", x=500, y=1, load=0),
        )
        s = Scenario(users=users, area=Area(), k=0)
        codes = validate_scenario(s).codes()
        assert set(codes) == {"duplicate_id", "k_out_of_range", "user_outside_area", "non_positive_load"}

    def test_too_few_distinct_positions(self):
        s = make_scenario([(5, 5, 1), (5, 5, 3), (5, 5, 2)], k=2)
        result = validate_scenario(s)
        assert result.codes() == ["too_few_distinct_positions"]
        assert validate_scenario(make_scenario([(5, 5, 1), (5, 5, 3), (6, 5, 2)], k=2)).ok

    def test_non_finite_position(self):
        s = make_scenario([(float("nan"), 1, 1), (2, 2, 1)], k=1)
        assert validate_scenario(s).codes() == ["non_finite_position"]


class TestModels:

    def test_sorted_by_id(self):
        users = (User(id="b", x=1, y=1, load=1), User(id="a", x=2, y=2, load=1))
        s = Scenario(users=users, area=Area(), k=1)
        assert s.sorted_by_id().ids() == ["a", "b"]
        assert s.ids() == ["b", "a"]

    def test_median_load(self):
        s = make_scenario([(1, 1, 1), (2, 2, 1), (3, 3, 8)], k=1)
        assert s.median_load() == 1.0

    def test_placement_rejects_index_out_of_range(self):
        with pytest.raises(ValidationError):
            Placement(centroids=(Centroid(x=0, y=0),), assignment={"u0": 1})

    def test_solve_config_rejects_composition(self):
        with pytest.raises(ValidationError):
            SolveConfig(mode=FeatureMode.THREE_FEATURE, materialize=True)

    def test_solve_config_bounds(self):
        with pytest.raises(ValidationError):
            SolveConfig(load_scale=-1.0)
        with pytest.raises(ValidationError):
            SolveConfig(restarts=0)
        with pytest.raises(ValidationError):
            SolveConfig(max_iters=0)

    def test_solve_config_defaults(self):
        cfg = SolveConfig()
        assert cfg.mode is FeatureMode.WEIGHTED
        assert cfg.restarts >= 1
        assert cfg.max_iters >= 1
