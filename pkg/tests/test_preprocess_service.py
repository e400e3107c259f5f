"""Тесты разбиения пользователей на реплики"""
import pytest

from uavplace.core.exceptions import MissingReplica, NonIntegralLoad
from uavplace.services.preprocess_service import preprocess_service
from tests.conftest import make_scenario


class TestSplitUsers:

    def test_user_split_into_colocated_replicas(self):
        s = make_scenario([(3, 4, 3)], k=1)
        replicas = preprocess_service.split_users(s, 1.0)
        assert len(replicas.replicas) == 3
        assert all((r.x, r.y) == (3.0, 4.0) for r in replicas.replicas)
        assert replicas.origin_counts == {"u0": 3}

    def test_unit_loads_identity(self):
        s = make_scenario([(1, 1, 1), (2, 2, 1)], k=1)
        replicas = preprocess_service.split_users(s, 1.0)
        assert len(replicas.replicas) == 2
        assert replicas.origin_counts == {"u0": 1, "u1": 1}

    def test_non_integral_load(self):
        s = make_scenario([(1, 1, 2.5)], k=1)
        with pytest.raises(NonIntegralLoad) as exc:
            preprocess_service.split_users(s, 1.0)
        assert exc.value.user_id == "u0"

    def test_finer_unit_accepts_fractional_load(self):
        s = make_scenario([(1, 1, 2.5)], k=1)
        assert preprocess_service.split_users(s, 0.5).origin_counts == {"u0": 5}

    def test_count_conservation_and_order(self):
        s = make_scenario([(1.1, 2.2, 2), (3.3, 4.4, 5), (5.5, 6.6, 1)], k=2)
        replicas = preprocess_service.split_users(s, 1.0)
        assert sum(replicas.origin_counts.values()) == len(replicas.replicas) == 8
        assert [r.origin_id for r in replicas.replicas] == ["u0"] * 2 + ["u1"] * 5 + ["u2"]
        for replica in replicas.replicas:
            origin = next(u for u in s.users if u.id == replica.origin_id)
            assert replica.x == origin.x and replica.y == origin.y


class TestFoldAssignment:

    @pytest.fixture
    def replicas(self):
        s = make_scenario([(1, 1, 3), (2, 2, 2)], k=2)
        return preprocess_service.split_users(s, 1.0)

    def test_unanimous(self, replicas):
        assignment = {"u0#0": 1, "u0#1": 1, "u0#2": 1, "u1#0": 0, "u1#1": 0}
        assert preprocess_service.fold_assignment(replicas, assignment) == {"u0": 1, "u1": 0}

    def test_majority(self, replicas):
        assignment = {"u0#0": 0, "u0#1": 2, "u0#2": 0, "u1#0": 0, "u1#1": 0}
        assert preprocess_service.fold_assignment(replicas, assignment)["u0"] == 0

    def test_tie_goes_to_lowest_index(self, replicas):
        assignment = {"u0#0": 0, "u0#1": 0, "u0#2": 0, "u1#0": 1, "u1#1": 0}
        assert preprocess_service.fold_assignment(replicas, assignment)["u1"] == 0

    def test_missing_replica(self, replicas):
        with pytest.raises(MissingReplica) as exc:
            preprocess_service.fold_assignment(replicas, {"u0#0": 0})
        assert exc.value.replica_id == "u0#1"
