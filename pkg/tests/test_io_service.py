"""Тесты чтения и записи файлов"""
import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from uavplace.core.exceptions import InvalidScenario, ParseError, SchemaVersionMismatch, UncoveredUser
from uavplace.models.schemas import Centroid, Placement, SolveConfig
from uavplace.services.io_service import format_number, io_service
from uavplace.services.kmeans_service import kmeans_service
from uavplace.services.metrics_service import metrics_service
from tests.conftest import make_scenario


class TestScenarioFiles:

    def test_round_trip(self, tmp_path, two_groups):
        path = io_service.write_scenario(tmp_path / "scenario.json", two_groups)
        assert io_service.read_scenario(path) == two_groups

    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(rows=st.lists(
        st.tuples(
            st.floats(min_value=0, max_value=100, allow_nan=False),
            st.floats(min_value=0, max_value=100, allow_nan=False),
            st.floats(min_value=0.001, max_value=1e6, allow_nan=False),
        ),
        min_size=1,
        max_size=15,
    ))
    def test_round_trip_keeps_every_float(self, tmp_path, rows):
        s = make_scenario(rows, k=1)
        assert io_service.read_scenario(io_service.write_scenario(tmp_path / "s.json", s)) == s

    def test_invalid_scenario_not_written(self, tmp_path):
        with pytest.raises(InvalidScenario):
            io_service.write_scenario(tmp_path / "bad.json", make_scenario([(1, 1, 1)], k=2))
        assert not (tmp_path / "bad.json").exists()

    def test_missing_field_named(self, tmp_path, two_groups):
        path = io_service.write_scenario(tmp_path / "scenario.json", two_groups)
        data = json.loads(path.read_text())
        del data["k"]
        path.write_text(json.dumps(data))
        with pytest.raises(ParseError) as exc:
            io_service.read_scenario(path)
        assert exc.value.field == "k"

    def test_unknown_schema_version(self, tmp_path, two_groups):
        path = io_service.write_scenario(tmp_path / "scenario.json", two_groups)
        data = json.loads(path.read_text())
        data["schema_version"] = 99
        path.write_text(json.dumps(data))
        with pytest.raises(SchemaVersionMismatch):
            io_service.read_scenario(path)

    def test_broken_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "schema_version": 1,\n  "k": \n}\n')
        with pytest.raises(ParseError) as exc:
            io_service.read_scenario(path)
        assert exc.value.line == 4


class TestPlacementFiles:

    def test_round_trip(self, tmp_path, two_groups):
        placement, _ = kmeans_service.solve(two_groups, SolveConfig())
        path = io_service.write_placement(tmp_path / "placement.json", placement)
        assert io_service.read_placement(path) == placement

    def test_two_feature_omits_load_coord(self, tmp_path):
        placement = Placement(centroids=(Centroid(x=1.0, y=2.0),), assignment={"u0": 0})
        path = io_service.write_placement(tmp_path / "placement.json", placement)
        assert "load_coord" not in path.read_text()


class TestReports:

    def test_number_format(self):
        assert format_number(50.0) == "50.0000000000"

    def test_csv_rows(self, tmp_path):
        s = make_scenario([(0, 0, 2)], k=1)
        placement = Placement(centroids=(Centroid(x=3.0, y=4.0),), assignment={"u0": 0})
        report = metrics_service.evaluate(s, placement)
        table, document = io_service.write_report(tmp_path / "report.csv", report)
        lines = table.read_text().splitlines()
        assert lines[0] == "metric,value"
        assert "objective,50.0000000000" in lines
        assert "mean_dist_highload," in lines
        assert "cluster_count.0,1" in lines
        assert document.suffix == ".json"

    def test_comparison_rows(self, tmp_path, two_groups):
        placement, report = kmeans_service.solve(two_groups, SolveConfig())
        record = metrics_service.compare(two_groups, placement, placement, label_a="x", label_b="y")
        table, _ = io_service.write_report(tmp_path / "compare.csv", report, record)
        lines = table.read_text().splitlines()
        assert "winner.objective,tie" in lines
        assert any(line.startswith("x.objective,") for line in lines)
        assert any(line.startswith("delta.max_dist,") for line in lines)

    def test_report_round_trip(self, tmp_path, two_groups):
        placement, report = kmeans_service.solve(two_groups, SolveConfig())
        record = metrics_service.compare(two_groups, placement, placement)
        io_service.write_report(tmp_path / "report.csv", report, record, extra={"seed": 0})
        loaded, comparison = io_service.read_report(tmp_path / "report.csv")
        assert loaded == report
        assert comparison == record


def user_collections(fig):
    return [c for c in fig.axes[0].collections if (c.get_gid() or "").startswith("cluster-")]


def radii(fig):
    sizes = np.concatenate([c.get_sizes() for c in user_collections(fig)])
    return np.sqrt(sizes) / 2


class TestSvg:

    def test_one_marker_per_user(self, two_groups):
        placement, _ = kmeans_service.solve(two_groups, SolveConfig())
        fig = io_service.placement_figure(two_groups, placement)
        assert sum(len(c.get_offsets()) for c in user_collections(fig)) == len(two_groups.users)
        centroids = [c for c in fig.axes[0].collections if c.get_gid() == "centroids"]
        assert len(centroids[0].get_offsets()) == two_groups.k

    def test_equal_loads_equal_radius(self):
        s = make_scenario([(10, 10, 4), (20, 30, 4), (70, 60, 4)], k=1)
        placement = Placement(centroids=(Centroid(x=30.0, y=30.0),), assignment={i: 0 for i in s.ids()})
        assert radii(io_service.placement_figure(s, placement)) == pytest.approx([2.0, 2.0, 2.0])

    def test_radius_grows_with_load(self):
        s = make_scenario([(10, 10, 1), (20, 30, 8), (70, 60, 1)], k=1)
        placement = Placement(centroids=(Centroid(x=30.0, y=30.0),), assignment={i: 0 for i in s.ids()})
        assert radii(io_service.placement_figure(s, placement)) == pytest.approx([2.0, 6.0, 2.0])
        assert io_service.marker_radius(4.5, 1.0, 8.0) == pytest.approx(4.0)

    def test_svg_written_with_cluster_groups(self, tmp_path, two_groups):
        placement, _ = kmeans_service.solve(two_groups, SolveConfig())
        text = io_service.render_svg(two_groups, placement, tmp_path / "plot.svg", title="weighted").read_text()
        assert text.lstrip().startswith("<?xml")
        assert 'id="cluster-0"' in text and 'id="cluster-1"' in text
        assert 'id="centroids"' in text
        assert "weighted" in text

    def test_byte_identical(self, tmp_path, two_groups):
        placement, _ = kmeans_service.solve(two_groups, SolveConfig())
        a = io_service.render_svg(two_groups, placement, tmp_path / "a.svg").read_bytes()
        b = io_service.render_svg(two_groups, placement, tmp_path / "b.svg").read_bytes()
        assert a == b

    def test_uncovered_user(self, tmp_path, two_groups):
        placement = Placement(centroids=(Centroid(x=0.0, y=0.0),), assignment={"u0": 0})
        with pytest.raises(UncoveredUser):
            io_service.render_svg(two_groups, placement, tmp_path / "plot.svg")
