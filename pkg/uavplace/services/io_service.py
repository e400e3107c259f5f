"""
Сервис файлов: сценарии, размещения, отчеты (JSON + CSV) и SVG-графики
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

import matplotlib
import numpy as np
from loguru import logger
from matplotlib.figure import Figure
from pydantic import BaseModel, Field, ValidationError

from uavplace.core.exceptions import InvalidScenario, ParseError, SchemaVersionMismatch, UncoveredUser
from uavplace.models.schemas import (
    Area,
    Centroid,
    ComparisonRecord,
    Placement,
    PlacementReport,
    Scenario,
    User,
    validate_scenario,
)

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12

PathLike = Union[str, Path]
DocumentT = TypeVar("DocumentT", bound=BaseModel)

# Палитра кластеров
COLORS = ["#E95420", "#772953", "green", "blue", "red", "#EB6536", "#843E64", "black", "cyan", "orange"]
FIGSIZE = (6.0, 6.0)
RADIUS_MIN = 2.0
RADIUS_SPAN = 4.0
RADIUS_EPS = 1e-12
CENTROID_SIZE = 144.0
SVG_RC = {"svg.hashsalt": "uavplace", "svg.fonttype": "none"}


class ScenarioDocument(BaseModel):
    """Файловое представление сценария"""

    schema_version: int = SCHEMA_VERSION
    area: Area
    k: int
    users: List[User]


class PlacementDocument(BaseModel):
    """Файловое представление размещения"""

    schema_version: int = SCHEMA_VERSION
    centroids: List[Centroid]
    assignment: Dict[str, int]
    iterations: int
    converged: bool


class ReportDocument(BaseModel):
    """Файловое представление отчета и, опционально, сравнения"""

    schema_version: int = SCHEMA_VERSION
    report: PlacementReport
    comparison: Optional[ComparisonRecord] = None
    extra: Dict[str, Any] = Field(default_factory=dict)


def format_number(value: float) -> str:
    """Число с 12 значащими цифрами: 50 -> '50.0000000000'"""
    return np.format_float_positional(
        float(value), precision=SIGNIFICANT_DIGITS, unique=False, fractional=False, trim="k"
    )


class IOService:
    """Чтение и запись файлов приложения"""

    @staticmethod
    def _write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        logger.info(f"Файл записан: {target}")
        return target

    @staticmethod
    def _read_document(path: PathLike, model: Type[DocumentT]) -> DocumentT:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"Некорректный JSON в {path}: {exc.msg}", line=exc.lineno) from exc
        if not isinstance(data, dict):
            raise ParseError(f"Ожидается объект JSON в {path}", line=1)
        if "schema_version" not in data:
            raise ParseError(f"Нет обязательного поля в {path}", field="schema_version")
        if data["schema_version"] != SCHEMA_VERSION:
            raise SchemaVersionMismatch(data["schema_version"], SCHEMA_VERSION)
        try:
            return model.model_validate(data)
        except ValidationError as exc:
            error = exc.errors()[0]
            field = ".".join(str(part) for part in error["loc"])
            raise ParseError(f"Ошибка схемы в {path}: {error['msg']}", field=field) from exc

    def write_scenario(self, path: PathLike, s: Scenario) -> Path:
        """
        Запись сценария

        Raises:
            InvalidScenario: сценарий не прошел проверку
        """
        validation = validate_scenario(s)
        if not validation.ok:
            raise InvalidScenario(validation.violations)
        document = ScenarioDocument(area=s.area, k=s.k, users=list(s.users))
        return self._write_json(path, document.model_dump(mode="json"))

    def read_scenario(self, path: PathLike) -> Scenario:
        """
        Чтение сценария

        Raises:
            ParseError: файл не соответствует схеме (строка или поле)
            SchemaVersionMismatch: неподдерживаемая версия схемы
        """
        document = self._read_document(path, ScenarioDocument)
        return Scenario(users=tuple(document.users), area=document.area, k=document.k)

    def write_placement(self, path: PathLike, p: Placement) -> Path:
        document = PlacementDocument(
            centroids=list(p.centroids),
            assignment=dict(p.assignment),
            iterations=p.iterations,
            converged=p.converged,
        )
        return self._write_json(path, document.model_dump(mode="json", exclude_none=True))

    def read_placement(self, path: PathLike) -> Placement:
        document = self._read_document(path, PlacementDocument)
        try:
            return Placement(
                centroids=tuple(document.centroids),
                assignment=document.assignment,
                iterations=document.iterations,
                converged=document.converged,
            )
        except ValidationError as exc:
            raise ParseError(f"Некорректное размещение в {path}: {exc.errors()[0]['msg']}", field="assignment") from exc

    @staticmethod
    def report_paths(path: PathLike) -> Tuple[Path, Path]:
        """Пути табличного (.csv) и структурного (.json) представлений отчета"""
        base = Path(path)
        return base.with_suffix(".csv"), base.with_suffix(".json")

    @staticmethod
    def _report_rows(report: PlacementReport, comparison: Optional[ComparisonRecord]) -> List[Tuple[str, str]]:
        def cell(value: Optional[float]) -> str:
            return "" if value is None else format_number(value)

        rows = [
            ("objective", cell(report.objective)),
            ("mean_dist_all", cell(report.mean_dist_all)),
            ("mean_dist_weighted", cell(report.mean_dist_weighted)),
            ("mean_dist_highload", cell(report.mean_dist_highload)),
            ("max_dist", cell(report.max_dist)),
            ("highload_threshold", cell(report.highload_threshold)),
        ]
        rows.extend((f"cluster_load.{j}", cell(v)) for j, v in sorted(report.per_cluster_load.items()))
        rows.extend((f"cluster_count.{j}", str(v)) for j, v in sorted(report.per_cluster_count.items()))
        if comparison is not None:
            for metric in comparison.metrics:
                rows.append((f"{comparison.label_a}.{metric.name}", cell(metric.a)))
                rows.append((f"{comparison.label_b}.{metric.name}", cell(metric.b)))
                rows.append((f"delta.{metric.name}", cell(metric.delta)))
                rows.append((f"winner.{metric.name}", metric.winner))
        return rows

    def write_report(
        self,
        path: PathLike,
        report: PlacementReport,
        comparison: Optional[ComparisonRecord] = None,
        extra: Optional[Dict[str, Any]] = None,
    ) -> Tuple[Path, Path]:
        """
        Запись отчета: таблица name,value (.csv) и структурный документ (.json)

        Returns:
            Tuple[Path, Path]: пути csv и json
        """
        table_path, document_path = self.report_paths(path)
        table_path.parent.mkdir(parents=True, exist_ok=True)
        with table_path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["metric", "value"])
            writer.writerows(self._report_rows(report, comparison))
        logger.info(f"Файл записан: {table_path}")

        document = ReportDocument(report=report, comparison=comparison, extra=extra or {})
        self._write_json(document_path, document.model_dump(mode="json"))
        return table_path, document_path

    def read_report(self, path: PathLike) -> Tuple[PlacementReport, Optional[ComparisonRecord]]:
        """Чтение структурного документа отчета"""
        _, document_path = self.report_paths(path)
        document = self._read_document(document_path, ReportDocument)
        return document.report, document.comparison

    @staticmethod
    def marker_radius(load: float, low: float, high: float) -> float:
        """Радиус точки пользователя в pt: 2 для наименьшей нагрузки, 6 для наибольшей"""
        return RADIUS_MIN + RADIUS_SPAN * (load - low) / (high - low + RADIUS_EPS)

    def placement_figure(self, s: Scenario, p: Placement, title: Optional[str] = None) -> Figure:
        """
        Фигура размещения: scatter на кластер, кресты центроидов

        Площадь маркера scatter задается в pt^2, поэтому s = (2 * r)^2.

        Raises:
            UncoveredUser: пользователь без кластера
        """
        for user in s.users:
            if user.id not in p.assignment:
                raise UncoveredUser(user.id)

        loads = [u.load for u in s.users]
        low, high = min(loads), max(loads)

        fig = Figure(figsize=FIGSIZE)
        ax = fig.add_subplot()
        for j in range(p.k):
            members = [u for u in s.users if p.assignment[u.id] == j]
            if not members:
                continue
            ax.scatter(
                [u.x for u in members],
                [u.y for u in members],
                s=[(2 * self.marker_radius(u.load, low, high)) ** 2 for u in members],
                c=COLORS[j % len(COLORS)],
                linewidths=0,
                gid=f"cluster-{j}",
            )
        ax.scatter(
            [c.x for c in p.centroids],
            [c.y for c in p.centroids],
            s=CENTROID_SIZE,
            c="black",
            marker="x",
            linewidths=2,
            gid="centroids",
        )

        ax.set_xlim(s.area.xmin, s.area.xmax)
        ax.set_ylim(s.area.ymin, s.area.ymax)
        ax.set_aspect("equal")
        ax.set_title(title or f"k={p.k}, users={len(s.users)}")
        return fig

    def render_svg(self, s: Scenario, p: Placement, path: PathLike, title: Optional[str] = None) -> Path:
        """
        SVG-график размещения

        Точка на пользователя, радиус r = 2 + 4 * (load - min) / (max - min + 1e-12) pt,
        цвет по кластеру; центроиды - черные кресты. Одинаковые входы дают
        побайтно одинаковый файл (фиксированная соль id, без даты).

        Raises:
            UncoveredUser: пользователь без кластера
        """
        fig = self.placement_figure(s, p, title)
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with matplotlib.rc_context(SVG_RC):
            fig.savefig(target, format="svg", metadata={"Date": None})
        logger.info(f"График записан: {target}")
        return target


# Глобальный экземпляр сервиса
io_service = IOService()
