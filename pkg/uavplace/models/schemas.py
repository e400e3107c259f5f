"""
Pydantic схемы предметной области: пользователи, сценарии, размещения, отчеты
"""
import math
from collections import Counter
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from uavplace.core.config import settings


class FeatureMode(str, Enum):
    """Режим признаков K-means"""

    TWO_FEATURE = "two-feature"
    THREE_FEATURE = "three-feature"
    WEIGHTED = "weighted"


class InitMethod(str, Enum):
    """Способ начальной расстановки центроидов"""

    UNIFORM = "uniform"
    PLUSPLUS = "plusplus"


class User(BaseModel):
    """Наземный абонент: позиция (м) и требуемый трафик"""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Идентификатор, уникален в сценарии", examples=["u001"])
    x: float = Field(..., description="Координата X, м", examples=[12.5])
    y: float = Field(..., description="Координата Y, м", examples=[40.0])
    load: float = Field(..., description="Требуемый трафик в единицах минимального трафика", examples=[8.0])


class Area(BaseModel):
    """Прямоугольная область обслуживания"""

    model_config = ConfigDict(frozen=True)

    xmin: float = 0.0
    xmax: float = 100.0
    ymin: float = 0.0
    ymax: float = 100.0

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


class Scenario(BaseModel):
    """Область, набор пользователей и число UAV"""

    model_config = ConfigDict(frozen=True)

    users: Tuple[User, ...]
    area: Area
    k: int = Field(..., description="Число UAV")

    def positions(self) -> np.ndarray:
        """Позиции пользователей, массив (n, 2)"""
        return np.array([(u.x, u.y) for u in self.users], dtype=float).reshape(-1, 2)

    def loads(self) -> np.ndarray:
        return np.array([u.load for u in self.users], dtype=float)

    def ids(self) -> List[str]:
        return [u.id for u in self.users]

    def median_load(self) -> float:
        """Порог высокой нагрузки по умолчанию"""
        return float(np.median(self.loads()))

    def sorted_by_id(self) -> "Scenario":
        """Копия с пользователями в каноническом порядке идентификаторов"""
        return self.model_copy(update={"users": tuple(sorted(self.users, key=lambda u: u.id))})


class Centroid(BaseModel):
    """Позиция UAV; load_coord есть только в трехпризнаковом режиме"""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    load_coord: Optional[float] = None


class Placement(BaseModel):
    """Центроиды и отображение пользователь -> индекс кластера"""

    model_config = ConfigDict(frozen=True)

    centroids: Tuple[Centroid, ...]
    assignment: Dict[str, int]
    iterations: int = Field(default=0, ge=0)
    converged: bool = False

    @property
    def k(self) -> int:
        return len(self.centroids)

    @model_validator(mode="after")
    def _check_indices(self) -> "Placement":
        k = len(self.centroids)
        for user_id, index in self.assignment.items():
            if not 0 <= index < k:
                raise ValueError(f"Кластер {index} пользователя {user_id} вне [0, {k})")
        return self

    def positions(self) -> np.ndarray:
        return np.array([(c.x, c.y) for c in self.centroids], dtype=float).reshape(-1, 2)


class SolveConfig(BaseModel):
    """Параметры решателя"""

    model_config = ConfigDict(frozen=True)

    mode: FeatureMode = FeatureMode.WEIGHTED
    load_scale: float = Field(default_factory=lambda: settings.default_load_scale, ge=0.0)
    init: InitMethod = InitMethod.PLUSPLUS
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0, lt=2**64)
    max_iters: int = Field(default_factory=lambda: settings.default_max_iters, ge=1)
    shift_tol: float = Field(default_factory=lambda: settings.default_shift_tol, ge=0.0)
    restarts: int = Field(default_factory=lambda: settings.default_restarts, ge=1)
    unit: float = Field(default_factory=lambda: settings.default_unit, gt=0.0)
    materialize: bool = Field(default=False, description="Решать на репликах split_users (только weighted)")

    @model_validator(mode="after")
    def _reject_composition(self) -> "SolveConfig":
        if self.materialize and self.mode is not FeatureMode.WEIGHTED:
            raise ValueError("Репликация совместима только с режимом weighted")
        return self


class PlacementReport(BaseModel):
    """Метрики качества размещения (все по позиционному расстоянию)"""

    objective: float
    per_cluster_load: Dict[int, float]
    per_cluster_count: Dict[int, int]
    mean_dist_all: float
    mean_dist_weighted: float
    mean_dist_highload: Optional[float] = None
    max_dist: float
    highload_threshold: float
    objective_trace: List[float] = Field(
        default_factory=list,
        description=(
            "Целевая функция решателя после каждого шага обновления, в его пространстве признаков "
            "и с его весами (two-feature: без нагрузки, three-feature: с координатой alpha * load, "
            "weighted: load / unit). Сравнима с objective только в режиме weighted при unit = 1"
        ),
    )


class MetricDelta(BaseModel):
    """Сравнение одной метрики: delta = b - a, меньше - лучше"""

    name: str
    a: Optional[float]
    b: Optional[float]
    delta: Optional[float]
    winner: str = Field(..., description="a | b | tie")


class ComparisonRecord(BaseModel):
    """Сравнение двух размещений по каждой метрике, без итогового вердикта"""

    label_a: str = "a"
    label_b: str = "b"
    metrics: List[MetricDelta]

    def metric(self, name: str) -> MetricDelta:
        for item in self.metrics:
            if item.name == name:
                return item
        raise KeyError(name)


class Violation(BaseModel):
    """Нарушение инварианта сценария"""

    code: str
    message: str
    user_id: Optional[str] = None


class ValidationResult(BaseModel):
    """Результат проверки сценария"""

    violations: List[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]


def validate_scenario(s: Scenario) -> ValidationResult:
    """
    Проверка инвариантов сценария

    Нарушения возвращаются как данные, исключения не бросаются.

    Args:
        s: Сценарий

    Returns:
        ValidationResult: все найденные нарушения (ok, если их нет)
    """
    violations: List[Violation] = []

    counts = Counter(u.id for u in s.users)
    for user_id, count in counts.items():
        if count > 1:
            violations.append(Violation(
                code="duplicate_id",
                message=f"Идентификатор {user_id} встречается {count} раз",
                user_id=user_id,
            ))

    if not 1 <= s.k <= len(s.users):
        violations.append(Violation(
            code="k_out_of_range",
            message=f"k вне диапазона [1, {len(s.users)}]: k={s.k}",
        ))

    if not (s.area.xmin <= s.area.xmax and s.area.ymin <= s.area.ymax):
        violations.append(Violation(code="invalid_area", message=f"Пустая область {s.area}"))

    for u in s.users:
        if not (math.isfinite(u.x) and math.isfinite(u.y)):
            violations.append(Violation(
                code="non_finite_position",
                message=f"Позиция пользователя {u.id} не конечна",
                user_id=u.id,
            ))
        elif not s.area.contains(u.x, u.y):
            violations.append(Violation(
                code="user_outside_area",
                message=f"Пользователь {u.id} ({u.x}, {u.y}) вне области",
                user_id=u.id,
            ))
        if not (math.isfinite(u.load) and u.load > 0):
            violations.append(Violation(
                code="non_positive_load",
                message=f"Неположительная нагрузка пользователя {u.id}: {u.load}",
                user_id=u.id,
            ))

    if 1 <= s.k <= len(s.users):
        distinct = {(u.x, u.y) for u in s.users if math.isfinite(u.x) and math.isfinite(u.y)}
        if len(distinct) < s.k:
            violations.append(Violation(
                code="too_few_distinct_positions",
                message=f"Различных позиций {len(distinct)} меньше, чем k={s.k}",
            ))

    return ValidationResult(violations=violations)


class Replica(BaseModel):
    """Виртуальный пользователь единичной нагрузки"""

    model_config = ConfigDict(frozen=True)

    replica_id: str
    origin_id: str
    x: float
    y: float


class ReplicaSet(BaseModel):
    """Результат разбиения пользователей на реплики минимального трафика"""

    model_config = ConfigDict(frozen=True)

    replicas: Tuple[Replica, ...]
    origin_counts: Dict[str, int]

    def positions(self) -> np.ndarray:
        return np.array([(r.x, r.y) for r in self.replicas], dtype=float).reshape(-1, 2)
