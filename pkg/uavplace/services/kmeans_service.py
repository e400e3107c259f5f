"""
Сервис K-means размещения UAV: двухпризнаковый, трехпризнаковый и взвешенный режимы
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from uavplace.core.config import settings
from uavplace.core.exceptions import (
    DimensionMismatch,
    InvalidParams,
    InvalidScenario,
    TooFewDistinctPoints,
)
from uavplace.core.rng import SplitMix64, derive_seed
from uavplace.models.schemas import (
    Centroid,
    FeatureMode,
    InitMethod,
    Placement,
    PlacementReport,
    Scenario,
    SolveConfig,
    validate_scenario,
)
from uavplace.services.metrics_service import metrics_service
from uavplace.services.preprocess_service import preprocess_service


@dataclass
class FeatureSet:
    """
    Признаковое представление сценария

    Attributes:
        ids: Идентификаторы в каноническом порядке (по возрастанию id)
        points: Признаки (n, 2) или (n, 3)
        weights: Веса точек в среднем и в целевой функции
        loads: Исходные нагрузки
    """
    ids: List[str]
    points: np.ndarray
    weights: np.ndarray
    loads: np.ndarray


@dataclass
class LloydRun:
    """
    Результат одного прогона Ллойда

    Attributes:
        centroids: Итоговые центроиды (k, d)
        assignment: Итоговое назначение точек
        iterations: Число шагов обновления
        converged: Повторный проход назначения ничего не меняет
        objective_trace: Целевая функция после каждого шага обновления
        trajectory: Начальные центроиды и центроиды после каждого обновления
    """
    centroids: np.ndarray
    assignment: np.ndarray
    iterations: int
    converged: bool
    objective_trace: List[float] = field(default_factory=list)
    trajectory: List[np.ndarray] = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


class KMeansService:
    """Итерация Ллойда с детерминированной инициализацией и перезапусками"""

    def __init__(self, restart_workers: Optional[int] = None):
        self.restart_workers = restart_workers or settings.restart_workers

    @staticmethod
    def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
        diff = points[:, None, :] - centroids[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)

    @staticmethod
    def _as_matrix(values, name: str) -> np.ndarray:
        matrix = np.asarray(values, dtype=float)
        if matrix.ndim != 2:
            raise DimensionMismatch(f"{name}: ожидается матрица (n, d), получено {matrix.shape}")
        return matrix

    def build_features(self, s: Scenario, cfg: SolveConfig) -> FeatureSet:
        """
        Построение признаков в каноническом порядке идентификаторов

        two-feature: (x, y), веса 1
        three-feature: (x, y, alpha * load), веса 1
        weighted: (x, y), веса load / unit
        """
        canonical = s.sorted_by_id()
        positions = canonical.positions()
        loads = canonical.loads()

        if cfg.mode is FeatureMode.THREE_FEATURE:
            points = np.column_stack([positions, cfg.load_scale * loads])
            weights = np.ones(len(loads))
        elif cfg.mode is FeatureMode.WEIGHTED:
            points = positions
            weights = loads / cfg.unit
        else:
            points = positions
            weights = np.ones(len(loads))

        return FeatureSet(ids=canonical.ids(), points=points, weights=weights, loads=loads)

    def assign_step(self, points, centroids) -> np.ndarray:
        """
        Назначение каждой точки ближайшему центроиду

        При равных расстояниях выбирается наименьший индекс.

        Raises:
            DimensionMismatch: размерности не совпадают
        """
        points = self._as_matrix(points, "points")
        centroids = self._as_matrix(centroids, "centroids")
        if len(centroids) == 0:
            raise InvalidParams("Нужен хотя бы один центроид")
        if points.shape[1] != centroids.shape[1]:
            raise DimensionMismatch(
                f"Размерность точек {points.shape[1]} != размерности центроидов {centroids.shape[1]}"
            )
        # argmin возвращает первый минимум
        return np.argmin(self._squared_distances(points, centroids), axis=1)

    def update_step(self, points, weights, assignment, k: int) -> np.ndarray:
        """
        Пересчет центроидов как взвешенных средних членов кластера

        Пустой кластер переносится в точку, наиболее удаленную (по x, y) от
        центроида своего кластера; разные пустые кластеры получают разные точки.

        Args:
            points: Признаки (n, d)
            weights: Веса (n,)
            assignment: Индексы кластеров (n,)
            k: Число кластеров

        Returns:
            np.ndarray: центроиды (k, d)
        """
        points = self._as_matrix(points, "points")
        weights = np.asarray(weights, dtype=float)
        assignment = np.asarray(assignment, dtype=int)
        if len(weights) != len(points) or len(assignment) != len(points):
            raise DimensionMismatch("Длины points, weights и assignment различаются")
        if len(assignment) and (assignment.min() < 0 or assignment.max() >= k):
            raise InvalidParams(f"Назначение ссылается на кластер вне [0, {k})")

        centroids = np.zeros((k, points.shape[1]))
        empty: List[int] = []
        for j in range(k):
            mask = assignment == j
            if not mask.any():
                empty.append(j)
                continue
            members = points[mask]
            member_weights = weights[mask]
            if np.all(member_weights == member_weights[0]):
                # равные веса: обычное арифметическое среднее
                centroids[j] = members.sum(axis=0) / len(members)
            else:
                centroids[j] = (member_weights[:, None] * members).sum(axis=0) / member_weights.sum()

        if empty:
            own = centroids[assignment]
            gap = np.einsum("ij,ij->i", points[:, :2] - own[:, :2], points[:, :2] - own[:, :2])
            farthest = np.argsort(-gap, kind="stable")
            for j, index in zip(empty, farthest):
                logger.debug(f"Пустой кластер {j} перенесен в точку {index}")
                centroids[j] = points[index]

        return centroids

    def objective(self, points, weights, assignment, centroids) -> float:
        """Взвешенная сумма квадратов расстояний до своего центроида (в пространстве признаков)"""
        points = self._as_matrix(points, "points")
        centroids = self._as_matrix(centroids, "centroids")
        diff = points - centroids[np.asarray(assignment, dtype=int)]
        # np.sum по 1-D массиву суммирует попарно
        return float(np.sum(np.asarray(weights, dtype=float) * np.einsum("ij,ij->i", diff, diff)))

    @staticmethod
    def _weighted_pick(mass: np.ndarray, rng: SplitMix64) -> int:
        cumulative = np.cumsum(mass)
        draw = rng.uniform01() * cumulative[-1]
        index = int(np.searchsorted(cumulative, draw, side="right"))
        last_positive = int(np.flatnonzero(mass > 0)[-1])
        return min(index, last_positive)

    def init_centroids(self, points, weights, k: int, method: InitMethod, seed: int) -> np.ndarray:
        """
        Начальная расстановка центроидов

        uniform: k точек равномерно в ограничивающем параллелепипеде признаков
        (сначала все первые координаты, затем вторые и т.д.)
        plusplus: посев пропорционально весу * квадрату расстояния до ближайшего
        выбранного центра; первый центр - пропорционально весу

        Raises:
            TooFewDistinctPoints: различных точек меньше k
        """
        points = self._as_matrix(points, "points")
        weights = np.asarray(weights, dtype=float)
        distinct = len(np.unique(points, axis=0))
        if k > distinct:
            raise TooFewDistinctPoints(f"Различных точек {distinct}, а кластеров {k}")

        rng = SplitMix64(seed)

        if method is InitMethod.UNIFORM:
            low = points.min(axis=0)
            high = points.max(axis=0)
            centroids = np.empty((k, points.shape[1]))
            for d in range(points.shape[1]):
                for j in range(k):
                    centroids[j, d] = rng.uniform(low[d], high[d])
            return centroids

        # нормировка: равные веса дают в точности равные вероятности
        scaled = weights / weights.max()
        chosen = [self._weighted_pick(scaled, rng)]
        nearest = self._squared_distances(points, points[chosen]).ravel()
        for _ in range(1, k):
            index = self._weighted_pick(scaled * nearest, rng)
            chosen.append(index)
            nearest = np.minimum(nearest, self._squared_distances(points, points[[index]]).ravel())
        return points[chosen].copy()

    def run_lloyd(
        self,
        points,
        weights,
        initial_centroids,
        max_iters: int,
        shift_tol: float,
    ) -> LloydRun:
        """
        Итерации назначение/обновление от заданных центроидов

        Останов: назначения не изменились, сдвиг центроидов < shift_tol или
        исчерпан max_iters.
        """
        points = self._as_matrix(points, "points")
        weights = np.asarray(weights, dtype=float)
        centroids = self._as_matrix(initial_centroids, "initial_centroids").copy()
        k = len(centroids)

        trajectory = [centroids.copy()]
        trace: List[float] = []
        assignment: Optional[np.ndarray] = None
        converged = False
        iterations = 0

        for _ in range(max_iters):
            fresh = self.assign_step(points, centroids)
            if assignment is not None and np.array_equal(fresh, assignment):
                converged = True
                break
            assignment = fresh
            updated = self.update_step(points, weights, assignment, k)
            shift = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
            centroids = updated
            iterations += 1
            trajectory.append(centroids.copy())
            trace.append(self.objective(points, weights, assignment, centroids))
            if shift < shift_tol:
                break

        if not converged:
            converged = bool(np.array_equal(self.assign_step(points, centroids), assignment))

        return LloydRun(
            centroids=centroids,
            assignment=assignment,
            iterations=iterations,
            converged=converged,
            objective_trace=trace,
            trajectory=trajectory,
        )

    def _restart(self, points, weights, k: int, cfg: SolveConfig, seed: int) -> LloydRun:
        initial = self.init_centroids(points, weights, k, cfg.init, seed)
        run = self.run_lloyd(points, weights, initial, cfg.max_iters, cfg.shift_tol)
        logger.debug(f"Перезапуск seed={seed}: J={run.objective:.6f}, итераций {run.iterations}")
        return run

    def _run_restarts(self, points, weights, k: int, cfg: SolveConfig) -> List[LloydRun]:
        seeds = [derive_seed(cfg.seed, r) for r in range(cfg.restarts)]
        if self.restart_workers > 1 and len(seeds) > 1:
            with ThreadPoolExecutor(max_workers=self.restart_workers) as pool:
                return list(pool.map(lambda seed: self._restart(points, weights, k, cfg, seed), seeds))
        return [self._restart(points, weights, k, cfg, seed) for seed in seeds]

    def solve(
        self,
        s: Scenario,
        cfg: SolveConfig,
        initial_centroids: Optional[Sequence[Sequence[float]]] = None,
    ) -> Tuple[Placement, PlacementReport]:
        """
        Размещение k UAV по сценарию

        Среди cfg.restarts прогонов (зерна seed, seed+1, ...) выбирается прогон с
        наименьшей целевой функцией, при равенстве - с меньшим номером. С
        initial_centroids выполняется один прогон от них.

        Args:
            s: Сценарий
            cfg: Параметры решателя
            initial_centroids: Начальные центроиды в пространстве признаков режима

        Returns:
            Tuple[Placement, PlacementReport]: размещение и отчет (метрики по x, y)

        Raises:
            InvalidScenario: сценарий не прошел проверку
            NonIntegralLoad: репликация невозможна при данной единице
        """
        validation = validate_scenario(s)
        if not validation.ok:
            logger.error(f"Сценарий отклонен: {validation.codes()}")
            raise InvalidScenario(validation.violations)

        logger.info(f"Решение: {len(s.users)} пользователей, k={s.k}, режим {cfg.mode.value}, перезапусков {cfg.restarts}")

        features = self.build_features(s, cfg)
        replica_set = None
        if cfg.materialize:
            replica_set = preprocess_service.split_users(s.sorted_by_id(), cfg.unit)
            points = replica_set.positions()
            weights = np.ones(len(points))
        else:
            points = features.points
            weights = features.weights

        if initial_centroids is not None:
            initial = self._as_matrix(initial_centroids, "initial_centroids")
            if initial.shape != (s.k, points.shape[1]):
                raise DimensionMismatch(
                    f"Начальные центроиды {initial.shape}, ожидается {(s.k, points.shape[1])}"
                )
            runs = [self.run_lloyd(points, weights, initial, cfg.max_iters, cfg.shift_tol)]
        else:
            runs = self._run_restarts(points, weights, s.k, cfg)

        best_index = min(range(len(runs)), key=lambda i: (runs[i].objective, i))
        best = runs[best_index]

        if replica_set is not None:
            replica_assignment = {
                replica.replica_id: int(cluster)
                for replica, cluster in zip(replica_set.replicas, best.assignment)
            }
            assignment = preprocess_service.fold_assignment(replica_set, replica_assignment)
        else:
            assignment = {user_id: int(cluster) for user_id, cluster in zip(features.ids, best.assignment)}

        placement = Placement(
            centroids=tuple(self._to_centroid(cfg, best.centroids, j, features, assignment) for j in range(s.k)),
            assignment=assignment,
            iterations=best.iterations,
            converged=best.converged,
        )
        report = metrics_service.evaluate(
            s, placement, s.median_load(), objective_trace=best.objective_trace
        )

        logger.info(
            f"Решение найдено: перезапуск {best_index}, J={report.objective:.6f}, "
            f"итераций {best.iterations}, сходимость {best.converged}"
        )
        return placement, report

    @staticmethod
    def _to_centroid(cfg: SolveConfig, centroids: np.ndarray, j: int, features: FeatureSet, assignment) -> Centroid:
        """Позиция UAV - только (x, y); нагрузочная координата хранится отдельно"""
        x, y = float(centroids[j, 0]), float(centroids[j, 1])
        if cfg.mode is not FeatureMode.THREE_FEATURE:
            return Centroid(x=x, y=y)
        if cfg.load_scale > 0:
            return Centroid(x=x, y=y, load_coord=float(centroids[j, 2] / cfg.load_scale))
        members = [load for user_id, load in zip(features.ids, features.loads) if assignment[user_id] == j]
        return Centroid(x=x, y=y, load_coord=float(np.mean(members)) if members else 0.0)


# Глобальный экземпляр сервиса
kmeans_service = KMeansService()
