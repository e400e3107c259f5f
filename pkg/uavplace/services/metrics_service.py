"""
Сервис метрик качества размещения
"""
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from uavplace.core.exceptions import InvalidPlacement, UncoveredUser
from uavplace.models.schemas import (
    ComparisonRecord,
    MetricDelta,
    Placement,
    PlacementReport,
    Scenario,
)

# Метрики, участвующие в сравнении; для всех меньше - лучше
COMPARED_METRICS = ("objective", "mean_dist_all", "mean_dist_weighted", "mean_dist_highload", "max_dist")


class MetricsService:
    """Пересчет метрик по сценарию и размещению (только позиционное расстояние)"""

    def _assigned_indices(self, s: Scenario, p: Placement) -> np.ndarray:
        indices = []
        for user in s.users:
            if user.id not in p.assignment:
                logger.error(f"Пользователь {user.id} отсутствует в размещении")
                raise UncoveredUser(user.id)
            indices.append(p.assignment[user.id])
        return np.array(indices, dtype=int)

    def evaluate(
        self,
        s: Scenario,
        p: Placement,
        highload_threshold: Optional[float] = None,
        objective_trace: Optional[Sequence[float]] = None,
    ) -> PlacementReport:
        """
        Вычисление отчета о размещении

        Args:
            s: Сценарий
            p: Размещение, покрывающее всех пользователей s
            highload_threshold: Порог высокой нагрузки (по умолчанию медиана)
            objective_trace: След целевой функции решателя, если есть

        Returns:
            PlacementReport: objective = sum(load * d^2), средние расстояния, нагрузки кластеров

        Raises:
            UncoveredUser: пользователь без кластера
        """
        if highload_threshold is None:
            highload_threshold = s.median_load()

        indices = self._assigned_indices(s, p)
        if len(indices) and indices.max() >= p.k:
            raise InvalidPlacement(f"Индекс кластера {int(indices.max())} при k={p.k}")

        positions = s.positions()
        loads = s.loads()
        diff = positions - p.positions()[indices]
        squared = np.einsum("ij,ij->i", diff, diff)
        dist = np.sqrt(squared)

        highload = loads > highload_threshold
        per_cluster_load = np.bincount(indices, weights=loads, minlength=p.k)
        per_cluster_count = np.bincount(indices, minlength=p.k)

        return PlacementReport(
            objective=float(np.sum(loads * squared)),
            per_cluster_load={j: float(per_cluster_load[j]) for j in range(p.k)},
            per_cluster_count={j: int(per_cluster_count[j]) for j in range(p.k)},
            mean_dist_all=float(np.mean(dist)),
            mean_dist_weighted=float(np.sum(loads * dist) / np.sum(loads)),
            mean_dist_highload=float(np.mean(dist[highload])) if highload.any() else None,
            max_dist=float(np.max(dist)),
            highload_threshold=float(highload_threshold),
            objective_trace=list(objective_trace or []),
        )

    @staticmethod
    def _delta(name: str, a: Optional[float], b: Optional[float]) -> MetricDelta:
        if a is None or b is None:
            if a is None and b is None:
                return MetricDelta(name=name, a=None, b=None, delta=0.0, winner="tie")
            return MetricDelta(name=name, a=a, b=b, delta=None, winner="tie")
        delta = b - a
        winner = "tie" if delta == 0 else ("b" if delta < 0 else "a")
        return MetricDelta(name=name, a=a, b=b, delta=delta, winner=winner)

    def compare(
        self,
        s: Scenario,
        a: Placement,
        b: Placement,
        threshold: Optional[float] = None,
        label_a: str = "a",
        label_b: str = "b",
    ) -> ComparisonRecord:
        """
        Сравнение двух размещений по каждой метрике

        delta = b - a; победитель - размещение с меньшим значением. Итогового
        вердикта нет.

        Raises:
            UncoveredUser: одно из размещений не покрывает сценарий
        """
        report_a = self.evaluate(s, a, threshold)
        report_b = self.evaluate(s, b, threshold)
        metrics: List[MetricDelta] = [
            self._delta(name, getattr(report_a, name), getattr(report_b, name))
            for name in COMPARED_METRICS
        ]
        summary = ", ".join(f"{m.name}={m.winner}" for m in metrics)
        logger.info(f"Сравнение {label_a} vs {label_b}: {summary}")
        return ComparisonRecord(label_a=label_a, label_b=label_b, metrics=metrics)


# Глобальный экземпляр сервиса
metrics_service = MetricsService()
