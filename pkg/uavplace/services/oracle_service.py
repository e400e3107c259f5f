"""
Сервис точного решения перебором для маленьких экземпляров
"""
import itertools
from typing import Tuple

import numpy as np
from loguru import logger

from uavplace.core.exceptions import InstanceTooLarge, InvalidScenario
from uavplace.models.schemas import Centroid, Placement, Scenario, validate_scenario

MAX_USERS = 10
MAX_K = 3


class OracleService:
    """Глобально оптимальное взвешенное разбиение полным перебором"""

    def canonical_assignments(self, n: int, k: int) -> np.ndarray:
        """
        Все назначения n точек ровно в k непустых кластеров без перестановок меток

        Каноническая форма: первое появление меток идет в порядке 0, 1, ..., k-1.
        Строки упорядочены лексикографически.
        """
        grid = np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64).reshape(-1, n)
        running = np.maximum.accumulate(grid, axis=1)
        previous = np.concatenate([np.full((len(grid), 1), -1), running[:, :-1]], axis=1)
        canonical = np.all(grid <= previous + 1, axis=1) & (running[:, -1] == k - 1)
        return grid[canonical]

    def optimal_partition(self, s: Scenario) -> Tuple[Placement, float]:
        """
        Оптимальное разбиение по sum(load * |pos - centroid|^2)

        Центроид части - взвешенное по нагрузке среднее. При равных значениях
        выбирается лексикографически наименьший вектор назначения (в порядке
        пользователей сценария).

        Raises:
            InstanceTooLarge: больше 10 пользователей или k > 3
        """
        validation = validate_scenario(s)
        if not validation.ok:
            raise InvalidScenario(validation.violations)
        n, k = len(s.users), s.k
        if n > MAX_USERS or k > MAX_K:
            raise InstanceTooLarge(f"Перебор ограничен n <= {MAX_USERS}, k <= {MAX_K}: n={n}, k={k}")

        positions = s.positions()
        loads = s.loads()
        candidates = self.canonical_assignments(n, k)
        rows = np.arange(len(candidates))[:, None]

        membership = candidates[:, None, :] == np.arange(k)[None, :, None]  # (m, k, n)
        mass = membership @ loads  # (m, k)
        means = (membership * loads) @ positions / mass[:, :, None]  # (m, k, 2)
        diff = positions[None, :, :] - means[rows, candidates]
        objectives = np.sum(loads * np.einsum("mnd,mnd->mn", diff, diff), axis=1)

        best = int(np.argmin(objectives))
        assignment_vector = candidates[best]
        centroids = means[best]

        nearest = np.argmin(
            np.einsum("nkd,nkd->nk", positions[:, None, :] - centroids[None], positions[:, None, :] - centroids[None]),
            axis=1,
        )
        placement = Placement(
            centroids=tuple(Centroid(x=float(c[0]), y=float(c[1])) for c in centroids),
            assignment={user.id: int(a) for user, a in zip(s.users, assignment_vector)},
            iterations=0,
            converged=bool(np.array_equal(nearest, assignment_vector)),
        )
        logger.debug(f"Перебор {len(candidates)} разбиений: оптимум {objectives[best]:.9f}")
        return placement, float(objectives[best])


# Глобальный экземпляр сервиса
oracle_service = OracleService()
