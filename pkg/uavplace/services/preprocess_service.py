"""
Сервис предобработки: разбиение пользователей на реплики минимального трафика
"""
from collections import Counter, defaultdict
from typing import Dict, List, Mapping

from loguru import logger

from uavplace.core.exceptions import MissingReplica, NonIntegralLoad
from uavplace.models.schemas import Replica, ReplicaSet, Scenario


class PreprocessService:
    """Разбиение пользователей на реплики и обратная свертка назначений"""

    # Допуск целочисленности load / unit
    tolerance = 1e-9

    def split_users(self, s: Scenario, unit: float) -> ReplicaSet:
        """
        Разбиение каждого пользователя на round(load / unit) совпадающих реплик

        Args:
            s: Сценарий
            unit: Минимальная единица трафика

        Returns:
            ReplicaSet: реплики в порядке пользователей сценария

        Raises:
            NonIntegralLoad: load / unit не целое в пределах допуска
        """
        if unit <= 0:
            raise ValueError(f"Единица трафика должна быть положительной: {unit}")

        replicas: List[Replica] = []
        counts: Dict[str, int] = {}
        for user in s.users:
            ratio = user.load / unit
            count = round(ratio)
            if abs(ratio - count) > self.tolerance or count < 1:
                logger.error(f"Нагрузка {user.load} пользователя {user.id} не кратна {unit}")
                raise NonIntegralLoad(user.id, user.load, unit)
            counts[user.id] = count
            replicas.extend(
                Replica(replica_id=f"{user.id}#{j}", origin_id=user.id, x=user.x, y=user.y)
                for j in range(count)
            )

        logger.debug(f"Разбиение: {len(s.users)} пользователей -> {len(replicas)} реплик")
        return ReplicaSet(replicas=tuple(replicas), origin_counts=counts)

    def fold_assignment(self, r: ReplicaSet, replica_assignment: Mapping[str, int]) -> Dict[str, int]:
        """
        Свертка назначений реплик обратно к пользователям

        Пользователь получает кластер большинства своих реплик, при равенстве -
        наименьший индекс.

        Raises:
            MissingReplica: реплика без кластера
        """
        votes: Dict[str, Counter] = defaultdict(Counter)
        for replica in r.replicas:
            if replica.replica_id not in replica_assignment:
                raise MissingReplica(replica.replica_id)
            votes[replica.origin_id][replica_assignment[replica.replica_id]] += 1

        return {
            origin: min(counter, key=lambda index: (-counter[index], index))
            for origin, counter in votes.items()
        }


# Глобальный экземпляр сервиса
preprocess_service = PreprocessService()
