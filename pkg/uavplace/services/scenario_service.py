"""
Сервис генерации сценариев: случайные пользователи с двумя уровнями трафика
"""
from typing import List, Sequence

from loguru import logger

from uavplace.core.exceptions import InvalidParams
from uavplace.core.rng import SplitMix64
from uavplace.models.schemas import Area, Scenario, User

# Полуширина группы относительно min(ширина полосы, высота)
GROUP_SPREAD = 0.2
# Допуск положения пограничного пользователя относительно расстояния между группами
BORDER_BAND = 0.1


class ScenarioService:
    """Детерминированная генерация сценариев по зерну"""

    @staticmethod
    def _user_id(index: int, total: int) -> str:
        width = len(str(max(total - 1, 0)))
        return f"u{index:0{width}d}"

    @staticmethod
    def _check_common(n_users: int, k: int, area: Area):
        if k < 1:
            raise InvalidParams(f"k должно быть >= 1: k={k}")
        if n_users < k:
            raise InvalidParams(f"Пользователей ({n_users}) меньше, чем k={k}")
        if not (area.xmin < area.xmax and area.ymin < area.ymax):
            raise InvalidParams(f"Пустая область: {area}")

    def generate(
        self,
        seed: int,
        n_users: int,
        area: Area,
        low_load: float,
        high_load: float,
        high_fraction: float,
        k: int,
    ) -> Scenario:
        """
        Равномерные позиции, каждый пользователь высоконагруженный с вероятностью high_fraction

        Порядок выборок на пользователя: x, y, уровень нагрузки.

        Raises:
            InvalidParams: некорректные параметры
        """
        self._check_common(n_users, k, area)
        if not 0 < low_load <= high_load:
            raise InvalidParams(f"Нужно 0 < low_load <= high_load: {low_load}, {high_load}")
        if not 0.0 <= high_fraction <= 1.0:
            raise InvalidParams(f"high_fraction вне [0, 1]: {high_fraction}")

        rng = SplitMix64(seed)
        users: List[User] = []
        for i in range(n_users):
            x = rng.uniform(area.xmin, area.xmax)
            y = rng.uniform(area.ymin, area.ymax)
            load = high_load if rng.uniform01() < high_fraction else low_load
            users.append(User(id=self._user_id(i, n_users), x=x, y=y, load=load))

        logger.info(f"Сгенерирован сценарий seed={seed}: {n_users} пользователей, k={k}")
        return Scenario(users=tuple(users), area=area, k=k)

    def generate_multilevel(
        self,
        seed: int,
        n_users: int,
        area: Area,
        load_levels: Sequence[float],
        k: int,
    ) -> Scenario:
        """Равномерные позиции, нагрузка равновероятно из load_levels"""
        self._check_common(n_users, k, area)
        levels = list(load_levels)
        if not levels or min(levels) <= 0:
            raise InvalidParams(f"Уровни нагрузки должны быть положительными: {levels}")

        rng = SplitMix64(seed)
        users = []
        for i in range(n_users):
            x = rng.uniform(area.xmin, area.xmax)
            y = rng.uniform(area.ymin, area.ymax)
            users.append(User(id=self._user_id(i, n_users), x=x, y=y, load=rng.choice(levels)))
        return Scenario(users=tuple(users), area=area, k=k)

    def generate_border_stress(
        self,
        seed: int,
        n_users: int,
        area: Area,
        k: int,
        n_border_highload: int,
        low_load: float = 1.0,
        high_load: float = 8.0,
    ) -> Scenario:
        """
        Сценарий с высоконагруженными пользователями на границе кластеров

        k групп равномерных пользователей с центрами в середине k вертикальных
        полос области; n_border_highload пользователей с high_load ставятся
        у середины между соседними центрами групп (по x не дальше 10%
        расстояния между центрами).

        Raises:
            InvalidParams: некорректные параметры
        """
        self._check_common(n_users, k, area)
        if not 0 <= n_border_highload <= n_users:
            raise InvalidParams(f"n_border_highload вне [0, {n_users}]: {n_border_highload}")
        if n_border_highload > 0 and k < 2:
            raise InvalidParams("Граница между группами требует k >= 2")
        if not 0 < low_load <= high_load:
            raise InvalidParams(f"Нужно 0 < low_load <= high_load: {low_load}, {high_load}")

        rng = SplitMix64(seed)
        gap = area.width / k
        centers_x = [area.xmin + (j + 0.5) * gap for j in range(k)]
        center_y = area.ymin + area.height / 2
        spread = GROUP_SPREAD * min(gap, area.height)
        band = BORDER_BAND * gap

        n_regular = n_users - n_border_highload
        users: List[User] = []
        for i in range(n_regular):
            group = i % k
            x = rng.uniform(centers_x[group] - spread, centers_x[group] + spread)
            y = rng.uniform(center_y - spread, center_y + spread)
            users.append(User(id=self._user_id(i, n_users), x=x, y=y, load=low_load))

        for b in range(n_border_highload):
            pair = b % (k - 1)
            midline = (centers_x[pair] + centers_x[pair + 1]) / 2
            x = rng.uniform(midline - band, midline + band)
            y = rng.uniform(center_y - spread, center_y + spread)
            users.append(User(id=self._user_id(n_regular + b, n_users), x=x, y=y, load=high_load))

        logger.info(
            f"Сгенерирован стресс-сценарий seed={seed}: {n_regular} обычных, "
            f"{n_border_highload} пограничных, k={k}"
        )
        return Scenario(users=tuple(users), area=area, k=k)


# Глобальный экземпляр сервиса
scenario_service = ScenarioService()
