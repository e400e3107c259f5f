"""Общие фикстуры тестов"""
from typing import Iterable, Tuple

import pytest
from loguru import logger

from uavplace.models.schemas import Area, Scenario, User


@pytest.fixture(autouse=True)
def quiet_logger():
    # CLI-тесты добавляют обработчики на подмененный stderr
    logger.remove()
    yield
    logger.remove()


def make_scenario(rows: Iterable[Tuple[float, float, float]], k: int, area: Area = None) -> Scenario:
    """Сценарий из строк (x, y, load) с идентификаторами u0, u1, ..."""
    users = tuple(User(id=f"u{i}", x=x, y=y, load=load) for i, (x, y, load) in enumerate(rows))
    return Scenario(users=users, area=area or Area(xmin=0.0, xmax=100.0, ymin=0.0, ymax=100.0), k=k)


@pytest.fixture
def area() -> Area:
    return Area(xmin=0.0, xmax=100.0, ymin=0.0, ymax=100.0)


@pytest.fixture
def two_groups() -> Scenario:
    """Две разнесенные группы по три пользователя"""
    return make_scenario(
        [(10, 10, 1), (12, 11, 2), (11, 13, 1), (80, 80, 3), (82, 79, 1), (81, 83, 1)],
        k=2,
    )
