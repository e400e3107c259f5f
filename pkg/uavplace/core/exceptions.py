"""
Исключения предметной области
"""
from typing import Optional, Sequence


class UavPlaceError(ValueError):
    """Базовая ошибка приложения"""


class InvalidScenario(UavPlaceError):
    """Сценарий нарушает инварианты"""

    def __init__(self, violations: Sequence):
        self.violations = list(violations)
        details = "; ".join(v.message for v in self.violations)
        super().__init__(f"Некорректный сценарий: {details}")


class InvalidParams(UavPlaceError):
    """Некорректные параметры генерации или запуска"""


class NonIntegralLoad(UavPlaceError):
    """Нагрузка пользователя не кратна единице трафика"""

    def __init__(self, user_id: str, load: float, unit: float):
        self.user_id = user_id
        super().__init__(
            f"Нагрузка пользователя {user_id} ({load}) не кратна единице {unit}: "
            f"выберите меньшую единицу или взвешенный режим"
        )


class MissingReplica(UavPlaceError):
    """Реплика не получила кластер"""

    def __init__(self, replica_id: str):
        self.replica_id = replica_id
        super().__init__(f"Реплика {replica_id} не назначена кластеру")


class DimensionMismatch(UavPlaceError):
    """Размерности точек и центроидов не совпадают"""


class TooFewDistinctPoints(UavPlaceError):
    """Различных точек меньше, чем кластеров"""


class UncoveredUser(UavPlaceError):
    """Пользователь сценария отсутствует в размещении"""

    def __init__(self, user_id: str):
        self.user_id = user_id
        super().__init__(f"Пользователь {user_id} не покрыт размещением")


class InvalidPlacement(UavPlaceError):
    """Размещение не согласовано со сценарием"""


class InstanceTooLarge(UavPlaceError):
    """Экземпляр слишком велик для полного перебора"""


class ParseError(UavPlaceError):
    """Ошибка разбора файла"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"строка {line}")
        if field is not None:
            where.append(f"поле '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class SchemaVersionMismatch(UavPlaceError):
    """Версия схемы файла не поддерживается"""

    def __init__(self, found, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"Версия схемы {found} не поддерживается (ожидается {expected})")


class CriterionFailed(UavPlaceError):
    """Критерий приемки не выполнен"""
