"""
Конфигурация приложения для размещения UAV базовых станций
"""
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения"""

    app_name: str = "UAV Placement Lab"
    app_version: str = "1.0.0"
    debug: bool = False

    # Логирование
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Параметры решателя по умолчанию
    default_seed: int = 0
    default_restarts: int = 10
    default_max_iters: int = 300
    default_shift_tol: float = 1e-9
    default_load_scale: float = 1.0
    default_unit: float = 1.0
    restart_workers: int = 1  # 1 = последовательно

    # Параметры генерации сценариев
    scenario_width: float = 100.0
    scenario_height: float = 100.0
    scenario_users: int = 60
    scenario_low_load: float = 1.0
    scenario_high_load: float = 8.0
    scenario_high_fraction: float = 0.15
    scenario_k: int = 3

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="UAVPLACE_",
        case_sensitive=False,
        extra="ignore",
    )


# Глобальный экземпляр настроек
settings = Settings()
