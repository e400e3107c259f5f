"""
Точка входа CLI для размещения UAV базовых станций
"""
from pathlib import Path
from typing import Any, Dict, Optional

import click
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from uavplace.cli.commands import acceptance, compare, generate, place, plot
from uavplace.core.config import settings
from uavplace.core.logger import setup_logger

COMMANDS = (generate, place, compare, plot, acceptance)


class CommandDefaults(BaseModel):
    """Файл --config: значения параметров по командам"""

    model_config = ConfigDict(extra="forbid")

    generate: Dict[str, Any] = Field(default_factory=dict)
    place: Dict[str, Any] = Field(default_factory=dict)
    compare: Dict[str, Any] = Field(default_factory=dict)
    plot: Dict[str, Any] = Field(default_factory=dict)
    acceptance: Dict[str, Any] = Field(default_factory=dict)


def load_config(path: str) -> dict:
    """
    Чтение файла параметров команд

    Формат: {"<команда>": {"<параметр>": значение}}; явные флаги важнее файла.
    Неизвестные команды и параметры отклоняются.
    """
    try:
        defaults = CommandDefaults.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise click.BadParameter(f"Не удалось прочитать {path}: {e}", param_hint="--config")
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(part) for part in error["loc"]) or "<корень>"
        raise click.BadParameter(f"{path}: {where}: {error['msg']}", param_hint="--config")

    for command in COMMANDS:
        known = {param.name for param in command.params}
        unknown = sorted(set(getattr(defaults, command.name)) - known)
        if unknown:
            raise click.BadParameter(
                f"{path}: неизвестные параметры команды {command.name}: {', '.join(unknown)}",
                param_hint="--config",
            )
    return defaults.model_dump()


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON с параметрами команд (флаги важнее)")
@click.option("--log-level", default=None, help="Уровень логирования консоли")
@click.version_option(settings.app_version, prog_name=settings.app_name)
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], log_level: Optional[str]):
    """Размещение UAV базовых станций кластеризацией K-means с учетом нагрузки"""
    setup_logger(level=log_level)
    if config_path:
        ctx.default_map = load_config(config_path)
        logger.debug(f"Параметры из {config_path}: {sorted(ctx.default_map)}")


# Подключение команд
for command in COMMANDS:
    cli.add_command(command)


def main():
    cli(prog_name="uavplace")


if __name__ == "__main__":
    main()
