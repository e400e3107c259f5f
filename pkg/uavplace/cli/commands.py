"""
Команды CLI: генерация, размещение, сравнение режимов, графики, приемка
"""
import functools
from collections import Counter
from pathlib import Path
from typing import Optional, Tuple

import click
from loguru import logger
from pydantic import ValidationError

from uavplace.core.config import settings
from uavplace.core.exceptions import CriterionFailed, UavPlaceError
from uavplace.models.schemas import Area, FeatureMode, InitMethod, SolveConfig
from uavplace.services.acceptance_service import acceptance_service
from uavplace.services.io_service import format_number, io_service
from uavplace.services.kmeans_service import kmeans_service
from uavplace.services.metrics_service import metrics_service
from uavplace.services.scenario_service import scenario_service

# Коды завершения (2 - ошибка использования, выставляет click)
EXIT_DATA = 3
EXIT_CRITERION = 4
# Зерно - беззнаковое 64-битное
SEED = click.IntRange(0, 2**64 - 1)

MODE_CHOICE = click.Choice([mode.value for mode in FeatureMode])
INIT_CHOICE = click.Choice([method.value for method in InitMethod])


def handle_errors(func):
    """Перевод ошибок предметной области в коды завершения"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CriterionFailed as e:
            logger.error(f"Приемка не пройдена: {e}")
            click.echo(f"Ошибка: {e}", err=True)
            raise click.exceptions.Exit(EXIT_CRITERION)
        except (UavPlaceError, ValidationError, OSError) as e:
            logger.error(f"Ошибка выполнения команды {func.__name__}: {e}")
            click.echo(f"Ошибка: {e}", err=True)
            raise click.exceptions.Exit(EXIT_DATA)

    return wrapper


def _solve_config(mode: str, alpha: float, seed: int, restarts: int, max_iters: int,
                  shift_tol: float, init: str, unit: float, materialize: bool) -> SolveConfig:
    return SolveConfig(
        mode=FeatureMode(mode),
        load_scale=alpha,
        init=InitMethod(init),
        seed=seed,
        restarts=restarts,
        max_iters=max_iters,
        shift_tol=shift_tol,
        unit=unit,
        materialize=materialize,
    )


def solver_options(func):
    """Общие параметры решателя"""
    options = [
        click.option("--alpha", type=float, default=settings.default_load_scale, show_default=True,
                     help="Масштаб нагрузочного признака (three-feature)"),
        click.option("--seed", type=SEED, default=settings.default_seed, show_default=True, help="Зерно"),
        click.option("--restarts", type=int, default=settings.default_restarts, show_default=True,
                     help="Число перезапусков"),
        click.option("--max-iters", type=int, default=settings.default_max_iters, show_default=True),
        click.option("--shift-tol", type=float, default=settings.default_shift_tol, show_default=True),
        click.option("--init", "init", type=INIT_CHOICE, default=InitMethod.PLUSPLUS.value, show_default=True),
        click.option("--unit", type=float, default=settings.default_unit, show_default=True,
                     help="Минимальная единица трафика (weighted)"),
        click.option("--materialize", is_flag=True, default=False,
                     help="Решать на репликах пользователей (только weighted)"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.command()
@click.option("--seed", type=SEED, default=settings.default_seed, show_default=True, help="Зерно генератора")
@click.option("--n", "n_users", type=int, default=settings.scenario_users, show_default=True, help="Число пользователей")
@click.option("--k", type=int, default=settings.scenario_k, show_default=True, help="Число UAV")
@click.option("--width", type=float, default=settings.scenario_width, show_default=True, help="Ширина области, м")
@click.option("--height", type=float, default=settings.scenario_height, show_default=True, help="Высота области, м")
@click.option("--low-load", type=float, default=settings.scenario_low_load, show_default=True)
@click.option("--high-load", type=float, default=settings.scenario_high_load, show_default=True)
@click.option("--fraction", type=float, default=settings.scenario_high_fraction, show_default=True,
              help="Доля высоконагруженных пользователей")
@click.option("--border-highload", type=int, default=None,
              help="Сгенерировать стресс-сценарий с таким числом пограничных высоконагруженных пользователей")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Файл сценария")
@handle_errors
def generate(seed: int, n_users: int, k: int, width: float, height: float, low_load: float,
             high_load: float, fraction: float, border_highload: Optional[int], out: str):
    """Сгенерировать случайный сценарий"""
    area = Area(xmin=0.0, xmax=width, ymin=0.0, ymax=height)
    if border_highload is None:
        scenario = scenario_service.generate(seed, n_users, area, low_load, high_load, fraction, k)
    else:
        scenario = scenario_service.generate_border_stress(
            seed, n_users, area, k, border_highload, low_load, high_load
        )
    io_service.write_scenario(out, scenario)

    click.echo(f"users={len(scenario.users)} k={scenario.k}")
    for load, count in sorted(Counter(u.load for u in scenario.users).items()):
        click.echo(f"load {load:g}: {count}")


@click.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=MODE_CHOICE, default=FeatureMode.WEIGHTED.value, show_default=True)
@solver_options
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Файл размещения")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
              help="Отчет (.csv и .json); по умолчанию <out>_report.csv")
@handle_errors
def place(scenario_path: str, mode: str, alpha: float, seed: int, restarts: int, max_iters: int,
          shift_tol: float, init: str, unit: float, materialize: bool, out: str, report_path: Optional[str]):
    """Разместить UAV для сценария"""
    scenario = io_service.read_scenario(scenario_path)
    cfg = _solve_config(mode, alpha, seed, restarts, max_iters, shift_tol, init, unit, materialize)
    placement, report = kmeans_service.solve(scenario, cfg)

    io_service.write_placement(out, placement)
    if report_path is None:
        report_path = str(Path(out).with_name(f"{Path(out).stem}_report.csv"))
    io_service.write_report(report_path, report, extra={
        "mode": cfg.mode.value,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "iterations": placement.iterations,
        "converged": placement.converged,
    })

    click.echo(f"objective={format_number(report.objective)}")
    click.echo(f"iterations={placement.iterations} converged={placement.converged}")


@click.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--modes", type=(MODE_CHOICE, MODE_CHOICE), default=(FeatureMode.TWO_FEATURE.value, FeatureMode.WEIGHTED.value),
              show_default=True, help="Пара режимов a b")
@solver_options
@click.option("--threshold", type=float, default=None, help="Порог высокой нагрузки (по умолчанию медиана)")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Файл сравнения (.csv и .json)")
@click.option("--plot-dir", type=click.Path(file_okay=False), default=None, help="Каталог для двух SVG")
@handle_errors
def compare(scenario_path: str, modes: Tuple[str, str], alpha: float, seed: int, restarts: int, max_iters: int,
            shift_tol: float, init: str, unit: float, materialize: bool, threshold: Optional[float],
            out: str, plot_dir: Optional[str]):
    """Сравнить два режима на одном сценарии с одинаковыми зернами"""
    scenario = io_service.read_scenario(scenario_path)
    placements = []
    for mode in modes:
        cfg = _solve_config(mode, alpha, seed, restarts, max_iters, shift_tol, init, unit,
                            materialize and mode == FeatureMode.WEIGHTED.value)
        placements.append(kmeans_service.solve(scenario, cfg))

    (placement_a, _), (placement_b, report_b) = placements
    record = metrics_service.compare(scenario, placement_a, placement_b, threshold, label_a=modes[0], label_b=modes[1])
    io_service.write_report(out, report_b, record, extra={"modes": list(modes), "seed": seed, "restarts": restarts})

    if plot_dir is not None:
        for prefix, mode, (placement, _) in zip(("a", "b"), modes, placements):
            io_service.render_svg(scenario, placement, Path(plot_dir) / f"{prefix}_{mode}.svg", title=mode)

    for metric in record.metrics:
        delta = "" if metric.delta is None else format_number(metric.delta)
        click.echo(f"{metric.name}: delta={delta} winner={metric.winner}")


@click.command()
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--placement", "placement_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Файл SVG")
@click.option("--title", type=str, default=None)
@handle_errors
def plot(scenario_path: str, placement_path: str, out: str, title: Optional[str]):
    """Нарисовать размещение в SVG"""
    scenario = io_service.read_scenario(scenario_path)
    placement = io_service.read_placement(placement_path)
    io_service.render_svg(scenario, placement, out, title=title)
    click.echo(f"svg={out}")


@click.command()
@handle_errors
def acceptance():
    """Прогнать все приемочные критерии"""
    results = acceptance_service.run_all()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"{status}  {result.name:<32} {result.elapsed:7.2f}s  {result.detail}")

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise CriterionFailed(f"не пройдены: {', '.join(failed)}")
    click.echo("Все критерии пройдены")
