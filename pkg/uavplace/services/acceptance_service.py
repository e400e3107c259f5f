"""
Сервис приемочных критериев: свойства решателя и статистическое воспроизведение
эффекта пограничных высоконагруженных пользователей
"""
import contextlib
import io
import tempfile
import time
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np
from loguru import logger
from pydantic import BaseModel

from uavplace.core.rng import SplitMix64
from uavplace.models.schemas import Area, FeatureMode, SolveConfig
from uavplace.services.kmeans_service import kmeans_service
from uavplace.services.metrics_service import metrics_service
from uavplace.services.oracle_service import oracle_service
from uavplace.services.preprocess_service import preprocess_service
from uavplace.services.scenario_service import scenario_service

DEFAULT_AREA = Area(xmin=0.0, xmax=100.0, ymin=0.0, ymax=100.0)
INTEGER_LEVELS = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]


class CriterionResult(BaseModel):
    """Результат одного критерия"""

    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0


class AcceptanceService:
    """Прогон приемочных критериев"""

    def monotone_descent(self, scenarios: int = 200, tolerance: float = 1e-9) -> CriterionResult:
        """след целевой функции не возрастает во всех режимах"""
        violations = 0
        for seed in range(scenarios):
            s = scenario_service.generate(seed, 60, DEFAULT_AREA, 1.0, 8.0, 0.15, 3)
            for mode in FeatureMode:
                _, report = kmeans_service.solve(s, SolveConfig(mode=mode, seed=seed))
                trace = report.objective_trace
                if any(later > earlier + tolerance for earlier, later in zip(trace, trace[1:])):
                    violations += 1
        return CriterionResult(
            name="monotone descent",
            passed=violations == 0,
            detail=f"нарушений {violations} из {scenarios * len(FeatureMode)} решений",
        )

    def border_highload(
        self,
        scenarios: int = 100,
        highload_wins: float = 0.90,
        weighted_wins: float = 0.95,
    ) -> CriterionResult:
        """weighted ближе к пограничным высоконагруженным пользователям, чем two-feature"""
        highload_count = 0
        weighted_count = 0
        for seed in range(scenarios):
            s = scenario_service.generate_border_stress(seed, 60, DEFAULT_AREA, 2, 3, 1.0, 8.0)
            plain, _ = kmeans_service.solve(s, SolveConfig(mode=FeatureMode.TWO_FEATURE, seed=seed, restarts=10))
            loaded, _ = kmeans_service.solve(s, SolveConfig(mode=FeatureMode.WEIGHTED, seed=seed, restarts=10))
            record = metrics_service.compare(s, plain, loaded, label_a="two-feature", label_b="weighted")
            highload = record.metric("mean_dist_highload")
            weighted = record.metric("mean_dist_weighted")
            highload_count += highload.delta is not None and highload.delta < 0
            weighted_count += weighted.delta is not None and weighted.delta < 0
        passed = highload_count >= highload_wins * scenarios and weighted_count >= weighted_wins * scenarios
        return CriterionResult(
            name="border high-load users",
            passed=passed,
            detail=(
                f"mean_dist_highload: weighted лучше в {highload_count}/{scenarios}; "
                f"mean_dist_weighted: в {weighted_count}/{scenarios}"
            ),
        )

    def replication_equivalence(self, scenarios: int = 50, tolerance: float = 1e-12) -> CriterionResult:
        """взвешенный K-means совпадает с обычным на репликах, итерация за итерацией"""
        failures = 0
        for seed in range(scenarios):
            s = scenario_service.generate_multilevel(seed, 40, DEFAULT_AREA, INTEGER_LEVELS, 3).sorted_by_id()
            cfg = SolveConfig(mode=FeatureMode.WEIGHTED, seed=seed, shift_tol=0.0)
            features = kmeans_service.build_features(s, cfg)
            initial = kmeans_service.init_centroids(features.points, features.weights, s.k, cfg.init, seed)

            weighted = kmeans_service.run_lloyd(features.points, features.weights, initial, cfg.max_iters, 0.0)
            replicas = preprocess_service.split_users(s, 1.0)
            points = replicas.positions()
            plain = kmeans_service.run_lloyd(points, np.ones(len(points)), initial, cfg.max_iters, 0.0)

            same_length = len(weighted.trajectory) == len(plain.trajectory)
            if not same_length or any(
                np.max(np.abs(a - b)) >= tolerance for a, b in zip(weighted.trajectory, plain.trajectory)
            ):
                failures += 1
        return CriterionResult(
            name="replication equivalence",
            passed=failures == 0,
            detail=f"расхождений {failures} из {scenarios}",
        )

    def oracle_gap(
        self,
        instances: int = 100,
        required: float = 0.95,
        relative: float = 1e-6,
    ) -> CriterionResult:
        """K-means с 20 перезапусками достигает оптимума перебора и никогда не лучше него"""
        hits = 0
        below = 0
        for seed in range(instances):
            rng = SplitMix64(seed)
            n_users = 4 + rng.randbelow(5)
            s = scenario_service.generate_multilevel(seed, n_users, DEFAULT_AREA, INTEGER_LEVELS, 2)
            _, optimum = oracle_service.optimal_partition(s)
            _, report = kmeans_service.solve(s, SolveConfig(mode=FeatureMode.WEIGHTED, seed=seed, restarts=20))
            if report.objective < optimum - 1e-9:
                below += 1
            if report.objective <= optimum * (1 + relative) + 1e-12:
                hits += 1
        return CriterionResult(
            name="oracle optimality gap",
            passed=below == 0 and hits >= required * instances,
            detail=f"оптимум достигнут в {hits}/{instances}, ниже оптимума {below}",
        )

    def closed_forms(self, tolerance: float = 1e-12) -> CriterionResult:
        """k=1 - (взвешенное) среднее; равные нагрузки - нулевые дельты; alpha=0 - как two-feature"""
        problems: List[str] = []

        s = scenario_service.generate_multilevel(11, 30, DEFAULT_AREA, INTEGER_LEVELS, 1)
        positions, loads = s.positions(), s.loads()
        weighted, _ = kmeans_service.solve(s, SolveConfig(mode=FeatureMode.WEIGHTED, restarts=1))
        plain, _ = kmeans_service.solve(s, SolveConfig(mode=FeatureMode.TWO_FEATURE, restarts=1))
        expected_weighted = (loads[:, None] * positions).sum(axis=0) / loads.sum()
        expected_plain = positions.mean(axis=0)
        if np.max(np.abs(weighted.positions()[0] - expected_weighted)) >= tolerance:
            problems.append("k=1 weighted")
        if np.max(np.abs(plain.positions()[0] - expected_plain)) >= tolerance:
            problems.append("k=1 two-feature")

        equal = scenario_service.generate(12, 60, DEFAULT_AREA, 3.0, 3.0, 0.5, 3)
        a, _ = kmeans_service.solve(equal, SolveConfig(mode=FeatureMode.TWO_FEATURE, seed=5))
        b, _ = kmeans_service.solve(equal, SolveConfig(mode=FeatureMode.WEIGHTED, seed=5))
        record = metrics_service.compare(equal, a, b)
        if any(m.delta != 0 for m in record.metrics):
            problems.append("equal loads deltas")

        mixed = scenario_service.generate(13, 60, DEFAULT_AREA, 1.0, 8.0, 0.15, 3)
        flat, _ = kmeans_service.solve(mixed, SolveConfig(mode=FeatureMode.THREE_FEATURE, load_scale=0.0, seed=7))
        two, _ = kmeans_service.solve(mixed, SolveConfig(mode=FeatureMode.TWO_FEATURE, seed=7))
        if flat.assignment != two.assignment:
            problems.append("alpha=0 assignments")

        return CriterionResult(
            name="closed forms",
            passed=not problems,
            detail="все выполнены" if not problems else f"нарушены: {', '.join(problems)}",
        )

    def determinism(self) -> CriterionResult:
        """команды CLI с одинаковыми флагами дают побайтно одинаковые файлы"""
        from uavplace.main import cli

        def run_all(workdir: Path) -> Dict[str, bytes]:
            scenario = workdir / "scenario.json"
            commands = [
                ["generate", "--seed", "7", "--n", "60", "--k", "3", "--out", str(scenario)],
                ["place", "--scenario", str(scenario), "--mode", "weighted", "--seed", "3",
                 "--out", str(workdir / "placement.json"), "--report", str(workdir / "report.csv")],
                ["compare", "--scenario", str(scenario), "--seed", "3",
                 "--out", str(workdir / "compare.csv"), "--plot-dir", str(workdir / "plots")],
                ["plot", "--scenario", str(scenario), "--placement", str(workdir / "placement.json"),
                 "--out", str(workdir / "placement.svg")],
            ]
            for args in commands:
                # сводки команд не должны попадать в таблицу результатов
                with contextlib.redirect_stdout(io.StringIO()):
                    code = cli.main(args=args, prog_name="uavplace", standalone_mode=False)
                if code:
                    logger.error(f"Команда {args[0]} завершилась с кодом {code}")
                    failed.append(args[0])
            return {
                str(item.relative_to(workdir)): item.read_bytes()
                for item in sorted(workdir.rglob("*")) if item.is_file()
            }

        failed: List[str] = []
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            one = run_all(Path(first))
            two = run_all(Path(second))
        differing = sorted(name for name in one if one[name] != two.get(name))
        passed = bool(one) and one.keys() == two.keys() and not differing and not failed
        return CriterionResult(
            name="determinism",
            passed=passed,
            detail=f"файлов {len(one)}, различаются: {differing or 'нет'}, ошибки команд: {failed or 'нет'}",
        )

    def run_all(self) -> List[CriterionResult]:
        """Прогон всех критериев с замером времени"""
        criteria: List[Callable[[], CriterionResult]] = [
            self.monotone_descent,
            self.border_highload,
            self.replication_equivalence,
            self.oracle_gap,
            self.closed_forms,
            self.determinism,
        ]
        results = []
        for criterion in criteria:
            started = time.perf_counter()
            result = criterion()
            result.elapsed = time.perf_counter() - started
            level = "INFO" if result.passed else "ERROR"
            logger.log(level, f"{result.name}: {'PASS' if result.passed else 'FAIL'} ({result.detail}, {result.elapsed:.2f}s)")
            results.append(result)
        return results


# Глобальный экземпляр сервиса
acceptance_service = AcceptanceService()
