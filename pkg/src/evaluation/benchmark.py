"""Archetype sweeps and their qualitative trend checks."""

import math
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel
from tqdm import tqdm

from src.evaluation.metrics import BenchmarkSummary
from src.evaluation.runner import build_workflow, run_localize
from src.maps.distance_field import build_distance_field
from src.mcl.hypotheses import Modality
from src.run_config import RunConfig
from src.simworld.archetypes import ArchetypeKind, ArchetypeSpec, generate_world
from src.simworld.dataset import confusion_scenario, poses_viewing_label, random_free_trajectory, records_at_poses
from src.utils.logger import logger
from src.utils.seeding import derive_seed

# seed -> archetype -> modality -> mean e_trans
TrendTable = Dict[int, Dict[str, Dict[str, float]]]

FUSION_MARGIN_M = 0.2
AMBIGUITY_FLOOR_M = 2.0
REQUIRED_FRACTION = 0.8


class TrendCheck(BaseModel):
    name: str
    passed_seeds: int
    evaluated_seeds: int
    required_seeds: int

    @property
    def passed(self) -> bool:
        return self.evaluated_seeds > 0 and self.passed_seeds >= self.required_seeds


class BenchmarkReport(BaseModel):
    summaries: List[BenchmarkSummary]
    trends: TrendTable
    checks: List[TrendCheck]


def _mean(table: Dict[str, Dict[str, float]], kind: ArchetypeKind, modality: Modality) -> Optional[float]:
    return table.get(kind.value, {}).get(modality.value)


def _check_seed(name: str, table: Dict[str, Dict[str, float]]) -> Optional[bool]:
    """Outcome of one trend on one seed; None when inputs are missing."""
    v, s, f = Modality.VISION, Modality.SCAN, Modality.FUSED
    if name == "UG/DA vision < scan":
        a, b = _mean(table, ArchetypeKind.UG_DA, v), _mean(table, ArchetypeKind.UG_DA, s)
        return None if a is None or b is None else a < b
    if name == "DG/UA scan <= vision":
        a, b = _mean(table, ArchetypeKind.DG_UA, s), _mean(table, ArchetypeKind.DG_UA, v)
        return None if a is None or b is None else a <= b
    if name == "fused <= best single + margin":
        outcomes = []
        for kind in (ArchetypeKind.UG_DA, ArchetypeKind.DG_UA, ArchetypeKind.DG_DA):
            values = [_mean(table, kind, m) for m in (f, v, s)]
            if any(x is None for x in values):
                return None
            outcomes.append(values[0] <= min(values[1], values[2]) + FUSION_MARGIN_M)
        return all(outcomes)
    if name == "UG/UA ambiguous":
        values = [_mean(table, ArchetypeKind.UG_UA, m) for m in (v, s, f)]
        return None if any(x is None for x in values) else all(x > AMBIGUITY_FLOOR_M for x in values)
    raise ValueError(f"Unknown trend {name!r}")


TREND_NAMES = (
    "UG/DA vision < scan",
    "DG/UA scan <= vision",
    "fused <= best single + margin",
    "UG/UA ambiguous",
)


def trend_checks(trends: TrendTable) -> List[TrendCheck]:
    """
    Evaluate the qualitative archetype trends over benchmark seeds.

    A trend passes when it holds on at least 80% of the seeds it could be
    evaluated on (4 of 5 for the usual five-seed sweep).
    """
    checks = []
    for name in TREND_NAMES:
        outcomes = [_check_seed(name, trends[seed]) for seed in sorted(trends)]
        evaluated = [o for o in outcomes if o is not None]
        checks.append(TrendCheck(
            name=name,
            passed_seeds=sum(evaluated),
            evaluated_seeds=len(evaluated),
            required_seeds=math.ceil(REQUIRED_FRACTION * len(evaluated)),
        ))
    return checks


def run_benchmark(
    run_config: RunConfig,
    seeds: Sequence[int],
    kinds: Sequence[ArchetypeKind] = tuple(ArchetypeKind),
    modalities: Sequence[Modality] = tuple(Modality),
    record_count: int = 50,
    show_progress: bool = False,
) -> BenchmarkReport:
    """
    Generate each archetype per seed, record random free poses and localize them.

    Args:
        run_config: Parameters (noise, scan simulation, hypothesis count)
        seeds: Benchmark seeds
        kinds: Archetypes to sweep
        modalities: Modalities to run
        record_count: Records per world
        show_progress: Show a progress bar

    Returns:
        Summaries, the mean-error table and trend checks
    """
    summaries: List[BenchmarkSummary] = []
    trends: TrendTable = {}
    jobs = [(seed, ArchetypeKind(kind)) for seed in seeds for kind in kinds]
    for seed, kind in tqdm(jobs, desc="Benchmark", disable=not show_progress):
        world = generate_world(ArchetypeSpec(kind=kind, seed=derive_seed(seed, kind.value)))
        poses = random_free_trajectory(world.grid, record_count, seed)
        records = records_at_poses(
            poses, world.footprint_map, world.grid, run_config.rig,
            run_config.noise, run_config.scan_sim, seed, occlusion=run_config.visibility.occlusion,
        )
        workflow = build_workflow(
            world.footprint_map, world.grid, run_config, seed, distance_field=build_distance_field(world.grid)
        )
        for modality in modalities:
            result = run_localize(
                records, world.footprint_map, world.grid, run_config, modality, seed,
                label=f"{kind.value} seed={seed}", workflow=workflow,
            )
            summaries.append(result.summary)
            stats = result.summary.modalities.get(Modality(modality).value)
            if stats is not None:
                trends.setdefault(seed, {}).setdefault(kind.value, {})[Modality(modality).value] = stats.e_trans_mean
            logger.info(f"{kind.value} seed {seed} {Modality(modality).value}: "
                        f"mean e_trans {stats.e_trans_mean if stats else float('nan'):.3f} m")

    checks = trend_checks(trends) if trends else []
    for check in checks:
        logger.info(f"Trend '{check.name}': {check.passed_seeds}/{check.evaluated_seeds} seeds "
                    f"({'pass' if check.passed else 'FAIL'})")
    return BenchmarkReport(summaries=summaries, trends=trends, checks=checks)


class ConfusionOutcome(BaseModel):
    seed: int
    source_label: str
    confused_label: str
    unique_e_trans: float
    confused_e_trans: float
    excluded_e_trans: float

    @property
    def confusion_hurts(self) -> bool:
        return self.confused_e_trans > self.unique_e_trans

    @property
    def exclusion_helps(self) -> bool:
        if self.confused_e_trans <= 0:
            return False
        return (self.confused_e_trans - self.excluded_e_trans) / self.confused_e_trans >= 0.3


def run_confusion_study(
    run_config: RunConfig,
    seeds: Sequence[int],
    record_count: int = 20,
    modality: Modality = Modality.VISION,
    show_progress: bool = False,
) -> List[ConfusionOutcome]:
    """
    Localize in a DG/DA world whose detector merges two landmarks under one
    label, against the same world detected cleanly and against the map with
    the confused label excluded.

    Records are taken where the misread landmark is in view.
    """
    outcomes = []
    occlusion = run_config.visibility.occlusion
    for seed in tqdm(seeds, desc="Confusion study", disable=not show_progress):
        world = generate_world(ArchetypeSpec(kind=ArchetypeKind.DG_DA, seed=derive_seed(seed, "confusion-world")))
        scenario = confusion_scenario(world, seed)
        poses = poses_viewing_label(world, scenario.source_label, run_config.rig, record_count, seed, occlusion)
        field = build_distance_field(world.grid)
        common = dict(rig=run_config.rig, scan_cfg=run_config.scan_sim, seed=seed, occlusion=occlusion)

        clean = records_at_poses(poses, world.footprint_map, world.grid, **common)
        confused = records_at_poses(poses, scenario.perceived_map, world.grid, **common)

        def mean_error(records, footprint_map) -> float:
            workflow = build_workflow(footprint_map, world.grid, run_config, seed, distance_field=field)
            result = run_localize(records, footprint_map, world.grid, run_config, modality, seed, workflow=workflow)
            return result.summary.modalities[Modality(modality).value].e_trans_mean

        outcome = ConfusionOutcome(
            seed=seed,
            source_label=scenario.source_label,
            confused_label=scenario.confused_label,
            unique_e_trans=mean_error(clean, world.footprint_map),
            confused_e_trans=mean_error(confused, world.footprint_map),
            excluded_e_trans=mean_error(confused, scenario.excluded_map),
        )
        logger.info(
            f"Confusion seed {seed} ({outcome.source_label} -> {outcome.confused_label}): "
            f"unique {outcome.unique_e_trans:.3f} m, confused {outcome.confused_e_trans:.3f} m, "
            f"excluded {outcome.excluded_e_trans:.3f} m"
        )
        outcomes.append(outcome)
    return outcomes
