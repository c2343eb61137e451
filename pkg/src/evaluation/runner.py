"""Localization runs over datasets."""

from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional, Sequence

from tqdm import tqdm

from src.evaluation.metrics import BenchmarkSummary, MetricRow, summarize
from src.graph.nodes import LocalizationContext
from src.graph.state import LocalizationState
from src.graph.workflow import LocalizationWorkflow
from src.maps.distance_field import DistanceField
from src.maps.footprint import LabeledFootprintMap
from src.maps.occupancy import OccupancyGridMap
from src.mcl.evaluator import HypothesisEvaluator
from src.mcl.hypotheses import Modality
from src.run_config import RunConfig
from src.simworld.records import DatasetRecord
from src.utils.logger import logger


class LocalizeResult(NamedTuple):
    rows: List[MetricRow]
    summary: BenchmarkSummary


def build_workflow(
    footprint_map: LabeledFootprintMap,
    grid: OccupancyGridMap,
    run_config: RunConfig,
    seed: int,
    distance_field: Optional[DistanceField] = None,
) -> LocalizationWorkflow:
    """Wire maps and parameters into a reusable per-record workflow."""
    evaluator = HypothesisEvaluator(
        footprint_map,
        run_config.rig,
        grid,
        distance_field=distance_field,
        vision_params=run_config.vision,
        scan_params=run_config.scan,
        occlusion=run_config.visibility.occlusion,
        workers=run_config.runtime.workers,
        chunk_size=run_config.runtime.chunk_size,
    )
    context = LocalizationContext(
        footprint_map=footprint_map,
        grid=grid,
        evaluator=evaluator,
        hypothesis_count=run_config.sampling.hypothesis_count,
        tie_epsilon=run_config.sampling.tie_epsilon,
        seed=seed,
    )
    return LocalizationWorkflow(context)


def localize_record(
    workflow: LocalizationWorkflow,
    record: DatasetRecord,
    record_index: int,
    modality: Modality,
) -> LocalizationState:
    """Run the workflow on one record and return its final state."""
    return workflow.run(record, record_index, modality)


def run_localize(
    records: Sequence[DatasetRecord],
    footprint_map: LabeledFootprintMap,
    grid: OccupancyGridMap,
    run_config: RunConfig,
    modality: Modality,
    seed: int,
    label: Optional[str] = None,
    show_progress: bool = False,
    workflow: Optional[LocalizationWorkflow] = None,
) -> LocalizeResult:
    """
    Localize every record and aggregate the errors.

    Each record draws its own hypothesis set from ``derive_seed(seed, index)``;
    rows come back in record order whatever the worker count.

    Args:
        records: Dataset records
        footprint_map: Labeled footprint map
        grid: Occupancy grid
        run_config: Run parameters
        modality: vision, scan or fused
        seed: Run seed
        label: Name recorded in the summary
        show_progress: Show a progress bar
        workflow: Prebuilt workflow for these maps

    Returns:
        Metric rows and summary
    """
    modality = Modality(modality)
    workflow = workflow or build_workflow(footprint_map, grid, run_config, seed)
    logger.info(f"Localizing {len(records)} records ({modality.value}, seed {seed})")

    def work(index: int) -> MetricRow:
        return localize_record(workflow, records[index], index, modality)["metric"]

    indices = range(len(records))
    record_workers = run_config.runtime.record_workers
    if record_workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=record_workers) as pool:
            rows = list(tqdm(pool.map(work, indices), total=len(records), desc="Localizing",
                             disable=not show_progress))
    else:
        rows = [work(i) for i in tqdm(indices, desc="Localizing", disable=not show_progress)]

    summary = summarize(rows, run_config.digest(), label)
    degraded = sum(1 for row in rows if row.degraded)
    if degraded:
        logger.warning(f"{degraded} records fell back to scan-only localization")
    return LocalizeResult(rows, summary)
