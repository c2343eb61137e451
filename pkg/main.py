"""Main entry point for the footprint localizer."""

import argparse
import json
import sys
from pathlib import Path
from typing import List, NamedTuple, Optional

from src.config import config
from src.detection.oracle import oracle_detect
from src.detection.vlm_client import VlmClient, vlm_detect
from src.evaluation.benchmark import run_benchmark, run_confusion_study
from src.evaluation.heatmap import export_heatmap
from src.evaluation.metrics import read_metrics_csv, summarize, write_metrics_csv, write_summary
from src.evaluation.report import format_summary_table
from src.evaluation.runner import build_workflow, run_localize
from src.maps.footprint import LabeledFootprintMap, footprint_map_schema, load_footprint_map, save_footprint_map
from src.maps.occupancy import OccupancyGridMap, load_occupancy_map, save_occupancy_map
from src.mcl.hypotheses import Modality
from src.run_config import RunConfig
from src.simworld.archetypes import ArchetypeKind, ArchetypeSpec, World, generate_world
from src.simworld.dataset import TrajectorySpec, generate_dataset, random_free_trajectory, records_at_poses
from src.simworld.records import DatasetRecord, load_dataset, save_dataset
from src.utils.errors import InvalidArgumentError, error_document
from src.utils.logger import logger, set_console_level
from src.utils.seeding import derive_seed
from src.visibility.simulator import VisibilitySimulator

FOOTPRINT_FILE = "footprint.yaml"
GRID_IMAGE_FILE = "map.pgm"
GRID_META_FILE = "map.yaml"

SCHEMAS = {
    "footprint": footprint_map_schema,
    "dataset": DatasetRecord.model_json_schema,
}


class MapBundle(NamedTuple):
    footprint_map: LabeledFootprintMap
    grid: OccupancyGridMap


def load_maps(map_dir: str, exclude_labels: Optional[List[str]] = None) -> MapBundle:
    """
    Load the footprint map and occupancy grid stored in one directory.

    Args:
        map_dir: Directory written by ``gen-world``
        exclude_labels: Labels to drop from the footprint map

    Returns:
        Both maps
    """
    directory = Path(map_dir)
    footprint_map = load_footprint_map(directory / FOOTPRINT_FILE)
    if exclude_labels:
        footprint_map = footprint_map.without_labels(exclude_labels)
    grid = load_occupancy_map(directory / GRID_IMAGE_FILE, directory / GRID_META_FILE)
    return MapBundle(footprint_map, grid)


def parse_waypoints(values: List[str]) -> List[tuple]:
    waypoints = []
    for value in values:
        try:
            x, y = (float(part) for part in value.split(","))
        except ValueError as e:
            raise InvalidArgumentError(f"Waypoint {value!r} is not 'x,y'") from e
        waypoints.append((x, y))
    return waypoints


def print_document(document: dict) -> None:
    print(json.dumps(document, indent=2, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Run seed (default: 0)")
    common.add_argument("--config", help="Run configuration YAML (default: config/default.yaml)")
    common.add_argument(
        "--modality",
        choices=[m.value for m in Modality],
        default=Modality.FUSED.value,
        help="Likelihood used for the estimate (default: fused)",
    )
    common.add_argument("--workers", type=int, help="Hypothesis evaluation threads")
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    common.add_argument("--verbose", action="store_true", help="Log debug messages")

    parser = argparse.ArgumentParser(
        description="Global localization from labeled footprint maps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate a world and a dataset along a path
  python main.py gen-world --kind DG/DA --seed 3 --out worlds/dgda
  python main.py gen-dataset --map-dir worlds/dgda --waypoints 2,2 18,2 --out data/dgda.jsonl

  # Localize every record and print the summary
  python main.py localize --map-dir worlds/dgda --dataset data/dgda.jsonl --out results/dgda.csv

  # Archetype sweep with trend checks
  python main.py benchmark --config config/benchmark.yaml --seeds 0 1 2 3 4
        """,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # gen-world command
    world_parser = subparsers.add_parser("gen-world", parents=[common], help="Generate a synthetic world")
    world_parser.add_argument("--kind", required=True, choices=[k.value for k in ArchetypeKind])
    world_parser.add_argument("--size", type=float, nargs=2, default=(20.0, 20.0), metavar=("W", "H"))
    world_parser.add_argument("--resolution", type=float, default=0.05)
    world_parser.add_argument("--objects", type=int, help="Object count (archetype default otherwise)")
    world_parser.add_argument("--vocabulary", type=int, help="Label vocabulary size for uniform-appearance kinds")
    world_parser.add_argument("--unique-labels", action="store_true",
                              help="Relabel every landmark with its own tile label (A1, B1, ...)")
    world_parser.add_argument("--out", required=True, help="Output directory")

    # gen-dataset command
    dataset_parser = subparsers.add_parser("gen-dataset", parents=[common], help="Record a synthetic dataset")
    dataset_parser.add_argument("--map-dir", required=True)
    path_group = dataset_parser.add_mutually_exclusive_group(required=True)
    path_group.add_argument("--waypoints", nargs="+", help="Trajectory waypoints as x,y")
    path_group.add_argument("--random", type=int, help="Number of independent random free poses")
    dataset_parser.add_argument("--spacing", type=float, default=1.0, help="Meters between records")
    dataset_parser.add_argument("--interval", type=float, default=1.0, help="Seconds between records")
    dataset_parser.add_argument("--out", required=True, help="Output JSONL dataset")

    # detect command
    detect_parser = subparsers.add_parser("detect", parents=[common], help="Fill record labels by detection")
    detect_parser.add_argument("--map-dir", required=True)
    detect_parser.add_argument("--dataset", required=True)
    detect_parser.add_argument("--detector", choices=["oracle", "vlm"], default="oracle")
    detect_parser.add_argument("--out", required=True, help="Output JSONL dataset")

    # localize command
    localize_parser = subparsers.add_parser("localize", parents=[common], help="Localize every dataset record")
    localize_parser.add_argument("--map-dir", required=True)
    localize_parser.add_argument("--dataset", required=True)
    localize_parser.add_argument("--out", required=True, help="Metric CSV")
    localize_parser.add_argument("--summary", help="Summary JSON (printed to stdout regardless)")
    localize_parser.add_argument("--exclude-label", nargs="+", default=[], help="Labels to drop from the map")
    localize_parser.add_argument("--timings", action="store_true", help="Add a wall_time column")

    # report command
    report_parser = subparsers.add_parser("report", parents=[common], help="Summarize metric CSVs")
    report_parser.add_argument("metrics", nargs="+", help="Metric CSV files")
    report_parser.add_argument("--summary", help="Write the combined summary JSON")

    # heatmap command
    heatmap_parser = subparsers.add_parser("heatmap", parents=[common], help="Export a likelihood heatmap")
    heatmap_parser.add_argument("--map-dir", required=True)
    heatmap_parser.add_argument("--dataset", required=True)
    heatmap_parser.add_argument("--record", type=int, default=0, help="Record index")
    heatmap_parser.add_argument("--exclude-label", nargs="+", default=[])
    heatmap_parser.add_argument("--out", required=True, help="Image path (.pgm, .png or .svg)")

    # benchmark command
    bench_parser = subparsers.add_parser("benchmark", parents=[common], help="Archetype sweep")
    bench_parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    bench_parser.add_argument("--kinds", nargs="+", choices=[k.value for k in ArchetypeKind],
                              default=[k.value for k in ArchetypeKind])
    bench_parser.add_argument("--records", type=int, default=50, help="Records per world")
    bench_parser.add_argument("--hypotheses", type=int, help="Override sampling.hypothesis_count")
    bench_parser.add_argument("--confusion", action="store_true", help="Run the label-confusion study instead")
    bench_parser.add_argument("--out", help="Write the benchmark report JSON")

    # schema command
    schema_parser = subparsers.add_parser("schema", parents=[common], help="Print a file format's JSON schema")
    schema_parser.add_argument("document", choices=sorted(SCHEMAS), help="Document type")
    return parser


def main():
    """Main CLI function."""
    parser = build_parser()
    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        sys.exit(2)

    if args.quiet:
        set_console_level("WARNING")
    elif args.verbose:
        set_console_level("DEBUG")

    try:
        config.validate_runtime()
        run_config = RunConfig.from_file(args.config)
        if args.workers:
            run_config.runtime.workers = args.workers
        show_progress = not args.quiet and sys.stderr.isatty()
        modality = Modality(args.modality)

        if args.command == "gen-world":
            world = generate_world(ArchetypeSpec(
                kind=args.kind,
                world_size=tuple(args.size),
                resolution=args.resolution,
                object_count=args.objects,
                label_vocabulary_size=args.vocabulary,
                seed=args.seed,
            ))
            footprint_map = world.footprint_map
            if args.unique_labels:
                footprint_map = footprint_map.with_unique_labels()
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            save_footprint_map(footprint_map, out / FOOTPRINT_FILE)
            save_occupancy_map(world.grid, out / GRID_IMAGE_FILE, out / GRID_META_FILE)
            print_document({
                "kind": args.kind,
                "map_dir": str(out),
                "landmarks": len(footprint_map),
                "labels": list(footprint_map.labels),
            })

        elif args.command == "gen-dataset":
            maps = load_maps(args.map_dir)
            if args.waypoints:
                trajectory = TrajectorySpec(
                    waypoints=parse_waypoints(args.waypoints),
                    spacing_m=args.spacing,
                    interval_s=args.interval,
                )
                world = World(maps.footprint_map, maps.grid, None)
                records = generate_dataset(
                    world, trajectory, run_config.rig, run_config.noise, args.seed,
                    run_config.scan_sim, run_config.visibility.occlusion,
                )
            else:
                poses = random_free_trajectory(maps.grid, args.random, args.seed)
                records = records_at_poses(
                    poses, maps.footprint_map, maps.grid, run_config.rig, run_config.noise,
                    run_config.scan_sim, args.seed, interval_s=args.interval,
                    occlusion=run_config.visibility.occlusion, show_progress=show_progress,
                )
            count = save_dataset(records, args.out)
            print_document({"dataset": args.out, "records": count})

        elif args.command == "detect":
            maps = load_maps(args.map_dir)
            records = load_dataset(args.dataset)
            detected = []
            if args.detector == "vlm":
                client = VlmClient(run_config.vlm)
                for record in records:
                    if record.images is None:
                        detected.append(record)
                        continue
                    obs = vlm_detect(record.images, maps.footprint_map, client=client)
                    detected.append(record.model_copy(update={"labels": obs.to_label_lists(), "images": None}))
            else:
                simulator = VisibilitySimulator(
                    maps.footprint_map, run_config.rig, run_config.visibility.occlusion, maps.grid
                )
                for index, record in enumerate(records):
                    noise = run_config.noise.reseeded(derive_seed(args.seed, "labels", run_config.noise.seed, index))
                    obs = oracle_detect(record.pose, run_config.rig, maps.footprint_map, noise, simulator=simulator)
                    detected.append(record.model_copy(update={"labels": obs.to_label_lists(), "images": None}))
            count = save_dataset(detected, args.out)
            print_document({"dataset": args.out, "records": count, "detector": args.detector})

        elif args.command == "localize":
            maps = load_maps(args.map_dir, args.exclude_label)
            records = load_dataset(args.dataset)
            result = run_localize(
                records, maps.footprint_map, maps.grid, run_config, modality, args.seed,
                label=Path(args.dataset).stem, show_progress=show_progress,
            )
            write_metrics_csv(result.rows, args.out, timings=args.timings)
            if args.summary:
                write_summary(result.summary, args.summary)
            print_document(result.summary.model_dump(mode="json"))

        elif args.command == "report":
            rows = []
            for path in args.metrics:
                rows.extend(read_metrics_csv(path))
            summary = summarize(rows, run_config.digest(), label=", ".join(Path(p).stem for p in args.metrics))
            print(format_summary_table([summary]))
            if args.summary:
                write_summary(summary, args.summary)

        elif args.command == "heatmap":
            maps = load_maps(args.map_dir, args.exclude_label)
            records = load_dataset(args.dataset)
            if not 0 <= args.record < len(records):
                raise InvalidArgumentError(
                    f"Record index {args.record} out of range (dataset has {len(records)})",
                    details={"record": args.record, "records": len(records)},
                )
            workflow = build_workflow(maps.footprint_map, maps.grid, run_config, args.seed)
            state = workflow.run(records[args.record], args.record, modality)
            export_heatmap(
                state["hypotheses"], state["modality"], maps.grid, args.out,
                estimate=state["estimate"].pose, ground_truth=records[args.record].pose,
            )
            print_document({
                "heatmap": args.out,
                "record": args.record,
                "estimate": state["estimate"].pose.as_list(),
                "metric": state["metric"].model_dump(mode="json"),
            })

        elif args.command == "benchmark":
            if args.hypotheses:
                run_config.sampling.hypothesis_count = args.hypotheses
            if args.confusion:
                outcomes = run_confusion_study(run_config, args.seeds, show_progress=show_progress)
                document = {
                    "outcomes": [o.model_dump(mode="json") for o in outcomes],
                    "confusion_hurts": sum(o.confusion_hurts for o in outcomes),
                    "exclusion_helps": sum(o.exclusion_helps for o in outcomes),
                    "seeds": len(outcomes),
                }
            else:
                report = run_benchmark(
                    run_config, args.seeds, [ArchetypeKind(k) for k in args.kinds],
                    record_count=args.records, show_progress=show_progress,
                )
                print(format_summary_table(report.summaries), file=sys.stderr)
                document = report.model_dump(mode="json")
                document["checks"] = [
                    {**check.model_dump(mode="json"), "passed": check.passed} for check in report.checks
                ]
            if args.out:
                Path(args.out).parent.mkdir(parents=True, exist_ok=True)
                Path(args.out).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            print_document(document)

        elif args.command == "schema":
            print_document(SCHEMAS[args.document]())

    except Exception as e:
        logger.error(f"Fatal error: {e}")
        print_document(error_document(e))
        sys.exit(1)


if __name__ == "__main__":
    main()
