"""Evaluation datasets recorded along synthetic trajectories."""

import math
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from tqdm import tqdm

from src.detection.noise import NoiseModel
from src.detection.oracle import oracle_detect
from src.geometry.pose import Pose2D
from src.maps.footprint import LabeledFootprintMap
from src.maps.occupancy import OccupancyGridMap
from src.mcl.hypotheses import sample_uniform
from src.simworld.archetypes import World
from src.simworld.records import DatasetRecord, ScanDocument
from src.simworld.scan_sim import ScanSimConfig, simulate_scan_ranges
from src.utils.errors import InvalidArgumentError, InvalidTrajectoryError
from src.utils.logger import logger
from src.utils.seeding import derive_seed
from src.visibility.camera import CameraRig
from src.visibility.simulator import OcclusionMode, VisibilitySimulator


class TrajectorySpec(BaseModel):
    """Piecewise-linear path sampled at a fixed spacing; headings follow the path."""

    waypoints: List[Tuple[float, float]] = Field(min_length=1)
    spacing_m: float = Field(default=1.0, gt=0.0)
    interval_s: float = Field(default=1.0, gt=0.0)
    initial_heading: float = 0.0


def interpolate_trajectory(spec: TrajectorySpec) -> List[Pose2D]:
    """Poses every ``spacing_m`` along the waypoints, starting at the first one."""
    points = np.asarray(spec.waypoints, dtype=np.float64)
    if len(points) == 1:
        return [Pose2D(points[0, 0], points[0, 1], spec.initial_heading)]

    deltas = np.diff(points, axis=0)
    lengths = np.hypot(deltas[:, 0], deltas[:, 1])
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    total = float(cumulative[-1])
    count = int(math.floor(total / spec.spacing_m + 1e-9)) + 1

    poses = []
    for k in range(count):
        s = min(k * spec.spacing_m, total)
        seg = int(np.clip(np.searchsorted(cumulative, s, side="right") - 1, 0, len(lengths) - 1))
        # zero-length segments keep the previous heading
        while lengths[seg] == 0 and seg > 0:
            seg -= 1
        frac = 0.0 if lengths[seg] == 0 else (s - cumulative[seg]) / lengths[seg]
        xy = points[seg] + frac * deltas[seg]
        heading = math.atan2(deltas[seg, 1], deltas[seg, 0]) if lengths[seg] > 0 else spec.initial_heading
        poses.append(Pose2D(float(xy[0]), float(xy[1]), heading))
    return poses


def records_at_poses(
    poses: Sequence[Pose2D],
    footprint_map: LabeledFootprintMap,
    grid: OccupancyGridMap,
    rig: CameraRig,
    noise: Optional[NoiseModel] = None,
    scan_cfg: Optional[ScanSimConfig] = None,
    seed: int = 0,
    interval_s: float = 1.0,
    occlusion: OcclusionMode = OcclusionMode.NONE,
    show_progress: bool = False,
) -> List[DatasetRecord]:
    """
    Record a scan and an oracle detection at each pose.

    Per-record noise seeds derive from ``seed`` and the record index.
    """
    noise = noise or NoiseModel()
    scan_cfg = scan_cfg or ScanSimConfig()
    simulator = VisibilitySimulator(footprint_map, rig, occlusion, grid)
    records = []
    for index, pose in enumerate(tqdm(poses, desc="Recording", disable=not show_progress)):
        angle_min, increment, ranges = simulate_scan_ranges(pose, grid, scan_cfg, derive_seed(seed, "scan", index))
        obs = oracle_detect(
            pose, rig, footprint_map,
            noise.reseeded(derive_seed(seed, "labels", noise.seed, index)),
            simulator=simulator,
        )
        records.append(DatasetRecord(
            t=index * interval_s,
            pose_gt=(pose.x, pose.y, pose.theta),
            scan=ScanDocument(
                angle_min=angle_min,
                angle_increment=increment,
                ranges=[None if math.isnan(r) else float(r) for r in ranges],
                range_max=scan_cfg.max_range,
            ),
            labels=obs.to_label_lists(),
        ))
    return records


def _check_free(grid: OccupancyGridMap, points: Iterable[Tuple[float, float]], what: str) -> None:
    points = np.asarray(list(points), dtype=np.float64).reshape(-1, 2)
    free = grid.is_free(points)
    if not np.all(free):
        bad = int(np.argmin(free))
        raise InvalidTrajectoryError(
            f"{what} {bad} at {points[bad].tolist()} is not in free space",
            details={"index": bad, "point": points[bad].tolist()},
        )


def generate_dataset(
    world: World,
    trajectory: TrajectorySpec,
    rig: CameraRig,
    noise: Optional[NoiseModel] = None,
    seed: int = 0,
    scan_cfg: Optional[ScanSimConfig] = None,
    occlusion: OcclusionMode = OcclusionMode.NONE,
) -> List[DatasetRecord]:
    """
    Simulate a recording session along a trajectory.

    Args:
        world: Generated world
        trajectory: Waypoints and sampling interval
        rig: Camera rig
        noise: Oracle noise model
        seed: Dataset seed
        scan_cfg: LiDAR parameters
        occlusion: Visibility occlusion mode

    Returns:
        One record per interpolated pose
    """
    _check_free(world.grid, trajectory.waypoints, "Waypoint")
    poses = interpolate_trajectory(trajectory)
    _check_free(world.grid, [(p.x, p.y) for p in poses], "Trajectory pose")
    logger.info(f"Generating {len(poses)} records along {len(trajectory.waypoints)} waypoints")
    return records_at_poses(
        poses, world.footprint_map, world.grid, rig, noise, scan_cfg, seed,
        interval_s=trajectory.interval_s, occlusion=occlusion,
    )


def random_free_trajectory(grid: OccupancyGridMap, count: int, seed: int) -> List[Pose2D]:
    """Independent uniformly drawn free poses, one per benchmark record."""
    hyps = sample_uniform(grid, count, derive_seed(seed, "ground_truth"))
    return [hyps.pose(i) for i in range(len(hyps))]


class ConfusionScenario(NamedTuple):
    """
    A world whose detector sees ``source_label`` as ``confused_label``.

    ``perceived_map`` is the scene as the detector sees it: two landmarks
    share ``confused_label``. Localization still runs against the world's
    own map; ``excluded_map`` drops the over-abstract ``confused_label``.
    """

    world: World
    source_label: str
    confused_label: str
    noise: NoiseModel
    perceived_map: LabeledFootprintMap
    excluded_map: LabeledFootprintMap


def confusion_scenario(world: World, seed: int) -> ConfusionScenario:
    """Pick two distinct labels at random; detections of one come back as the other."""
    labels = list(world.footprint_map.labels)
    if len(labels) < 2:
        raise InvalidArgumentError("A confusion scenario needs at least two labels")
    rng = np.random.default_rng(derive_seed(seed, "confusion"))
    first, second = rng.choice(len(labels), size=2, replace=False)
    source, confused = labels[int(first)], labels[int(second)]
    return ConfusionScenario(
        world=world,
        source_label=source,
        confused_label=confused,
        noise=NoiseModel(confusion={source: [confused]}, seed=seed),
        perceived_map=world.footprint_map.relabeled({source: confused}),
        excluded_map=world.footprint_map.without_labels([confused]),
    )


def poses_viewing_label(
    world: World,
    label: str,
    rig: CameraRig,
    count: int,
    seed: int,
    occlusion: OcclusionMode = OcclusionMode.NONE,
    draws_per_pose: int = 50,
) -> List[Pose2D]:
    """
    Free poses from which some camera sees a landmark carrying ``label``.

    Candidates are drawn uniformly, ``draws_per_pose`` per requested pose.
    """
    if label not in world.footprint_map.label_set:
        raise InvalidArgumentError(f"Label {label!r} is not in the map")
    simulator = VisibilitySimulator(world.footprint_map, rig, occlusion, world.grid)
    column = world.footprint_map.label_index[label]
    candidates = sample_uniform(world.grid, count * draws_per_pose, derive_seed(seed, "viewing", label))
    masks = simulator.simulate_masks(candidates.poses)
    viewing = np.flatnonzero(masks[:, :, column].any(axis=1))
    if viewing.size < count:
        raise InvalidArgumentError(
            f"Only {viewing.size} of {len(candidates)} candidate poses see {label!r}; {count} requested",
            details={"label": label, "found": int(viewing.size)},
        )
    return [candidates.pose(int(i)) for i in viewing[:count]]
