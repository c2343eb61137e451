"""Plain-text tables of benchmark summaries."""

from typing import Iterable

from src.evaluation.metrics import BenchmarkSummary


def format_summary_table(summaries: Iterable[BenchmarkSummary]) -> str:
    """One line per (summary, modality): mean +- std of both errors."""
    header = f"{'run':<24} {'modality':<8} {'n':>5} {'e_trans [m]':>20} {'e_rot [rad]':>20} {'degraded':>8}"
    lines = [header, "-" * len(header)]
    for summary in summaries:
        name = summary.label or summary.config_digest[:12]
        if not summary.modalities:
            lines.append(f"{name:<24} {'-':<8} {0:>5} {'-':>20} {'-':>20} {0:>8}")
            continue
        for modality, stats in summary.modalities.items():
            trans = f"{stats.e_trans_mean:.3f} ± {stats.e_trans_std:.3f}"
            rot = f"{stats.e_rot_mean:.3f} ± {stats.e_rot_std:.3f}"
            lines.append(f"{name:<24} {modality:<8} {stats.count:>5} {trans:>20} {rot:>20} {stats.degraded:>8}")
    return "\n".join(lines)
