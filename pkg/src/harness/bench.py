"""
Runtime benchmark of ellipsoid solves per form and order
"""
from __future__ import annotations

from typing import Optional, Sequence, Tuple

import pandas as pd

from src.constraints import Form
from src.harness.scenes import SceneConfig, generate_scene
from src.slue import solve_frame
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CASES: Tuple[Tuple[str, int], ...] = ((Form.ROTMAT.value, 1), (Form.QUAT.value, 2))


def run_benchmark(cfg: SceneConfig, n_frames: int = 10,
                  cases: Optional[Sequence[Tuple[str, int]]] = None) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Time joint solves centered on the ground truth for every (form, order) case

    Args:
        cfg: scene settings
        n_frames: frames per case
        cases: (form, order) pairs (default rotmat order 1, quat order 2)

    Returns:
        (per-frame DataFrame, summary DataFrame with median and mean time per case)
    """
    cases = list(cases or DEFAULT_CASES)
    rows = []
    for frame in range(n_frames):
        scene = generate_scene(cfg, frame)
        for form, order in cases:
            result = solve_frame(frame, scene.obs, scene.ground_truth, form, order)
            rows.append({
                "form": Form(form).value,
                "order": int(order),
                "frame": frame,
                "status": result.status.value,
                "solve_time_s": result.solve_time,
                "logdet": result.logdet,
            })
    frames = pd.DataFrame(rows, columns=["form", "order", "frame", "status", "solve_time_s", "logdet"])
    ok = frames[frames["status"] == "ok"]
    summary = (
        ok.groupby(["form", "order"])["solve_time_s"]
        .agg(median_s="median", mean_s="mean", solved="count")
        .reset_index()
    )
    summary["frames"] = n_frames
    logger.info(f"Benchmarked {len(cases)} cases over {n_frames} frames")
    return frames, summary
