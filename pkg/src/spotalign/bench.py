"""Benchmark matrix: methods x noise arms x segment classes, the coupling
weight sweep, and the robustness table derived from the clean/noisy pairs."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import replace

from .dataio import Dataset, RunConfig
from .geo import project_points, to_geo
from .metrics import HIGHER_BETTER, LOWER_BETTER, EvalReport, evaluate_segments, robustness_index
from .pipeline import ALL_METHODS, RandomNoise, NoiseSpec, RectifiedSet, inject_noise, rectify
from .roads import sample_candidates

log = logging.getLogger(__name__)

LAMBDA_SWEEP = (1.0, 10.0, 100.0, 1000.0, 10000.0)
ALL_CLASSES = "all"
NOISE_ARM_BOUND_M = 20.0
CLEAN = "clean"
NOISY = "noisy"


def apply_noise_arm(dataset: Dataset, seed: int, bound: float = NOISE_ARM_BOUND_M) -> Dataset:
    """Corrupt every collected point with uniform random noise in [0, bound]."""
    corrupted = {}
    for sid in dataset.segment_ids():
        cset = dataset.collected.get(sid)
        if cset is None:
            continue
        frame = dataset.segments[sid].frame()
        sid_tag = int(hashlib.sha256(sid.encode("utf-8")).hexdigest()[:8], 16)
        spec = NoiseSpec(RandomNoise(bound=bound, fraction=1.0), seed=seed + sid_tag % 100_000)
        corrupted[sid] = replace(cset, points=tuple(inject_noise(cset.points, spec, frame)))
    return Dataset(segments=dataset.segments, collected=corrupted, metadata=dict(dataset.metadata))


def run_method(dataset: Dataset, cfg: RunConfig) -> dict[str, RectifiedSet]:
    """Rectify every collected segment with the configured method."""
    out: dict[str, RectifiedSet] = {}
    for sid in dataset.segment_ids():
        cset = dataset.collected.get(sid)
        if cset is None:
            continue
        out[sid] = rectify(cset, dataset.segments[sid], cfg.method, th=cfg.th, cfg=cfg.solver_config())
    return out


def evaluate_by_class(dataset: Dataset, rectified: dict[str, RectifiedSet], tau: float) -> dict[str, EvalReport]:
    """Index-aligned evaluation against ground truth, grouped by shape class."""
    groups: dict[str, list[str]] = {ALL_CLASSES: []}
    for sid in sorted(rectified):
        cset = dataset.collected[sid]
        if cset.ground_truth is None:
            continue
        groups[ALL_CLASSES].append(sid)
        groups.setdefault(dataset.segments[sid].shape_class, []).append(sid)

    reports: dict[str, EvalReport] = {}
    for cls, sids in groups.items():
        if not sids:
            continue
        ids, preds, truths = [], [], []
        for sid in sids:
            frame = dataset.segments[sid].frame()
            ids.append(sid)
            preds.append(project_points(frame, rectified[sid].points))
            truths.append(project_points(frame, dataset.collected[sid].ground_truth))
        reports[cls] = evaluate_segments(ids, preds, truths, tau=tau)
    return reports


def lambda_sweep_rows(dataset: Dataset, cfg: RunConfig) -> list[dict]:
    """Clean-arm sweep of the main method over the coupling-weight grid."""
    rows: list[dict] = []
    for lam in LAMBDA_SWEEP:
        sweep_cfg = replace(cfg, method="raa", lam=lam)
        reports = evaluate_by_class(dataset, run_method(dataset, sweep_cfg), cfg.tau)
        log.info("bench: sweep lam=%g done", lam)
        for cls, rep in sorted(reports.items()):
            rows.append({
                "run": "sweep", "method": "raa", "lam": lam, "noise": CLEAN,
                "segment_class": cls, "acd": rep.acd, "ar": rep.ar,
            })
    return rows


def bench_matrix(dataset: Dataset, cfg: RunConfig) -> tuple[list[dict], list[dict]]:
    """Full comparison matrix plus the coupling-weight sweep.

    Returns (bench_rows, robustness_rows).  Bench rows carry
    run/method/lam/noise/segment_class/acd/ar; the sweep runs the main method
    over ``LAMBDA_SWEEP`` on the clean arm.  Robustness rows combine each
    method's clean and noisy scores per class.
    """
    noisy_dataset = apply_noise_arm(dataset, seed=cfg.seed + 7919)
    bench_rows: list[dict] = []
    scores: dict[tuple[str, str, str], EvalReport] = {}

    for method in ALL_METHODS:
        for arm, data in ((CLEAN, dataset), (NOISY, noisy_dataset)):
            run_cfg = replace(cfg, method=method)
            reports = evaluate_by_class(data, run_method(data, run_cfg), cfg.tau)
            log.info("bench: method=%s arm=%s done", method, arm)
            for cls, rep in sorted(reports.items()):
                scores[(method, arm, cls)] = rep
                bench_rows.append({
                    "run": "main", "method": method, "lam": cfg.lam, "noise": arm,
                    "segment_class": cls, "acd": rep.acd, "ar": rep.ar,
                })

    bench_rows.extend(lambda_sweep_rows(dataset, cfg))

    robustness_rows: list[dict] = []
    for method in ALL_METHODS:
        for cls in sorted({cls for (_, _, cls) in scores}):
            clean = scores.get((method, CLEAN, cls))
            noisy = scores.get((method, NOISY, cls))
            if clean is None or noisy is None:
                continue
            # a zero clean recall leaves the relative change undefined
            r_ar = (robustness_index(noisy.ar, clean.ar, HIGHER_BETTER)
                    if clean.ar != 0 else float("nan"))
            robustness_rows.append({
                "method": method, "segment_class": cls,
                "r_acd": robustness_index(noisy.acd, clean.acd, LOWER_BETTER),
                "r_ar": r_ar,
            })
    return bench_rows, robustness_rows


def candidate_rows(dataset: Dataset) -> list[list]:
    """Rows for candidates.csv: every sampled candidate of every segment."""
    rows: list[list] = []
    for sid in dataset.segment_ids():
        cands = sample_candidates(dataset.segments[sid])
        for i, (p, s) in enumerate(zip(cands.points, cands.arclengths)):
            g = to_geo(cands.frame, p)
            rows.append([sid, i, float(s), float(g.lat), float(g.lon)])
    return rows
