"""Command-line surface: sample, rectify, evaluate, noise, synth, bench, plot.

Every command writes fixed-name CSVs (and SVGs for ``plot``) under
``--out-dir``; each file starts with a metadata comment carrying the config
hash, and all writes are atomic.  Set ``RAA_LOG=debug`` (or info/warning) for
progress logging.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .dataio import (
    Dataset,
    DatasetError,
    RunConfig,
    atomic_write_text,
    load_dataset,
    render_csv,
    save_dataset,
)
from .geo import project_points, to_geo
from .pipeline import (
    ALL_METHODS,
    CollectedSet,
    InsufficientCandidatesError,
    Mixed,
    NoiseSpec,
    RandomNoise,
    RectifiedSet,
    Rotational,
    Translational,
    inject_noise,
    synth_corpus,
)
from .roads import EmptyCandidateError, sample_candidates
from .solver import DegenerateGeometryError, NumericalFailureError

log = logging.getLogger(__name__)

SVG_WIDTH, SVG_HEIGHT, SVG_MARGIN = 800.0, 600.0, 40.0
PLOT_STYLE = {
    "collected": ("#2a9d2a", 3.0),
    "candidate": ("#d62728", 2.0),
    "rectified": ("#222222", 3.0),
}


def _corpus_to_dataset(pairs) -> Dataset:
    return Dataset(
        segments={seg.id: seg for seg, _ in pairs},
        collected={seg.id: cset for seg, cset in pairs},
        metadata={"source": "synth"},
    )


def _load_or_synth(args) -> Dataset:
    if args.segments:
        if not args.collected:
            raise DatasetError("--collected is required when --segments is given")
        return load_dataset(args.segments, args.collected, args.truth)
    log.info("no dataset given; generating a synthetic corpus (seed=%d)", args.seed)
    return _corpus_to_dataset(synth_corpus(args.n_straight, args.n_curve, seed=args.seed))


def _run_config(args) -> RunConfig:
    return RunConfig(
        method=args.method,
        lam=getattr(args, "lam", 100.0),
        th=getattr(args, "th", 10.0),
        tau=getattr(args, "tau", 0.5),
        mu0=getattr(args, "mu0", 1e-2),
        rho=getattr(args, "rho", 1.3),
        max_iters=getattr(args, "max_iters", 300),
        seed=args.seed,
    )


def _noise_spec(args) -> NoiseSpec:
    angle = math.radians(args.noise_angle)
    kinds = {
        "translational": lambda: Translational(args.noise_dx, args.noise_dy),
        "rotational": lambda: Rotational(angle),
        "random": lambda: RandomNoise(args.noise_bound, args.noise_fraction),
        "mixed": lambda: Mixed((
            Translational(args.noise_dx, args.noise_dy),
            Rotational(angle),
            RandomNoise(args.noise_bound, args.noise_fraction),
        )),
    }
    try:
        kind = kinds[args.noise_kind]()
    except KeyError:
        raise DatasetError(f"unknown --noise-kind {args.noise_kind!r}") from None
    return NoiseSpec(kind, seed=args.seed)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_sample(args) -> int:
    dataset = _load_or_synth(args)
    rows = bench_mod.candidate_rows(dataset)
    out = Path(args.out_dir) / "candidates.csv"
    atomic_write_text(out, render_csv(
        f"spotalign candidates config={_run_config(args).config_hash()}",
        ["segment_id", "candidate_index", "arclength_m", "lat", "lon"], rows,
    ))
    print(f"wrote {out} ({len(rows)} candidates)")
    return 0


def _rectify_rows(dataset: Dataset, cfg: RunConfig) -> list[list]:
    rows: list[list] = []
    for sid, rset in sorted(bench_mod.run_method(dataset, cfg).items()):
        for i, p in enumerate(rset.points):
            rows.append([
                sid, i, float(p.lat), float(p.lon), rset.method,
                rset.window_start_index, float(rset.loss), int(rset.already_correct),
            ])
    return rows


def _cmd_rectify(args) -> int:
    dataset = _load_or_synth(args)
    cfg = _run_config(args)
    rows = _rectify_rows(dataset, cfg)
    out = Path(args.out_dir) / "rectified.csv"
    atomic_write_text(out, render_csv(
        f"spotalign rectified method={cfg.method} config={cfg.config_hash()}",
        ["segment_id", "spot_index", "lat", "lon", "method", "window_start_index", "loss", "already_correct"],
        rows,
    ))
    print(f"wrote {out} ({len(rows)} points, method={cfg.method})")
    return 0


def _cmd_evaluate(args) -> int:
    if not (args.segments and args.collected and args.truth):
        raise DatasetError("evaluate needs --segments, --collected (predictions) and --truth")
    dataset = load_dataset(args.segments, args.collected, args.truth)
    cfg = _run_config(args)
    # the collected file holds the predictions to score
    rectified = {
        sid: RectifiedSet(sid, cset.points, 0, 0.0, cfg.method)
        for sid, cset in dataset.collected.items()
        if cset.ground_truth is not None
    }
    reports = bench_mod.evaluate_by_class(dataset, rectified, cfg.tau)
    rows = [[cfg.method, cls, float(rep.acd), float(rep.ar)] for cls, rep in sorted(reports.items())]
    out = Path(args.out_dir) / "eval.csv"
    atomic_write_text(out, render_csv(
        f"spotalign eval tau={cfg.tau} correspondence=index config={cfg.config_hash()}",
        ["method", "segment_class", "acd", "ar"], rows,
    ))
    for method, cls, acd_v, ar_v in rows:
        print(f"{method} {cls}: ACD={acd_v:.4f} m, AR={ar_v:.4f}")
    print(f"wrote {out}")
    return 0


def _cmd_noise(args) -> int:
    dataset = _load_or_synth(args)
    spec = _noise_spec(args)
    corrupted: dict[str, CollectedSet] = {}
    for sid in dataset.segment_ids():
        cset = dataset.collected.get(sid)
        if cset is None:
            continue
        frame = dataset.segments[sid].frame()
        noisy = tuple(inject_noise(cset.points, spec, frame))
        truth = cset.ground_truth if cset.ground_truth is not None else cset.points
        corrupted[sid] = CollectedSet(segment_id=sid, points=noisy, ground_truth=truth)
    out_paths = save_dataset(
        Dataset(segments=dataset.segments, collected=corrupted, metadata=dataset.metadata),
        Path(args.out_dir),
    )
    print(f"wrote corrupted dataset: {', '.join(str(p) for p in out_paths.values())}")
    return 0


def _cmd_synth(args) -> int:
    pairs = synth_corpus(args.n_straight, args.n_curve, seed=args.seed)
    out_paths = save_dataset(_corpus_to_dataset(pairs), Path(args.out_dir))
    print(f"wrote synthetic corpus ({len(pairs)} segments): "
          f"{', '.join(str(p) for p in out_paths.values())}")
    return 0


def _cmd_bench(args) -> int:
    dataset = _load_or_synth(args)
    cfg = _run_config(args)
    bench_rows, robustness_rows = bench_mod.bench_matrix(dataset, cfg)
    out_dir = Path(args.out_dir)

    bench_out = out_dir / "bench.csv"
    atomic_write_text(bench_out, render_csv(
        f"spotalign bench config={cfg.config_hash()} ar_unit=fraction",
        ["run", "method", "lam", "noise", "segment_class", "acd", "ar"],
        [[r["run"], r["method"], float(r["lam"]), r["noise"], r["segment_class"],
          float(r["acd"]), float(r["ar"])] for r in bench_rows],
    ))
    robust_out = out_dir / "robustness.csv"
    atomic_write_text(robust_out, render_csv(
        f"spotalign robustness config={cfg.config_hash()} r_ar_unit=percent",
        ["method", "segment_class", "r_acd", "r_ar"],
        [[r["method"], r["segment_class"], float(r["r_acd"]), float(r["r_ar"])]
         for r in robustness_rows],
    ))
    print(f"wrote {bench_out} ({len(bench_rows)} rows) and {robust_out} ({len(robustness_rows)} rows)")
    return 0


def _svg_transform(xy_all: np.ndarray):
    lo = xy_all.min(axis=0)
    hi = xy_all.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    scale = min(
        (SVG_WIDTH - 2 * SVG_MARGIN) / span[0],
        (SVG_HEIGHT - 2 * SVG_MARGIN) / span[1],
    )
    mid = 0.5 * (lo + hi)

    def to_svg(p):
        x = SVG_WIDTH / 2 + (p[0] - mid[0]) * scale
        y = SVG_HEIGHT / 2 - (p[1] - mid[1]) * scale
        return float(f"{x:.2f}"), float(f"{y:.2f}")

    return to_svg


def _cmd_plot(args) -> int:
    dataset = _load_or_synth(args)
    cfg = _run_config(args)
    rectified = bench_mod.run_method(dataset, cfg)
    plots_dir = Path(args.out_dir) / "plots"
    count = 0
    for sid in dataset.segment_ids():
        if sid not in rectified:
            continue
        seg = dataset.segments[sid]
        cands = sample_candidates(seg)
        frame = cands.frame
        layers = {
            "collected": project_points(frame, dataset.collected[sid].points),
            "candidate": cands.xy(),
            "rectified": project_points(frame, rectified[sid].points),
        }
        every = np.vstack(list(layers.values()))
        to_svg = _svg_transform(every)

        rows: list[list] = []
        circles: list[str] = []
        for role in ("candidate", "collected", "rectified"):
            xy = layers[role]
            geo = dataset.collected[sid].points if role == "collected" else None
            color, radius = PLOT_STYLE[role]
            for i, p in enumerate(xy):
                sx, sy = to_svg(p)
                if role == "collected":
                    lat, lon = geo[i].lat, geo[i].lon
                elif role == "rectified":
                    g = rectified[sid].points[i]
                    lat, lon = g.lat, g.lon
                else:
                    g = to_geo(frame, cands.points[i])
                    lat, lon = g.lat, g.lon
                rows.append([sid, role, i, float(lat), float(lon), float(p[0]), float(p[1]), sx, sy])
                circles.append(
                    f'<circle class="pt" cx="{sx!r}" cy="{sy!r}" r="{radius}" fill="{color}" '
                    f'fill-opacity="0.8"><title>{role} {i}</title></circle>'
                )
        csv_path = plots_dir / f"{sid}.csv"
        atomic_write_text(csv_path, render_csv(
            f"spotalign plot segment={sid} config={cfg.config_hash()}",
            ["segment_id", "role", "index", "lat", "lon", "x_m", "y_m", "svg_x", "svg_y"],
            rows,
        ))
        legend = "".join(
            f'<circle cx="{SVG_MARGIN + 10}" cy="{20 + 18 * i}" r="4" fill="{c}"/>'
            f'<text x="{SVG_MARGIN + 22}" y="{24 + 18 * i}" font-size="12">{role}</text>'
            for i, (role, (c, _)) in enumerate(PLOT_STYLE.items())
        )
        svg = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH:.0f}" '
            f'height="{SVG_HEIGHT:.0f}" viewBox="0 0 {SVG_WIDTH:.0f} {SVG_HEIGHT:.0f}">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n'
            f'<text x="{SVG_WIDTH / 2}" y="18" text-anchor="middle" font-size="14">'
            f'segment {sid} ({cfg.method})</text>\n'
            + legend + "\n" + "\n".join(circles) + "\n</svg>\n"
        )
        atomic_write_text(plots_dir / f"{sid}.svg", svg)
        count += 1
    print(f"wrote {count} plot pairs under {plots_dir}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spotalign",
        description="Rectify and align roadside parking-spot GPS points to road candidates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, method_default="raa"):
        p.add_argument("--segments", type=Path, help="segments CSV")
        p.add_argument("--collected", type=Path, help="collected-points CSV")
        p.add_argument("--truth", type=Path, help="ground-truth CSV")
        p.add_argument("--method", default=method_default, choices=ALL_METHODS)
        p.add_argument("--lambda", dest="lam", type=float, default=100.0,
                       help="rank-1 coupling weight (default 100)")
        p.add_argument("--th", type=float, default=10.0,
                       help="mean-distance threshold accepting points as already correct")
        p.add_argument("--tau", type=float, default=0.5, help="recall tolerance in meters")
        p.add_argument("--mu0", type=float, default=0.1)
        p.add_argument("--rho", type=float, default=1.3)
        p.add_argument("--max-iters", type=int, default=300)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n-straight", type=int, default=6,
                       help="synthetic straight segments when no dataset is given")
        p.add_argument("--n-curve", type=int, default=6,
                       help="synthetic curved segments when no dataset is given")
        p.add_argument("--out-dir", type=Path, default=Path("out"))

    for name, fn, doc in (
        ("sample", _cmd_sample, "emit candidate locations for every segment"),
        ("rectify", _cmd_rectify, "rectify collected points with the chosen method"),
        ("evaluate", _cmd_evaluate, "score predictions (in --collected) against --truth"),
        ("noise", _cmd_noise, "emit a noise-corrupted copy of the dataset"),
        ("synth", _cmd_synth, "emit a synthetic corpus"),
        ("bench", _cmd_bench, "full method/noise matrix plus coupling-weight sweep"),
        ("plot", _cmd_plot, "emit per-segment SVG + CSV scatter plots"),
    ):
        p = sub.add_parser(name, help=doc)
        add_common(p)
        p.set_defaults(func=fn)
        if name == "noise":
            p.add_argument("--noise-kind", default="random",
                           choices=["translational", "rotational", "random", "mixed"])
            p.add_argument("--noise-bound", type=float, default=20.0,
                           help="random displacement bound in meters")
            p.add_argument("--noise-fraction", type=float, default=1.0,
                           help="fraction of points displaced by random noise")
            p.add_argument("--noise-dx", type=float, default=0.0, help="translation east, meters")
            p.add_argument("--noise-dy", type=float, default=0.0, help="translation north, meters")
            p.add_argument("--noise-angle", type=float, default=0.0, help="rotation in degrees")
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    """Entry point; returns a process exit status."""
    level = os.environ.get("RAA_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DatasetError, EmptyCandidateError, InsufficientCandidatesError,
            DegenerateGeometryError, NumericalFailureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
