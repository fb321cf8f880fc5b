"""Compare the alignment method against the four classic matchers.

One corrupted segment, five methods, two scores: pooled coordinate
deviation (meters, lower is better) and recall within half a meter.
"""
import numpy as np

from spotalign import rectify, synth_corpus
from spotalign.geo import project_points
from spotalign.metrics import evaluate_segments

pairs = synth_corpus(3, 3, seed=42, taxonomies=("mixed",))
print(f"{len(pairs)} synthetic segments, mixed corruption "
      "(lateral drift + rotation + outliers + jitter)\n")

print(f"{'method':8s} {'ACD (m)':>10s} {'AR':>8s}")
for method in ("raa", "ed", "cd", "ha", "wd"):
    ids, preds, truths = [], [], []
    for segment, collected in pairs:
        out = rectify(collected, segment, method, th=1.0)
        frame = segment.frame()
        ids.append(segment.id)
        preds.append(project_points(frame, out.points))
        truths.append(project_points(frame, collected.ground_truth))
    report = evaluate_segments(ids, preds, truths)
    print(f"{method:8s} {report.acd:10.3f} {report.ar:8.3f}")

print("\nper-point matchers (ed, wd) have no window prior, so outliers land on")
print("whatever candidate is nearest; chamfer scoring is brittle against the")
print("jitter.  The Hungarian window matcher keeps up on small clean corpora;")
print("the benchmark demo shows how the methods separate once uniform noise")
print("is injected.")
