"""Candidate locations along a segment: spacing rules and intersection clearance.

Parallel spots sit 6 m apart, angled and perpendicular ones 3 m apart, and
nothing may sit within 50 m of a flagged intersection.  The walk restarts
after each exclusion zone.
"""
import numpy as np

from spotalign import GeoPoint, SpotType, RoadSegment, make_frame, sample_candidates, segment_arclength
from spotalign.geo import unproject_points

frame = make_frame(GeoPoint(39.9, 116.4))


def segment(length_m, spot_type, flagged_ends):
    xy = np.column_stack([np.linspace(0, length_m, 5), np.zeros(5)])
    return RoadSegment(
        id=f"{spot_type.value}-{int(length_m)}",
        polyline=tuple(unproject_points(frame, xy)),
        spot_type=spot_type,
        intersection_indices=frozenset({0, 4} if flagged_ends else set()),
    )


for length, spot, flagged in [
    (30.0, SpotType.PARALLEL, False),
    (30.0, SpotType.ANGLED45, False),
    (220.0, SpotType.PARALLEL, True),
]:
    seg = segment(length, spot, flagged)
    cands = sample_candidates(seg)
    arcs = np.asarray(cands.arclengths)
    print(f"{seg.id:14s} length={segment_arclength(seg):7.2f} m "
          f"intersections={'ends' if flagged else 'none':4s} -> {len(cands):2d} candidates")
    print(f"    arclengths: {np.array2string(arcs, precision=1, max_line_width=100)}")
    if flagged:
        print(f"    closest approach to an intersection: {min(arcs.min(), length - arcs.max()):.1f} m")
