"""Road segments, parking-spot spacing rules, and candidate-location sampling.

Candidate locations are generated by walking the segment's arclength at the
spacing dictated by the spot layout (6 m for parallel spots, 3 m for angled
and perpendicular ones), skipping everything within 50 m of a flagged
intersection.  Interpolation is linear in the segment's local metric frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geo import GeoPoint, LocalFrame, LocalPoint, centroid, make_frame, project_points

INTERSECTION_CLEARANCE_M = 50.0

STRAIGHT = "straight"
CURVE = "curve"


class SpotType(enum.Enum):
    """Parking-spot layout; the value is the label used in dataset files."""

    PARALLEL = "parallel"
    ANGLED30 = "angled30"
    ANGLED45 = "angled45"
    ANGLED60 = "angled60"
    PERPENDICULAR = "perpendicular"

    @property
    def spacing(self) -> float:
        """Distance in meters between adjacent spots of this layout."""
        return 6.0 if self is SpotType.PARALLEL else 3.0

    @classmethod
    def from_label(cls, label: str) -> "SpotType":
        try:
            return cls(label.strip().lower())
        except ValueError:
            raise ValueError(f"unknown spot type {label!r}") from None


class EmptyCandidateError(Exception):
    """Raised when a segment has no room for candidates after exclusions."""

    def __init__(self, segment_id: str, usable_length: float):
        self.segment_id = segment_id
        self.usable_length = usable_length
        super().__init__(
            f"segment {segment_id!r}: usable arclength {usable_length:.2f} m "
            "leaves no room for candidates"
        )


@dataclass(frozen=True)
class RoadSegment:
    """Ordered polyline with intersection flags and the spot layout on it.

    ``intersection_indices`` are indices into ``polyline`` of vertices flagged
    as intersections.  Degenerate (repeated-vertex) polylines are tolerated;
    they simply contribute zero arclength.
    """

    id: str
    polyline: tuple[GeoPoint, ...]
    spot_type: SpotType
    shape_class: str = STRAIGHT
    intersection_indices: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(self.polyline) < 2:
            raise ValueError(f"segment {self.id!r} needs at least 2 polyline points")
        if self.shape_class not in (STRAIGHT, CURVE):
            raise ValueError(f"unknown shape class {self.shape_class!r}")
        bad = [i for i in self.intersection_indices if not 0 <= i < len(self.polyline)]
        if bad:
            raise ValueError(f"segment {self.id!r}: intersection indices {bad} out of range")

    def frame(self) -> LocalFrame:
        """Local metric frame anchored at the polyline centroid."""
        return make_frame(centroid(self.polyline))


@dataclass(frozen=True)
class CandidateSet:
    """Candidate spot locations sampled along one segment, ordered by arclength."""

    segment_id: str
    points: tuple[LocalPoint, ...]
    arclengths: tuple[float, ...]
    frame: LocalFrame

    def __len__(self) -> int:
        return len(self.points)

    def xy(self) -> np.ndarray:
        """Candidate coordinates as a (K, 2) array of local meters."""
        return np.array([(p.x, p.y) for p in self.points], dtype=float)


def _cumulative_arclengths(xy: np.ndarray) -> np.ndarray:
    deltas = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
    return np.concatenate([[0.0], np.cumsum(deltas)])


def segment_arclength(segment: RoadSegment) -> float:
    """Total polyline length in meters, measured in the segment's local frame."""
    xy = project_points(segment.frame(), segment.polyline)
    return float(_cumulative_arclengths(xy)[-1])


def _point_at_arclength(xy: np.ndarray, cum: np.ndarray, s: float) -> LocalPoint:
    # cum is non-decreasing; interpolate within the edge containing s
    i = int(np.searchsorted(cum, s, side="right")) - 1
    i = min(max(i, 0), len(cum) - 2)
    length = cum[i + 1] - cum[i]
    t = 0.0 if length == 0.0 else (s - cum[i]) / length
    p = xy[i] + t * (xy[i + 1] - xy[i])
    return LocalPoint(float(p[0]), float(p[1]))


def _admissible_intervals(total: float, exclusion_centers: list[float]) -> list[tuple[float, float]]:
    """Sub-intervals of [0, total] at least 50 m in arclength from every center."""
    intervals = [(0.0, total)]
    for c in exclusion_centers:
        lo, hi = c - INTERSECTION_CLEARANCE_M, c + INTERSECTION_CLEARANCE_M
        rebuilt: list[tuple[float, float]] = []
        for a, b in intervals:
            # keep [a, min(b, lo)] and [max(a, hi), b]; the clearance itself is allowed
            if lo >= a:
                rebuilt.append((a, min(b, lo)))
            if hi <= b:
                rebuilt.append((max(a, hi), b))
        intervals = [(a, b) for a, b in rebuilt if b >= a]
    merged: list[tuple[float, float]] = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
        else:
            merged.append((a, b))
    return merged


def sample_candidates(segment: RoadSegment) -> CandidateSet:
    """Sample candidate spot locations along ``segment``.

    Within each admissible stretch (after removing the 50 m windows around
    flagged intersections) the walk restarts at the stretch's first arclength
    and places candidates at exact multiples of the spot spacing.  Interval
    endpoints are themselves admissible: a candidate exactly 50 m from an
    intersection is kept.

    Raises :class:`EmptyCandidateError` if no admissible stretch can hold a
    single candidate pair.
    """
    frame = segment.frame()
    xy = project_points(frame, segment.polyline)
    cum = _cumulative_arclengths(xy)
    total = float(cum[-1])
    spacing = segment.spot_type.spacing

    centers = sorted(float(cum[i]) for i in segment.intersection_indices)
    intervals = _admissible_intervals(total, centers)
    usable = sum(b - a for a, b in intervals)
    if not intervals or usable < spacing:
        raise EmptyCandidateError(segment.id, usable)

    arcs: list[float] = []
    for a, b in intervals:
        # guard keeps the last step admissible when (b - a) is a hair under a
        # multiple of the spacing; overshoot is bounded by 6e-10 m
        n_steps = int(math.floor((b - a) / spacing + 1e-10))
        arcs.extend(a + k * spacing for k in range(n_steps + 1))
    points = tuple(_point_at_arclength(xy, cum, s) for s in arcs)
    return CandidateSet(
        segment_id=segment.id,
        points=points,
        arclengths=tuple(arcs),
        frame=frame,
    )
