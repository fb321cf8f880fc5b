"""Coordinate types and the local metric frame the rest of the library computes in.

Solver math needs meters on both axes (rotations mix axes, so the axes must
share units).  Each road segment gets a small equirectangular frame anchored
at its centroid; within the ~2 km extent of a segment the distortion is
sub-centimeter, so no heavyweight geodesy dependency is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_M = 6378137.0
METERS_PER_DEG_LAT = math.pi * EARTH_RADIUS_M / 180.0

# Beyond this distance from the frame origin the flat-earth approximation is
# no longer trustworthy for our accuracy targets.
MAX_FRAME_RANGE_M = 10_000.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS-84 coordinate in degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class LocalPoint:
    """Meters east (x) and north (y) of a frame origin."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("local coordinates must be finite")


@dataclass(frozen=True)
class LocalFrame:
    """Equirectangular frame: degrees scale linearly to meters about ``origin``."""

    origin: GeoPoint
    meters_per_deg_lat: float
    meters_per_deg_lon: float


def make_frame(origin: GeoPoint) -> LocalFrame:
    """Build the local metric frame anchored at ``origin``.

    Rejects origins within 1 degree of the poles, where the longitude scale
    degenerates.
    """
    if abs(origin.lat) >= 89.0:
        raise ValueError(f"frame origin latitude {origin.lat} too close to a pole")
    return LocalFrame(
        origin=origin,
        meters_per_deg_lat=METERS_PER_DEG_LAT,
        meters_per_deg_lon=METERS_PER_DEG_LAT * math.cos(math.radians(origin.lat)),
    )


def to_local(frame: LocalFrame, p: GeoPoint) -> LocalPoint:
    """Project ``p`` into frame meters.  Rejects points beyond 10 km of the origin."""
    x = (p.lon - frame.origin.lon) * frame.meters_per_deg_lon
    y = (p.lat - frame.origin.lat) * frame.meters_per_deg_lat
    if math.hypot(x, y) > MAX_FRAME_RANGE_M:
        raise ValueError(
            f"point {p} is {math.hypot(x, y):.0f} m from the frame origin "
            f"(limit {MAX_FRAME_RANGE_M:.0f} m)"
        )
    return LocalPoint(x, y)


def to_geo(frame: LocalFrame, q: LocalPoint) -> GeoPoint:
    """Exact inverse of :func:`to_local`."""
    return GeoPoint(
        lat=frame.origin.lat + q.y / frame.meters_per_deg_lat,
        lon=frame.origin.lon + q.x / frame.meters_per_deg_lon,
    )


def project_points(frame: LocalFrame, points: list[GeoPoint] | tuple[GeoPoint, ...]) -> np.ndarray:
    """Project a sequence of GeoPoints to an (N, 2) array of local meters."""
    out = np.empty((len(points), 2), dtype=float)
    for i, p in enumerate(points):
        q = to_local(frame, p)
        out[i, 0] = q.x
        out[i, 1] = q.y
    return out


def unproject_points(frame: LocalFrame, xy: np.ndarray) -> list[GeoPoint]:
    """Inverse of :func:`project_points` for an (N, 2) array."""
    return [to_geo(frame, LocalPoint(float(x), float(y))) for x, y in np.asarray(xy, dtype=float)]


def centroid(points: list[GeoPoint] | tuple[GeoPoint, ...]) -> GeoPoint:
    """Vertex-average of a sequence of GeoPoints."""
    if not points:
        raise ValueError("cannot take the centroid of no points")
    return GeoPoint(
        lat=sum(p.lat for p in points) / len(points),
        lon=sum(p.lon for p in points) / len(points),
    )
