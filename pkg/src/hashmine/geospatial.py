"""Circle-cover search planning, hotspot clustering and venue categorization.

The location search model is a set of (time window, radius, center)
circle queries jointly covering a metropolitan region.  Planning uses a
hexagonal lattice (deterministic and provably covering, unlike drawing
circles by hand); downstream, overlapping circles are deduplicated by
media id and geotagged drug posts are density-clustered into hotspots.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus.model import Post

EARTH_RADIUS_M = 6_371_000.0
M_PER_DEG_LAT = math.pi * EARTH_RADIUS_M / 180.0
MAX_RADIUS_M = 5_000.0
DEFAULT_EPS_M = 150.0
DEFAULT_MIN_POINTS = 5


class GeoError(ValueError):
    pass


def haversine(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in meters on the R=6,371,000 m sphere."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


@dataclass(frozen=True)
class CircleQuery:
    min_time: int
    max_time: int
    radius_m: float
    lat: float
    lon: float

    def __post_init__(self):
        if self.min_time >= self.max_time:
            raise GeoError(f"time window must be ordered: {self.min_time} >= {self.max_time}")
        if not 0 < self.radius_m <= MAX_RADIUS_M:
            raise GeoError(f"radius must be in (0, {MAX_RADIUS_M}] m: {self.radius_m}")
        if not (-90 <= self.lat <= 90) or not (-180 <= self.lon <= 180):
            raise GeoError(f"bad coordinates: ({self.lat}, {self.lon})")

    def to_doc(self) -> dict:
        return {
            "min_time": self.min_time,
            "max_time": self.max_time,
            "radius_m": self.radius_m,
            "lat": self.lat,
            "lon": self.lon,
        }


def parse_circle(params: Sequence[float]) -> CircleQuery:
    """Parse [time, time, radius, lat, lon]; the two times may come in either
    order (upstream examples list the later one first) and are normalized."""
    if len(params) != 5:
        raise GeoError(f"circle query needs 5 parameters, got {len(params)}")
    t1, t2, radius, lat, lon = params
    lo, hi = sorted((int(t1), int(t2)))
    return CircleQuery(min_time=lo, max_time=hi, radius_m=float(radius), lat=float(lat), lon=float(lon))


@dataclass(frozen=True)
class CoveragePlan:
    region: tuple[float, float, float, float]  # lat_min, lon_min, lat_max, lon_max
    radius_m: float
    circles: tuple[CircleQuery, ...]

    @property
    def estimated_requests(self) -> int:
        return len(self.circles)

    def to_doc(self) -> dict:
        return {
            "region": list(self.region),
            "radius_m": self.radius_m,
            "n_circles": len(self.circles),
            "estimated_requests": self.estimated_requests,
            "circles": [c.to_doc() for c in self.circles],
        }


def plan_cover(
    region: tuple[float, float, float, float],
    radius_m: float,
    window: tuple[int, int],
    spacing_factor: float = 0.99,
) -> CoveragePlan:
    """Hexagonal-lattice cover of a bounding box with disks of radius_m.

    Centers sit radius*sqrt(3) apart along rows with row pitch radius*1.5
    and alternate rows offset half a column (the optimal covering
    lattice); spacing_factor shrinks the pitch slightly to absorb the
    planar approximation.  The lattice extends one step past each edge so
    boundary points are genuinely covered.
    """
    lat_min, lon_min, lat_max, lon_max = region
    if lat_min > lat_max or lon_min > lon_max:
        raise GeoError("region corners out of order")
    if lat_max - lat_min >= 5.0:
        raise GeoError("region spans 5+ degrees of latitude; not metropolitan scale")
    if not 0 < radius_m <= MAX_RADIUS_M:
        raise GeoError(f"radius must be in (0, {MAX_RADIUS_M}] m")
    t_lo, t_hi = sorted((int(window[0]), int(window[1])))
    if t_lo == t_hi:
        raise GeoError("degenerate time window")

    if lat_min == lat_max and lon_min == lon_max:
        circle = CircleQuery(t_lo, t_hi, radius_m, lat_min, lon_min)
        return CoveragePlan(region=region, radius_m=radius_m, circles=(circle,))

    worst_lat = max(abs(lat_min), abs(lat_max))
    cos_lat = max(0.05, math.cos(math.radians(worst_lat)))
    col_deg = radius_m * math.sqrt(3.0) * spacing_factor / (M_PER_DEG_LAT * cos_lat)
    row_deg = radius_m * 1.5 * spacing_factor / M_PER_DEG_LAT

    circles = []
    row = 0
    lat = lat_min
    while lat < lat_max + row_deg:
        offset = (col_deg / 2.0) if row % 2 else 0.0
        lon = lon_min - offset
        while lon < lon_max + col_deg:
            circles.append(
                CircleQuery(t_lo, t_hi, radius_m, max(-90.0, min(90.0, lat)), lon)
            )
            lon += col_deg
        row += 1
        lat = lat_min + row * row_deg
    return CoveragePlan(region=region, radius_m=radius_m, circles=tuple(circles))


def write_plan(plan: CoveragePlan, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([c.to_doc() for c in plan.circles], fh, indent=2)


def dedup(posts: Iterable[Post]) -> tuple[list[Post], dict]:
    """Keep-first by media id across overlapping circle results."""
    seen: set[str] = set()
    unique: list[Post] = []
    read = 0
    for post in posts:
        read += 1
        if post.media_id in seen:
            continue
        seen.add(post.media_id)
        unique.append(post)
    dropped = read - len(unique)
    report = {
        "read": read,
        "kept": len(unique),
        "dropped": dropped,
        "overlap_ratio": (dropped / read) if read else 0.0,
    }
    return unique, report


@dataclass(frozen=True)
class Cluster:
    members: tuple[str, ...]  # media ids, sorted
    centroid: tuple[float, float]
    venue_category: str | None = None


def cluster_hotspots(
    posts: Sequence[Post],
    eps_m: float = DEFAULT_EPS_M,
    min_points: int = DEFAULT_MIN_POINTS,
) -> list[Cluster]:
    """Density clustering of geotagged posts (DBSCAN semantics).

    Neighbors are pairs within eps_m by haversine; core points have at
    least min_points neighbors (self included); clusters are connected
    components of core points plus their border points.  Border points
    adjacent to several clusters join the one owning their smallest-id
    core neighbor, making the output independent of input order.
    """
    pts = sorted(posts, key=lambda p: p.media_id)
    for post in pts:
        if post.geo is None:
            raise GeoError(f"post {post.media_id} has no geotag")
    n = len(pts)
    if n == 0:
        return []

    lat = np.radians(np.array([p.geo.lat for p in pts]))
    lon = np.radians(np.array([p.geo.lon for p in pts]))
    dlat = lat[:, None] - lat[None, :]
    dlon = lon[:, None] - lon[None, :]
    h = np.sin(dlat / 2) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2) ** 2
    dist = 2 * EARTH_RADIUS_M * np.arcsin(np.minimum(1.0, np.sqrt(h)))
    adjacency = dist <= eps_m

    neighbor_counts = adjacency.sum(axis=1)
    core = neighbor_counts >= min_points

    labels = [-1] * n
    label_count = 0
    for i in range(n):
        if not core[i] or labels[i] != -1:
            continue
        labels[i] = label_count
        stack = [i]
        while stack:
            j = stack.pop()
            for k in np.flatnonzero(adjacency[j]):
                if core[k] and labels[k] == -1:
                    labels[k] = label_count
                    stack.append(int(k))
        label_count += 1

    # border points attach to the cluster of their smallest-id core neighbor
    for i in range(n):
        if core[i] or labels[i] != -1:
            continue
        core_neighbors = [int(k) for k in np.flatnonzero(adjacency[i]) if core[k]]
        if core_neighbors:
            labels[i] = labels[min(core_neighbors)]

    clusters = []
    for c in range(label_count):
        idx = [i for i in range(n) if labels[i] == c]
        members = tuple(pts[i].media_id for i in idx)
        centroid = (
            float(np.mean([pts[i].geo.lat for i in idx])),
            float(np.mean([pts[i].geo.lon for i in idx])),
        )
        clusters.append(Cluster(members=members, centroid=centroid))
    clusters.sort(key=lambda cl: cl.members[0])
    return clusters


class Geocoder(Protocol):
    def category_for(self, lat: float, lon: float) -> str | None: ...


class StubGeocoder:
    """First-match-wins rule lookup from a JSONL fixture of
    {"lat", "lon", "radius_m", "category"} circles."""

    def __init__(self, rules: str | Path | Iterable[dict]):
        if isinstance(rules, (str, Path)):
            loaded = []
            with open(rules, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        loaded.append(json.loads(line))
            self._rules = loaded
        else:
            self._rules = list(rules)

    def category_for(self, lat: float, lon: float) -> str | None:
        for rule in self._rules:
            if haversine((lat, lon), (rule["lat"], rule["lon"])) <= rule["radius_m"]:
                return rule["category"]
        return None


VENUE_CATEGORIES = ("residential", "club", "restaurant", "other")


def categorize_venues(
    clusters: Sequence[Cluster], geocoder: Geocoder
) -> tuple[list[Cluster], dict]:
    """Assign each cluster a venue category; misses count as "other"."""
    categorized = []
    counts = {c: 0 for c in VENUE_CATEGORIES}
    misses = 0
    for cluster in clusters:
        category = geocoder.category_for(*cluster.centroid)
        if category is None:
            category = "other"
            misses += 1
        elif category not in counts:
            category = "other"
        counts[category] += 1
        categorized.append(replace(cluster, venue_category=category))
    total = len(clusters)
    shares = {c: (100.0 * k / total if total else 0.0) for c, k in counts.items()}
    report = {
        "n_clusters": total,
        "counts": counts,
        "shares_percent": shares,
        "geocoder_misses": misses,
    }
    return categorized, report


def clusters_geojson(clusters: Sequence[Cluster]) -> dict:
    features = []
    for i, cluster in enumerate(clusters):
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [cluster.centroid[1], cluster.centroid[0]],
                },
                "properties": {
                    "cluster_id": i,
                    "size": len(cluster.members),
                    "venue_category": cluster.venue_category,
                    "members": list(cluster.members),
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}
