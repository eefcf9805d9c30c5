"""Per-user age/gender aggregation from face observations.

Face attributes come from a pluggable provider (the shipped one replays a
deterministic JSONL fixture; no network calls anywhere).  When a photo
holds several faces the largest bounding box is taken as the photo
taker's ("closest to the camera", with area as the proxy); ages are
averaged across a user's face-bearing selfie posts, shrinking the age
standard error by 1/sqrt(n).
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .corpus.model import Post, UserRecord
from .temporal import HOUR_BINS, hour_of

BRACKETS = ("<15", "15-20", "20-30", "30-40", ">40")
_BRACKET_EDGES = (15.0, 20.0, 30.0, 40.0)
DEFAULT_PROVIDER_SIGMA = 5.0


class NoFaceError(ValueError):
    pass


@dataclass(frozen=True)
class FaceObservation:
    media_id: str
    face_rect: tuple[float, float, float, float]  # x, y, width, height
    age_estimate: float
    gender: str  # "female" | "male"
    provider_sigma: float = DEFAULT_PROVIDER_SIGMA

    def __post_init__(self):
        x, y, w, h = self.face_rect
        if w <= 0 or h <= 0:
            raise ValueError(f"degenerate face rect on {self.media_id}")
        if self.age_estimate < 0:
            raise ValueError(f"negative age on {self.media_id}")
        if self.gender not in ("female", "male"):
            raise ValueError(f"unknown gender label: {self.gender!r}")

    @property
    def area(self) -> float:
        return self.face_rect[2] * self.face_rect[3]


@dataclass(frozen=True)
class UserDemographics:
    user_id: str
    n_faces: int
    mean_age: float
    age_stderr: float
    gender: str  # "female" | "male" | "undetermined"
    bracket: str


class FaceAttributeProvider(Protocol):
    sigma: float

    def faces(self, media_ref: str) -> list[FaceObservation]: ...


class StubFaceProvider:
    """Deterministic provider backed by a JSONL fixture:
    {"media_ref": ..., "faces": [{"rect": [x,y,w,h], "age": ..., "gender": ...}]}
    """

    def __init__(self, fixture: str | Path | Iterable[dict], sigma: float = DEFAULT_PROVIDER_SIGMA):
        self.sigma = sigma
        self._by_ref: dict[str, list[dict]] = {}
        if isinstance(fixture, (str, Path)):
            records = []
            with open(fixture, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        records.append(json.loads(line))
        else:
            records = list(fixture)
        for rec in records:
            self._by_ref.setdefault(rec["media_ref"], []).extend(rec["faces"])

    def faces(self, media_ref: str) -> list[FaceObservation]:
        return [
            FaceObservation(
                media_id=media_ref,
                face_rect=tuple(float(v) for v in doc["rect"]),
                age_estimate=float(doc["age"]),
                gender=doc["gender"],
                provider_sigma=self.sigma,
            )
            for doc in self._by_ref.get(media_ref, [])
        ]


def primary_face(observations: Sequence[FaceObservation]) -> FaceObservation:
    """Largest face wins (area proxy for camera distance); ties go to the
    leftmost x, then topmost y."""
    if not observations:
        raise NoFaceError("no faces detected")
    return min(observations, key=lambda o: (-o.area, o.face_rect[0], o.face_rect[1]))


def age_bracket(mean_age: float) -> str:
    for edge, label in zip(_BRACKET_EDGES, BRACKETS):
        if mean_age < edge:
            return label
    return BRACKETS[-1]


def aggregate_user(
    user: UserRecord,
    selfie_posts: Sequence[Post],
    provider: FaceAttributeProvider,
) -> UserDemographics | None:
    """Fold a user's selfie posts into one demographic record.

    Posts without a media reference or without detected faces are skipped;
    a user with zero face-bearing posts yields None (excluded upstream
    with a counted reason).  Gender is the strict majority of primary
    faces; ties come back "undetermined".
    """
    primaries: list[FaceObservation] = []
    for post in selfie_posts:
        if post.media_ref is None:
            continue
        observations = provider.faces(post.media_ref)
        if observations:
            primaries.append(primary_face(observations))
    if not primaries:
        return None
    n = len(primaries)
    mean_age = sum(o.age_estimate for o in primaries) / n
    stderr = provider.sigma / math.sqrt(n)
    tally = Counter(o.gender for o in primaries)
    female, male = tally.get("female", 0), tally.get("male", 0)
    if female > male:
        gender = "female"
    elif male > female:
        gender = "male"
    else:
        gender = "undetermined"
    return UserDemographics(
        user_id=user.user_id,
        n_faces=n,
        mean_age=mean_age,
        age_stderr=stderr,
        gender=gender,
        bracket=age_bracket(mean_age),
    )


def cohort_report(
    demographics: Sequence[UserDemographics],
    drug_posts_by_user: dict[str, list[Post]] | None = None,
    excluded_no_faces: int = 0,
) -> dict:
    """Cohort-level distributions: gender counts, age histograms at 1-year
    and bracket granularity, and the bracket-stacked hour-of-day spread of
    the cohort's drug posts."""
    gender_counts = {"female": 0, "male": 0, "undetermined": 0}
    age_years: dict[int, int] = {}
    bracket_counts = {b: 0 for b in BRACKETS}
    for demo in demographics:
        gender_counts[demo.gender] += 1
        year = int(demo.mean_age)
        age_years[year] = age_years.get(year, 0) + 1
        bracket_counts[demo.bracket] += 1

    stacked = {b: [0] * HOUR_BINS for b in BRACKETS}
    if drug_posts_by_user:
        for demo in demographics:
            for post in drug_posts_by_user.get(demo.user_id, []):
                stacked[demo.bracket][hour_of(post.created_at)] += 1

    return {
        "n_users": len(demographics),
        "excluded_no_faces": excluded_no_faces,
        "gender_counts": gender_counts,
        "age_histogram_years": {str(k): v for k, v in sorted(age_years.items())},
        "bracket_counts": bracket_counts,
        "stacked_hourly_by_bracket": stacked,
    }
