"""Post / user data model and the JSONL corpus schema."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from ..tags import InvalidHashtagError, is_valid_term_text, normalize_hashtag

__all__ = [
    "Geo",
    "Post",
    "UserRecord",
    "Corpus",
    "IngestReport",
    "normalize_hashtag",
    "InvalidHashtagError",
    "post_from_json",
    "post_to_json",
]

COHORTS = ("unlabeled", "drug", "nondrug")
ROLES = ("unknown", "user", "dealer", "page")


@dataclass(frozen=True)
class Geo:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0) or not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinates out of range: ({self.lat}, {self.lon})")


@dataclass(frozen=True)
class Post:
    media_id: str
    user_id: str
    username: str
    created_at: int
    hashtags: tuple[str, ...]
    caption: str = ""
    geo: Geo | None = None
    media_ref: str | None = None

    def __post_init__(self):
        if not self.media_id:
            raise ValueError("media_id is required")
        if int(self.created_at) <= 0:
            raise ValueError(f"created_at must be positive: {self.created_at}")
        for tag in self.hashtags:
            if not is_valid_term_text(tag):
                raise InvalidHashtagError(f"bad hashtag on {self.media_id}: {tag!r}")


@dataclass
class UserRecord:
    user_id: str
    username: str
    posts: list[str] = field(default_factory=list)
    cohort: str = "unlabeled"
    role: str = "unknown"

    def to_doc(self) -> dict:
        return {
            "user_id": self.user_id,
            "username": self.username,
            "posts": list(self.posts),
            "cohort": self.cohort,
            "role": self.role,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "UserRecord":
        return cls(
            user_id=doc["user_id"],
            username=doc.get("username", ""),
            posts=list(doc.get("posts", [])),
            cohort=doc.get("cohort", "unlabeled"),
            role=doc.get("role", "unknown"),
        )


@dataclass(frozen=True)
class IngestReport:
    read: int = 0
    kept: int = 0
    dup_dropped: int = 0
    malformed: int = 0

    def to_doc(self) -> dict:
        return {
            "read": self.read,
            "kept": self.kept,
            "dup_dropped": self.dup_dropped,
            "malformed": self.malformed,
        }


class Corpus:
    """An immutable, deduplicated collection of posts.

    Posts keep ingestion order; lookups by media id and by author are
    precomputed.  Mutation after construction is not supported.
    """

    def __init__(self, posts: Iterable[Post]):
        self._posts: list[Post] = []
        self._by_id: dict[str, Post] = {}
        self._by_user: dict[str, list[Post]] = {}
        for post in posts:
            if post.media_id in self._by_id:
                raise ValueError(f"duplicate media_id in corpus: {post.media_id}")
            self._posts.append(post)
            self._by_id[post.media_id] = post
            self._by_user.setdefault(post.user_id, []).append(post)

    def __len__(self) -> int:
        return len(self._posts)

    def __iter__(self) -> Iterator[Post]:
        return iter(self._posts)

    @property
    def posts(self) -> list[Post]:
        return list(self._posts)

    def get(self, media_id: str) -> Post | None:
        return self._by_id.get(media_id)

    def user_posts(self, user_id: str) -> list[Post]:
        return list(self._by_user.get(user_id, []))

    def user_ids(self) -> list[str]:
        return list(self._by_user.keys())

    def username_of(self, user_id: str) -> str:
        posts = self._by_user.get(user_id)
        return posts[0].username if posts else ""


def post_to_json(post: Post) -> str:
    doc = {
        "media_id": post.media_id,
        "user_id": post.user_id,
        "username": post.username,
        "created_at": post.created_at,
        "hashtags": list(post.hashtags),
        "caption": post.caption,
    }
    if post.geo is not None:
        doc["geo"] = {"lat": post.geo.lat, "lon": post.geo.lon}
    if post.media_ref is not None:
        doc["media_ref"] = post.media_ref
    return json.dumps(doc)


def post_from_json(line: str) -> Post:
    doc = json.loads(line)
    geo_doc = doc.get("geo")
    geo = Geo(lat=float(geo_doc["lat"]), lon=float(geo_doc["lon"])) if geo_doc else None
    hashtags = tuple(normalize_hashtag(tag) for tag in doc["hashtags"])
    return Post(
        media_id=str(doc["media_id"]),
        user_id=str(doc["user_id"]),
        username=str(doc.get("username", "")),
        created_at=int(doc["created_at"]),
        hashtags=hashtags,
        caption=str(doc.get("caption", "")),
        geo=geo,
        media_ref=doc.get("media_ref"),
    )
