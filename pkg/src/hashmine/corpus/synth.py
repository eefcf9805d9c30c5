"""Deterministic synthetic corpus generator with planted ground truth.

The real posts behind this pipeline are unobtainable, so every desk-scale
experiment runs on generated corpora with known structure: planted drug
users and classes, posting-hour peaks, selfie coverage, geo hotspots,
follow edges, face fixtures and (optionally) an unknown slang tag seeded
into drug posts for the curation feedback loop.

Everything is driven by one random.Random(seed): a fixed (spec, seed)
pair reproduces byte-identical output files.

The ground-truth sidecar is the generator's own bookkeeping of what it
planted (it counts the drug terms it inserted; it never calls the
classifier), which keeps it usable as an independent oracle.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..lexicon import DEFAULT_SELFIE_TAGS, Lexicon, load_packaged_seed
from .model import Geo, Post, post_to_json

DRUG_CLASSES = ("weed", "syrup", "pills")
M_PER_DEG_LAT = math.pi * 6_371_000.0 / 180.0

DEFAULT_DECOY_VOCAB = (
    "sunset", "beach", "foodie", "travel", "friends", "love", "instagood",
    "photooftheday", "happy", "cute", "fashion", "picoftheday", "summer",
    "art", "music", "nature", "fun", "style", "family", "coffee", "gym",
    "fitness", "dog", "cat", "city", "night", "lake", "mountains", "books",
    "movie", "ocean", "flowers", "sky", "rain", "snow", "breakfast",
    "lunch", "dinner", "game", "hiking",
)

# 2015-01-01 .. 2016-01-01 GMT
DEFAULT_TIME_RANGE = (1420070400, 1451606400)


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class GeoClusterSpec:
    lat: float
    lon: float
    sigma_m: float = 50.0
    weight: float = 1.0
    category: str | None = None
    radius_m: float = 500.0  # geocoder rule radius


@dataclass(frozen=True)
class PlantedSlang:
    tag: str
    fraction: float  # share of drug-positive posts carrying the tag
    extra_posts: int = 0  # sub-threshold posts: one drug term + the tag


@dataclass(frozen=True)
class PlantedPage:
    page_id: str
    fraction: float  # share of drug users following it (nested prefixes)
    role: str = "page"


@dataclass(frozen=True)
class GeneratorSpec:
    n_drug_users: int = 50
    n_nondrug_users: int = 100
    posts_per_user: int | tuple[int, int] = 10
    class_weights: dict[str, float] = field(
        default_factory=lambda: {"weed": 0.5, "syrup": 0.25, "pills": 0.25}
    )
    hour_weights: dict[str, tuple[float, ...]] = field(default_factory=dict)
    weekday_weights: tuple[float, ...] = (1.0,) * 7
    drug_tags_per_post: int | tuple[int, int] = 2
    decoy_tags_per_post: tuple[int, int] = (1, 3)
    decoy_vocab: tuple[str, ...] = DEFAULT_DECOY_VOCAB
    selfie_user_fraction: float = 1.0
    selfie_post_fraction: float = 0.3
    geo_fraction: float = 0.0
    geo_clusters: tuple[GeoClusterSpec, ...] = ()
    out_region: tuple[float, float] | None = None
    out_region_user_fraction: float = 0.0
    near_miss_fraction: float = 0.0
    planted_slang: tuple[PlantedSlang, ...] = ()
    planted_duplicates: int = 0
    time_range: tuple[int, int] = DEFAULT_TIME_RANGE
    probe_tag: str = "instapic"
    planted_pages: tuple[PlantedPage, ...] = ()
    user_follow_count: int = 0
    nondrug_follow_count: int = 0
    dealer_fraction: float = 0.0
    female_fraction: float = 0.5
    age_bracket_weights: dict[str, float] = field(
        default_factory=lambda: {"15-20": 0.2, "20-30": 0.4, "30-40": 0.4}
    )
    faces_per_selfie: int = 1
    label_min_drug_tags: int = 2

    def validate(self, lexicon: Lexicon) -> None:
        total = sum(self.class_weights.values())
        if abs(total - 1.0) > 1e-9:
            raise SpecError(f"class weights must sum to 1 (got {total!r})")
        for cls in self.class_weights:
            if cls not in DRUG_CLASSES:
                raise SpecError(f"unknown drug class: {cls}")
        if len(self.weekday_weights) != 7:
            raise SpecError("weekday_weights needs 7 entries")
        for key, weights in self.hour_weights.items():
            if len(weights) != 24:
                raise SpecError(f"hour weights for {key!r} need 24 bins")
            if min(weights) < 0 or sum(weights) <= 0:
                raise SpecError(f"hour weights for {key!r} must be nonnegative, sum > 0")
        for frac_name in (
            "selfie_user_fraction", "selfie_post_fraction", "geo_fraction",
            "out_region_user_fraction", "near_miss_fraction", "dealer_fraction",
            "female_fraction",
        ):
            value = getattr(self, frac_name)
            if not 0.0 <= value <= 1.0:
                raise SpecError(f"{frac_name} must be in [0, 1]: {value}")
        start, end = self.time_range
        if end - start < 7 * 86400:
            raise SpecError("time_range must span at least one week")
        reserved = set(self.decoy_vocab) | {self.probe_tag}
        reserved.update(s.tag for s in self.planted_slang)
        housed = reserved & set(lexicon.terms)
        if housed:
            raise SpecError(f"decoy/slang tags collide with lexicon terms: {sorted(housed)}")
        if self.out_region_user_fraction > 0 and self.out_region is None:
            raise SpecError("out_region_user_fraction set without out_region")

    @classmethod
    def from_doc(cls, doc: dict) -> "GeneratorSpec":
        kwargs = dict(doc)
        if "posts_per_user" in kwargs and isinstance(kwargs["posts_per_user"], list):
            kwargs["posts_per_user"] = tuple(kwargs["posts_per_user"])
        if "drug_tags_per_post" in kwargs and isinstance(kwargs["drug_tags_per_post"], list):
            kwargs["drug_tags_per_post"] = tuple(kwargs["drug_tags_per_post"])
        for tup_key in ("decoy_tags_per_post", "weekday_weights", "time_range", "decoy_vocab"):
            if tup_key in kwargs:
                kwargs[tup_key] = tuple(kwargs[tup_key])
        if "hour_weights" in kwargs:
            kwargs["hour_weights"] = {
                k: tuple(v) for k, v in kwargs["hour_weights"].items()
            }
        if "geo_clusters" in kwargs:
            kwargs["geo_clusters"] = tuple(
                GeoClusterSpec(**c) for c in kwargs["geo_clusters"]
            )
        if "out_region" in kwargs and kwargs["out_region"] is not None:
            kwargs["out_region"] = tuple(kwargs["out_region"])
        if "planted_slang" in kwargs:
            kwargs["planted_slang"] = tuple(PlantedSlang(**s) for s in kwargs["planted_slang"])
        if "planted_pages" in kwargs:
            kwargs["planted_pages"] = tuple(PlantedPage(**p) for p in kwargs["planted_pages"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "GeneratorSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_doc(json.load(fh))


@dataclass
class SynthResult:
    documents: list[str]  # corpus JSONL lines, planted duplicates included
    sidecar: list[dict]  # {media_id, is_drug, class, cohort}
    follows: list[tuple[str, str]]
    node_roles: list[dict]  # {id, role, cohort}
    faces: list[dict]  # {media_ref, faces: [{rect, age, gender}]}
    geocoder_rules: list[dict]
    summary: dict

    def write(self, out_dir: str | Path) -> dict[str, str]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "corpus": out / "corpus.jsonl",
            "sidecar": out / "sidecar.jsonl",
            "follows": out / "follows.csv",
            "nodes": out / "nodes.jsonl",
            "faces": out / "faces.jsonl",
            "geocoder": out / "geocoder.jsonl",
            "summary": out / "summary.json",
        }
        paths["corpus"].write_text("\n".join(self.documents) + "\n", encoding="utf-8")
        with open(paths["sidecar"], "w", encoding="utf-8") as fh:
            for rec in self.sidecar:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        with open(paths["follows"], "w", encoding="utf-8") as fh:
            for follower, followed in self.follows:
                fh.write(f"{follower},{followed}\n")
        with open(paths["nodes"], "w", encoding="utf-8") as fh:
            for rec in self.node_roles:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        with open(paths["faces"], "w", encoding="utf-8") as fh:
            for rec in self.faces:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        with open(paths["geocoder"], "w", encoding="utf-8") as fh:
            for rec in self.geocoder_rules:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        paths["summary"].write_text(
            json.dumps(self.summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return {k: str(v) for k, v in paths.items()}


_BRACKET_RANGES = {
    "<15": (10.0, 15.0),
    "15-20": (15.0, 20.0),
    "20-30": (20.0, 30.0),
    "30-40": (30.0, 40.0),
    ">40": (40.0, 55.0),
}


def _count(n: int, fraction: float) -> int:
    return int(round(fraction * n))


def _draw(rng: random.Random, value: int | tuple[int, int]) -> int:
    if isinstance(value, tuple):
        return rng.randint(value[0], value[1])
    return value


class _TimeSampler:
    def __init__(self, spec: GeneratorSpec):
        start, end = spec.time_range
        self.start = start
        n_days = (end - start) // 86400
        # weekday of day index d: unix epoch day 0 was a Thursday (Monday=0 -> 3)
        first = (start // 86400 + 3) % 7
        self.by_weekday: list[list[int]] = [[] for _ in range(7)]
        for d in range(int(n_days)):
            self.by_weekday[(first + d) % 7].append(d)
        self.weekday_weights = spec.weekday_weights
        self.hour_weights = spec.hour_weights

    def sample(self, rng: random.Random, klass: str) -> int:
        weekday = rng.choices(range(7), weights=self.weekday_weights)[0]
        day = self.by_weekday[weekday][rng.randrange(len(self.by_weekday[weekday]))]
        hours = self.hour_weights.get(klass)
        hour = rng.choices(range(24), weights=hours)[0] if hours else rng.randrange(24)
        return self.start + day * 86400 + hour * 3600 + rng.randrange(60) * 60 + rng.randrange(60)


def _jitter(rng: random.Random, lat: float, lon: float, sigma_m: float) -> Geo:
    dlat = rng.gauss(0.0, sigma_m) / M_PER_DEG_LAT
    dlon = rng.gauss(0.0, sigma_m) / (M_PER_DEG_LAT * max(0.05, math.cos(math.radians(lat))))
    return Geo(lat=lat + dlat, lon=lon + dlon)


def generate(spec: GeneratorSpec, seed: int, lexicon: Lexicon | None = None) -> SynthResult:
    lexicon = lexicon or load_packaged_seed()
    spec.validate(lexicon)
    rng = random.Random(seed)
    times = _TimeSampler(spec)

    class_vocab = {cls: [] for cls in DRUG_CLASSES}
    for term in sorted(lexicon.terms.values(), key=lambda t: t.text):
        if term.active and term.category in class_vocab:
            class_vocab[term.category].append(term.text)
    for cls, vocab in class_vocab.items():
        need = spec.drug_tags_per_post if isinstance(spec.drug_tags_per_post, int) else spec.drug_tags_per_post[1]
        if len(vocab) < need:
            raise SpecError(f"not enough categorized {cls} terms for drug_tags_per_post")

    classes = sorted(spec.class_weights)
    class_w = [spec.class_weights[c] for c in classes]
    selfie_tags = sorted(DEFAULT_SELFIE_TAGS)
    brackets = sorted(spec.age_bracket_weights)
    bracket_w = [spec.age_bracket_weights[b] for b in brackets]

    n_selfie_users = _count(spec.n_drug_users, spec.selfie_user_fraction)
    n_out_users = _count(spec.n_drug_users, spec.out_region_user_fraction)
    n_female = _count(spec.n_drug_users, spec.female_fraction)
    n_dealers = _count(spec.n_drug_users, spec.dealer_fraction)
    n_near_miss = _count(spec.n_nondrug_users, spec.near_miss_fraction)

    posts: list[Post] = []
    sidecar: list[dict] = []
    faces: list[dict] = []
    node_roles: list[dict] = []
    drug_positive_ids: list[str] = []
    drug_user_ids: list[str] = []
    media_counter = 0

    def new_media_id() -> str:
        nonlocal media_counter
        media_counter += 1
        return f"m{media_counter:07d}"

    for u in range(spec.n_drug_users):
        uid = f"du{u:05d}"
        drug_user_ids.append(uid)
        username = f"druguser{u:05d}"
        role = "dealer" if u < n_dealers else "user"
        node_roles.append({"id": uid, "role": role, "cohort": "drug"})
        gender = "female" if u < n_female else "male"
        bracket = rng.choices(brackets, weights=bracket_w)[0]
        lo, hi = _BRACKET_RANGES[bracket]
        age = round(rng.uniform(lo, hi - 0.01), 1)

        n_posts = _draw(rng, spec.posts_per_user)
        if u < n_selfie_users:
            n_selfie_posts = max(2, int(math.ceil(spec.selfie_post_fraction * n_posts)))
            n_selfie_posts = min(n_selfie_posts, n_posts)
        else:
            n_selfie_posts = u % 2  # always below the two-post demographic bar
        out_region_user = u >= spec.n_drug_users - n_out_users

        for p in range(n_posts):
            klass = rng.choices(classes, weights=class_w)[0]
            k_drug = _draw(rng, spec.drug_tags_per_post)
            tags = rng.sample(class_vocab[klass], k_drug)
            tags += rng.sample(spec.decoy_vocab, rng.randint(*spec.decoy_tags_per_post))
            media_id = new_media_id()
            media_ref = f"img_{media_id}"
            selfie_post = p < n_selfie_posts
            if selfie_post:
                tags.append(rng.choice(selfie_tags))
            geo = None
            if spec.geo_fraction > 0 and rng.random() < spec.geo_fraction:
                if out_region_user and spec.out_region is not None:
                    geo = _jitter(rng, spec.out_region[0], spec.out_region[1], 50.0)
                elif spec.geo_clusters:
                    cluster = rng.choices(
                        spec.geo_clusters, weights=[c.weight for c in spec.geo_clusters]
                    )[0]
                    geo = _jitter(rng, cluster.lat, cluster.lon, cluster.sigma_m)
            is_drug = k_drug >= spec.label_min_drug_tags
            posts.append(
                Post(
                    media_id=media_id,
                    user_id=uid,
                    username=username,
                    created_at=times.sample(rng, klass),
                    hashtags=tuple(tags),
                    caption=f"synthetic post {media_id}",
                    geo=geo,
                    media_ref=media_ref,
                )
            )
            sidecar.append(
                {
                    "media_id": media_id,
                    "is_drug": is_drug,
                    "class": klass if is_drug else None,
                    "cohort": "drug",
                }
            )
            if is_drug:
                drug_positive_ids.append(media_id)
            if selfie_post:
                size = 80 + (u * 7 + p * 3) % 60
                faces.append(
                    {
                        "media_ref": media_ref,
                        "faces": [
                            {"rect": [10, 10, size, size], "age": age, "gender": gender}
                            for _ in range(spec.faces_per_selfie)
                        ],
                    }
                )

    # sub-threshold slang posts: one drug term + the unknown tag
    slang_extras: dict[str, int] = {}
    for slang in spec.planted_slang:
        for e in range(slang.extra_posts):
            uid = drug_user_ids[e % len(drug_user_ids)]
            media_id = new_media_id()
            tags = [rng.choice(class_vocab["weed"]), slang.tag]
            tags += rng.sample(spec.decoy_vocab, rng.randint(*spec.decoy_tags_per_post))
            posts.append(
                Post(
                    media_id=media_id,
                    user_id=uid,
                    username=f"druguser{int(uid[2:]):05d}",
                    created_at=times.sample(rng, "weed"),
                    hashtags=tuple(tags),
                    caption=f"synthetic post {media_id}",
                    media_ref=f"img_{media_id}",
                )
            )
            sidecar.append(
                {"media_id": media_id, "is_drug": False, "class": None, "cohort": "drug"}
            )
        slang_extras[slang.tag] = slang.extra_posts

    for u in range(spec.n_nondrug_users):
        uid = f"nu{u:05d}"
        username = f"cleanuser{u:05d}"
        near_miss = u < n_near_miss
        node_roles.append(
            {"id": uid, "role": "user", "cohort": "near_miss" if near_miss else "nondrug"}
        )
        n_posts = _draw(rng, spec.posts_per_user)
        for p in range(n_posts):
            tags = rng.sample(spec.decoy_vocab, rng.randint(*spec.decoy_tags_per_post))
            if p == 0:
                tags.append(spec.probe_tag)
            if near_miss and p == 0:
                tags.append(rng.choice(class_vocab["weed"]))
            media_id = new_media_id()
            posts.append(
                Post(
                    media_id=media_id,
                    user_id=uid,
                    username=username,
                    created_at=times.sample(rng, "nondrug"),
                    hashtags=tuple(tags),
                    caption=f"synthetic post {media_id}",
                    media_ref=f"img_{media_id}",
                )
            )
            sidecar.append(
                {"media_id": media_id, "is_drug": False, "class": None, "cohort": "nondrug"}
            )

    # planted slang co-occurrence on a fixed share of drug-positive posts
    by_id = {post.media_id: i for i, post in enumerate(posts)}
    for slang in spec.planted_slang:
        k = _count(len(drug_positive_ids), slang.fraction)
        chosen = rng.sample(drug_positive_ids, k)
        for media_id in chosen:
            i = by_id[media_id]
            post = posts[i]
            posts[i] = Post(
                media_id=post.media_id,
                user_id=post.user_id,
                username=post.username,
                created_at=post.created_at,
                hashtags=post.hashtags + (slang.tag,),
                caption=post.caption,
                geo=post.geo,
                media_ref=post.media_ref,
            )

    # follow edges: nested page audiences give exact supports and
    # confidence-1 rules between smaller and larger pages
    follows: list[tuple[str, str]] = []
    for page in spec.planted_pages:
        node_roles.append({"id": page.page_id, "role": page.role, "cohort": "unlabeled"})
        k = _count(spec.n_drug_users, page.fraction)
        for uid in drug_user_ids[:k]:
            follows.append((uid, page.page_id))
    if spec.user_follow_count > 0:
        for uid in drug_user_ids:
            others = [v for v in drug_user_ids if v != uid]
            for v in rng.sample(others, min(spec.user_follow_count, len(others))):
                follows.append((uid, v))
    if spec.nondrug_follow_count > 0:
        clean = [r["id"] for r in node_roles if r["cohort"] == "nondrug"]
        for uid in clean:
            others = [v for v in clean if v != uid]
            for v in rng.sample(others, min(spec.nondrug_follow_count, len(others))):
                follows.append((uid, v))

    geocoder_rules = [
        {
            "lat": c.lat,
            "lon": c.lon,
            "radius_m": c.radius_m,
            "category": c.category,
        }
        for c in spec.geo_clusters
        if c.category is not None
    ]

    documents = [post_to_json(post) for post in posts]
    for _ in range(spec.planted_duplicates):
        idx = rng.randrange(len(documents))
        pos = rng.randrange(idx + 1, len(documents) + 1)
        documents.insert(pos, documents[idx])

    summary = {
        "seed": seed,
        "n_documents": len(documents),
        "n_unique_posts": len(posts),
        "n_planted_duplicates": spec.planted_duplicates,
        "n_drug_positive": len(drug_positive_ids),
        "n_drug_users": spec.n_drug_users,
        "n_nondrug_users": spec.n_nondrug_users,
        "n_selfie_users": n_selfie_users,
        "n_near_miss_users": n_near_miss,
        "slang_extra_posts": slang_extras,
        "n_follow_edges": len(follows),
    }
    return SynthResult(
        documents=documents,
        sidecar=sidecar,
        follows=follows,
        node_roles=node_roles,
        faces=faces,
        geocoder_rules=geocoder_rules,
        summary=summary,
    )
