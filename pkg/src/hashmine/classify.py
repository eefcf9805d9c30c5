"""Hashtag decision rules: drug-post detection, class attribution and cohorts.

All functions are pure over immutable corpus + lexicon snapshots.  The
defaults encode the production rules: a post is drug-positive with at
least two matched terms, a confirmed user needs at least two selfie-tagged
posts, and the non-drug cohort requires a spotless history (a single
matched term anywhere disqualifies - deliberately asymmetric with the
two-term post rule).
"""
from __future__ import annotations

from dataclasses import dataclass

from .corpus.model import Corpus, Post, UserRecord
from .lexicon import Lexicon, Term, match_terms

DRUG_CLASSES = ("weed", "syrup", "pills")


@dataclass(frozen=True)
class ClassificationConfig:
    min_drug_tags: int = 2
    min_selfie_posts: int = 2
    nondrug_probe_tag: str = "instapic"

    def __post_init__(self):
        if self.min_drug_tags < 1 or self.min_selfie_posts < 1:
            raise ValueError("thresholds must be >= 1")


DEFAULT_CONFIG = ClassificationConfig()


@dataclass(frozen=True)
class ClassAttribution:
    media_id: str
    classes: frozenset[str]
    matched_terms: frozenset[Term]
    unattributed: bool  # drug-positive but no categorized class matched


def is_drug_post(
    post: Post, lexicon: Lexicon, config: ClassificationConfig = DEFAULT_CONFIG
) -> tuple[bool, set[Term]]:
    matched = match_terms(post.hashtags, lexicon)
    return len(matched) >= config.min_drug_tags, matched


def attribute_classes(
    post: Post, lexicon: Lexicon, config: ClassificationConfig = DEFAULT_CONFIG
) -> ClassAttribution:
    """Attribute drug classes from the categorized matched terms.

    A post may carry multiple classes; "general" terms match but carry no
    class, so a drug-positive post matching only general terms comes back
    with empty classes and the unattributed flag set.
    """
    positive, matched = is_drug_post(post, lexicon, config)
    classes = frozenset(t.category for t in matched if t.category in DRUG_CLASSES)
    return ClassAttribution(
        media_id=post.media_id,
        classes=classes if positive else frozenset(),
        matched_terms=frozenset(matched),
        unattributed=positive and not classes,
    )


def drug_posts(
    corpus: Corpus, lexicon: Lexicon, config: ClassificationConfig = DEFAULT_CONFIG
) -> list[Post]:
    return [p for p in corpus if is_drug_post(p, lexicon, config)[0]]


def extract_candidate_users(
    corpus: Corpus, lexicon: Lexicon, config: ClassificationConfig = DEFAULT_CONFIG
) -> list[UserRecord]:
    """One record per distinct user owning at least one drug-positive post."""
    by_user: dict[str, UserRecord] = {}
    for post in corpus:
        if not is_drug_post(post, lexicon, config)[0]:
            continue
        rec = by_user.get(post.user_id)
        if rec is None:
            rec = UserRecord(user_id=post.user_id, username=post.username)
            by_user[post.user_id] = rec
        rec.posts.append(post.media_id)
    return list(by_user.values())


def selfie_filter(
    users: list[UserRecord],
    corpus: Corpus,
    lexicon: Lexicon,
    config: ClassificationConfig = DEFAULT_CONFIG,
) -> list[UserRecord]:
    """Keep candidates with enough selfie-tagged posts for face analysis."""
    confirmed = []
    for user in users:
        selfie_count = sum(
            1
            for post in corpus.user_posts(user.user_id)
            if any(tag in lexicon.selfie_tags for tag in post.hashtags)
        )
        if selfie_count >= config.min_selfie_posts:
            confirmed.append(
                UserRecord(
                    user_id=user.user_id,
                    username=user.username,
                    posts=list(user.posts),
                    cohort="drug",
                    role=user.role,
                )
            )
    return confirmed


def build_nondrug_cohort(
    corpus: Corpus, lexicon: Lexicon, config: ClassificationConfig = DEFAULT_CONFIG
) -> list[UserRecord]:
    """Users reachable via the probe tag whose whole history matches nothing.

    One matched drug term anywhere is enough to disqualify (zero-match
    rule, not the two-term post rule).
    """
    cohort = []
    for user_id in corpus.user_ids():
        posts = corpus.user_posts(user_id)
        if not any(config.nondrug_probe_tag in p.hashtags for p in posts):
            continue
        if any(match_terms(p.hashtags, lexicon) for p in posts):
            continue
        cohort.append(
            UserRecord(
                user_id=user_id,
                username=corpus.username_of(user_id),
                posts=[p.media_id for p in posts],
                cohort="nondrug",
            )
        )
    return cohort
