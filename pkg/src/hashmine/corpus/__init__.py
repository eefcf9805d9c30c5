"""Post/user data model, JSONL ingestion, paged sources and the synthetic generator."""
from .ingest import corpus_lines, ingest, write_corpus
from .model import (
    Corpus,
    Geo,
    IngestReport,
    InvalidHashtagError,
    Post,
    UserRecord,
    normalize_hashtag,
    post_from_json,
    post_to_json,
)
from .source import (
    Clock,
    ListAdapter,
    RequestBudget,
    SimClock,
    SourceAdapter,
    SourceError,
    SourcePage,
    SystemClock,
    fetch_all,
    pages_from_posts,
)
from .synth import (
    GeneratorSpec,
    GeoClusterSpec,
    PlantedPage,
    PlantedSlang,
    SpecError,
    SynthResult,
    generate,
)

__all__ = [
    "Corpus", "Geo", "IngestReport", "InvalidHashtagError", "Post", "UserRecord",
    "normalize_hashtag", "post_from_json", "post_to_json",
    "ingest", "write_corpus", "corpus_lines",
    "Clock", "ListAdapter", "RequestBudget", "SimClock", "SourceAdapter",
    "SourceError", "SourcePage", "SystemClock", "fetch_all", "pages_from_posts",
    "GeneratorSpec", "GeoClusterSpec", "PlantedPage", "PlantedSlang", "SpecError",
    "SynthResult", "generate",
]
