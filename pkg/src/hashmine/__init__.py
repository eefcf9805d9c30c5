"""hashmine: hashtag-driven drug-use pattern mining.

Pipeline pieces: a versioned term lexicon with human curation, corpus
ingestion and a deterministic synthetic generator, hashtag-rule
classification, Apriori itemset mining for slang discovery, temporal /
demographic / geospatial pattern reports, follower-network statistics,
and an HTTP service plus CLI tying the mining loop together.
"""

__version__ = "0.1.0"
