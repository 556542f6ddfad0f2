"""CrowdCorrect: automated + crowd-sourced curation of noisy social posts.

Pipeline stages: ingest -> extract -> autocorrect -> crowd tasks ->
apply -> export, with a classifier harness comparing raw against curated
text, a deterministic simulated crowd, and an HTTP service for real
workers.
"""

__version__ = "0.1.0"
