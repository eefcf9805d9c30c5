"""Run orchestration, persistence, HTTP API and CLI."""
from .runs import REPORT_KINDS, ReportBundle, Run, RunConfig, execute_run, popularity_report
from .store import Store, StoreError

__all__ = [
    "REPORT_KINDS",
    "ReportBundle",
    "Run",
    "RunConfig",
    "Store",
    "StoreError",
    "execute_run",
    "popularity_report",
]
