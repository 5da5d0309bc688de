"""
Prometheus metrics definition for the LGCP duplicates toolkit.
"""

from prometheus_client import REGISTRY, CollectorRegistry, Counter, Histogram, write_to_textfile

# --- Estimation Metrics ---

FITS_TOTAL = Counter("lgcp_fits_total", "Total number of contrast fits", ["method", "status"])

FIT_DURATION_SECONDS = Histogram(
    "lgcp_fit_duration_seconds",
    "Time taken for one multi-start contrast fit",
    ["method"],
    buckets=[0.01, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
)

REMEDY_APPLICATIONS_TOTAL = Counter(
    "lgcp_remedy_applications_total",
    "Total number of duplicate remedies applied to a pattern",
    ["method"],
)

# --- Study Orchestration ---

REPLICATIONS_TOTAL = Counter(
    "lgcp_replications_total", "Total number of study replications", ["scenario", "status"]
)

REPLICATION_DURATION_SECONDS = Histogram(
    "lgcp_replication_duration_seconds",
    "Time taken for one replication across all fractions and methods",
    ["scenario"],
    buckets=[0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 60.0, 120.0],
)


def export_textfile(path: str, registry: CollectorRegistry = REGISTRY) -> None:
    """Write the current metric values in the Prometheus text format."""
    write_to_textfile(path, registry)
