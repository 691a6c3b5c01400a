"""Exception hierarchy shared across the observatory packages."""


class OlxError(Exception):
    """Base class for all observatory errors."""


class RegistryError(OlxError):
    """Unknown platform or malformed registry data."""


class IngestError(OlxError):
    """Fetch or persistence failure during a crawl.

    ``retryable`` distinguishes transient network trouble (retry next
    cycle, watermark untouched) from corruption that needs operator
    attention.
    """

    def __init__(self, message: str, platform_id: str, retryable: bool = True):
        super().__init__(message)
        self.platform_id = platform_id
        self.retryable = retryable


class StoreError(OlxError):
    """Persistence failure; counts must not silently double or vanish."""


class IndexComputationError(OlxError):
    """Base for index-construction failures."""


class DegenerateBaseError(IndexComputationError):
    """Moving average at the base date is zero; index undefined."""


class LinkWindowError(IndexComputationError):
    """New platforms lack a full pre-link history window."""


class DegenerateLinkError(IndexComputationError):
    """New-basket moving average at the link date is zero."""


class SeasonalSpanError(IndexComputationError):
    """Series too short for a seasonal profile (needs 24 complete months)."""


class ScenarioError(OlxError):
    """Invalid simulator scenario configuration."""


class SnapshotError(StoreError):
    """Snapshot publish/read failure."""
