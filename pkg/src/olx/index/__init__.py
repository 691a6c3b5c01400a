"""Index engine: count cube, chained index series, shares, seasonality."""

from .cube import DailyCountCube, build_count_cube
from .seasonal import seasonal_profile
from .series import (
    DEFAULT_WINDOW_DAYS,
    ChainLinkEvent,
    GrowthStats,
    IndexSeries,
    annualized_growth,
    build_index,
    chain_link,
    growth_stats,
    moving_average,
)
from .shares import (
    ShareTable,
    build_worker_frame,
    demand_share_by_occupation,
    supply_share_by_country,
    top_category_by_country,
)

__all__ = [
    "DEFAULT_WINDOW_DAYS",
    "ChainLinkEvent",
    "DailyCountCube",
    "GrowthStats",
    "IndexSeries",
    "ShareTable",
    "annualized_growth",
    "build_count_cube",
    "build_index",
    "build_worker_frame",
    "chain_link",
    "demand_share_by_occupation",
    "growth_stats",
    "moving_average",
    "seasonal_profile",
    "supply_share_by_country",
    "top_category_by_country",
]
