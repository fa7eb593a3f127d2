"""Trend tests on the whole distribution of annual temperatures."""

__version__ = "0.1.0"

from .distributions import CHARACTERISTICS, CharacteristicSeries, characteristics, quantile
from .ingest import AnnualSample, PanelSpec
from .regression import TrendResult, multi_trend_wald, ols_trend, spacing_test, trend_test
from .warming import acceleration_test, amplification_test, classify_typology, dominance_test

__all__ = [
    "AnnualSample", "CHARACTERISTICS", "CharacteristicSeries", "PanelSpec", "TrendResult",
    "acceleration_test", "amplification_test", "characteristics", "classify_typology",
    "dominance_test", "multi_trend_wald", "ols_trend", "quantile", "spacing_test", "trend_test",
]
