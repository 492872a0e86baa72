"""Multiple exact string matching with superimposed q-grams and a strided Shift-Or filter."""

from .alphabet import (
    AlphabetMap,
    Histogram,
    build_balanced_map,
    build_frequency_map,
    build_identity_map,
    build_lowbits_map,
    build_qgram_map,
)
from .core import Occurrence, PatternSet, ValidationError, ac_search, naive_search, validate
from .engine import VARIANTS, Matcher, search
from .qgram import ConfigError, GramConfig, encode_gram, encode_text, make_config
from .superimpose import SuperPattern, build_superpattern
from .tuner import TuningInput, tune

__version__ = "0.1.0"

__all__ = [
    "AlphabetMap",
    "ConfigError",
    "GramConfig",
    "Histogram",
    "Matcher",
    "Occurrence",
    "PatternSet",
    "SuperPattern",
    "TuningInput",
    "VARIANTS",
    "ValidationError",
    "ac_search",
    "build_balanced_map",
    "build_frequency_map",
    "build_identity_map",
    "build_lowbits_map",
    "build_qgram_map",
    "build_superpattern",
    "encode_gram",
    "encode_text",
    "make_config",
    "naive_search",
    "search",
    "tune",
    "validate",
]
