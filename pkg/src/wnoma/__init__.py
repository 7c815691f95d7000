"""Wavelet-based multicarrier NOMA simulation.

Submodules: ``modem`` (Gray QAM), ``wavelets`` (filter banks and DWT),
``ofdm`` (FFT back end), ``noma`` (superposition and SIC), ``channel``
(multi-antenna links, ZF precoding), ``metrics``, ``sim`` (experiments),
``config``, ``io``, ``presets`` and ``cli``.
"""

__version__ = "0.1.0"

from .blocks import SignalBlock, SymbolStream
from .config import ConfigError, SimConfig, parse_config
from .metrics import MetricRecord

__all__ = ["ConfigError", "MetricRecord", "SignalBlock", "SimConfig", "SymbolStream", "parse_config",
           "__version__"]
