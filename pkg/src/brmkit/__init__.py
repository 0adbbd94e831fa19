"""Bit-rate-matching toolkit.

Compares the prior-art matching pipeline (loss-based model selection,
geometric binary beta search, full re-encode validation) against an
optimized one (relative-bit-distance selection, log-log linear search,
latent-cached validation) on a deterministic toy variable-rate codec.
"""

from .bd import BdResult, RdCurve, bd_rate, bit_difference, quality_psnr
from .codec import (
    CodecModel,
    CostCounters,
    GainVector,
    LatentTensor,
    RateDistortionPoint,
    decode,
    encode_latent,
    estimate_rate,
    evaluate,
    make_model,
    quantize,
)
from .config import ExperimentConfig, load_config
from .curves import CodecCurve, RateCurve, SyntheticLogLinearCurve, TabulatedCurve
from .engine import (
    BrmResult,
    SearchConfig,
    relative_bit_distance,
    run_brm,
    select_model_baseline,
    select_model_relative,
    validate_beta,
)
from .harness import RunReport, emit_report, run_experiment
from .imageio import Image, load_corpus, read_netpbm, write_netpbm
from .search import (
    SearchTrace,
    TargetSpec,
    oracle_best_beta,
    search_binary,
    search_loglinear,
)

__version__ = "0.1.0"

__all__ = [
    "BdResult", "RdCurve", "bd_rate", "bit_difference", "quality_psnr",
    "CodecModel", "CostCounters", "GainVector", "LatentTensor",
    "RateDistortionPoint", "decode", "encode_latent", "estimate_rate",
    "evaluate", "make_model", "quantize",
    "ExperimentConfig", "load_config",
    "CodecCurve", "RateCurve", "SyntheticLogLinearCurve", "TabulatedCurve",
    "BrmResult", "SearchConfig", "relative_bit_distance", "run_brm",
    "select_model_baseline", "select_model_relative", "validate_beta",
    "RunReport", "emit_report", "run_experiment",
    "Image", "load_corpus", "read_netpbm", "write_netpbm",
    "SearchTrace", "TargetSpec", "oracle_best_beta", "search_binary",
    "search_loglinear",
    "__version__",
]
