"""Compound-Gaussian texture model fitting for multichannel signals."""

from ._core import (
    CgFit,
    EmpiricalDensity,
    Exponential,
    Family,
    Gamma,
    InverseGamma,
    MarginalModel,
    MomentReport,
    MultichannelRecord,
    PosteriorMoments,
    SegmentedSignal,
    __version__,
    build_empdf,
    digamma,
    dlog_bessel_k_dorder,
    fit,
    ingest_csv,
    kld,
    load_fit_json,
    log_bessel_k,
    log_bessel_k_ratio,
    log_gamma,
    mardia_kurtosis,
    moment_report,
    r_squared,
    sample_texture,
    save_fit_json,
    segment,
    simulate_cg,
    simulate_fixed_texture,
    texture_log_pdf,
    texture_mean,
    trigamma,
)

__all__ = [
    "CgFit",
    "EmpiricalDensity",
    "Exponential",
    "Family",
    "Gamma",
    "InverseGamma",
    "MarginalModel",
    "MomentReport",
    "MultichannelRecord",
    "PosteriorMoments",
    "SegmentedSignal",
    "__version__",
    "build_empdf",
    "digamma",
    "dlog_bessel_k_dorder",
    "fit",
    "ingest_csv",
    "kld",
    "load_fit_json",
    "log_bessel_k",
    "log_bessel_k_ratio",
    "log_gamma",
    "mardia_kurtosis",
    "moment_report",
    "r_squared",
    "sample_texture",
    "save_fit_json",
    "segment",
    "simulate_cg",
    "simulate_fixed_texture",
    "texture_log_pdf",
    "texture_mean",
    "trigamma",
]
