"""Simulation and time-tag analysis of quantum-dot cascade photon-pair sources."""

from ._core import (
    AnalysisOptions,
    AnalysisError,
    Basis,
    CoincidenceHistogram,
    ExperimentConfig,
    ExperimentKind,
    PeakAreas,
    RelativePol,
    SourceParams,
    TimeTagStream,
    ValidationError,
    analyze_streams,
    build_histogram,
    coherence_factor,
    collection_efficiency_from_rate,
    correlation_from_areas,
    fidelity_from_correlations,
    fidelity_to_psi_plus,
    fidelity_vs_fss_curve,
    fit_fss,
    fit_lifetime,
    g2_zero,
    hbar_uev_ps,
    hom_visibility,
    integrate_peaks,
    model_density_matrix,
    pair_collection_probability,
    predicted_correlation,
    purcell_factor,
    rabi_preparation_probability,
    read_tagfile,
    scattering_survival,
    simulate,
    stream_peak_areas,
    write_tagfile,
)

__all__ = [
    "AnalysisOptions",
    "AnalysisError",
    "Basis",
    "CoincidenceHistogram",
    "ExperimentConfig",
    "ExperimentKind",
    "PeakAreas",
    "RelativePol",
    "SourceParams",
    "TimeTagStream",
    "ValidationError",
    "analyze_streams",
    "build_histogram",
    "coherence_factor",
    "collection_efficiency_from_rate",
    "correlation_from_areas",
    "fidelity_from_correlations",
    "fidelity_to_psi_plus",
    "fidelity_vs_fss_curve",
    "fit_fss",
    "fit_lifetime",
    "g2_zero",
    "hbar_uev_ps",
    "hom_visibility",
    "integrate_peaks",
    "model_density_matrix",
    "pair_collection_probability",
    "predicted_correlation",
    "purcell_factor",
    "rabi_preparation_probability",
    "read_tagfile",
    "scattering_survival",
    "simulate",
    "stream_peak_areas",
    "write_tagfile",
]

__version__ = "1.0.0"
