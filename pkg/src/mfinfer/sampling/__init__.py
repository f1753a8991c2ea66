from .estimators import estimate_G, estimate_j_coefficient, estimate_mse, summarize
from .logio import (
    LogParseError,
    LogRecord,
    header_comment,
    make_header,
    open_log_sink,
    read_sample_log,
    sample_to_record,
    write_nu_trace_csv,
    write_sample_log,
    write_summary_csv,
)
from .mlaws import BinomialLaw, FixedCountLaw, GeometricLaw, PoissonLaw, law_from_name
from .runner import (
    ConstantMean,
    lo_features,
    mf_iteration,
    mf_simulate,
    multifidelity_weight,
    run_mf_sampler,
    run_sampler,
    single_fidelity_iteration,
)
from .types import (
    DegenerateSampleError,
    EstimatorReport,
    MultifidelityRecord,
    ParameterDraw,
    ProposalSupportError,
    SampleSet,
    SimulationOutput,
    StopRule,
    WeightedSample,
)

__all__ = [
    "estimate_G",
    "estimate_j_coefficient",
    "estimate_mse",
    "summarize",
    "LogParseError",
    "LogRecord",
    "header_comment",
    "make_header",
    "open_log_sink",
    "read_sample_log",
    "sample_to_record",
    "write_nu_trace_csv",
    "write_sample_log",
    "write_summary_csv",
    "BinomialLaw",
    "FixedCountLaw",
    "GeometricLaw",
    "PoissonLaw",
    "law_from_name",
    "ConstantMean",
    "lo_features",
    "mf_iteration",
    "mf_simulate",
    "multifidelity_weight",
    "run_mf_sampler",
    "run_sampler",
    "single_fidelity_iteration",
    "DegenerateSampleError",
    "EstimatorReport",
    "MultifidelityRecord",
    "ParameterDraw",
    "ProposalSupportError",
    "SampleSet",
    "SimulationOutput",
    "StopRule",
    "WeightedSample",
]
