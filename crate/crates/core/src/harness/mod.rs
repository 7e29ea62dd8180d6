//! Configuration, experiment orchestration, reports and acceptance checks.

mod config;
mod report;
mod run;
mod verify;

pub use config::{
    parse_scales, AlgorithmConfig, ExperimentConfig, GridConfig, OutputConfig, SceneConfig, Units,
    J0, MAX_SIDE,
};
pub use report::{emit_plot_data, write_outputs, write_phase_csv, write_records_csv};
pub use run::{
    run_experiment, simulate, DecayProbes, ProbeSummary, RunOutput, RunReport, ScalePhase,
    ScaleRecord, SCHEMA_VERSION,
};
pub use verify::{
    bound_fuzz, cross_scale_zero, determinism, experiment_checks, frame_exactness,
    materialized_consistency, oracle_equivalence, random_band_limited, summary, verify_suite,
    Check,
};
