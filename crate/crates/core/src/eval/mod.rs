//! Benchmark generation, placement metrics and evaluation reports.

mod benchmark;
mod metrics;
mod run;

pub use benchmark::{gen_benchmark, gen_benchmark_corpus, BenchmarkSpec, Split, BENCHMARK_RETRIES};
pub use metrics::{eval_pa, eval_pp};
pub use run::{
    run_eval, CaseResult, DiffusionPlacer, EvalResult, FixedCornerPlacer, OraclePlacer, Placer,
    REPORT_SCHEMA_VERSION,
};
