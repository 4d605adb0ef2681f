use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ambiguous relation: horizontal centroids coincide (distance {0:.2e} m)")]
    AmbiguousRelation(f64),
    #[error("plan set is infeasible: the annotated regions do not intersect")]
    InfeasiblePlanSet,
    #[error("plan anchor {0} does not resolve to a scene object")]
    UnresolvedAnchor(u32),
    #[error("duplicate id {0}")]
    DuplicateId(u32),
    #[error("unknown id {0}")]
    UnknownId(u32),
    #[error("crossover precondition failed: {0}")]
    CategoryMismatch(String),
    #[error("infeasible scene: {0}")]
    InfeasibleScene(String),
    #[error("infeasible benchmark spec: {0}")]
    InfeasibleSpec(String),
    #[error("too few objects: need {needed}, have {have}")]
    TooFewObjects { needed: usize, have: usize },
    #[error("affordance map is zero everywhere")]
    AllZeroMap,
    #[error("diffusion step {step} outside 1..={max}")]
    StepOutOfRange { step: usize, max: usize },
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyCloud => "empty_cloud",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::AmbiguousRelation(_) => "ambiguous_relation",
            Error::InfeasiblePlanSet => "infeasible_plan_set",
            Error::UnresolvedAnchor(_) => "unresolved_anchor",
            Error::DuplicateId(_) => "duplicate_id",
            Error::UnknownId(_) => "unknown_id",
            Error::CategoryMismatch(_) => "category_mismatch",
            Error::InfeasibleScene(_) => "infeasible_scene",
            Error::InfeasibleSpec(_) => "infeasible_spec",
            Error::TooFewObjects { .. } => "too_few_objects",
            Error::AllZeroMap => "all_zero_map",
            Error::StepOutOfRange { .. } => "step_out_of_range",
            Error::UnknownCategory(_) => "unknown_category",
            Error::InvalidScene(_) => "invalid_scene",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Schema(_) => "schema",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
