use thiserror::Error;

/// Errors raised by mesh loading, chart construction, geodesic queries and checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("non-manifold edge ({0}, {1})")]
    NonManifoldEdge(usize, usize),
    #[error("open surface: boundary edge ({0}, {1})")]
    OpenSurface(usize, usize),
    #[error("Euler characteristic is {0}, expected 2")]
    EulerCharacteristic(i64),
    #[error("degenerate mesh: {0}")]
    Degenerate(String),
    #[error("chart too large: {0}")]
    ChartTooLarge(String),
    #[error("point lies outside the chart domain")]
    OutsideChart,
    #[error("point is not in the chart image: {0}")]
    NotInChartImage(String),
    #[error("invalid surface point: {0}")]
    InvalidPoint(String),
    #[error("tolerance {tau} unreachable within budget (best relative gap {reached})")]
    ToleranceUnreachable { tau: f64, reached: f64 },
    #[error("zero-length path has no midpoint")]
    ZeroLengthPath,
    #[error("source set is empty")]
    EmptySources,
    #[error("sampling grid is empty")]
    EmptyGrid,
    #[error("grid segment exits the chart domain")]
    GridOutsideDomain,
    #[error("origin is not interior to both bodies")]
    OriginNotInterior,
    #[error("midpoint certification failed: {0}")]
    MidpointCertification(String),
    #[error("no admissible pairs: {0}")]
    NoAdmissiblePairs(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
