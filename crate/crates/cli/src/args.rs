use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be non-negative and finite, got {v}"))
    }
}

fn unit_open(s: &str) -> Result<f64, String> {
    let v = positive(s)?;
    if v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1), got {v}"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be at least 1".into())
    }
}

fn float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| positive(p.trim())).collect()
}

fn count_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|p| count(p.trim())).collect()
}

#[derive(Parser, Debug)]
#[command(name = "convexgeo", version, about = "Intrinsic geometry and DC checks on convex polyhedral surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate that a mesh bounds a convex body.
    CheckConvex(CheckConvexArgs),
    /// Build a standard chart around a surface point.
    Chart(ChartArgs),
    /// Shortest path between two surface points.
    Distance(DistanceArgs),
    /// Bracket the intrinsic diameter.
    Diameter(DiameterArgs),
    /// Polyhedral approximation of a convex body.
    Approx(ApproxArgs),
    /// Convergence of intrinsic distances under refinement.
    Converge(ConvergeArgs),
    /// Concavity and DC checks.
    DcCheck(DcCheckArgs),
    /// Distance field from a source set.
    Field(FieldArgs),
    /// Level set of a distance field.
    Levelset(LevelsetArgs),
    /// Flag near-critical radii of a distance field.
    Scan(ScanArgs),
    /// Points reached by several minimal curves.
    Exoskeleton(ExoskeletonArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct Output {
    /// JSON report path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct Geo {
    /// Target relative certification gap.
    #[arg(long, default_value_t = 1e-9, value_parser = unit_open)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Exact,
    Graph,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckConvexArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Convexity tolerance (default 1e-9 times the mesh scale).
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct ChartArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Chart centre point.
    #[arg(long)]
    pub at: String,
    /// Domain radius (default half the inner radius).
    #[arg(long, value_parser = positive)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[command(flatten)]
    pub geo: Geo,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct DiameterArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Extra random samples on top of the vertices.
    #[arg(long, default_value_t = 64)]
    pub extra_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = unit_open)]
    pub tau: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct ApproxArgs {
    /// BodySpec as a JSON file or inline JSON.
    #[arg(long)]
    pub body: String,
    #[arg(long, value_parser = count)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the approximating mesh as OFF.
    #[arg(long)]
    pub off: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub body: String,
    /// Comma-separated vertex counts.
    #[arg(long, value_parser = count_list, default_value = "50,200,800,3200")]
    pub ks: ::std::vec::Vec<usize>,
    /// Random pairs in addition to the antipodal pair.
    #[arg(long, default_value_t = 0)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = unit_open)]
    pub tau: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    SecondDiff,
    ChartC,
    #[value(name = "midpoint-4c")]
    #[serde(rename = "midpoint-4c")]
    Midpoint4c,
    Diagonal,
    Displacement,
    Modifier,
    FieldDc,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Function {
    /// `|x|^2` in chart coordinates.
    Sqnorm,
    /// The chart's graph function.
    ChartF,
    /// Squared intrinsic distance to `--source`.
    DistSq,
}

#[derive(Args, Debug, Serialize)]
pub struct DcCheckArgs {
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub check: Check,
    /// Grid pairs for chart-c, modifier and field-dc.
    #[arg(long, default_value_t = 200, value_parser = count)]
    pub grid: usize,
    /// Random pairs for midpoint-4c and diagonal.
    #[arg(long, default_value_t = 1000, value_parser = count)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Concavity constant for chart-c.
    #[arg(long, default_value_t = 2.0, value_parser = non_negative)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = Function::Sqnorm)]
    pub function: Function,
    /// Chart centre (default v:0).
    #[arg(long)]
    pub at: Option<String>,
    /// Second chart centre for modifier (default: first neighbour of --at's vertex).
    #[arg(long)]
    pub at2: Option<String>,
    /// Source point for dist-sq and field-dc (default v:0).
    #[arg(long)]
    pub source: Vec<String>,
    #[arg(long, value_parser = positive)]
    pub radius: Option<f64>,
    /// Offset bound for displacement (default 0.6 times the chart radius).
    #[arg(long, value_parser = positive)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 100, value_parser = count)]
    pub dirs: usize,
    /// Upper bound on the intrinsic diameter (computed when absent).
    #[arg(long, value_parser = positive)]
    pub m_upper: Option<f64>,
    /// Candidate diagonal points for diagonal.
    #[arg(long, default_value_t = 200, value_parser = count)]
    pub candidates: usize,
    /// Values for second-diff.
    #[arg(long, allow_hyphen_values = true)]
    pub fa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub fb: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub fmid: Option<f64>,
    /// Upper bound second-diff is checked against.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub bound: f64,
    #[arg(long, default_value_t = 1e-9, value_parser = unit_open)]
    pub tau: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct SourceArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Source component: a point, edge:<a>,<b>, face:<i> or all. Repeatable.
    #[arg(long, required = true)]
    pub source: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct FieldArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct LevelsetArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    #[arg(long, value_parser = positive)]
    pub r: f64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub subdiv: u32,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Project the SVG onto the plane of the chart at this point.
    #[arg(long)]
    pub chart: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    /// Comma-separated increasing radii (default: 20 steps up to the maximum).
    #[arg(long, value_parser = float_list)]
    pub r_grid: Option<::std::vec::Vec<f64>>,
    #[arg(long, default_value_t = 20, value_parser = count)]
    pub steps: usize,
    /// Flagging window (default half the grid spacing).
    #[arg(long, value_parser = positive)]
    pub window: Option<f64>,
    /// Also flag values taken on an exoskeleton estimate of this density.
    #[arg(long, value_parser = positive)]
    pub exoskeleton_density: Option<f64>,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub subdiv: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Serialize)]
pub struct ExoskeletonArgs {
    #[command(flatten)]
    pub src: SourceArgs,
    /// Random samples per unit area, on top of the vertices.
    #[arg(long, default_value_t = 100.0, value_parser = positive)]
    pub density: f64,
    /// Tie tolerance (default ten times the field error bound).
    #[arg(long, value_parser = positive)]
    pub eps_tie: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}
