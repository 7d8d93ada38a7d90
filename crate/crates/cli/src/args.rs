use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "besico", version, about = "Batch experiments on Besicovitch-type pseudometrics, shifts and shadowing")]
pub struct Cli {
    /// Horizon (sequence length); each subcommand has its own default.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Seed for every sampling step; required by sampling subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Report file (default: stdout).
    #[arg(long, global = true)]
    pub output: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Distances between two sequences.
    Dist(DistArgs),
    /// Exact check of δ·d̄(J_δ) <= D <= d̄(J_δ) + δ on random pairs.
    StarCheck(StarArgs),
    /// Finite measures: Prokhorov distance and empirical-measure checks.
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// The intersection of the shifts F^(2^i, 10^i).
    #[command(subcommand)]
    YLab(YLabCmd),
    /// Average pseudo-orbits and shadowing.
    #[command(subcommand)]
    Shadow(ShadowCmd),
    /// Specification: spacing check and brute-force tracing.
    #[command(subcommand)]
    Spec(SpecCmd),
    /// The maps T_n, torus automorphisms and mistake functions.
    #[command(subcommand)]
    Maps(MapsCmd),
    /// Block-count entropy estimates.
    Entropy(EntropyArgs),
    /// Run an experiment described by a JSON config file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Besicovitch,
    Dbar,
    Dprime,
    Jdelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqSpace {
    /// Words over `--alphabet` with the discrete metric.
    Symbolic,
    /// Comma-separated rationals in [0,1), repeated cyclically.
    Circle,
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// `prefix|period`, a finite word, or (circle) `a,b,c`.
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Threshold for `jdelta`, in (0, 1].
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, default_value = "01")]
    pub alphabet: String,
    #[arg(long, value_enum, default_value_t = SeqSpace::Symbolic)]
    pub space: SeqSpace,
}

#[derive(Debug, Args, Serialize)]
pub struct StarArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasuresCmd {
    /// Prokhorov distance between two measures given as JSON.
    Prokhorov(ProkhorovArgs),
    /// π(m(x,n), m(σx,n)) <= 2/n and pushforward of the empirical measure.
    ShiftBound(ShiftBoundArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ProkhorovArgs {
    /// `circle`, `torus:K`, `discrete:GLYPHS` or `shift:GLYPHS`.
    #[arg(long)]
    pub space: String,
    /// Inline JSON `{"atoms":[{"point","num","den"}]}` or a file path.
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    pub nu: String,
    /// Also run the subset brute force and require agreement.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ShiftBoundArgs {
    /// Eventually periodic point `prefix|period`.
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value = "01")]
    pub alphabet: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum YLabCmd {
    /// Partial sum of 2^i/10^i.
    SumCheck(TermsArgs),
    /// t_i > 3 s_i + 2i > 5i for i <= terms.
    Constants(TermsArgs),
    /// Horizon membership of a point.
    Member(MemberArgs),
    /// Sample members of Y_depth, project them and measure the change.
    Project(ProjectArgs),
    /// Return-times point for a cylinder word.
    ReturnTimes(ReturnTimesArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TermsArgs {
    #[arg(long, default_value_t = 40)]
    pub terms: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct MemberArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value_t = 2)]
    pub depth: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[arg(long, default_value_t = 2)]
    pub depth: u32,
    /// Must exceed the tail sum 1/(4·5^depth).
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Probability of a 1 at each free position.
    #[arg(long, default_value_t = 0.5)]
    pub ones: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReturnTimesArgs {
    /// A nonempty {0,1} word.
    #[arg(long)]
    pub cylinder: String,
    #[arg(long, default_value_t = 2)]
    pub level: u32,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShadowCmd {
    /// Segment concatenation through quasi-generic points on the 2-shift.
    Sigmund(SigmundArgs),
    /// Quadratic segment schedule for T_n and the power-map lift.
    Schedule(ScheduleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SigmundArgs {
    /// Comma-separated periodic points; each target is the uniform
    /// measure on the orbit of its point.
    #[arg(long, default_value = "|01,|0")]
    pub targets: String,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = besico::shadowing::DEFAULT_RATIO)]
    pub ratio: usize,
    /// Prokhorov tolerance for certifying base points and checkpoints.
    #[arg(long, default_value = "1/20")]
    pub tolerance: String,
    #[arg(long, default_value = "01")]
    pub alphabet: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ScheduleArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    #[arg(long, default_value_t = 30)]
    pub segments: usize,
    /// Comma-separated base points in [0,1).
    #[arg(long, default_value = "1/7,3/11,5/13,2/9")]
    pub bases: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecCmd {
    /// Search an SFT for a point tracing the segments.
    Trace(TraceArgs),
    /// Is every gap at least the spacing?
    Check(SpecCheckArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SegmentArgs {
    /// `a:b:prefix|period` entries separated by `;`, covering `[a, b]`.
    #[arg(long)]
    pub segments: String,
    #[arg(long, default_value = "01")]
    pub alphabet: String,
    /// Constant spacing M(n).
    #[arg(long, default_value_t = 0)]
    pub gap: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seg: SegmentArgs,
    /// Comma-separated forbidden words.
    #[arg(long, default_value = "")]
    pub forbidden: String,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    #[arg(long, default_value_t = 200)]
    pub max_depth: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SpecCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub seg: SegmentArgs,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapsCmd {
    /// Continuity and arc-cycling facts for T_n, plus plot samples.
    Tn(TnArgs),
    /// Root-of-unity eigenvalue check for an integer matrix.
    Eigencheck(EigenArgs),
    /// Non-hyperbolic quartic companions without root-of-unity eigenvalues.
    Search(SearchArgs),
    /// Sampled check of a periodic decomposition.
    Decomposition(DecompositionArgs),
    /// k_g(ε) for a mistake function.
    Kg(KgArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TnArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Grid size (default 300·n).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EigenArgs {
    /// Rows separated by `;`, entries by `,`.
    #[arg(long)]
    pub matrix: String,
    #[arg(long, default_value_t = 12)]
    pub max_order: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub range: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionKind {
    /// Arcs [j/n, (j+1)/n] under T_n.
    Interval,
    /// F^n on T^k × [0, 1/n] for F = S × T_n.
    Product,
}

#[derive(Debug, Args, Serialize)]
pub struct DecompositionArgs {
    #[arg(long, value_enum, default_value_t = DecompositionKind::Interval)]
    pub kind: DecompositionKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Torus automorphism S for `product`.
    #[arg(long, default_value = "2,1;1,1")]
    pub matrix: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct KgArgs {
    /// `zero`, `const:C`, `sqrt` or `floor:R`.
    #[arg(long)]
    pub form: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value = "1")]
    pub eps0: String,
    #[arg(long, default_value_t = 10_000)]
    pub scan_limit: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    /// `golden`, `y:DEPTH` (y2 = y:2), `sft:W1,W2,...` over {0,1}, or
    /// `f:S,T` for a single F^(s,t).
    #[arg(long)]
    pub shift: String,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    /// JSON `{subcommand, params, seed?, horizon?, output_path?}`.
    #[arg(long)]
    pub config: String,
}
