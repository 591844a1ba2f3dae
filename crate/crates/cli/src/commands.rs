use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use cutoff_core::cayley::{cayley_graph, parse_generators, pgl_order};
use cutoff_core::graphlab::{
    self, cutoff_ratio, fmt12, load_coloring, load_graph, tv_profile, write_graph, LoadedGraph, Precision, Start,
    WalkOptions,
};
use cutoff_core::qcalc::{drift_constants, drift_polynomial, mixing_schedule, to_f64, vertex_degree};
use cutoff_core::sector::{self, evolve_exact, evolve_float, EvolveConfig, SectorPoint};
use cutoff_core::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::render::{exact, json};
use crate::{CliError, CliResult, Command, Outputs};

/// Overrides the dense eigensolver cap.
pub const DENSE_CAP_ENV: &str = "CUTOFF_LAB_DENSE_CAP";
/// Overrides the live-state cap of exact sector evolution.
pub const STATE_CAP_ENV: &str = "CUTOFF_LAB_STATE_CAP";

fn env_cap(var: &str, default: usize) -> CliResult<usize> {
    match std::env::var(var) {
        Ok(v) => v.parse().map_err(|_| CliError::Usage(format!("{var}={v:?} is not a number"))),
        Err(_) => Ok(default),
    }
}

fn rational(s: &str) -> CliResult<BigRational> {
    BigRational::from_str(s.trim()).map_err(|_| CliError::Usage(format!("{s:?} is not a rational number")))
}

fn integer(s: &str) -> CliResult<BigInt> {
    if let Some((b, e)) = s.split_once('^') {
        let e: u32 = e.parse().map_err(|_| CliError::Usage(format!("bad exponent in {s:?}")))?;
        return Ok(integer(b)?.pow(e));
    }
    BigInt::from_str(s.trim()).map_err(|_| CliError::Usage(format!("{s:?} is not an integer")))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn execute(cmd: &Command) -> CliResult<Outputs> {
    match cmd {
        Command::Constants(a) => constants(a),
        Command::SectorSim(a) => sector_sim(a),
        Command::SectorExact(a) => sector_exact(a),
        Command::Analyze(a) => analyze(a),
        Command::Cayley(a) => cayley(a),
        Command::Predict(a) => predict(a),
        Command::Replay(_) => Err(CliError::Usage("replay cannot be nested".into())),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    /// Dimension parameter (`PGL_d`).
    pub d: Option<u32>,
    /// Evaluate the constants at this q (integer or rational).
    #[arg(long)]
    pub q: Option<String>,
    /// Print the rows d = 2..7.
    #[arg(long)]
    pub table: bool,
    /// Largest accepted d.
    #[arg(long, default_value_t = 10)]
    pub max_d: u32,
}

fn constants(a: &ConstantsArgs) -> CliResult<Outputs> {
    let mut s = String::new();
    if a.table {
        s.push_str("d | drift | degree\n");
        for d in 2..=7 {
            writeln!(s, "{d} | {} | {}", drift_polynomial(d)?.to_unicode(), vertex_degree(d)?.to_unicode()).unwrap();
        }
    }
    if let Some(d) = a.d {
        if !(2..=a.max_d).contains(&d) {
            return Err(Error::Domain(format!("d = {d} outside 2..={}", a.max_d)).into());
        }
        writeln!(s, "{} | {}", drift_polynomial(d)?.to_unicode(), vertex_degree(d)?.to_unicode()).unwrap();
        if let Some(q) = &a.q {
            let c = drift_constants(d, &rational(q)?)?;
            writeln!(s, "q = {}", c.q_value).unwrap();
            writeln!(s, "degree = {}", exact(&c.degree)).unwrap();
            writeln!(s, "E = {}", exact(&c.drift)).unwrap();
            writeln!(s, "sigma^2 = {}", exact(&c.variance)).unwrap();
            writeln!(s, "sigma = {}", fmt12(c.sigma())).unwrap();
            writeln!(s, "C = {}", exact(&c.cutoff_constant)).unwrap();
            writeln!(s, "c = {}", fmt12(c.c_constant)).unwrap();
            if c.non_prime_power {
                s.push_str("note: q is not a prime power; no building exists for it\n");
            }
        }
    } else if !a.table {
        return Err(CliError::Usage("constants needs <D> or --table".into()));
    } else if a.q.is_some() {
        return Err(CliError::Usage("--q needs <D>".into()));
    }
    Ok(Outputs { primary: s, files: vec![] })
}

#[derive(Debug, Args, Serialize)]
pub struct SectorSimArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub horizon: u64,
    #[arg(long)]
    pub trajectories: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Quotient size for the tail experiment (e.g. `5^12`).
    #[arg(long, requires = "s")]
    pub n: Option<String>,
    /// Window parameter for the tail experiment.
    #[arg(long, requires = "n")]
    pub s: Option<f64>,
}

fn sector_sim(a: &SectorSimArgs) -> CliResult<Outputs> {
    let q = rational(&a.q)?;
    let consts = drift_constants(a.d, &q)?;
    let stats = sector::simulate(a.d, &q, a.horizon, a.trajectories, a.seed)?;
    let (drift, se) = stats.interior_drift();
    let xi = stats.normalized_rho(consts.drift_f64(), consts.sigma());
    let xi_mean = xi.iter().sum::<f64>() / xi.len() as f64;
    let xi_var = xi.iter().map(|x| (x - xi_mean).powi(2)).sum::<f64>() / (xi.len() as f64 - 1.0).max(1.0);
    let mut s = String::new();
    writeln!(s, "# d={} q={} horizon={} trajectories={} seed={}", a.d, q, a.horizon, a.trajectories, a.seed).unwrap();
    writeln!(s, "# exact_drift={}", exact(&consts.drift)).unwrap();
    writeln!(s, "# interior_steps={} interior_drift={} stderr={}", stats.interior_steps(), fmt12(drift), fmt12(se))
        .unwrap();
    writeln!(s, "# xi_mean={} xi_variance={}", fmt12(xi_mean), fmt12(xi_var)).unwrap();
    writeln!(s, "# transient_fraction={}", fmt12(stats.transient_fraction())).unwrap();
    let hist: Vec<String> = stats.interior_increment_histogram.iter().map(|(r, c)| format!("{r}:{c}")).collect();
    writeln!(s, "# interior_increment_histogram={}", hist.join(" ")).unwrap();
    if let (Some(n), Some(sv)) = (&a.n, a.s) {
        let t = sector::tail_experiment(a.d, &q, &integer(n)?, sv, a.trajectories, a.seed)?;
        writeln!(
            s,
            "# tail n={} s={} t0={} t1={} r0={} r1={} p_exceed_r0_at_t0={} p_below_r1_at_t1={} normal_tail_reference={} pre_asymptotic={}",
            t.schedule.n,
            fmt12(sv),
            t.t0_step,
            t.t1_step,
            fmt12(t.schedule.r_0),
            fmt12(t.schedule.r_1),
            fmt12(t.p_exceed_r0_at_t0),
            fmt12(t.p_below_r1_at_t1),
            fmt12(t.normal_tail_reference),
            t.pre_asymptotic
        )
        .unwrap();
    }
    s.push_str("trajectory,rho,xi,boundary_visits,last_boundary_step\n");
    for (i, x) in xi.iter().enumerate().take(stats.trajectory_count) {
        writeln!(
            s,
            "{i},{},{},{},{}",
            stats.rho_samples[i],
            if a.horizon == 0 { "nan".to_string() } else { fmt12(*x) },
            stats.boundary_visits[i],
            stats.last_boundary_step[i]
        )
        .unwrap();
    }
    Ok(Outputs { primary: s, files: vec![] })
}

#[derive(Debug, Args, Serialize)]
pub struct SectorExactArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub horizon: usize,
    /// Start point in difference coordinates, comma separated; default origin.
    #[arg(long, value_delimiter = ',')]
    pub start: Option<Vec<u32>>,
    /// Drop states with larger R-norm and report their mass as truncated.
    #[arg(long)]
    pub r_max: Option<i64>,
    /// Evolve in floating point.
    #[arg(long)]
    pub float: bool,
}

fn sector_exact(a: &SectorExactArgs) -> CliResult<Outputs> {
    let q = rational(&a.q)?;
    let start = match &a.start {
        Some(x) => SectorPoint::from_x(x.clone()),
        None => SectorPoint::origin(a.d),
    };
    let cfg = EvolveConfig {
        r_max: a.r_max.unwrap_or(i64::MAX),
        state_cap: env_cap(STATE_CAP_ENV, sector::DEFAULT_STATE_CAP)?,
    };
    let mut s = String::from("point,r_norm,mass_exact,mass\n");
    let quote = |p: &SectorPoint| format!("\"{p}\"");
    if a.float {
        let e = evolve_float(a.d, &q, &start, a.horizon, &cfg)?;
        for (p, m) in &e.distribution {
            writeln!(s, "{},{},,{}", quote(p), p.r_norm(), fmt12(*m)).unwrap();
        }
        writeln!(s, "truncated,,,{}", fmt12(e.truncated)).unwrap();
    } else {
        let e = evolve_exact(a.d, &q, &start, a.horizon, &cfg)?;
        for (p, m) in &e.distribution {
            writeln!(s, "{},{},{m},{}", quote(p), p.r_norm(), fmt12(to_f64(m))).unwrap();
        }
        writeln!(s, "truncated,,{},{}", e.truncated, fmt12(to_f64(&e.truncated))).unwrap();
    }
    Ok(Outputs { primary: s, files: vec![] })
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Edge-list files; several files form a family for cutoff ratios.
    #[arg(required = true)]
    pub graphs: Vec<PathBuf>,
    /// Coloring file (single graph only).
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    #[arg(long, default_value_t = 0, conflicts_with = "worst")]
    pub v0: usize,
    /// Maximize over all start vertices.
    #[arg(long)]
    pub worst: bool,
    #[arg(long, default_value_t = 100)]
    pub horizon: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.75")]
    pub eps: Vec<f64>,
    /// Lazy walk (hold with probability 1/2).
    #[arg(long)]
    pub lazy: bool,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Auto)]
    pub precision: PrecisionArg,
    /// eps for the cutoff ratio t_mix(eps)/t_mix(1-eps) across the family.
    #[arg(long, default_value_t = 0.25)]
    pub ratio_eps: f64,
    /// Step limit when searching for mixing times in the ratio.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_horizon: usize,
    /// Write `<index>_<stem>.csv` profiles into this directory.
    #[arg(long)]
    pub profile_dir: Option<PathBuf>,
    /// Skip the spectral report.
    #[arg(long)]
    pub no_spectrum: bool,
    /// Opt-in check for 1-skeleta of `d = 3` building quotients: the second
    /// largest adjacency eigenvalue must be within `--triangle-tol` of `6q`.
    #[arg(long, conflicts_with = "no_spectrum")]
    pub expect_triangle_q: Option<u64>,
    #[arg(long, default_value_t = 0.5, requires = "expect_triangle_q")]
    pub triangle_tol: f64,
}

/// Second largest real part among the reported eigenvalues (the full
/// spectrum in dense mode, the extremal part in iterative mode).
fn second_eigenvalue(r: &graphlab::SpectralReport) -> Option<f64> {
    let mut re: Vec<f64> = r.eigenvalues.iter().map(|e| e.0).collect();
    re.sort_by(|a, b| b.total_cmp(a));
    re.get(1).copied()
}

#[derive(Serialize)]
struct GraphReport {
    path: PathBuf,
    n: usize,
    k: usize,
    directed: bool,
    mode: graphlab::EvolutionMode,
    start: Start,
    lazy: bool,
    horizon: usize,
    final_tv: f64,
    t_mix: Vec<TMix>,
    spectral: Option<graphlab::SpectralReport>,
}

#[derive(Serialize)]
struct TMix {
    eps: f64,
    t: Option<usize>,
}

#[derive(Serialize)]
struct RatioReport {
    path: PathBuf,
    #[serde(flatten)]
    ratio: graphlab::CutoffRatio,
}

#[derive(Serialize)]
struct AnalyzeReport {
    graphs: Vec<GraphReport>,
    ratio_eps: Option<f64>,
    cutoff_ratios: Option<Vec<RatioReport>>,
}

fn analyze(a: &AnalyzeArgs) -> CliResult<Outputs> {
    if a.coloring.is_some() && a.graphs.len() > 1 {
        return Err(CliError::Usage("--coloring applies to a single graph".into()));
    }
    let opts = WalkOptions {
        lazy: a.lazy,
        precision: match a.precision {
            PrecisionArg::Auto => Precision::Auto,
            PrecisionArg::Exact => Precision::Exact,
            PrecisionArg::Float => Precision::Float,
        },
    };
    let start = if a.worst { Start::Worst } else { Start::Vertex(a.v0) };
    let cap = env_cap(DENSE_CAP_ENV, graphlab::DENSE_CAP)?;
    let mut loaded = Vec::new();
    for path in &a.graphs {
        let mut g = load_graph(open(path)?)?;
        if let (Some(cp), LoadedGraph::Undirected(ug)) = (&a.coloring, &mut g) {
            let c = load_coloring(open(cp)?, ug.n())?;
            *ug = ug.clone().with_coloring(c)?;
        } else if a.coloring.is_some() {
            return Err(CliError::Usage("colorings apply to undirected graphs".into()));
        }
        loaded.push(g);
    }
    let mut reports = Vec::new();
    let mut files = Vec::new();
    for (i, (path, g)) in a.graphs.iter().zip(&loaded).enumerate() {
        let (profile, spectral, n, k, directed) = match g {
            LoadedGraph::Undirected(g) => (
                tv_profile(g, start, a.horizon, &a.eps, &opts)?,
                (!a.no_spectrum).then(|| graphlab::spectral_report_with_cap(g, cap)).transpose()?,
                g.n(),
                g.k(),
                false,
            ),
            LoadedGraph::Directed(g) => (
                tv_profile(g, start, a.horizon, &a.eps, &opts)?,
                (!a.no_spectrum && g.n() <= cap).then(|| graphlab::digraph_spectral_report(g, cap)).transpose()?,
                g.n(),
                g.k(),
                true,
            ),
        };
        if let (Some(q), Some(r)) = (a.expect_triangle_q, &spectral) {
            let want = 6.0 * q as f64;
            match second_eigenvalue(r) {
                Some(l2) if (l2 - want).abs() <= a.triangle_tol => {}
                l2 => {
                    return Err(CliError::Assertion(format!(
                        "{}: second eigenvalue {l2:?} is not within {} of 6q = {want}",
                        path.display(),
                        a.triangle_tol
                    )))
                }
            }
        }
        if let Some(dir) = &a.profile_dir {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            files.push((dir.join(format!("{i}_{stem}.csv")), profile.to_csv()));
        }
        reports.push(GraphReport {
            path: path.clone(),
            n,
            k,
            directed,
            mode: profile.mode,
            start,
            lazy: a.lazy,
            horizon: a.horizon,
            final_tv: *profile.tv_total.last().unwrap(),
            t_mix: profile.t_mix.iter().map(|&(eps, t)| TMix { eps, t }).collect(),
            spectral,
        });
    }
    let cutoff_ratios = if loaded.len() > 1 {
        let v0 = if a.worst { 0 } else { a.v0 };
        let mut out = Vec::new();
        for (path, g) in a.graphs.iter().zip(&loaded) {
            let r = match g {
                LoadedGraph::Undirected(g) => cutoff_ratio(&[(g, v0)], a.ratio_eps, &opts, a.max_horizon)?,
                LoadedGraph::Directed(g) => cutoff_ratio(&[(g, v0)], a.ratio_eps, &opts, a.max_horizon)?,
            };
            out.push(RatioReport { path: path.clone(), ratio: r[0] });
        }
        Some(out)
    } else {
        None
    };
    let report =
        AnalyzeReport { graphs: reports, ratio_eps: cutoff_ratios.is_some().then_some(a.ratio_eps), cutoff_ratios };
    Ok(Outputs { primary: json(&report), files })
}

#[derive(Debug, Args, Serialize)]
pub struct CayleyArgs {
    /// Generator file.
    pub genfile: PathBuf,
    /// Abort once the closure exceeds this many elements.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    /// Add missing inverses instead of rejecting an asymmetric set.
    #[arg(long)]
    pub symmetrize: bool,
    /// Write the Cayley graph as an edge list here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Serialize)]
struct CayleyReport {
    d: usize,
    p: u32,
    e: u32,
    q: u32,
    generators: usize,
    order: usize,
    degree: usize,
    pgl_order: String,
    generates_pgl: bool,
    in_psl: bool,
    /// Set when the generator count equals the building's vertex degree.
    matches_vertex_degree: Option<bool>,
    emitted: Option<PathBuf>,
}

fn cayley(a: &CayleyArgs) -> CliResult<Outputs> {
    let mut gens = parse_generators(open(&a.genfile)?)?;
    if a.symmetrize {
        gens = gens.symmetrize();
    }
    let c = cayley_graph(&gens, a.cap)?;
    let f = gens.field();
    let pgl = pgl_order(gens.d() as u32, f.q() as u64);
    let deg = if gens.d() >= 2 { Some(vertex_degree(gens.d() as u32)?.eval_int(&BigInt::from(f.q()))) } else { None };
    let report = CayleyReport {
        d: gens.d(),
        p: f.p(),
        e: f.e(),
        q: f.q(),
        generators: gens.len(),
        order: c.order(),
        degree: c.graph.k(),
        generates_pgl: BigInt::from(c.order()) == pgl,
        pgl_order: pgl.to_string(),
        in_psl: c.in_psl,
        matches_vertex_degree: deg.filter(|d| *d == BigInt::from(gens.len())).map(|_| true),
        emitted: a.emit.clone(),
    };
    let files = a.emit.iter().map(|p| (p.clone(), write_graph(&c.graph))).collect();
    Ok(Outputs { primary: json(&report), files })
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub q: String,
    /// Number of vertices, e.g. `1048576` or `2^20`.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
}

#[derive(Serialize)]
struct Prediction {
    #[serde(flatten)]
    schedule: cutoff_core::qcalc::MixingSchedule,
    /// The specialized rendering (`d = 3` graph distance or `d = 2` tree)
    /// agrees exactly with the general one.
    renderings_agree: Option<bool>,
}

fn predict(a: &PredictArgs) -> CliResult<Outputs> {
    let q = rational(&a.q)?;
    let schedule = mixing_schedule(a.d, &q, &integer(&a.n)?, a.s)?;
    let one = BigRational::from_integer(1.into());
    let renderings_agree = match (&schedule.graph_distance, &schedule.tree) {
        // log_{q^2} n = log_q n / 2
        (Some(gd), _) => Some(gd.coefficient == &schedule.cutoff_coefficient * BigRational::from_integer(2.into())),
        // k = q + 1 and log_{k-1} = log_q
        (_, Some(t)) => Some(t.coefficient == schedule.cutoff_coefficient && &t.k - &one == q),
        _ => None,
    };
    Ok(Outputs { primary: json(&Prediction { schedule, renderings_agree }), files: vec![] })
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Overwrite the recorded outputs instead of comparing.
    #[arg(long)]
    pub write: bool,
}
