//! Command-line configuration, the structured report and the dispatcher
//! behind the `pathhodge` binary.
//!
//! The human-readable table goes to standard output unless `--quiet`; the
//! machine document (JSON, or CSV for time series) follows it, or goes to
//! `--out` when given.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complex::{self, Cochain, PathComplex};
use crate::digraph::{self, Digraph, ElementaryPath, ParseOptions};
use crate::error::{Error, Result};
use crate::heat;
use crate::hodge::LaplacianBundle;
use crate::linalg::{self, Tolerances};
use crate::oracle;
use crate::sparse;
use crate::walk::{self, OrientedState};

#[derive(Debug, Clone, Parser)]
#[command(name = "pathhodge", version, about = "Path cohomology, Hodge theory, heat flow and lazy walks on digraphs")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Debug, Clone, Args)]
pub struct CommonOpts {
    /// Machine output format; defaults to CSV for `heat` and `walk`, JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the machine document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress the human-readable table.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Worker threads for internal parallelism; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub rank_tol: f64,
    /// Relative cutoff for zero eigenvalues.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub zero_tol: f64,
    /// Residual allowed when testing subspace membership.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub membership_tol: f64,
    /// Accept self-loops in the input.
    #[arg(long, global = true)]
    pub allow_self_loops: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Validate a digraph and print degrees and distances.
    Parse { input: PathBuf },
    /// Cohomology dimensions next to chain-side Betti numbers.
    Betti {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_p: usize,
    },
    /// The space Ω^p, with optional frame and operator exports.
    Omega {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Write the orthonormal frame (allowed coordinates) as dense CSV.
        #[arg(long)]
        frame_csv: Option<PathBuf>,
        /// Write d: A^p → A^{p+1} in triplet text.
        #[arg(long)]
        d_triplets: Option<PathBuf>,
    },
    /// Laplacian spectrum and Hodge subspace dimensions.
    Hodge {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        p: usize,
    },
    /// Heat flow of a p-form.
    Heat {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        p: usize,
        /// Comma list or `start:stop:count`.
        #[arg(long, default_value = "0,0.1,0.5,1,2,5,10")]
        t: String,
        /// CSV of initial coefficients over allowed p-paths; defaults to the
        /// projection of the first basis vector onto Ω^p.
        #[arg(long)]
        u0: Option<PathBuf>,
        /// Write every state as CSV.
        #[arg(long)]
        states: Option<PathBuf>,
    },
    /// Lazy random walk on oriented d-paths and its expectation process.
    Walk(WalkArgs),
    /// Recompute dimensions exactly and check operator identities.
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_p: usize,
        /// Skip the exact-rational oracle.
        #[arg(long)]
        no_oracle: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Laziness p; defaults to M/(M+1) + 0.01.
    #[arg(long)]
    pub lazy: Option<f64>,
    /// Start path `i0,i1,...,id`, optionally prefixed by `-` for the negative orientation.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, group = "mode")]
    pub exact: bool,
    #[arg(long, group = "mode")]
    pub mc: bool,
    #[arg(long, group = "mode")]
    pub both: bool,
}

impl Command {
    fn input(&self) -> &Path {
        match self {
            Command::Parse { input }
            | Command::Betti { input, .. }
            | Command::Omega { input, .. }
            | Command::Hodge { input, .. }
            | Command::Heat { input, .. }
            | Command::Verify { input, .. } => input,
            Command::Walk(w) => &w.input,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Betti { .. } => "betti",
            Command::Omega { .. } => "omega",
            Command::Hodge { .. } => "hodge",
            Command::Heat { .. } => "heat",
            Command::Walk(_) => "walk",
            Command::Verify { .. } => "verify",
        }
    }
}

/// One invariant check with its residual and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), passed: residual <= tolerance, residual, tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub symmetric: bool,
    pub connected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub digraph: GraphSummary,
    pub results: Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Time series for CSV output; not part of the JSON document.
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let g = &self.digraph;
        let _ = writeln!(out, "{}", self.command);
        let _ = writeln!(
            out,
            "digraph: {} vertices, {} edges{}{}",
            g.vertices,
            g.edges,
            if g.symmetric { ", symmetric" } else { "" },
            if g.connected { ", connected" } else { "" }
        );
        if let Value::Object(map) = &self.results {
            for (k, v) in map {
                let s = v.to_string();
                if s.len() <= 100 {
                    let _ = writeln!(out, "  {k:<22} {s}");
                }
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  [{}] {:<44} residual {:.3e} (tol {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
        out
    }
}

/// Everything the binary prints, already rendered.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub table: Option<String>,
    pub document: String,
    pub exit_code: i32,
}

impl RunConfig {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let c = &self.common;
        for (name, v) in [("rank-tol", c.rank_tol), ("zero-tol", c.zero_tol), ("membership-tol", c.membership_tol)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances { rank_rel: c.rank_tol, zero_eig_rel: c.zero_tol, membership: c.membership_tol })
    }

    fn format(&self) -> Format {
        self.common.format.unwrap_or(match self.command {
            Command::Heat { .. } | Command::Walk(_) => Format::Csv,
            _ => Format::Json,
        })
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_digraph(path: &Path, allow_self_loops: bool) -> Result<Digraph> {
    digraph::parse_digraph_with(&read_to_string(path)?, ParseOptions { allow_self_loops })
}

/// Runs a command and renders its output. Errors map to exit code 1.
pub fn execute(cfg: &RunConfig) -> Result<Rendered> {
    let work = || -> Result<Rendered> {
        let report = run(cfg)?;
        let document = match (cfg.format(), &report.csv) {
            (Format::Csv, Some(csv)) => csv.clone(),
            _ => report.to_json(),
        };
        if let Some(out) = &cfg.common.out {
            write_file(out, &document)?;
        }
        Ok(Rendered {
            table: (!cfg.common.quiet).then(|| report.table()),
            document: if cfg.common.out.is_some() { String::new() } else { document },
            exit_code: report.exit_code(),
        })
    };
    match cfg.common.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.tolerances()?;
    let g = load_digraph(cfg.command.input(), cfg.common.allow_self_loops)?;
    let mut report = Report {
        command: command_echo(cfg),
        digraph: GraphSummary {
            vertices: g.n_vertices(),
            edges: g.n_edges(),
            symmetric: g.is_symmetric(),
            connected: g.is_connected(),
        },
        results: Value::Null,
        checks: Vec::new(),
        warnings: Vec::new(),
        csv: None,
    };
    match &cfg.command {
        Command::Parse { .. } => run_parse(&g, &mut report)?,
        Command::Betti { max_p, .. } => run_betti(&g, *max_p, &tol, &mut report),
        Command::Omega { p, frame_csv, d_triplets, .. } => {
            run_omega(&g, *p, &tol, frame_csv.as_deref(), d_triplets.as_deref(), &mut report)?
        }
        Command::Hodge { p, .. } => run_hodge(&g, *p, &tol, &mut report),
        Command::Heat { p, t, u0, states, .. } => {
            run_heat(&g, *p, &tol, t, u0.as_deref(), states.as_deref(), &mut report)?
        }
        Command::Walk(args) => run_walk(&g, args, cfg.common.threads, &mut report)?,
        Command::Verify { max_p, no_oracle, .. } => run_verify(&g, *max_p, &tol, !no_oracle, &mut report)?,
    }
    Ok(report)
}

fn command_echo(cfg: &RunConfig) -> String {
    let args = match &cfg.command {
        Command::Parse { .. } => String::new(),
        Command::Betti { max_p, .. } => format!(" --max-p {max_p}"),
        Command::Omega { p, .. } | Command::Hodge { p, .. } => format!(" --p {p}"),
        Command::Heat { p, t, .. } => format!(" --p {p} --t {t}"),
        Command::Walk(w) => format!(
            " --d {} --steps {} --samples {} --seed {}{}{}",
            w.d,
            w.steps,
            w.samples,
            w.seed,
            w.lazy.map(|p| format!(" --lazy {p}")).unwrap_or_default(),
            w.start.as_ref().map(|s| format!(" --start {s}")).unwrap_or_default()
        ),
        Command::Verify { max_p, .. } => format!(" --max-p {max_p}"),
    };
    format!("{} {}{}", cfg.command.name(), cfg.command.input().display(), args)
}

fn run_parse(g: &Digraph, report: &mut Report) -> Result<()> {
    let degrees: Vec<usize> = (0..g.n_vertices()).map(|x| digraph::degree(g, x)).collect::<Result<_>>()?;
    report.results = json!({
        "edges": g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        "degrees": degrees,
        "distances": digraph::graph_distance(g),
    });
    Ok(())
}

fn run_betti(g: &Digraph, max_p: usize, tol: &Tolerances, report: &mut Report) {
    let cx = PathComplex::with_tolerances(g, max_p, *tol);
    let chain = complex::chain_homology_with(g, max_p, tol);
    let mut rows = Vec::new();
    for p in 0..=max_p {
        let r = cx.restricted_d(p);
        let h = cx.cohomology_dim(p);
        rows.push(json!({
            "p": p,
            "allowed": cx.allowed_basis(p).len(),
            "omega": cx.omega(p).dim(),
            "closure_defect": r.closure_defect,
            "cohomology": h,
            "chain_omega": chain.omega_dims[p],
            "betti": chain.betti[p],
        }));
        if r.closure_defect > 0 {
            report.warnings.push(format!(
                "closure defect {} at p = {p}: d does not map all of Ω^{p} into Ω^{}; cohomology uses the repaired domain",
                r.closure_defect,
                p + 1
            ));
        }
        if h != chain.betti[p] {
            report.warnings.push(format!("H^{p} = {h} differs from chain-side b_{p} = {}", chain.betti[p]));
        }
        report.checks.push(Check::at_most(format!("d(D^{p}) ⊆ Ω^{}", p + 1), r.image_residual, 1e-8));
    }
    report.results = json!({
        "cohomology": cx.cohomology_dims(),
        "betti": chain.betti,
        "dims": rows,
    });
}

fn run_omega(
    g: &Digraph,
    p: usize,
    tol: &Tolerances,
    frame_csv: Option<&Path>,
    d_triplets: Option<&Path>,
    report: &mut Report,
) -> Result<()> {
    let cx = PathComplex::with_tolerances(g, p, *tol);
    let omega = cx.omega(p);
    let basis = cx.allowed_basis(p);
    report.results = json!({
        "p": p,
        "allowed": basis.len(),
        "omega": omega.dim(),
        "closed_domain": cx.restricted_d(p).domain.dim(),
        "closure_defect": cx.restricted_d(p).closure_defect,
        "allowed_paths": basis.allowed_paths().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    });
    report.checks.push(Check::at_most("frame orthonormal", omega.orthonormality_defect(), 1e-10));
    let constraints = complex::omega_constraints(g, basis);
    let residual = if omega.dim() == 0 || constraints.nrows() == 0 {
        0.0
    } else {
        linalg::max_abs(&(&constraints * &omega.frame))
    };
    report.checks.push(Check::at_most("frame satisfies Ω constraints", residual, 1e-9));
    if let Some(path) = frame_csv {
        write_file(path, &sparse::dense_to_csv(&omega.frame))?;
    }
    if let Some(path) = d_triplets {
        write_file(path, &cx.d(p).to_triplet_text())?;
    }
    Ok(())
}

fn hodge_checks(b: &LaplacianBundle, cx: &PathComplex, report: &mut Report) {
    let p = b.p;
    let delta = &b.delta;
    report.checks.push(Check::at_most(
        format!("Δ^{p} symmetric"),
        linalg::max_abs(&(delta - delta.transpose())),
        1e-12,
    ));
    let min_eig = b.spectral.eigenvalues.iter().copied().fold(0.0, f64::min);
    report.checks.push(Check::at_most(format!("Δ^{p} positive semidefinite"), (-min_eig).max(0.0), 1e-10));
    let recon = b.spectral.reconstruction_error(delta);
    report.checks.push(Check::at_most(format!("Δ^{p} eigen reconstruction"), recon, 1e-9 * delta.norm().max(1.0)));
    let h = cx.cohomology_dim(p);
    let k = b.spectral.kernel_dim();
    if b.closure_defect == 0 {
        report.checks.push(Check::at_most(format!("dim ker Δ^{p} = dim H^{p}"), (k as f64 - h as f64).abs(), 0.0));
    } else if k != h {
        report.warnings.push(format!("closure defect at p = {p}: dim ker Δ = {k}, dim H = {h}"));
    }
}

fn run_hodge(g: &Digraph, p: usize, tol: &Tolerances, report: &mut Report) {
    let cx = PathComplex::with_tolerances(g, p, *tol);
    let b = LaplacianBundle::new(&cx, p);
    let s = b.summary();
    report.results = json!({
        "p": p,
        "omega_dim": s.omega_dim,
        "harmonic_dim": s.harmonic_dim,
        "exact_dim": s.exact_dim,
        "coexact_dim": s.coexact_dim,
        "closure_defect": s.closure_defect,
        "closure_defects": (0..=p).map(|q| cx.restricted_d(q).closure_defect).collect::<Vec<_>>(),
        "cohomology_dim": cx.cohomology_dim(p),
        "eigenvalues": s.eigenvalues.iter().map(|&l| round_small(l)).collect::<Vec<_>>(),
        "spectral_gap": heat::spectral_gap(&b),
    });
    if b.closure_defect > 0 {
        report.warnings.push(format!("closure defect {} at p = {p}", b.closure_defect));
    }
    hodge_checks(&b, &cx, report);
}

/// Zeroes values that are pure rounding noise so reports are stable.
fn round_small(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

/// `a,b,c` or `start:stop:count`.
pub fn parse_times(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("cannot parse time grid {spec:?}"));
    let times: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        match count {
            0 => return Err(bad()),
            1 => vec![start],
            _ => (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect(),
        }
    } else {
        spec.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if times.is_empty() {
        return Err(bad());
    }
    Ok(times)
}

/// Coefficients separated by commas, whitespace or newlines.
pub fn parse_coefficients(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad coefficient {s:?}"))))
        .collect()
}

fn run_heat(
    g: &Digraph,
    p: usize,
    tol: &Tolerances,
    t: &str,
    u0: Option<&Path>,
    states: Option<&Path>,
    report: &mut Report,
) -> Result<()> {
    let times = parse_times(t)?;
    let cx = PathComplex::with_tolerances(g, p, *tol);
    let b = LaplacianBundle::new(&cx, p);
    let basis = b.basis().clone();
    let u0 = match u0 {
        Some(path) => Cochain::new(basis.clone(), DVector::from_vec(parse_coefficients(&read_to_string(path)?)?))?,
        None => {
            let mut e = DVector::zeros(basis.len());
            if !basis.is_empty() {
                e[0] = 1.0;
            }
            Cochain::new(basis.clone(), b.omega.project(&e))?
        }
    };
    let traj = heat::evolve(&b, &u0, &times)?;
    if let Some(path) = states {
        write_file(path, &traj.states_csv())?;
    }
    let h = heat::harmonic_limit(&b, &u0)?;
    let gap = heat::spectral_gap(&b);
    report.checks.push(Check::at_most("norm non-increasing", traj.max_norm_increase(), 1e-12));
    let r0 = (&u0.coeffs - &h.coeffs).norm();
    let decay =
        times.iter().zip(&traj.dist_to_harmonic).map(|(&t, &d)| d - (-gap.value() * t).exp() * r0).fold(0.0, f64::max);
    report.checks.push(Check::at_most("‖T_t u0 - H(u0)‖ ≤ e^{-λ₁t}‖u0 - H(u0)‖", decay, 1e-9));
    let t1 = heat::heat_operator(&b, 0.3)?;
    let t2 = heat::heat_operator(&b, 0.7)?;
    let t12 = heat::heat_operator(&b, 1.0)?;
    let semigroup = linalg::max_abs(&(&t1.matrix * &t2.matrix - &t12.matrix));
    report.checks.push(Check::at_most("semigroup T_0.3 T_0.7 = T_1", semigroup, 1e-10));
    let t_last = *times.last().unwrap();
    let sc = heat::stochastic_completeness(&b, g.is_connected(), t_last)?;
    if sc.applicable {
        report.checks.push(Check::at_most(
            format!("row sums of p({t_last},x,·) equal 1"),
            sc.max_row_sum_deviation,
            1e-10,
        ));
    } else {
        report.warnings.push(format!(
            "stochastic completeness not applicable at p = {p} (needs p = 0, connected, Ω^0 = A^0); measured row-sum deviation {:.3e}",
            sc.max_row_sum_deviation
        ));
    }
    report.results = json!({
        "p": p,
        "omega_dim": b.dim(),
        "spectral_gap": gap,
        "times": times,
        "norms": traj.norms,
        "dist_to_harmonic": traj.dist_to_harmonic,
        "harmonic_limit": h.coeffs.iter().copied().map(round_small).collect::<Vec<_>>(),
        "row_sum_deviation": sc.max_row_sum_deviation,
    });
    report.csv = Some(traj.to_csv());
    Ok(())
}

fn parse_start(text: &str) -> Result<OrientedState> {
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    let vertices = body
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad start path {text:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrientedState { path: ElementaryPath::new(vertices), sign })
}

fn run_walk(g: &Digraph, args: &WalkArgs, threads: Option<usize>, report: &mut Report) -> Result<()> {
    let table = walk::signed_neighbors(g, args.d)?;
    let m_max = table.max_valence();
    let laziness = args.lazy.unwrap_or_else(|| walk::default_laziness(m_max));
    if !(0.0..=1.0).contains(&laziness) {
        return Err(Error::InvalidLaziness(laziness));
    }
    let start = match &args.start {
        Some(s) => parse_start(s)?,
        None => OrientedState { path: table.path(0), sign: 1 },
    };
    if start.path.dim() != args.d || table.index_of(&start.path).is_none() {
        return Err(Error::NotAllowed { path: start.path.0.clone(), dim: args.d });
    }
    let v = table.index_of(&start.path).unwrap();
    let (run_exact, run_mc) = match (args.exact, args.mc, args.both) {
        (false, true, false) => (false, true),
        (_, _, true) => (true, true),
        _ => (true, false),
    };

    let explicit = walk::upper_laplacian(&table);
    let dual = linalg::max_abs(&(&explicit - walk::upper_laplacian_composed(&table)));
    if table.is_regular() {
        report.checks.push(Check::at_most("Δ⁺ neighbour formula = ∂∘d_ω", dual, 1e-10));
    } else {
        report.warnings.push(format!(
            "{} of {} paths have coface count ≠ valence; ∂∘d_ω differs from the neighbour formula by {dual:.3e}",
            table.irregular().len(),
            table.len()
        ));
    }
    report.checks.push(Check::at_most("Δ⁺ ω-self-adjoint", walk::self_adjointness_residual(&table, &explicit), 1e-10));
    let spec = walk::upper_spectrum(&table);
    let (lo, hi) = (spec[0], spec[spec.len() - 1]);
    report.checks.push(Check::at_most("spectrum(Δ⁺) ⊆ [0, M+1]", (-lo).max(hi - (m_max as f64 + 1.0)).max(0.0), 1e-9));
    let a_lo = laziness - m_max as f64 * (1.0 - laziness);
    let a_spec: Vec<f64> = spec.iter().map(|l| 1.0 - (1.0 - laziness) * l).collect();
    let a_violation = a_spec.iter().map(|&mu| (a_lo - mu).max(mu - 1.0)).fold(0.0, f64::max);
    report.checks.push(Check::at_most("spectrum(A) ⊆ [p - M(1-p), 1]", a_violation, 1e-9));
    if a_lo.abs() >= 1.0 {
        report.warnings.push(format!("|p - M(1-p)| = {:.3} ≥ 1: the norm bound allows growth", a_lo.abs()));
    }
    let op = walk::transition_matrix(&table, laziness)?;
    report.checks.push(Check::at_most("Markov kernel rows sum to 1", op.row_sum_deviation(), 1e-12));
    report.checks.push(Check::at_most("kernel induces A = I - (1-p)Δ⁺", op.induced_residual(), 1e-12));

    let mismatches = table.printed_definition_mismatches(g);
    if !mismatches.is_empty() {
        report.warnings.push(format!(
            "{} neighbour pairs differ between the derived relation and the printed index ranges",
            mismatches.len()
        ));
    }
    if !table.is_d_connected() {
        report.warnings.push(format!("not d-connected: {} neighbour classes", table.components()));
    }

    let metric = table.metric();
    let powers = walk::expectation_by_powers(&table, &start, args.steps, laziness)?;
    let exact = if run_exact { Some(walk::expectation_exact(&table, &start, args.steps, laziness)?) } else { None };
    if let Some(e) = &exact {
        let diff = e.forms.iter().zip(&powers).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        report.checks.push(Check::at_most("E_n = Aⁿ𝟙_v (kernel iteration)", diff, 1e-10));
    }
    let e0 = metric.norm(&powers[0]);
    report.checks.push(Check::at_most("‖E_0‖_ω = 1/√m(v)", (e0 - 1.0 / (table.valence(v) as f64).sqrt()).abs(), 1e-15));
    let upper = powers
        .iter()
        .enumerate()
        .map(|(n, e)| metric.norm(e) - walk::norm_upper_bound(m_max, laziness, n))
        .fold(0.0, f64::max);
    report.checks.push(Check::at_most("‖E_n‖_ω ≤ max(|p - M(1-p)|ⁿ, 1)", upper, 1e-10));
    let witness = walk::lower_bound_witness(g, &table, &start)?;
    match &witness {
        Some(w) => {
            let gap = powers.iter().map(|e| w.bound - metric.norm(e)).fold(0.0, f64::max);
            report.checks.push(Check::at_most("‖E_n‖_ω ≥ witnessed lower bound", gap, 1e-10));
        }
        None => report.warnings.push("lower bound not witnessed: no face of the start path gives d𝟙 in ker Δ⁺".into()),
    }
    let limit = match walk::expectation_limit(&table, &start, laziness) {
        Ok(l) => {
            let r0 = metric.norm(&(&powers[0] - &l.limit));
            let excess = powers
                .iter()
                .enumerate()
                .map(|(n, e)| metric.norm(&(e - &l.limit)) - l.rate.powi(n as i32) * r0)
                .fold(0.0, f64::max);
            report.checks.push(Check::at_most("‖E_n - proj_{ker Δ⁺} 𝟙_v‖_ω ≤ ρⁿ‖E_0 - proj‖_ω", excess, 1e-10));
            Some(l)
        }
        Err(Error::NonConvergent(mu)) => {
            report.warnings.push(format!("Aⁿ does not converge: eigenvalue {mu} off the kernel"));
            None
        }
        Err(e) => return Err(e),
    };

    let mc = if run_mc {
        Some(walk::expectation_mc(&table, &start, args.steps, laziness, args.samples, args.seed, threads)?)
    } else {
        None
    };
    if let (Some(e), Some(m)) = (&exact, &mc) {
        let mut worst = 0.0f64;
        for n in 0..=args.steps {
            for s in 0..2 * table.len() {
                let q = e.probabilities[n][s];
                let se = (q * (1.0 - q) / args.samples as f64).sqrt();
                let dev = (m.probabilities[n][s] - q).abs();
                if dev > 0.0 {
                    worst = worst.max(if se > 0.0 { dev / se } else { f64::INFINITY });
                }
            }
        }
        if worst > 4.0 && worst <= 6.0 {
            report.warnings.push(format!("Monte Carlo deviation {worst:.2} standard errors (flagged between 4 and 6)"));
        }
        report.checks.push(Check::at_most("Monte Carlo within 6 standard errors", worst, 6.0));
    }

    let mut csv = String::from("n,state,sign,prob_exact,prob_mc,stderr,E_n\n");
    for (n, e_n) in powers.iter().enumerate() {
        for (w, e_nw) in e_n.iter().enumerate() {
            for sign in [1i8, -1] {
                let s = walk::state_index(w, sign);
                let pe = exact.as_ref().map(|e| e.probabilities[n][s].to_string()).unwrap_or_default();
                let (pm, se) = mc
                    .as_ref()
                    .map(|m| (m.probabilities[n][s].to_string(), m.stderr[n][s].to_string()))
                    .unwrap_or_default();
                let _ = writeln!(csv, "{n},\"{}\",{sign},{pe},{pm},{se},{}", table.path(w), e_nw);
            }
        }
    }
    report.csv = Some(csv);
    report.results = json!({
        "d": args.d,
        "laziness": laziness,
        "start": start,
        "states": 2 * table.len(),
        "max_valence": m_max,
        "valence_histogram": table.histogram().into_iter().map(|(k, c)| [k, c]).collect::<Vec<_>>(),
        "regular": table.is_regular(),
        "d_connected": table.is_d_connected(),
        "printed_definition_mismatches": mismatches.len(),
        "spectrum_upper_laplacian": spec.iter().copied().map(round_small).collect::<Vec<_>>(),
        "spectrum_bounds": {"delta_plus": [0.0, m_max as f64 + 1.0], "transition": [a_lo, 1.0]},
        "lower_bound": witness,
        "limit": limit.as_ref().map(|l| l.limit.iter().copied().map(round_small).collect::<Vec<_>>()),
        "limit_rate": limit.as_ref().map(|l| l.rate),
        "final_norm": metric.norm(powers.last().unwrap()),
    });
    Ok(())
}

fn run_verify(g: &Digraph, max_p: usize, tol: &Tolerances, use_oracle: bool, report: &mut Report) -> Result<()> {
    let n = g.n_vertices();
    let mut results = serde_json::Map::new();
    if use_oracle {
        let exact = oracle::exact_dims(g, max_p)?;
        let float = oracle::float_dims(g, max_p);
        for c in oracle::compare(&exact, &float) {
            report.checks.push(Check::at_most(
                format!("{}[{}] exact {} = float {}", c.quantity, c.p, c.exact, c.float),
                (c.exact as f64 - c.float as f64).abs(),
                0.0,
            ));
        }
        results.insert("exact".into(), serde_json::to_value(&exact).expect("serializes"));
    }
    let fits = complex::lambda_len(n, max_p + 3).is_some_and(|len| len <= 2_000_000);
    if fits {
        for p in 0..=max_p {
            let d0 = complex::build_d(g, p).matrix;
            let d1 = complex::build_d(g, p + 1).matrix;
            report.checks.push(Check::at_most(format!("d∘d = 0 on Λ^{p}"), d1.matmul(&d0).nnz() as f64, 0.0));
            let b1 = complex::build_boundary(g, p + 1).matrix;
            let b2 = complex::build_boundary(g, p + 2).matrix;
            report.checks.push(Check::at_most(format!("∂∘∂ = 0 on Λ^{}", p + 2), b1.matmul(&b2).nnz() as f64, 0.0));
            let adj = if b1 == d0.transpose() { 0.0 } else { 1.0 };
            report.checks.push(Check::at_most(format!("⟨df, g⟩ = ⟨f, ∂g⟩ on Λ^{p}"), adj, 0.0));
        }
    } else {
        report.warnings.push("Λ-level identity checks skipped: tuple space too large".into());
    }
    let cx = PathComplex::with_tolerances(g, max_p, *tol);
    for p in 0..=max_p {
        let b = LaplacianBundle::new(&cx, p);
        hodge_checks(&b, &cx, report);
        if b.closure_defect > 0 {
            report.warnings.push(format!("closure defect {} at p = {p}", b.closure_defect));
        }
    }
    results.insert("cohomology".into(), json!(cx.cohomology_dims()));
    report.results = Value::Object(results);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grids() {
        assert_eq!(parse_times("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_times("0.1, 2").unwrap(), vec![0.1, 2.0]);
        assert!(parse_times("1:2").is_err());
        assert!(parse_times("a").is_err());
    }

    #[test]
    fn start_paths() {
        let s = parse_start("-0,1").unwrap();
        assert_eq!((s.path.0, s.sign), (vec![0, 1], -1));
        assert!(parse_start("0,x").is_err());
    }

    #[test]
    fn coefficients() {
        assert_eq!(parse_coefficients("1, 0\n0.5").unwrap(), vec![1.0, 0.0, 0.5]);
    }
}
