use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use commoninfo::aux::{c_curve_with, k_curve_with, oracle_c_curve, wyner_ci, AuxDecomposition, SolverConfig};
use commoninfo::csv::{self as table, fmt_sig, GaussianRow, LossyRow};
use commoninfo::gaussian::{
    classify_regime, fig2_curve, gaussian_joint_rd, gaussian_slb, gaussian_wyner_ci_lossless, GaussianSource,
};
use commoninfo::gk::gk_common_information;
use commoninfo::gw::{gk_plane_gap, lossy_point, pangloss_gap, RegionPoint};
use commoninfo::lossy::{check_corollary1, joint_rd, lossy_wyner_ci_with, DistortionSpec, RdConfig};
use commoninfo::verify::{run_verify, VerifyOptions, ORACLE_STEP};
use commoninfo::{Error, JointPMF};

#[derive(Debug, Parser)]
#[command(name = "commoninfo", version, about = "Common information of two sources on the Gray-Wyner network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lossless quantities of a discrete joint PMF and its tradeoff curves.
    Discrete {
        /// JSON file `{"p": [[...], ...], "x_labels"?: [...], "y_labels"?: [...]}`.
        pmf: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Directory for c_curve.csv, k_curve.csv and gw_points.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Bivariate Gaussian lossy common information sweep.
    Gaussian {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        d2: f64,
        /// Single D1 value; overrides the grid.
        #[arg(long)]
        d1: Option<f64>,
        /// `start:stop:step`
        #[arg(long, default_value = "0.001:0.999:0.001")]
        d1_grid: String,
        /// CSV file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Lossy Wyner common information of a discrete source.
    Lossy {
        pmf: PathBuf,
        #[arg(long, required_unless_present = "d1_grid", allow_hyphen_values = true)]
        d1: Option<f64>,
        /// Fixed D2; with `--d1-grid` the sweep runs over D1.
        #[arg(long)]
        d2: f64,
        #[arg(long)]
        d1_grid: Option<String>,
        /// JSON file `{"d_x": [[...]], "d_y": [[...]]}`; Hamming when absent.
        #[arg(long)]
        distortion: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Runs the acceptance suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Criterion names or ids, comma separated or repeated.
        #[arg(long)]
        only: Vec<String>,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated Lagrange weights.
    #[arg(long)]
    lambda_grid: Option<String>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let mut cfg = SolverConfig::default();
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(g) = &self.lambda_grid {
            cfg.lagrange_grid = g
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::input(format!("--lambda-grid: {e}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// An error together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotConverged(_) => 3,
            Error::Infeasible { .. } => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Discrete { pmf, solver, out, .. } => cmd_discrete(&pmf, &solver, out.as_deref()),
        Command::Gaussian {
            rho, d2, d1, d1_grid, out, ..
        } => cmd_gaussian(rho, d2, d1, &d1_grid, out.as_deref()),
        Command::Lossy {
            pmf,
            d1,
            d2,
            d1_grid,
            distortion,
            solver,
            out,
            ..
        } => cmd_lossy(&pmf, d1, d2, d1_grid.as_deref(), distortion.as_deref(), &solver, out.as_deref()),
        Command::Verify {
            seed,
            only,
            out,
            format,
        } => cmd_verify(seed, only, out.as_deref(), format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `start:stop:step` into a strictly increasing grid.
fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::input(format!("grid '{spec}': {e}")))?;
    let [start, stop, step] = parts[..] else {
        return Err(Failure::input(format!("grid '{spec}' must be start:stop:step")));
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Failure::input(format!("grid '{spec}' is not increasing")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Writes CSV to `out` or standard output; the summary goes to whichever
/// stream the CSV does not use.
struct Sink {
    to_file: bool,
}

impl Sink {
    fn new(out: Option<&Path>) -> Self {
        Self {
            to_file: out.is_some(),
        }
    }

    fn summary(&self, line: &str) {
        if self.to_file {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

fn cmd_discrete(path: &Path, solver: &SolverArgs, out: Option<&Path>) -> Result<u8, Failure> {
    let pmf = JointPMF::from_file(path)?;
    let cfg = solver.config()?;
    println!("alphabet      {} x {}", pmf.nx(), pmf.ny());
    println!("H(X)          {}", fmt_sig(pmf.entropy_x()));
    println!("H(Y)          {}", fmt_sig(pmf.entropy_y()));
    println!("H(X,Y)        {}", fmt_sig(pmf.entropy_xy()));
    println!("I(X;Y)        {}", fmt_sig(pmf.mutual_information()));
    let gk = gk_common_information(&pmf);
    println!("C_GK          {}", fmt_sig(gk));
    let w = wyner_ci(&pmf, &cfg)?;
    let mut line = format!("C_W           {} (residual {})", fmt_sig(w.value), fmt_sig(w.residual));
    if pmf.nx() * pmf.ny() <= 4 {
        let o = oracle_c_curve(&pmf, 2, ORACLE_STEP)?;
        line.push_str(&format!(", grid oracle {} at step {}", fmt_sig(o[0].shared_rate), ORACLE_STEP));
    }
    if w.multiple_optima {
        line.push_str(", multiple optimal decompositions");
    }
    println!("{line}");
    let c = c_curve_with(&pmf, &cfg, &w)?;
    let k = k_curve_with(&pmf, &cfg, &w)?;
    println!("c_curve       {} points", c.len());
    println!("k_curve       {} points", k.len());
    let points = vec![
        RegionPoint::lossless(&pmf, &AuxDecomposition::constant(&pmf), "constant")?,
        RegionPoint::lossless(&pmf, &AuxDecomposition::ergodic_class(&pmf), "gacs-korner")?,
        RegionPoint::lossless(&pmf, &w.decomposition, "wyner")?,
        RegionPoint::lossless(&pmf, &AuxDecomposition::identity(&pmf), "identity")?,
    ];
    let wp = &points[2].rate;
    let (gx, gy) = gk_plane_gap(&points[1].rate, pmf.entropy_x(), pmf.entropy_y());
    println!("pangloss gap  {} (Wyner point)", fmt_sig(pangloss_gap(wp, pmf.entropy_xy())));
    println!("gk plane gap  ({}, {}) (Gacs-Korner point)", fmt_sig(gx), fmt_sig(gy));
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        table::write_curve(File::create(dir.join("c_curve.csv"))?, &c)?;
        table::write_curve(File::create(dir.join("k_curve.csv"))?, &k)?;
        table::write_region(File::create(dir.join("gw_points.csv"))?, &points)?;
        println!("wrote         {}", dir.display());
    }
    if !w.converged || c.iter().chain(&k).any(|p| !p.converged) {
        eprintln!("warning: solver did not converge on every point");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_gaussian(rho: f64, d2: f64, d1: Option<f64>, grid: &str, out: Option<&Path>) -> Result<u8, Failure> {
    let src = GaussianSource::new(rho)?;
    let grid = match d1 {
        Some(v) => vec![v],
        None => parse_grid(grid)?,
    };
    let curve = fig2_curve(&src, d2, &grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &(d1, ci) in &curve.points {
        let (slb, tight) = gaussian_slb(&src, d1, d2)?;
        rows.push(GaussianRow {
            d1,
            d2,
            regime: classify_regime(&src, d1, d2)?.label().to_string(),
            joint_rd: gaussian_joint_rd(&src, d1, d2)?,
            lossy_ci: ci,
            slb,
            slb_tight: tight,
        });
    }
    let sink = Sink::new(out);
    sink.summary(&format!(
        "rho {} d2 {}: C_W {} A {} B {}",
        fmt_sig(src.rho()),
        fmt_sig(d2),
        fmt_sig(gaussian_wyner_ci_lossless(&src)),
        fmt_sig(curve.a),
        fmt_sig(curve.b)
    ));
    match out {
        Some(p) => table::write_gaussian(File::create(p)?, &rows)?,
        None => table::write_gaussian(io::stdout().lock(), &rows)?,
    }
    Ok(0)
}

#[derive(Deserialize)]
struct DistortionFile {
    d_x: Vec<Vec<f64>>,
    d_y: Vec<Vec<f64>>,
}

fn load_spec(path: Option<&Path>, pmf: &JointPMF) -> Result<DistortionSpec, Failure> {
    match path {
        None => Ok(DistortionSpec::hamming(pmf.nx(), pmf.ny())),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let f: DistortionFile =
                serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            Ok(DistortionSpec::custom(f.d_x, f.d_y)?)
        }
    }
}

fn cmd_lossy(
    path: &Path,
    d1: Option<f64>,
    d2: f64,
    grid: Option<&str>,
    distortion: Option<&Path>,
    solver: &SolverArgs,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let pmf = JointPMF::from_file(path)?;
    let spec = load_spec(distortion, &pmf)?;
    let cfg = solver.config()?;
    let d1s = match (grid, d1) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(d1)) => vec![d1],
        (None, None) => return Err(Failure::input("either --d1 or --d1-grid is required")),
    };
    let sink = Sink::new(out);
    let mut rows = Vec::with_capacity(d1s.len());
    let mut converged = true;
    for d1 in d1s {
        let rd = joint_rd(&pmf, &spec, d1, d2, &RdConfig::default())?;
        let lw = lossy_wyner_ci_with(&pmf, rd, &cfg)?;
        let c1 = check_corollary1(&lw.decomposition, 1e-3);
        let (point, _, _) = lossy_point(&lw.decomposition.joint, &spec)?;
        sink.summary(&format!(
            "D=({}, {}): R_XY {} lossy C_W {} in [{}, {}] eps {}; markov residuals ({}, {}, {}); pangloss gap {}",
            fmt_sig(d1),
            fmt_sig(d2),
            fmt_sig(lw.rd.rate),
            fmt_sig(lw.value),
            fmt_sig(lw.bounds.lower),
            fmt_sig(lw.bounds.upper),
            fmt_sig(lw.bounds.epsilon),
            fmt_sig(c1.recon_given_all),
            fmt_sig(c1.xhat_y_given_x_u),
            fmt_sig(c1.yhat_x_given_y_u),
            fmt_sig(pangloss_gap(&point, lw.rd.rate))
        ));
        converged &= lw.converged && lw.rd.converged;
        rows.push(LossyRow {
            d1,
            d2,
            rate: lw.rd.rate,
            lossy_wyner: lw.value,
            lb: lw.bounds.lower,
            ub: lw.bounds.upper,
            epsilon: lw.bounds.epsilon,
        });
    }
    match out {
        Some(p) => table::write_lossy_sweep(File::create(p)?, &rows)?,
        None => table::write_lossy_sweep(io::stdout().lock(), &rows)?,
    }
    if !converged {
        eprintln!("warning: solver did not converge on every point");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_verify(seed: u64, only: Vec<String>, out: Option<&Path>, format: ReportFormat) -> Result<u8, Failure> {
    let report = run_verify(&VerifyOptions { seed, only })?;
    let text = match format {
        ReportFormat::Text => report.render(),
        ReportFormat::Json => report.to_json() + "\n",
    };
    io::stdout().write_all(text.as_bytes())?;
    if let Some(p) = out {
        std::fs::write(p, report.to_json() + "\n")?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}
