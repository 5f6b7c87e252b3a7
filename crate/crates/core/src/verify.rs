//! The acceptance suite as library code, shared by the CLI and the test
//! harness. Reports carry no timings so repeated runs are byte-identical.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aux::{
    c_curve_with, gk_from_curve, k_curve_with, oracle_c_curve, wyner_ci, wyner_from_curve, CurvePoint,
    SolverConfig, WynerSolution, SLOPE_TOL,
};
use crate::csv::fmt_sig;
use crate::error::{Error, Result};
use crate::gaussian::{
    classify_regime, fig2_curve, gaussian_joint_rd, gaussian_lossy_gk, gaussian_lossy_wyner_ci, gaussian_slb,
    gaussian_wyner_ci_lossless, GaussianSource,
};
use crate::gk::gk_common_information;
use crate::gw::{lossy_point, pangloss_gap};
use crate::lossy::{check_corollary1, lossy_gk_ci, lossy_wyner_ci, DistortionSpec};
use crate::prob::{entropy_of, sources, JointPMF};

/// Oracle grid step used for the solver comparison.
pub const ORACLE_STEP: f64 = 0.02;

/// `C(0)` of the DSBS(0.1) grid oracle at [`ORACLE_STEP`], recorded from
/// its own run.
pub const DSBS01_ORACLE_C0: f64 = 0.872772630223;

/// `(id, name, runtime budget in seconds)`.
pub const CRITERIA: [(u8, &str, f64); 11] = [
    (1, "gaussian-lossless", 1.0),
    (2, "gaussian-sweep", 1.0),
    (3, "gaussian-continuity", 5.0),
    (4, "slb", 2.0),
    (5, "gk-exact", 1.0),
    (6, "wyner-oracle", 120.0),
    (7, "curves", 120.0),
    (8, "cross-extraction", 60.0),
    (9, "lossy-pipeline", 120.0),
    (10, "lossy-gk", 30.0),
    (11, "determinism", f64::INFINITY),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn budget(&self) -> f64 {
        CRITERIA[self.id as usize - 1].2
    }

    pub fn within_budget(&self) -> bool {
        self.elapsed.as_secs_f64() <= self.budget()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    /// One line per criterion.
    pub fn render(&self) -> String {
        let mut s = format!("seed {}\n", self.seed);
        for r in &self.results {
            s.push_str(&format!(
                "criterion {:>2} {:<20} {} {}\n",
                r.id,
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.detail
            ));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Criterion names or ids; all when empty.
    pub only: Vec<String>,
}

fn resolve(only: &[String]) -> Result<Vec<u8>> {
    if only.is_empty() {
        return Ok(CRITERIA.iter().map(|c| c.0).collect());
    }
    let mut ids = Vec::new();
    for name in only.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        let id = CRITERIA
            .iter()
            .find(|c| c.1 == name || c.0.to_string() == name)
            .map(|c| c.0)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown criterion '{name}'")))?;
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let ids = resolve(&opts.only)?;
    let suite = Suite::new(opts.seed);
    let results = ids.into_iter().map(|id| suite.run(id)).collect();
    Ok(VerifyReport {
        seed: opts.seed,
        results,
    })
}

/// Per-source solver output shared by criteria 6 and 7.
pub struct SourceRun {
    pub name: String,
    pub pmf: JointPMF,
    pub wyner: WynerSolution,
    pub c_curve: Vec<CurvePoint>,
    pub k_curve: Vec<CurvePoint>,
    pub oracle_c0: f64,
}

/// Holds the expensive solver runs so dependent criteria reuse them.
pub struct Suite {
    seed: u64,
    runs: OnceLock<Result<Vec<SourceRun>>>,
}

fn cfg(seed: u64) -> SolverConfig {
    SolverConfig {
        rng_seed: seed,
        ..SolverConfig::default()
    }
}

/// The 20 random 2x2 joints of the solver comparison, then DSBS sources.
pub fn comparison_sources() -> Vec<(String, JointPMF)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let v: Vec<f64> = (0..4).map(|_| -rng.gen::<f64>().ln()).collect();
        let pmf = JointPMF::from_rows(&[vec![v[0], v[1]], vec![v[2], v[3]]]).expect("positive entries");
        out.push((format!("random{i}"), pmf));
    }
    for p in [0.05, 0.1, 0.2] {
        out.push((format!("dsbs{p}"), sources::dsbs(p).expect("valid crossover")));
    }
    out
}

impl Suite {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            runs: OnceLock::new(),
        }
    }

    pub fn run(&self, id: u8) -> CriterionResult {
        let start = Instant::now();
        let outcome = match id {
            1 => gaussian_lossless(),
            2 => gaussian_sweep(),
            3 => gaussian_continuity(),
            4 => slb(self.seed),
            5 => gk_exact(self.seed),
            6 => self.wyner_oracle(),
            7 => self.curves(),
            8 => cross_extraction(self.seed),
            9 => lossy_pipeline(self.seed),
            10 => lossy_gk(self.seed),
            11 => determinism(self.seed),
            _ => Err(Error::InvalidConfig(format!("no criterion {id}"))),
        };
        let (passed, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionResult {
            id,
            name: CRITERIA[id as usize - 1].1.to_string(),
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }

    pub fn source_runs(&self) -> Result<&[SourceRun]> {
        let runs = self.runs.get_or_init(|| {
            let cfg = cfg(self.seed);
            comparison_sources()
                .into_iter()
                .map(|(name, pmf)| {
                    let wyner = wyner_ci(&pmf, &cfg)?;
                    let c_curve = c_curve_with(&pmf, &cfg, &wyner)?;
                    let k_curve = k_curve_with(&pmf, &cfg, &wyner)?;
                    let oracle = oracle_c_curve(&pmf, 2, ORACLE_STEP)?;
                    Ok(SourceRun {
                        name,
                        pmf,
                        wyner,
                        c_curve,
                        k_curve,
                        oracle_c0: oracle[0].shared_rate,
                    })
                })
                .collect()
        });
        match runs {
            Ok(r) => Ok(r),
            Err(e) => Err(Error::NotConverged(e.to_string())),
        }
    }

    fn wyner_oracle(&self) -> Result<(bool, String)> {
        let runs = self.source_runs()?;
        let tol = (2.0 * ORACLE_STEP).max(1e-2);
        let mut worst: (f64, &str) = (0.0, "");
        for r in runs {
            let d = (r.wyner.value - r.oracle_c0).abs();
            if d >= worst.0 {
                worst = (d, &r.name);
            }
        }
        let dsbs = runs.iter().find(|r| r.name == "dsbs0.1").expect("dsbs0.1 present");
        let frozen = (dsbs.wyner.value - DSBS01_ORACLE_C0).abs();
        let passed = worst.0 <= tol && frozen <= 1e-2;
        Ok((
            passed,
            format!(
                "sources={} max|solver-oracle|={} at {} (tol {}); dsbs0.1 solver={} recorded oracle={}",
                runs.len(),
                fmt_sig(worst.0),
                worst.1,
                fmt_sig(tol),
                fmt_sig(dsbs.wyner.value),
                fmt_sig(DSBS01_ORACLE_C0)
            ),
        ))
    }

    fn curves(&self) -> Result<(bool, String)> {
        let runs = self.source_runs()?;
        let mut failures = Vec::new();
        let mut worst_c: f64 = f64::NEG_INFINITY;
        let mut worst_k: f64 = f64::INFINITY;
        for r in runs {
            let c = curve_checks(&r.c_curve, -1.0);
            let k = curve_checks(&r.k_curve, 1.0);
            worst_c = worst_c.max(c.extreme_slope);
            worst_k = worst_k.min(k.extreme_slope);
            let i = r.pmf.mutual_information();
            let h = r.pmf.entropy_xy();
            let c_end = r
                .c_curve
                .iter()
                .find(|p| (p.excess_rate - i).abs() <= 1e-9)
                .map_or(f64::INFINITY, |p| p.shared_rate.abs());
            let k_end = r
                .k_curve
                .iter()
                .find(|p| (p.excess_rate - (h - i)).abs() <= 1e-9)
                .map_or(f64::INFINITY, |p| (p.shared_rate - h).abs());
            if !c.ok || !k.ok || c_end > 1e-9 || k_end > 1e-9 {
                failures.push(r.name.clone());
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "curves={} max C slope={} min K slope={} failing=[{}]",
                2 * runs.len(),
                fmt_sig(worst_c),
                fmt_sig(worst_k),
                failures.join(" ")
            ),
        ))
    }
}

struct CurveCheck {
    ok: bool,
    extreme_slope: f64,
}

/// Convexity and monotonicity for `direction = -1` (C curve), concavity
/// and growth for `direction = 1` (K curve), with slopes beyond unit
/// magnitude.
fn curve_checks(points: &[CurvePoint], direction: f64) -> CurveCheck {
    let slopes: Vec<f64> = points
        .windows(2)
        .map(|w| (w[1].shared_rate - w[0].shared_rate) / (w[1].excess_rate - w[0].excess_rate))
        .collect();
    let increasing_x = points.windows(2).all(|w| w[1].excess_rate > w[0].excess_rate);
    let monotone = points
        .windows(2)
        .all(|w| direction * (w[1].shared_rate - w[0].shared_rate) > 0.0);
    let curvature = slopes.windows(2).all(|s| -direction * (s[1] - s[0]) >= -1e-6);
    let unit = slopes.iter().all(|&s| direction * s >= 1.0 - 1e-3);
    let extreme_slope = if direction < 0.0 {
        slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else {
        slopes.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    CurveCheck {
        ok: !points.is_empty() && increasing_x && monotone && curvature && unit,
        extreme_slope,
    }
}

fn rho_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn gaussian_lossless() -> Result<(bool, String)> {
    let v = gaussian_wyner_ci_lossless(&GaussianSource::new(0.5)?);
    let exact = 0.5 * 3f64.log2();
    let mut sweep: f64 = 0.0;
    for rho in rho_grid() {
        let direct = 0.5 * ((1.0 + rho) / (1.0 - rho)).log2();
        sweep = sweep.max((gaussian_wyner_ci_lossless(&GaussianSource::new(rho)?) - direct).abs());
    }
    let err = (v - exact).abs();
    Ok((
        err <= 1e-9 && sweep <= 1e-12,
        format!("C(0.5)={} err={} sweep_err={}", fmt_sig(v), fmt_sig(err), fmt_sig(sweep)),
    ))
}

fn gaussian_sweep() -> Result<(bool, String)> {
    let src = GaussianSource::new(0.5)?;
    let d2 = 0.2;
    let grid: Vec<f64> = (1..1000).map(|k| k as f64 * 1e-3).collect();
    let curve = fig2_curve(&src, d2, &grid)?;
    let c = gaussian_wyner_ci_lossless(&src);
    let f = |d1: f64| gaussian_lossy_wyner_ci(&src, d1, d2);
    let (a, b) = (curve.a, curve.b);
    let plateau = curve
        .points
        .iter()
        .filter(|p| p.0 <= a)
        .all(|p| (p.1 - c).abs() <= 1e-12);
    let jump = |t: f64| -> Result<f64> { Ok((f(t + 1e-9)? - f(t - 1e-9)?).abs()) };
    let (ja, jb) = (jump(a)?, jump(b)?);
    let rising: Vec<&(f64, f64)> = curve.points.iter().filter(|p| p.0 > a && p.0 < b).collect();
    let increasing = rising.windows(2).all(|w| w[1].1 > w[0].1);
    let mut rd_err: f64 = 0.0;
    for p in curve.points.iter().filter(|p| p.0 >= b) {
        rd_err = rd_err.max((p.1 - gaussian_joint_rd(&src, p.0, d2)?).abs());
    }
    let peak = f(b)?;
    let last = curve.points.last().expect("nonempty grid").1;
    let rise_fall = peak > c + 1e-3 && last < peak - 1e-3;
    let passed = plateau
        && ja <= 1e-6
        && jb <= 1e-6
        && increasing
        && rd_err <= 1e-12
        && rise_fall
        && (a - 0.5).abs() < 1e-12
        && (b - 0.6875).abs() < 1e-12;
    Ok((
        passed,
        format!(
            "A={} B={} plateau={} jumps=({}, {}) increasing={} rd_err={} peak={} end={}",
            fmt_sig(a),
            fmt_sig(b),
            plateau,
            fmt_sig(ja),
            fmt_sig(jb),
            increasing,
            fmt_sig(rd_err),
            fmt_sig(peak),
            fmt_sig(last)
        ),
    ))
}

/// Locates every regime change along `t -> point(t)` on `(lo, hi)` and
/// returns the largest jump of the lossy CI across them.
fn scan_line(src: &GaussianSource, point: impl Fn(f64) -> (f64, f64), lo: f64, hi: f64) -> Result<(f64, usize)> {
    let n = 400;
    let regime = |t: f64| {
        let (d1, d2) = point(t);
        classify_regime(src, d1, d2)
    };
    let value = |t: f64| {
        let (d1, d2) = point(t);
        gaussian_lossy_wyner_ci(src, d1, d2)
    };
    let mut worst: f64 = 0.0;
    let mut crossings = 0;
    let mut prev_t = lo;
    let mut prev_r = regime(lo)?;
    for i in 1..=n {
        let t = lo + (hi - lo) * i as f64 / n as f64;
        let r = regime(t)?;
        if r != prev_r {
            let (mut a, mut b) = (prev_t, t);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if regime(m)? == prev_r {
                    a = m;
                } else {
                    b = m;
                }
            }
            worst = worst.max((value(b)? - value(a)?).abs());
            crossings += 1;
        }
        prev_t = t;
        prev_r = r;
    }
    Ok((worst, crossings))
}

fn gaussian_continuity() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut crossings = 0;
    let mut lines = 0;
    for rho in rho_grid() {
        let src = GaussianSource::new(rho)?;
        for j in 0..100 {
            let fixed = 0.005 + 0.99 * j as f64 / 100.0;
            let (w1, c1) = scan_line(&src, |t| (t, fixed), 1e-3, 0.999)?;
            let (w2, c2) = scan_line(&src, |t| (fixed, t), 1e-3, 0.999)?;
            worst = worst.max(w1).max(w2);
            crossings += c1 + c2;
            lines += 2;
        }
    }
    Ok((
        worst <= 1e-6 && crossings > 0,
        format!(
            "rhos=9 lines_per_rho={} crossings={} max_jump={}",
            lines / 9,
            crossings,
            fmt_sig(worst)
        ),
    ))
}

fn slb(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51b);
    let (mut tight, mut loose) = (0, 0);
    let mut tight_err: f64 = 0.0;
    let mut flag_errors = 0;
    let mut loose_violations = 0;
    for _ in 0..10_000 {
        let rho: f64 = rng.gen_range(0.01..0.99);
        let d1: f64 = rng.gen_range(1e-3..0.999);
        let d2: f64 = rng.gen_range(1e-3..0.999);
        let src = GaussianSource::new(rho)?;
        let (v, flag) = gaussian_slb(&src, d1, d2)?;
        let rd = gaussian_joint_rd(&src, d1, d2)?;
        let is_tight = (1.0 - d1) * (1.0 - d2) >= rho * rho;
        if flag != is_tight {
            flag_errors += 1;
        }
        if is_tight {
            tight += 1;
            tight_err = tight_err.max((v - rd).abs());
        } else {
            loose += 1;
            if v >= rd {
                loose_violations += 1;
            }
        }
    }
    Ok((
        tight_err <= 1e-12 && loose_violations == 0 && flag_errors == 0 && tight > 0 && loose > 0,
        format!(
            "tight={tight} max_err={} loose={loose} not_strict={loose_violations} flag_errors={flag_errors}",
            fmt_sig(tight_err)
        ),
    ))
}

/// A random block-diagonal joint with `1..=4` blocks and its block masses.
pub fn random_block_source(rng: &mut ChaCha8Rng) -> (JointPMF, Vec<f64>) {
    let blocks = rng.gen_range(1..=4);
    let mut spec = Vec::new();
    for _ in 0..blocks {
        let (h, w) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rows: Vec<Vec<f64>> = (0..h)
            .map(|_| (0..w).map(|_| rng.gen_range(0.05..1.0)).collect())
            .collect();
        spec.push((rng.gen_range(0.05..1.0), rows));
    }
    let total: f64 = spec.iter().map(|b| b.0).sum();
    let masses: Vec<f64> = spec.iter().map(|b| b.0 / total).collect();
    let normalized: Vec<(f64, Vec<Vec<f64>>)> = spec
        .into_iter()
        .zip(&masses)
        .map(|((_, rows), &m)| (m, rows))
        .collect();
    (
        sources::block_diagonal(&normalized).expect("valid blocks"),
        masses,
    )
}

fn gk_exact(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (pmf, masses) = random_block_source(&mut rng);
        worst = worst.max((gk_common_information(&pmf) - entropy_of(&masses)).abs());
    }
    let mut diag: f64 = 0.0;
    for n in 1..=8 {
        diag = diag.max((gk_common_information(&sources::identity(n)?) - (n as f64).log2()).abs());
    }
    Ok((
        worst <= 1e-12 && diag <= 1e-12,
        format!("blocks=50 max_err={} diagonal_err={}", fmt_sig(worst), fmt_sig(diag)),
    ))
}

fn cross_extraction(seed: u64) -> Result<(bool, String)> {
    let cfg = cfg(seed);
    let cases = [
        ("two-block", sources::two_block()?),
        ("dsbs0.1", sources::dsbs(0.1)?),
        ("identity2", sources::identity(2)?),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, pmf) in cases {
        let w = wyner_ci(&pmf, &cfg)?;
        let c = c_curve_with(&pmf, &cfg, &w)?;
        let k = k_curve_with(&pmf, &cfg, &w)?;
        let gk = gk_from_curve(&c, SLOPE_TOL)?;
        let wy = wyner_from_curve(&k, SLOPE_TOL)?;
        let gk_exact = gk_common_information(&pmf);
        let ok_gk = if name == "dsbs0.1" {
            gk == 0.0
        } else {
            (gk - gk_exact).abs() <= 2e-2
        };
        let ok_w = (wy - w.value).abs() <= 2e-2;
        passed &= ok_gk && ok_w;
        parts.push(format!(
            "{name}: gk {}/{} wyner {}/{}",
            fmt_sig(gk),
            fmt_sig(gk_exact),
            fmt_sig(wy),
            fmt_sig(w.value)
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn lossy_pipeline(seed: u64) -> Result<(bool, String)> {
    let cfg = cfg(seed);
    let pmf = sources::dsbs(0.1)?;
    let spec = DistortionSpec::hamming(2, 2);
    let lossless = wyner_ci(&pmf, &cfg)?.value;
    let at_zero = lossy_wyner_ci(&pmf, &spec, 0.0, 0.0, &cfg)?;
    let lossless_gap = (at_zero.value - lossless).abs();
    let lw = lossy_wyner_ci(&pmf, &spec, 0.02, 0.02, &cfg)?;
    let (point, _, _) = lossy_point(&lw.decomposition.joint, &spec)?;
    let gap = pangloss_gap(&point, lw.rd.rate).abs();
    let c1 = check_corollary1(&lw.decomposition, 1e-3);
    let c1_max = c1
        .recon_given_all
        .max(c1.xhat_y_given_x_u)
        .max(c1.yhat_x_given_y_u);
    let width = lw.bounds.upper - lw.bounds.lower;
    Ok((
        lossless_gap <= 2e-2 && gap <= 2e-2 && c1.passed && width <= 5e-2,
        format!(
            "D=0: lossy={} lossless={}; D=0.02: value={} pangloss_gap={} markov_residual_max={} bracket=[{}, {}] eps={}",
            fmt_sig(at_zero.value),
            fmt_sig(lossless),
            fmt_sig(lw.value),
            fmt_sig(gap),
            fmt_sig(c1_max),
            fmt_sig(lw.bounds.lower),
            fmt_sig(lw.bounds.upper),
            fmt_sig(lw.bounds.epsilon)
        ),
    ))
}

fn lossy_gk(seed: u64) -> Result<(bool, String)> {
    let cfg = cfg(seed);
    let joints = [
        ("two-block", sources::two_block()?),
        ("dsbs0.1", sources::dsbs(0.1)?),
        ("identity3", sources::identity(3)?),
        (
            "three-block",
            sources::block_diagonal(&[
                (0.5, vec![vec![1.0, 1.0]]),
                (0.3, vec![vec![1.0], vec![2.0]]),
                (0.2, vec![vec![1.0]]),
            ])?,
        ),
    ];
    let grid = [(0.0, 0.0), (0.01, 0.01), (0.1, 0.1), (0.05, 0.2)];
    let mut worst_excess = f64::NEG_INFINITY;
    let mut two_block_zero = f64::NAN;
    for (name, pmf) in &joints {
        let spec = DistortionSpec::hamming(pmf.nx(), pmf.ny());
        let cap = gk_common_information(pmf);
        for &(d1, d2) in &grid {
            let v = lossy_gk_ci(pmf, &spec, d1, d2, &cfg)?.value;
            worst_excess = worst_excess.max(v - cap);
            if *name == "two-block" && d1 == 0.0 && d2 == 0.0 {
                two_block_zero = (v - cap).abs();
            }
        }
    }
    let mut gauss_max: f64 = 0.0;
    for rho in rho_grid() {
        let src = GaussianSource::new(rho)?;
        for d in [0.05, 0.3, 0.6, 0.9] {
            gauss_max = gauss_max.max(gaussian_lossy_gk(&src, d, 1.0 - d)?.abs());
        }
    }
    Ok((
        worst_excess <= 1e-9 && two_block_zero <= 1e-9 && gauss_max == 0.0,
        format!(
            "max(lossy-gk)={} two_block_at_zero_err={} gaussian_max={}",
            fmt_sig(worst_excess),
            fmt_sig(two_block_zero),
            fmt_sig(gauss_max)
        ),
    ))
}

/// Runs the seeded criteria twice and compares the rendered reports.
fn determinism(seed: u64) -> Result<(bool, String)> {
    let opts = VerifyOptions {
        seed,
        only: ["gaussian-lossless", "gk-exact", "slb", "cross-extraction", "lossy-pipeline"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    let a = run_verify(&opts)?.render();
    let b = run_verify(&opts)?.render();
    Ok((
        a == b,
        format!("criteria={} bytes={} identical={}", opts.only.len(), a.len(), a == b),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_names() {
        assert_eq!(resolve(&[]).unwrap().len(), 11);
        assert_eq!(resolve(&["gaussian-sweep,1".into()]).unwrap(), vec![1, 2]);
        assert!(resolve(&["nope".into()]).is_err());
    }

    #[test]
    fn comparison_set() {
        let s = comparison_sources();
        assert_eq!(s.len(), 23);
        assert!(s.iter().all(|(_, p)| p.nx() == 2 && p.ny() == 2));
    }
}
