//! Discrete lossy quantities: the two-distortion rate-distortion function,
//! lossy Wyner and Gács-Körner common information, and Hamming Shannon lower
//! bounds.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::aux::SolverConfig;
use crate::error::{Error, Result};
use crate::gk::{ergodic_decomposition, gk_common_information};
use crate::prob::{binary_entropy, clamp_info, entropy_of, plog2p, Axis, JointPMF, NDDist};

/// Per-letter distortion measures for both sources.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionSpec {
    pub name: String,
    /// `|X| x |X̂|`
    pub d_x: Vec<Vec<f64>>,
    /// `|Y| x |Ŷ|`
    pub d_y: Vec<Vec<f64>>,
}

fn hamming_matrix(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect()
}

fn is_hamming(d: &[Vec<f64>]) -> bool {
    d.iter().enumerate().all(|(i, row)| {
        row.len() == d.len()
            && row
                .iter()
                .enumerate()
                .all(|(j, &v)| v == if i == j { 0.0 } else { 1.0 })
    })
}

impl DistortionSpec {
    /// Hamming distortion on both alphabets, reconstructing in the source
    /// alphabets.
    pub fn hamming(nx: usize, ny: usize) -> Self {
        Self {
            name: "hamming".into(),
            d_x: hamming_matrix(nx),
            d_y: hamming_matrix(ny),
        }
    }

    pub fn custom(d_x: Vec<Vec<f64>>, d_y: Vec<Vec<f64>>) -> Result<Self> {
        for d in [&d_x, &d_y] {
            let w = d.first().map_or(0, Vec::len);
            if d.is_empty() || w == 0 || d.iter().any(|r| r.len() != w) {
                return Err(Error::ShapeMismatch("distortion matrix must be rectangular".into()));
            }
            if d.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::UnsupportedDistortion(
                    "entries must be finite and nonnegative".into(),
                ));
            }
        }
        let name = if is_hamming(&d_x) && is_hamming(&d_y) {
            "hamming"
        } else {
            "custom"
        };
        Ok(Self {
            name: name.into(),
            d_x,
            d_y,
        })
    }

    pub fn mx(&self) -> usize {
        self.d_x[0].len()
    }

    pub fn my(&self) -> usize {
        self.d_y[0].len()
    }

    fn check(&self, pmf: &JointPMF) -> Result<()> {
        if self.d_x.len() != pmf.nx() || self.d_y.len() != pmf.ny() {
            return Err(Error::ShapeMismatch(format!(
                "distortion rows ({}, {}) do not match the alphabets ({}, {})",
                self.d_x.len(),
                self.d_y.len(),
                pmf.nx(),
                pmf.ny()
            )));
        }
        Ok(())
    }
}

/// Settings of the rate-distortion solver.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdConfig {
    pub max_iters: usize,
    pub bisect_iters: usize,
    /// Distortion matching tolerance of the multiplier search.
    pub dist_tol: f64,
    /// Duality-gap tolerance of each inner run, in bits.
    pub rd_tol: f64,
    /// Largest multiplier searched, in nats per unit distortion.
    pub s_max: f64,
}

impl Default for RdConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            bisect_iters: 60,
            dist_tol: 1e-6,
            rd_tol: 1e-8,
            s_max: 1e4,
        }
    }
}

/// Output of [`joint_rd`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RDSolution {
    /// Row-major `|X||Y| x (|X̂||Ŷ|)`; reconstruction index `x̂ * |Ŷ| + ŷ`.
    pub test_channel: Vec<f64>,
    pub mx: usize,
    pub my: usize,
    pub rate: f64,
    pub d1_achieved: f64,
    pub d2_achieved: f64,
    /// Slopes `-dR/dD` in bits per unit distortion (0 when inactive).
    pub multipliers: (f64, f64),
    /// Certified dual lower bound on the rate.
    pub lower_bound: f64,
    pub converged: bool,
}

impl RDSolution {
    pub fn recon_count(&self) -> usize {
        self.mx * self.my
    }

    pub fn channel_row(&self, cell: usize) -> &[f64] {
        let n = self.recon_count();
        &self.test_channel[cell * n..(cell + 1) * n]
    }
}

/// One distortion constraint of a generic rate-distortion problem.
struct RdAxis {
    /// Source symbol of each cell.
    src_of: Vec<usize>,
    /// Reconstruction symbol of each output.
    rec_of: Vec<usize>,
    d: Vec<Vec<f64>>,
    marginal: Vec<f64>,
}

impl RdAxis {
    fn d_min(&self) -> f64 {
        self.marginal
            .iter()
            .zip(&self.d)
            .map(|(p, row)| p * row.iter().cloned().fold(f64::INFINITY, f64::min))
            .sum()
    }

    /// `(best constant reconstruction, its distortion)`
    fn d_max(&self) -> (usize, f64) {
        let m = self.d[0].len();
        (0..m)
            .map(|t| (t, self.marginal.iter().zip(&self.d).map(|(p, r)| p * r[t]).sum::<f64>()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty reconstruction alphabet")
    }

    fn dist(&self, c: usize, z: usize) -> f64 {
        self.d[self.src_of[c]][self.rec_of[z]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum AxisMode {
    /// Distortion at its minimum: outputs restricted to per-symbol argmins.
    AtMin,
    /// Constraint slack: the reconstruction is a fixed constant.
    Inactive(usize),
    Active,
}

struct RdProblem {
    p: Vec<f64>,
    nz: usize,
    axes: Vec<RdAxis>,
    modes: Vec<AxisMode>,
}

struct RdRun {
    q: Vec<f64>,
    r: Vec<f64>,
    rate_nats: f64,
    dist: Vec<f64>,
    /// `-sum p ln Z_c - ln max c(z)`, the dual value before the `s.D` term.
    dual_nats: f64,
}

impl RdProblem {
    fn allowed(&self, c: usize, z: usize) -> bool {
        self.axes.iter().zip(&self.modes).all(|(ax, mode)| match *mode {
            AxisMode::AtMin => {
                let row = &ax.d[ax.src_of[c]];
                let best = row.iter().cloned().fold(f64::INFINITY, f64::min);
                ax.dist(c, z) <= best + 1e-12
            }
            AxisMode::Inactive(t) => ax.rec_of[z] == t,
            AxisMode::Active => true,
        })
    }

    fn weights(&self, s: &[f64]) -> Vec<f64> {
        let n = self.p.len();
        let mut w = vec![0.0; n * self.nz];
        for c in 0..n {
            for z in 0..self.nz {
                if self.allowed(c, z) {
                    let e: f64 = self
                        .axes
                        .iter()
                        .zip(s)
                        .map(|(ax, &sk)| sk * ax.dist(c, z))
                        .sum();
                    w[c * self.nz + z] = (-e).exp();
                }
            }
        }
        w
    }

    fn run(&self, s: &[f64], r0: Option<&[f64]>, cfg: &RdConfig) -> (RdRun, bool) {
        let (n, nz) = (self.p.len(), self.nz);
        let w = self.weights(s);
        let mut r: Vec<f64> = match r0 {
            Some(r) => r.to_vec(),
            None => vec![1.0 / nz as f64; nz],
        };
        // outputs never allowed carry no mass
        for z in 0..nz {
            if (0..n).all(|c| w[c * nz + z] == 0.0) {
                r[z] = 0.0;
            } else if r[z] == 0.0 {
                r[z] = 1e-12;
            }
        }
        let total: f64 = r.iter().sum();
        r.iter_mut().for_each(|v| *v /= total);
        let mut zc = vec![0.0; n];
        let mut cz = vec![0.0; nz];
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            for c in 0..n {
                zc[c] = (0..nz).map(|z| r[z] * w[c * nz + z]).sum();
            }
            for z in 0..nz {
                cz[z] = (0..n)
                    .filter(|&c| self.p[c] > 0.0)
                    .map(|c| self.p[c] * w[c * nz + z] / zc[c])
                    .sum();
            }
            let gap = cz.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ln();
            for z in 0..nz {
                r[z] *= cz[z];
            }
            if gap <= cfg.rd_tol * LN_2 {
                converged = true;
                break;
            }
        }
        let total: f64 = r.iter().sum();
        r.iter_mut().for_each(|v| *v /= total);
        let mut q = vec![0.0; n * nz];
        for c in 0..n {
            zc[c] = (0..nz).map(|z| r[z] * w[c * nz + z]).sum();
            for z in 0..nz {
                q[c * nz + z] = if zc[c] > 0.0 {
                    r[z] * w[c * nz + z] / zc[c]
                } else {
                    0.0
                };
            }
            // drop denormal dust so downstream ratios stay finite
            let row = &mut q[c * nz..(c + 1) * nz];
            row.iter_mut().filter(|v| **v < 1e-200).for_each(|v| *v = 0.0);
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|v| *v /= s);
            }
        }
        let mut out_marg = vec![0.0; nz];
        for c in 0..n {
            for z in 0..nz {
                out_marg[z] += self.p[c] * q[c * nz + z];
            }
        }
        let mut rate = 0.0;
        let mut dist = vec![0.0; self.axes.len()];
        for c in 0..n {
            if self.p[c] == 0.0 {
                continue;
            }
            for z in 0..nz {
                let m = q[c * nz + z];
                if self.p[c] * m > 0.0 && out_marg[z] > 0.0 {
                    rate += self.p[c] * m * (m / out_marg[z]).ln();
                    for (k, ax) in self.axes.iter().enumerate() {
                        dist[k] += self.p[c] * m * ax.dist(c, z);
                    }
                }
            }
        }
        for z in 0..nz {
            cz[z] = (0..n)
                .filter(|&c| self.p[c] > 0.0 && zc[c] > 0.0)
                .map(|c| self.p[c] * w[c * nz + z] / zc[c])
                .sum();
        }
        let max_c = cz.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dual: f64 = -(0..n)
            .filter(|&c| self.p[c] > 0.0)
            .map(|c| self.p[c] * zc[c].ln())
            .sum::<f64>()
            - max_c.ln();
        (
            RdRun {
                q,
                r,
                rate_nats: rate.max(0.0),
                dist,
                dual_nats: dual,
            },
            converged,
        )
    }

    /// Finds the multiplier of axis `k` (others fixed in `s`) that meets
    /// `target`, by bisection on `ln s`.
    fn solve_axis(
        &self,
        k: usize,
        target: f64,
        s: &mut Vec<f64>,
        warm: &mut Option<Vec<f64>>,
        cfg: &RdConfig,
        inner: &dyn Fn(&mut Vec<f64>, &mut Option<Vec<f64>>) -> (RdRun, bool),
    ) -> (RdRun, bool) {
        // slack constraint: the unconstrained optimum already meets it
        s[k] = 0.0;
        let (run, ok) = inner(s, warm);
        if run.dist[k] <= target + cfg.dist_tol {
            return (run, ok);
        }
        *warm = Some(run.r.clone());
        let lo0 = (1e-6f64).ln();
        let (mut lo, mut hi) = (lo0, cfg.s_max.ln());
        let mut best: Option<(RdRun, bool, f64)> = None;
        for _ in 0..cfg.bisect_iters {
            let mid = 0.5 * (lo + hi);
            s[k] = mid.exp();
            let (run, ok) = inner(s, warm);
            *warm = Some(run.r.clone());
            let err = run.dist[k] - target;
            let better = best.as_ref().map_or(true, |(_, _, e)| err.abs() < e.abs());
            if better {
                best = Some((run, ok, err));
            }
            if err.abs() <= cfg.dist_tol {
                break;
            }
            if err > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (run, ok, err) = best.expect("bisect_iters >= 1");
        // below target even as s -> 0+: the rate is flat there
        let met = err.abs() <= cfg.dist_tol || (err < 0.0 && lo == lo0);
        (run, ok && met)
    }
}

fn xy_problem(pmf: &JointPMF, spec: &DistortionSpec) -> RdProblem {
    let (nx, ny) = (pmf.nx(), pmf.ny());
    let (mx, my) = (spec.mx(), spec.my());
    let cells = nx * ny;
    let nz = mx * my;
    let ax_x = RdAxis {
        src_of: (0..cells).map(|c| c / ny).collect(),
        rec_of: (0..nz).map(|z| z / my).collect(),
        d: spec.d_x.clone(),
        marginal: pmf.px(),
    };
    let ax_y = RdAxis {
        src_of: (0..cells).map(|c| c % ny).collect(),
        rec_of: (0..nz).map(|z| z % my).collect(),
        d: spec.d_y.clone(),
        marginal: pmf.py(),
    };
    RdProblem {
        p: pmf.probs().to_vec(),
        nz,
        axes: vec![ax_x, ax_y],
        modes: vec![AxisMode::Active; 2],
    }
}

const AXIS_NAMES: [&str; 2] = ["X", "Y"];

fn solve_problem(mut prob: RdProblem, targets: &[f64], cfg: &RdConfig) -> Result<(RdRun, Vec<f64>, bool)> {
    for (k, ax) in prob.axes.iter().enumerate() {
        let dmin = ax.d_min();
        let (t, dmax) = ax.d_max();
        if !(targets[k] >= 0.0) {
            return Err(Error::Infeasible {
                axis: AXIS_NAMES[k],
                requested: targets[k],
                minimum: dmin,
            });
        }
        prob.modes[k] = if targets[k] < dmin - cfg.dist_tol {
            return Err(Error::Infeasible {
                axis: AXIS_NAMES[k],
                requested: targets[k],
                minimum: dmin,
            });
        } else if targets[k] <= dmin + 1e-12 {
            AxisMode::AtMin
        } else if targets[k] >= dmax {
            AxisMode::Inactive(t)
        } else {
            AxisMode::Active
        };
    }
    let active: Vec<usize> = (0..prob.axes.len())
        .filter(|&k| prob.modes[k] == AxisMode::Active)
        .collect();
    let mut s = vec![0.0; prob.axes.len()];
    let mut warm: Option<Vec<f64>> = None;
    let (run, ok) = match active.as_slice() {
        [] => prob.run(&s, None, cfg),
        [k] => {
            let plain = |s: &mut Vec<f64>, w: &mut Option<Vec<f64>>| prob.run(s, w.as_deref(), cfg);
            prob.solve_axis(*k, targets[*k], &mut s, &mut warm, cfg, &plain)
        }
        [k1, k2, ..] => {
            let (k1, k2) = (*k1, *k2);
            let nested = |s: &mut Vec<f64>, w: &mut Option<Vec<f64>>| {
                let plain = |s: &mut Vec<f64>, w: &mut Option<Vec<f64>>| prob.run(s, w.as_deref(), cfg);
                prob.solve_axis(k1, targets[k1], s, w, cfg, &plain)
            };
            prob.solve_axis(k2, targets[k2], &mut s, &mut warm, cfg, &nested)
        }
    };
    // recover the multipliers of the reported run from the search state
    let s_final = infer_multipliers(&prob, &run, &s);
    Ok((run, s_final, ok))
}

/// The bisection keeps the best run rather than the last, so the
/// multipliers are recomputed from the reported channel: for an allowed pair
/// with positive mass, `ln(Q/r)` is affine in the distortions.
fn infer_multipliers(prob: &RdProblem, run: &RdRun, s_last: &[f64]) -> Vec<f64> {
    let mut s = s_last.to_vec();
    let nz = prob.nz;
    for (k, mode) in prob.modes.iter().enumerate() {
        if *mode != AxisMode::Active {
            s[k] = 0.0;
            continue;
        }
        // pairs (c, z, z') differing only in axis k's reconstruction
        let mut est = Vec::new();
        for c in 0..prob.p.len() {
            if prob.p[c] == 0.0 {
                continue;
            }
            for z in 0..nz {
                for z2 in 0..nz {
                    let same_other = prob
                        .axes
                        .iter()
                        .enumerate()
                        .all(|(j, ax)| j == k || ax.rec_of[z] == ax.rec_of[z2]);
                    let ax = &prob.axes[k];
                    let dd = ax.dist(c, z2) - ax.dist(c, z);
                    let (a, b) = (run.q[c * nz + z], run.q[c * nz + z2]);
                    if same_other && dd > 1e-9 && a > 1e-300 && b > 1e-300 && run.r[z] > 0.0 && run.r[z2] > 0.0 {
                        est.push(((a / run.r[z]).ln() - (b / run.r[z2]).ln()) / dd);
                    }
                }
            }
        }
        if let Some(v) = est.first() {
            s[k] = *v;
        }
    }
    s
}

fn rd_solution(prob: &RdProblem, run: RdRun, s: &[f64], targets: &[f64], ok: bool, mx: usize, my: usize) -> RDSolution {
    // certified bound: any s >= 0 gives R(D) >= dual(s) - s.D
    let bound_nats = run.dual_nats
        - prob
            .modes
            .iter()
            .zip(s)
            .zip(targets)
            .map(|((m, &sk), &d)| if *m == AxisMode::Active { sk * d } else { 0.0 })
            .sum::<f64>();
    let rate = run.rate_nats / LN_2;
    RDSolution {
        test_channel: run.q,
        mx,
        my,
        rate,
        d1_achieved: run.dist[0],
        d2_achieved: run.dist.get(1).copied().unwrap_or(0.0),
        multipliers: (s[0] / LN_2, s.get(1).copied().unwrap_or(0.0) / LN_2),
        lower_bound: (bound_nats / LN_2).max(0.0).min(rate),
        converged: ok,
    }
}

/// Joint rate-distortion function `R_{X,Y}(D1, D2)` by Blahut-Arimoto with
/// nested bisection on the two multipliers.
pub fn joint_rd(
    pmf: &JointPMF,
    spec: &DistortionSpec,
    d1: f64,
    d2: f64,
    cfg: &RdConfig,
) -> Result<RDSolution> {
    spec.check(pmf)?;
    let prob = xy_problem(pmf, spec);
    let targets = [d1, d2];
    let (run, s, ok) = solve_problem(prob, &targets, cfg)?;
    // the modes were set inside solve_problem; rebuild them for the bound
    let mut prob = xy_problem(pmf, spec);
    for (k, ax) in prob.axes.iter().enumerate() {
        let dmin = ax.d_min();
        let (t, dmax) = ax.d_max();
        prob.modes[k] = if targets[k] <= dmin + 1e-12 {
            AxisMode::AtMin
        } else if targets[k] >= dmax {
            AxisMode::Inactive(t)
        } else {
            AxisMode::Active
        };
    }
    Ok(rd_solution(&prob, run, &s, &targets, ok, spec.mx(), spec.my()))
}

/// Single-source `R_X(D)` with its optimal channel `P(x̂|x)`, row-major
/// `|X| x |X̂|`.
pub fn marginal_rd(px: &[f64], d: &[Vec<f64>], target: f64, cfg: &RdConfig) -> Result<(Vec<f64>, f64)> {
    let n = px.len();
    let m = d.first().map_or(0, Vec::len);
    if d.len() != n || m == 0 {
        return Err(Error::ShapeMismatch("distortion rows must match the alphabet".into()));
    }
    let mk = || RdProblem {
        p: px.to_vec(),
        nz: m,
        axes: vec![RdAxis {
            src_of: (0..n).collect(),
            rec_of: (0..m).collect(),
            d: d.to_vec(),
            marginal: px.to_vec(),
        }],
        modes: vec![AxisMode::Active],
    };
    let (run, _, _) = solve_problem(mk(), &[target], cfg)?;
    Ok((run.q, run.rate_nats / LN_2))
}

/// Largest entropy of an error pattern with Hamming weight at most `d` on an
/// `m`-ary alphabet: `h(d') + d' log2(m - 1)` with `d' = min(d, 1 - 1/m)`.
pub fn max_noise_entropy(m: usize, d: f64) -> f64 {
    if m <= 1 {
        return 0.0;
    }
    let dp = d.clamp(0.0, 1.0 - 1.0 / m as f64);
    binary_entropy(dp) + dp * ((m - 1) as f64).log2()
}

/// Shannon lower bound on `R_X(D)` for Hamming distortion.
pub fn slb_discrete(marginal_entropy: f64, spec_axis: &[Vec<f64>], d: f64) -> Result<f64> {
    if !is_hamming(spec_axis) {
        return Err(Error::UnsupportedDistortion(
            "the Shannon lower bound is implemented for Hamming distortion".into(),
        ));
    }
    Ok((marginal_entropy - max_noise_entropy(spec_axis.len(), d)).max(0.0))
}

/// Shannon lower bound on `R_{X,Y}(D1, D2)` for Hamming distortions.
pub fn slb_joint(pmf: &JointPMF, spec: &DistortionSpec, d1: f64, d2: f64) -> Result<f64> {
    if !is_hamming(&spec.d_x) || !is_hamming(&spec.d_y) {
        return Err(Error::UnsupportedDistortion(
            "the Shannon lower bound is implemented for Hamming distortion".into(),
        ));
    }
    Ok((pmf.entropy_xy() - max_noise_entropy(pmf.nx(), d1) - max_noise_entropy(pmf.ny(), d2)).max(0.0))
}

/// Auxiliary variable on the reconstruction side with its five-variable
/// joint over `X`, `Y`, `Xh`, `Yh`, `U`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LossyDecomposition {
    /// Row-major `(|X̂||Ŷ|) x u_card`.
    pub q: Vec<f64>,
    pub u_card: usize,
    pub joint: NDDist,
}

impl LossyDecomposition {
    pub fn new(pmf: &JointPMF, rd: &RDSolution, q: Vec<f64>, u_card: usize) -> Result<Self> {
        let (nx, ny, mx, my) = (pmf.nx(), pmf.ny(), rd.mx, rd.my);
        let nz = mx * my;
        if q.len() != nz * u_card {
            return Err(Error::ShapeMismatch("kernel size".into()));
        }
        let mut p = Vec::with_capacity(nx * ny * nz * u_card);
        for c in 0..nx * ny {
            let pc = pmf.probs()[c];
            for z in 0..nz {
                let pz = pc * rd.test_channel[c * nz + z];
                p.extend(q[z * u_card..(z + 1) * u_card].iter().map(|v| pz * v));
            }
        }
        let axes = vec![
            Axis::new("X", pmf.x_labels().to_vec()),
            Axis::new("Y", pmf.y_labels().to_vec()),
            Axis::indexed("Xh", mx),
            Axis::indexed("Yh", my),
            Axis::indexed("U", u_card),
        ];
        Ok(Self {
            q,
            u_card,
            joint: NDDist::new(axes, p)?,
        })
    }

    pub fn shared_rate(&self) -> f64 {
        self.joint
            .mutual_information(&["X", "Y"], &["U"])
            .expect("axes present")
    }

    pub fn reconstruction_markov(&self) -> f64 {
        self.joint
            .conditional_mutual_information(&["Xh"], &["Yh"], &["U"])
            .expect("axes present")
    }

    pub fn source_to_u_markov(&self) -> f64 {
        self.joint
            .conditional_mutual_information(&["X", "Y"], &["U"], &["Xh", "Yh"])
            .expect("axes present")
    }
}

/// Lower and upper bracket for the lossy Wyner common information.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    /// Largest constraint residual; the slack at which the bracket holds.
    pub epsilon: f64,
    /// Smallest `I(X,Y;U)` among visited iterates whose Markov residual is
    /// within `epsilon`; an estimate of the relaxed infimum, not a
    /// certificate.
    pub lower: f64,
    /// `I(X,Y;U')` of an exactly Markov witness built from the solution.
    pub upper: f64,
    pub residuals: BTreeMap<String, f64>,
}

/// Result of [`lossy_wyner_ci`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LossyWyner {
    pub value: f64,
    pub decomposition: LossyDecomposition,
    pub bounds: BoundsReport,
    pub rd: RDSolution,
    pub converged: bool,
}

struct LossySource {
    /// `P(c, z)` row-major over cells then reconstructions.
    pcz: Vec<f64>,
    pi: Vec<f64>,
    cells: usize,
    nz: usize,
    mx: usize,
    my: usize,
}

impl LossySource {
    fn new(pmf: &JointPMF, rd: &RDSolution) -> Self {
        let cells = pmf.nx() * pmf.ny();
        let nz = rd.recon_count();
        let mut pcz = vec![0.0; cells * nz];
        let mut pi = vec![0.0; nz];
        for c in 0..cells {
            for z in 0..nz {
                let m = pmf.probs()[c] * rd.test_channel[c * nz + z];
                pcz[c * nz + z] = m;
                pi[z] += m;
            }
        }
        Self {
            pcz,
            pi,
            cells,
            nz,
            mx: rd.mx,
            my: rd.my,
        }
    }

    /// `(I(X,Y;U), I(X̂;Ŷ|U))`
    fn stats(&self, q: &[f64], k: usize) -> (f64, f64) {
        let (nz, my) = (self.nz, self.my);
        let mut cu = vec![0.0; self.cells * k];
        let mut r = vec![0.0; k];
        let mut xu = vec![0.0; self.mx * k];
        let mut yu = vec![0.0; my * k];
        let mut h_zu = 0.0;
        for z in 0..nz {
            for u in 0..k {
                let m = self.pi[z] * q[z * k + u];
                r[u] += m;
                xu[(z / my) * k + u] += m;
                yu[(z % my) * k + u] += m;
                h_zu -= plog2p(m);
            }
        }
        for c in 0..self.cells {
            for z in 0..nz {
                let m = self.pcz[c * nz + z];
                if m > 0.0 {
                    for u in 0..k {
                        cu[c * k + u] += m * q[z * k + u];
                    }
                }
            }
        }
        let pc: Vec<f64> = (0..self.cells)
            .map(|c| self.pcz[c * nz..(c + 1) * nz].iter().sum())
            .collect();
        let (hu, hc, hcu) = (entropy_of(&r), entropy_of(&pc), entropy_of(&cu));
        let (hxu, hyu) = (entropy_of(&xu), entropy_of(&yu));
        (clamp_info(hu + hc - hcu), clamp_info(hxu + hyu - h_zu - hu))
    }

    fn objective(&self, q: &[f64], k: usize, lambda: f64) -> f64 {
        let (i, res) = self.stats(q, k);
        i + lambda * res
    }

    fn step(&self, q: &[f64], k: usize, lambda: f64, out: &mut [f64]) {
        let (nz, my, cells) = (self.nz, self.my, self.cells);
        let mut r = vec![0.0; k];
        let mut xu = vec![0.0; self.mx * k];
        let mut yu = vec![0.0; my * k];
        for z in 0..nz {
            for u in 0..k {
                let m = self.pi[z] * q[z * k + u];
                r[u] += m;
                xu[(z / my) * k + u] += m;
                yu[(z % my) * k + u] += m;
            }
        }
        // p(u|c) up to the factor p(c)
        let mut cu = vec![0.0; cells * k];
        for c in 0..cells {
            for z in 0..nz {
                let m = self.pcz[c * nz + z];
                if m > 0.0 {
                    for u in 0..k {
                        cu[c * k + u] += m * q[z * k + u];
                    }
                }
            }
        }
        let mut logw = vec![0.0; k];
        for z in 0..nz {
            let row = &mut out[z * k..(z + 1) * k];
            if self.pi[z] <= 0.0 {
                row.copy_from_slice(&q[z * k..(z + 1) * k]);
                continue;
            }
            let (xh, yh) = (z / my, z % my);
            let mut best = f64::NEG_INFINITY;
            for u in 0..k {
                let quz = q[z * k + u];
                if quz <= 0.0 || r[u] <= 0.0 {
                    logw[u] = f64::NEG_INFINITY;
                    continue;
                }
                // sum_c P(c|z) ln t(z|c,u), t = P(c,z) q(u|z) / P(c,u)
                let mut cross = 0.0;
                for c in 0..cells {
                    let m = self.pcz[c * nz + z];
                    if m > 0.0 {
                        cross += m / self.pi[z] * (m * quz / cu[c * k + u]).ln();
                    }
                }
                let s1 = xu[xh * k + u] / r[u];
                let s2 = yu[yh * k + u] / r[u];
                let v = r[u].ln() + (cross + lambda * (s1.ln() + s2.ln())) / (1.0 + lambda);
                logw[u] = v;
                best = best.max(v);
            }
            if best == f64::NEG_INFINITY {
                row.copy_from_slice(&q[z * k..(z + 1) * k]);
                continue;
            }
            let mut tot = 0.0;
            for u in 0..k {
                row[u] = (logw[u] - best).exp();
                tot += row[u];
            }
            row.iter_mut().for_each(|v| *v /= tot);
        }
    }

    fn minimize(&self, q: &mut Vec<f64>, k: usize, lambda: f64, max_iters: usize) -> bool {
        let mut next = vec![0.0; q.len()];
        let mut f = self.objective(q, k, lambda);
        for _ in 0..max_iters {
            self.step(q, k, lambda, &mut next);
            let mut f_new = self.objective(&next, k, lambda);
            let mut halvings = 0;
            while f_new > f + 1e-12 * f.abs().max(1.0) && halvings < 20 {
                for (n, &o) in next.iter_mut().zip(q.iter()) {
                    *n = 0.5 * (*n + o);
                }
                f_new = self.objective(&next, k, lambda);
                halvings += 1;
            }
            std::mem::swap(q, &mut next);
            let delta = f - f_new;
            f = f_new;
            if delta.abs() <= 1e-13 * f.abs().max(1.0) {
                return true;
            }
        }
        false
    }
}

fn anneal_schedule(i: usize) -> Vec<f64> {
    let start = 8 + 2 * (i % 7);
    (start..=32).map(|h| 2f64.powf(h as f64 / 2.0)).collect()
}

/// Lossy Wyner common information at `(D1, D2)`; solves the joint
/// rate-distortion problem first.
pub fn lossy_wyner_ci(
    pmf: &JointPMF,
    spec: &DistortionSpec,
    d1: f64,
    d2: f64,
    cfg: &SolverConfig,
) -> Result<LossyWyner> {
    let rd = joint_rd(pmf, spec, d1, d2, &RdConfig::default())?;
    lossy_wyner_ci_with(pmf, rd, cfg)
}

/// Lossy Wyner common information against a given test channel.
///
/// With the channel fixed, `I(X,Y;U) + lambda I(X̂;Ŷ|U)` is minimized over
/// `q(u|x̂,ŷ)` while `lambda` is annealed upward; `(X,Y) - (X̂,Ŷ) - U` holds
/// by construction.
pub fn lossy_wyner_ci_with(pmf: &JointPMF, rd: RDSolution, cfg: &SolverConfig) -> Result<LossyWyner> {
    cfg.validate()?;
    let src = LossySource::new(pmf, &rd);
    let k = cfg.u_card.unwrap_or(src.nz).max(1);
    let rd_gap = (rd.rate - rd.lower_bound).max(0.0);

    struct Cand {
        q: Vec<f64>,
        value: f64,
        residual: f64,
        converged: bool,
        trail: Vec<(f64, f64)>,
    }
    let cands: Vec<Cand> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(i as u64));
            let mut q: Vec<f64> = Vec::with_capacity(src.nz * k);
            for _ in 0..src.nz {
                let row: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
                let s: f64 = row.iter().sum();
                q.extend(row.into_iter().map(|v: f64| v / s));
            }
            let mut converged = true;
            let mut trail = Vec::new();
            for lambda in anneal_schedule(i) {
                converged = src.minimize(&mut q, k, lambda, cfg.max_iters);
                trail.push(src.stats(&q, k));
            }
            let (value, residual) = src.stats(&q, k);
            Cand {
                q,
                value,
                residual,
                converged,
                trail,
            }
        })
        .collect();

    let feasible = cands.iter().filter(|c| c.residual <= cfg.tol);
    let (best, converged) = match feasible.min_by(|a, b| a.value.total_cmp(&b.value)) {
        Some(b) => (b, b.converged),
        None => (
            cands
                .iter()
                .min_by(|a, b| a.residual.total_cmp(&b.residual))
                .expect("restarts >= 1"),
            false,
        ),
    };
    let decomposition = LossyDecomposition::new(pmf, &rd, best.q.clone(), k)?;
    let value = best.value;

    let u_markov = decomposition.source_to_u_markov();
    let mut residuals = BTreeMap::new();
    residuals.insert("rd_gap".to_string(), rd_gap);
    residuals.insert("u_markov".to_string(), u_markov);
    residuals.insert("reconstruction_markov".to_string(), best.residual);
    let epsilon = rd_gap.max(u_markov).max(best.residual);
    let lower = cands
        .iter()
        .flat_map(|c| c.trail.iter().copied())
        .filter(|&(_, r)| r <= epsilon)
        .map(|(v, _)| v)
        .fold(value, f64::min);
    let upper = markov_witness(pmf, &rd, &best.q, k)?.shared_rate().max(value);
    Ok(LossyWyner {
        value,
        decomposition,
        bounds: BoundsReport {
            epsilon,
            lower,
            upper,
            residuals,
        },
        rd,
        converged,
    })
}

/// Replaces each atom of `U` by the product of its reconstruction
/// marginals and restores the reconstruction marginal with point masses,
/// giving an exactly Markov `U'` generated from `(X̂, Ŷ)`.
pub fn markov_witness(pmf: &JointPMF, rd: &RDSolution, q: &[f64], k: usize) -> Result<LossyDecomposition> {
    let src = LossySource::new(pmf, rd);
    let (nz, my, mx) = (src.nz, src.my, src.mx);
    let mut atoms: Vec<(f64, Vec<f64>)> = Vec::new();
    for u in 0..k {
        let col: Vec<f64> = (0..nz).map(|z| src.pi[z] * q[z * k + u]).collect();
        let w: f64 = col.iter().sum();
        if w <= 0.0 {
            continue;
        }
        let mut a = vec![0.0; mx];
        let mut b = vec![0.0; my];
        for z in 0..nz {
            a[z / my] += col[z] / w;
            b[z % my] += col[z] / w;
        }
        atoms.push((w, (0..nz).map(|z| a[z / my] * b[z % my]).collect()));
    }
    let mut mix = vec![0.0; nz];
    for (w, prod) in &atoms {
        for z in 0..nz {
            mix[z] += w * prod[z];
        }
    }
    let eta = (0..nz)
        .filter(|&z| mix[z] > 0.0)
        .map(|z| 1.0 - src.pi[z] / mix[z])
        .fold(0.0, f64::max)
        .min(1.0);
    let k2 = atoms.len() + nz;
    let mut q2 = vec![0.0; nz * k2];
    for z in 0..nz {
        if src.pi[z] <= 0.0 {
            q2[z * k2] = 1.0;
            continue;
        }
        for (u, (w, prod)) in atoms.iter().enumerate() {
            q2[z * k2 + u] = (1.0 - eta) * w * prod[z] / src.pi[z];
        }
        let rest = (src.pi[z] - (1.0 - eta) * mix[z]).max(0.0);
        q2[z * k2 + atoms.len() + z] = rest / src.pi[z];
        let s: f64 = q2[z * k2..(z + 1) * k2].iter().sum();
        q2[z * k2..(z + 1) * k2].iter_mut().for_each(|v| *v /= s);
    }
    LossyDecomposition::new(pmf, rd, q2, k2)
}

/// Markov residuals of the conditional factorization
/// `P(X̂,Ŷ,U|X,Y) = P(X̂,U|X) P(Ŷ,U|Y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Corollary1Report {
    /// `I(X̂;Ŷ|X,Y,U)`
    pub recon_given_all: f64,
    /// `I(X̂;Y|X,U)`
    pub xhat_y_given_x_u: f64,
    /// `I(Ŷ;X|Y,U)`
    pub yhat_x_given_y_u: f64,
    pub tol: f64,
    pub passed: bool,
}

pub fn check_corollary1(decomposition: &LossyDecomposition, tol: f64) -> Corollary1Report {
    let j = &decomposition.joint;
    let a = j
        .conditional_mutual_information(&["Xh"], &["Yh"], &["X", "Y", "U"])
        .expect("axes present");
    let b = j
        .conditional_mutual_information(&["Xh"], &["Y"], &["X", "U"])
        .expect("axes present");
    let c = j
        .conditional_mutual_information(&["Yh"], &["X"], &["Y", "U"])
        .expect("axes present");
    Corollary1Report {
        recon_given_all: a,
        xhat_y_given_x_u: b,
        yhat_x_given_y_u: c,
        tol,
        passed: a <= tol && b <= tol && c <= tol,
    }
}

/// Result of [`lossy_gk_ci`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LossyGk {
    pub value: f64,
    /// Kernel `q(u|j)` over the ergodic classes, row-major.
    pub q: Vec<f64>,
    pub u_card: usize,
    /// `I(U;X|X̂) + I(U;Y|Ŷ)` of the reported kernel.
    pub residual: f64,
    /// The auxiliary variable is restricted to functions of the ergodic
    /// class (plus independent randomness).
    pub restricted_to_ergodic_class: bool,
}

/// Information terms of `U ~ q(u|j)` against the marginal test channels:
/// `(I(U;J), I(U;X̂), I(U;Ŷ))`.
struct GkTerms {
    pj: Vec<f64>,
    /// `P(j, x̂)` and `P(j, ŷ)`
    pjx: Vec<f64>,
    pjy: Vec<f64>,
    mx: usize,
    my: usize,
}

impl GkTerms {
    fn new(pmf: &JointPMF, chx: &[f64], chy: &[f64], mx: usize, my: usize) -> Self {
        let dec = ergodic_decomposition(pmf);
        let nj = dec.len();
        let (xc, yc) = (dec.x_class(pmf.nx()), dec.y_class(pmf.ny()));
        let (px, py) = (pmf.px(), pmf.py());
        let mut pjx = vec![0.0; nj * mx];
        let mut pjy = vec![0.0; nj * my];
        for x in 0..pmf.nx() {
            for t in 0..mx {
                pjx[xc[x] * mx + t] += px[x] * chx[x * mx + t];
            }
        }
        for y in 0..pmf.ny() {
            for t in 0..my {
                pjy[yc[y] * my + t] += py[y] * chy[y * my + t];
            }
        }
        Self {
            pj: dec.j_pmf,
            pjx,
            pjy,
            mx,
            my,
        }
    }

    fn mi_through(&self, q: &[f64], k: usize, pjt: &[f64], m: usize) -> f64 {
        let nj = self.pj.len();
        let mut ut = vec![0.0; k * m];
        let mut u = vec![0.0; k];
        let mut t = vec![0.0; m];
        for j in 0..nj {
            for a in 0..k {
                for s in 0..m {
                    let v = pjt[j * m + s] * q[j * k + a];
                    ut[a * m + s] += v;
                    u[a] += v;
                    t[s] += v;
                }
            }
        }
        clamp_info(entropy_of(&u) + entropy_of(&t) - entropy_of(&ut))
    }

    fn terms(&self, q: &[f64], k: usize) -> (f64, f64, f64) {
        let nj = self.pj.len();
        let mut uj = vec![0.0; nj * k];
        let mut u = vec![0.0; k];
        for j in 0..nj {
            for a in 0..k {
                uj[j * k + a] = self.pj[j] * q[j * k + a];
                u[a] += self.pj[j] * q[j * k + a];
            }
        }
        let iuj = clamp_info(entropy_of(&u) + entropy_of(&self.pj) - entropy_of(&uj));
        (
            iuj,
            self.mi_through(q, k, &self.pjx, self.mx),
            self.mi_through(q, k, &self.pjy, self.my),
        )
    }

    fn residual(&self, q: &[f64], k: usize) -> (f64, f64) {
        let (iuj, ix, iy) = self.terms(q, k);
        (iuj, clamp_info(iuj - ix) + clamp_info(iuj - iy))
    }
}

/// Lossy Gács-Körner common information at `(D1, D2)`.
///
/// `U` ranges over kernels `q(u|j)` of the ergodic class `J`, which makes
/// `Y - X - U` and `X - Y - U` hold exactly. The remaining conditions
/// `X - X̂ - U` and `Y - Ŷ - U` are checked against the marginal optimal
/// test channels. Deterministic maps of `J` are enumerated and a penalized
/// multi-start ascent covers randomized kernels; the largest feasible value
/// is returned, clamped to `[0, C_GK(X;Y)]`.
pub fn lossy_gk_ci(
    pmf: &JointPMF,
    spec: &DistortionSpec,
    d1: f64,
    d2: f64,
    cfg: &SolverConfig,
) -> Result<LossyGk> {
    cfg.validate()?;
    spec.check(pmf)?;
    let rdc = RdConfig::default();
    let (chx, _) = marginal_rd(&pmf.px(), &spec.d_x, d1, &rdc)?;
    let (chy, _) = marginal_rd(&pmf.py(), &spec.d_y, d2, &rdc)?;
    let terms = GkTerms::new(pmf, &chx, &chy, spec.mx(), spec.my());
    let nj = terms.pj.len();
    let cap = gk_common_information(pmf);
    let mut best = LossyGk {
        value: 0.0,
        q: vec![1.0; nj],
        u_card: 1,
        residual: 0.0,
        restricted_to_ergodic_class: true,
    };
    if nj == 1 {
        return Ok(best);
    }
    let consider = |q: Vec<f64>, k: usize, best: &mut LossyGk| {
        let (v, res) = terms.residual(&q, k);
        if res <= cfg.tol && v > best.value + 1e-12 {
            *best = LossyGk {
                value: v.min(cap),
                q,
                u_card: k,
                residual: res,
                restricted_to_ergodic_class: true,
            };
        }
    };
    if nj <= 10 {
        for labels in partitions_of(nj) {
            let k = labels.iter().max().map_or(1, |m| m + 1);
            let mut q = vec![0.0; nj * k];
            for (j, &l) in labels.iter().enumerate() {
                q[j * k + l] = 1.0;
            }
            consider(q, k, &mut best);
        }
    }
    // penalized ascent over randomized kernels
    let k = nj;
    let found: Vec<(Vec<f64>, f64, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(i as u64));
            let mut q: Vec<f64> = Vec::new();
            for _ in 0..nj {
                let row: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
                let s: f64 = row.iter().sum();
                q.extend(row.into_iter().map(|v: f64| v / s));
            }
            for kappa in [1.0, 10.0, 100.0, 1000.0] {
                q = penalized_ascent(&terms, q, k, kappa, cfg.max_iters.min(2000));
            }
            let (v, res) = terms.residual(&q, k);
            (q, v, res)
        })
        .collect();
    for (q, _, _) in found {
        consider(q, k, &mut best);
    }
    best.value = best.value.clamp(0.0, cap);
    Ok(best)
}

/// Coordinate ascent on `I(U;J) - kappa (residual)` with exponentiated
/// gradient steps on the rows of `q(u|j)`.
fn penalized_ascent(terms: &GkTerms, mut q: Vec<f64>, k: usize, kappa: f64, iters: usize) -> Vec<f64> {
    let nj = terms.pj.len();
    let score = |q: &[f64]| {
        let (v, res) = terms.residual(q, k);
        v - kappa * res
    };
    let mut f = score(&q);
    let mut step = 0.5;
    let h = 1e-6;
    for _ in 0..iters {
        let mut grad = vec![0.0; nj * k];
        for i in 0..nj * k {
            let mut qp = q.clone();
            qp[i] += h;
            grad[i] = (score(&qp) - f) / h;
        }
        let mut cand = q.clone();
        for j in 0..nj {
            let row = &mut cand[j * k..(j + 1) * k];
            let g = &grad[j * k..(j + 1) * k];
            let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for (v, &gi) in row.iter_mut().zip(g) {
                *v *= (step * (gi - gmax)).exp();
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        let fc = score(&cand);
        if fc > f {
            q = cand;
            f = fc;
            step = (step * 1.5).min(50.0);
        } else {
            step *= 0.5;
            if step < 1e-8 {
                break;
            }
        }
    }
    q
}

fn partitions_of(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(i: usize, maxv: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == a.len() {
            out.push(a.clone());
            return;
        }
        for v in 0..=maxv + 1 {
            a[i] = v;
            rec(i + 1, maxv.max(v), a, out);
        }
    }
    if n == 0 {
        return out;
    }
    let mut a = vec![0; n];
    rec(1, 0, &mut a, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sources::*;

    #[test]
    fn slb_examples() {
        let h = hamming_matrix(2);
        assert_eq!(slb_discrete(1.0, &h, 0.0).unwrap(), 1.0);
        assert_eq!(slb_discrete(1.0, &h, 0.5).unwrap(), 0.0);
        assert!((slb_discrete(1.0, &h, 0.1).unwrap() - 0.5310).abs() < 1e-4);
        let sq = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0]];
        assert!(matches!(
            slb_discrete(1.0, &sq, 0.1),
            Err(Error::UnsupportedDistortion(_))
        ));
        assert!((max_noise_entropy(4, 0.9) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rd_endpoints() {
        let pmf = dsbs(0.1).unwrap();
        let spec = DistortionSpec::hamming(2, 2);
        let cfg = RdConfig::default();
        let zero = joint_rd(&pmf, &spec, 0.0, 0.0, &cfg).unwrap();
        assert!((zero.rate - pmf.entropy_xy()).abs() < 1e-9);
        let big = joint_rd(&pmf, &spec, 0.6, 0.6, &cfg).unwrap();
        assert!(big.rate.abs() < 1e-12);
        assert!(matches!(
            joint_rd(&pmf, &spec, -0.1, 0.0, &cfg),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn underflowing_channel_entries_keep_rate_finite() {
        let pmf = JointPMF::from_rows(&[vec![0.2251291, 0.0327812], vec![0.4027690, 0.3393207]]).unwrap();
        let spec = DistortionSpec::hamming(2, 2);
        let rd = joint_rd(&pmf, &spec, 0.1234785, 0.2073636, &RdConfig::default()).unwrap();
        let slb = slb_joint(&pmf, &spec, 0.1234785, 0.2073636).unwrap();
        assert!(rd.rate.is_finite() && rd.rate >= slb);
        assert!(rd.rate - rd.lower_bound < 1e-5);
    }

    #[test]
    fn marginal_rd_matches_binary_formula() {
        let h = hamming_matrix(2);
        let (ch, rate) = marginal_rd(&[0.5, 0.5], &h, 0.1, &RdConfig::default()).unwrap();
        assert!((rate - (1.0 - binary_entropy(0.1))).abs() < 1e-6, "{rate}");
        assert!((ch[1] - 0.1).abs() < 1e-5);
    }

    #[test]
    fn witness_is_markov() {
        let pmf = dsbs(0.1).unwrap();
        let spec = DistortionSpec::hamming(2, 2);
        let rd = joint_rd(&pmf, &spec, 0.05, 0.05, &RdConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q: Vec<f64> = (0..4)
            .flat_map(|_| {
                let a: f64 = Exp1.sample(&mut rng);
                let b: f64 = Exp1.sample(&mut rng);
                [a / (a + b), b / (a + b)]
            })
            .collect();
        let w = markov_witness(&pmf, &rd, &q, 2).unwrap();
        assert!(w.reconstruction_markov() < 1e-12);
        assert!(w.source_to_u_markov() < 1e-12);
        let m = w.joint.marginal(&["X", "Y", "Xh", "Yh"]).unwrap();
        let orig = LossyDecomposition::new(&pmf, &rd, q, 2).unwrap();
        let m0 = orig.joint.marginal(&["X", "Y", "Xh", "Yh"]).unwrap();
        assert!(m.max_abs_diff(&m0).unwrap() < 1e-12);
    }
}
