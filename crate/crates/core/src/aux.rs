//! Auxiliary-variable solvers for the lossless quantities: Wyner common
//! information, the transmit curve `C(R')`, the receive curve `K(R'')`, the
//! transmit/receive tradeoff and slope-based extraction of both common
//! informations from the curves.
//!
//! Both curves reduce to the family of problems
//!
//! ```text
//! G_beta(q) = I(X,Y;U) + beta * (H(X|U) + H(Y|U))
//! ```
//!
//! minimized over `q(u|x,y)`. The transmit weight `lambda` maps to
//! `beta = lambda / (1 + lambda)` and the receive weight `mu > 1` maps to
//! `beta = mu / (2 mu - 1)`. `G_beta` is minimized by alternating over `q` and
//! the variational marginals `r(u)`, `s1(x|u)`, `s2(y|u)`, which gives the
//! closed-form update `q(u|x,y) ~ r(u) (s1(x|u) s2(y|u))^beta` and a monotone
//! objective.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gk::{ergodic_decomposition, gk_common_information};
use crate::prob::{clamp_info, plog2p, Axis, JointPMF, NDDist};

/// Solver settings shared by every auxiliary-variable optimization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub restarts: usize,
    /// Iteration cap per fixed-point run.
    pub max_iters: usize,
    /// Feasibility tolerance on Markov residuals, in bits.
    pub tol: f64,
    pub rng_seed: u64,
    pub lagrange_grid: Vec<f64>,
    /// Auxiliary alphabet size; `None` uses `|X||Y|`.
    pub u_card: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 4000,
            tol: 1e-6,
            rng_seed: 0,
            lagrange_grid: geometric_grid(0.5, 64.0, 20),
            u_card: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.lagrange_grid.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::InvalidConfig(
                "Lagrange weights must be finite and nonnegative".into(),
            ));
        }
        if self.u_card == Some(0) {
            return Err(Error::InvalidConfig("u_card must be positive".into()));
        }
        Ok(())
    }
}

/// `n` geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (n - 1) as f64;
            (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
        }
    }
}

/// Information quantities of the joint `p(x,y) q(u|x,y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuxStats {
    /// `I(X,Y;U)`
    pub i_xy_u: f64,
    /// `I(X;Y|U)`
    pub i_x_y_given_u: f64,
    pub h_x_given_u: f64,
    pub h_y_given_u: f64,
    /// `I(X;U|Y) + I(Y;U|X)`
    pub receive_excess: f64,
}

/// Marginal buffers for [`Source::stats_with`].
#[derive(Default)]
pub(crate) struct Scratch {
    r: Vec<f64>,
    xu: Vec<f64>,
    yu: Vec<f64>,
}

impl Scratch {
    fn reset(&mut self, k: usize, nx: usize, ny: usize) {
        for (v, n) in [(&mut self.r, k), (&mut self.xu, nx * k), (&mut self.yu, ny * k)] {
            v.clear();
            v.resize(n, 0.0);
        }
    }
}

/// Flat source description used by the inner loops.
#[derive(Clone, Debug)]
pub(crate) struct Source {
    pub p: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub hxy: f64,
}

impl Source {
    pub fn new(pmf: &JointPMF) -> Self {
        Self {
            p: pmf.probs().to_vec(),
            nx: pmf.nx(),
            ny: pmf.ny(),
            hx: pmf.entropy_x(),
            hy: pmf.entropy_y(),
            hxy: pmf.entropy_xy(),
        }
    }

    pub fn cells(&self) -> usize {
        self.p.len()
    }

    pub fn mi(&self) -> f64 {
        clamp_info(self.hx + self.hy - self.hxy)
    }

    pub fn stats(&self, q: &[f64], k: usize) -> AuxStats {
        self.stats_with(q, k, &mut Scratch::default())
    }

    /// [`Source::stats`] reusing caller-owned buffers.
    pub fn stats_with(&self, q: &[f64], k: usize, buf: &mut Scratch) -> AuxStats {
        let (nx, ny) = (self.nx, self.ny);
        buf.reset(k, nx, ny);
        let Scratch { r, xu, yu } = buf;
        let mut h_xyu = 0.0;
        for (c, &pc) in self.p.iter().enumerate() {
            if pc == 0.0 {
                continue;
            }
            let (x, y) = (c / ny, c % ny);
            for u in 0..k {
                let m = pc * q[c * k + u];
                r[u] += m;
                xu[x * k + u] += m;
                yu[y * k + u] += m;
                h_xyu -= plog2p(m);
            }
        }
        let h = |v: &[f64]| -v.iter().map(|&m| plog2p(m)).sum::<f64>();
        let (hu, hxu, hyu) = (h(r), h(xu), h(yu));
        AuxStats {
            i_xy_u: clamp_info(hu + self.hxy - h_xyu),
            i_x_y_given_u: clamp_info(hxu + hyu - h_xyu - hu),
            h_x_given_u: clamp_info(hxu - hu),
            h_y_given_u: clamp_info(hyu - hu),
            receive_excess: clamp_info(2.0 * self.hxy - self.hx - self.hy - 2.0 * h_xyu + hxu + hyu),
        }
    }

    fn objective(&self, q: &[f64], k: usize, beta: f64) -> f64 {
        let s = self.stats(q, k);
        s.i_xy_u + beta * (s.h_x_given_u + s.h_y_given_u)
    }

    /// One alternating-minimization step of `G_beta`.
    fn ba_step(&self, q: &[f64], k: usize, beta: f64, out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        let mut r = vec![0.0; k];
        let mut xu = vec![0.0; nx * k];
        let mut yu = vec![0.0; ny * k];
        for (c, &pc) in self.p.iter().enumerate() {
            let (x, y) = (c / ny, c % ny);
            for u in 0..k {
                let m = pc * q[c * k + u];
                r[u] += m;
                xu[x * k + u] += m;
                yu[y * k + u] += m;
            }
        }
        let mut logw = vec![0.0; k];
        for c in 0..self.cells() {
            let (x, y) = (c / ny, c % ny);
            let mut best = f64::NEG_INFINITY;
            for u in 0..k {
                let v = if r[u] > 0.0 && xu[x * k + u] > 0.0 && yu[y * k + u] > 0.0 {
                    let s1 = xu[x * k + u] / r[u];
                    let s2 = yu[y * k + u] / r[u];
                    r[u].ln() + beta * (s1.ln() + s2.ln())
                } else {
                    f64::NEG_INFINITY
                };
                logw[u] = v;
                best = best.max(v);
            }
            let row = &mut out[c * k..(c + 1) * k];
            if best == f64::NEG_INFINITY {
                // cell outside the support with no compatible atom
                row.iter_mut().for_each(|v| *v = 1.0 / k as f64);
                continue;
            }
            let mut z = 0.0;
            for u in 0..k {
                let w = (logw[u] - best).exp();
                row[u] = w;
                z += w;
            }
            row.iter_mut().for_each(|v| *v /= z);
        }
    }

    /// Runs the fixed-point iteration from `q` until the objective stalls.
    fn minimize(&self, q: &mut Vec<f64>, k: usize, beta: f64, max_iters: usize) -> Run {
        let mut next = vec![0.0; q.len()];
        let mut g = self.objective(q, k, beta);
        for it in 0..max_iters {
            self.ba_step(q, k, beta, &mut next);
            let mut g_new = self.objective(&next, k, beta);
            let mut halvings = 0;
            // the update is monotone; the guard only catches rounding trouble
            while g_new > g + 1e-12 && halvings < 20 {
                for (n, &o) in next.iter_mut().zip(q.iter()) {
                    *n = 0.5 * (*n + o);
                }
                g_new = self.objective(&next, k, beta);
                halvings += 1;
            }
            std::mem::swap(q, &mut next);
            let delta = g - g_new;
            g = g_new;
            if delta.abs() <= 1e-13 * g.abs().max(1.0) {
                return Run {
                    iters: it + 1,
                    converged: true,
                };
            }
        }
        Run {
            iters: max_iters,
            converged: false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Run {
    #[allow(dead_code)]
    iters: usize,
    converged: bool,
}

fn random_kernel(rng: &mut ChaCha8Rng, cells: usize, k: usize) -> Vec<f64> {
    let mut q = Vec::with_capacity(cells * k);
    for _ in 0..cells {
        let row: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        let s: f64 = row.iter().sum();
        q.extend(row.into_iter().map(|v: f64| v / s));
    }
    q
}

/// A conditional law `q(u|x,y)` together with the joint it induces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuxDecomposition {
    /// Row-major `|X||Y| x u_card`; row `x * |Y| + y`.
    q: Vec<f64>,
    u_card: usize,
    induced: NDDist,
}

impl AuxDecomposition {
    pub fn new(pmf: &JointPMF, q: Vec<f64>, u_card: usize) -> Result<Self> {
        let cells = pmf.nx() * pmf.ny();
        if u_card == 0 || q.len() != cells * u_card {
            return Err(Error::ShapeMismatch(format!(
                "kernel has {} entries, expected {cells} x {u_card}",
                q.len()
            )));
        }
        let induced = pmf.to_nd().extend(Axis::indexed("U", u_card), &q)?;
        Ok(Self { q, u_card, induced })
    }

    /// `U` constant.
    pub fn constant(pmf: &JointPMF) -> Self {
        Self::new(pmf, vec![1.0; pmf.nx() * pmf.ny()], 1).expect("constant kernel")
    }

    /// `U = (X, Y)`.
    pub fn identity(pmf: &JointPMF) -> Self {
        let n = pmf.nx() * pmf.ny();
        let mut q = vec![0.0; n * n];
        for c in 0..n {
            q[c * n + c] = 1.0;
        }
        Self::new(pmf, q, n).expect("identity kernel")
    }

    /// `U = f(X, Y)` for a labelling `f` of the cells.
    pub fn deterministic(pmf: &JointPMF, labels: &[usize]) -> Result<Self> {
        let n = pmf.nx() * pmf.ny();
        if labels.len() != n {
            return Err(Error::ShapeMismatch("one label per cell required".into()));
        }
        let k = labels.iter().max().map_or(1, |m| m + 1);
        let mut q = vec![0.0; n * k];
        for (c, &l) in labels.iter().enumerate() {
            q[c * k + l] = 1.0;
        }
        Self::new(pmf, q, k)
    }

    /// `U = J`, the ergodic class.
    pub fn ergodic_class(pmf: &JointPMF) -> Self {
        let dec = ergodic_decomposition(pmf);
        let cls = dec.x_class(pmf.nx());
        let labels: Vec<usize> = (0..pmf.nx() * pmf.ny()).map(|c| cls[c / pmf.ny()]).collect();
        Self::deterministic(pmf, &labels).expect("class labels")
    }

    /// Time sharing: with probability `t` use `a`, otherwise `b`; the switch
    /// is part of the new auxiliary variable.
    pub fn mixture(pmf: &JointPMF, a: &Self, b: &Self, t: f64) -> Result<Self> {
        let n = pmf.nx() * pmf.ny();
        let k = a.u_card + b.u_card;
        let mut q = Vec::with_capacity(n * k);
        for c in 0..n {
            q.extend(a.row(c).iter().map(|v| t * v));
            q.extend(b.row(c).iter().map(|v| (1.0 - t) * v));
        }
        Self::new(pmf, q, k)
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn row(&self, cell: usize) -> &[f64] {
        &self.q[cell * self.u_card..(cell + 1) * self.u_card]
    }

    pub fn u_card(&self) -> usize {
        self.u_card
    }

    /// Joint over axes `X`, `Y`, `U`.
    pub fn induced(&self) -> &NDDist {
        &self.induced
    }

    pub fn stats(&self, pmf: &JointPMF) -> AuxStats {
        Source::new(pmf).stats(&self.q, self.u_card)
    }

    /// Atoms `(p(u), p(x,y|u))` with duplicates merged, null atoms dropped
    /// and a canonical order, so relabellings of `U` compare equal.
    pub fn canonical_atoms(&self) -> Vec<(f64, Vec<f64>)> {
        let p = self.induced.probs();
        let k = self.u_card;
        let n = p.len() / k;
        let mut atoms: Vec<(f64, Vec<f64>)> = Vec::new();
        for u in 0..k {
            let col: Vec<f64> = (0..n).map(|c| p[c * k + u]).collect();
            let m: f64 = col.iter().sum();
            if m <= 1e-9 {
                continue;
            }
            let post: Vec<f64> = col.iter().map(|v| v / m).collect();
            match atoms.iter_mut().find(|(_, a)| l1(a, &post) < 1e-2) {
                Some(atom) => atom.0 += m,
                None => atoms.push((m, post)),
            }
        }
        atoms.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        atoms
    }

    /// Total-variation distance between the canonical forms of two
    /// decompositions, or 1 if their atom counts differ.
    pub fn canonical_distance(&self, other: &Self) -> f64 {
        let (a, b) = (self.canonical_atoms(), other.canonical_atoms());
        if a.len() != b.len() {
            return 1.0;
        }
        let mut tv = 0.0;
        for ((ma, pa), (mb, pb)) in a.iter().zip(&b) {
            tv += pa.iter().zip(pb).map(|(x, y)| (ma * x - mb * y).abs()).sum::<f64>();
        }
        0.5 * tv
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// One point of a tradeoff curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub excess_rate: f64,
    pub shared_rate: f64,
    pub decomposition: AuxDecomposition,
    pub lagrange_weight: f64,
    /// Markov residual of the emitting solve (0 for exact constructions).
    pub residual: f64,
    pub converged: bool,
}

/// Result of [`wyner_ci`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WynerSolution {
    pub value: f64,
    /// `I(X;Y|U)` of the reported decomposition.
    pub residual: f64,
    pub converged: bool,
    /// Two restarts reached the same value with materially different `U`.
    pub multiple_optima: bool,
    pub decomposition: AuxDecomposition,
}

fn u_card_for(pmf: &JointPMF, cfg: &SolverConfig) -> usize {
    cfg.u_card.unwrap_or(pmf.nx() * pmf.ny()).max(1)
}

/// Annealing schedule for the Markov penalty of restart `i`.
fn anneal_schedule(i: usize) -> Vec<f64> {
    let start = 8 + 2 * (i % 7);
    (start..=32).map(|h| 2f64.powf(h as f64 / 2.0)).collect()
}

struct Candidate {
    q: Vec<f64>,
    stats: AuxStats,
    converged: bool,
}

fn anneal_restart(src: &Source, k: usize, cfg: &SolverConfig, i: usize) -> Candidate {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(i as u64));
    let mut q = random_kernel(&mut rng, src.cells(), k);
    let mut converged = true;
    for lambda in anneal_schedule(i) {
        let run = src.minimize(&mut q, k, lambda / (1.0 + lambda), cfg.max_iters);
        converged = run.converged;
    }
    let stats = src.stats(&q, k);
    Candidate {
        q,
        stats,
        converged,
    }
}

/// Wyner common information `min I(X,Y;U)` over `U` with `X - U - Y`.
///
/// Each restart anneals the Markov penalty upward from a random kernel. The
/// smallest value among restarts whose residual `I(X;Y|U)` is within
/// `cfg.tol` is reported; if no restart is feasible the least-infeasible one
/// is returned with `converged = false`.
pub fn wyner_ci(pmf: &JointPMF, cfg: &SolverConfig) -> Result<WynerSolution> {
    cfg.validate()?;
    let src = Source::new(pmf);
    if src.mi() <= cfg.tol {
        return Ok(WynerSolution {
            value: 0.0,
            residual: src.mi(),
            converged: true,
            multiple_optima: false,
            decomposition: AuxDecomposition::constant(pmf),
        });
    }
    let k = u_card_for(pmf, cfg);
    let cands: Vec<Candidate> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| anneal_restart(&src, k, cfg, i))
        .collect();

    let feasible: Vec<&Candidate> = cands
        .iter()
        .filter(|c| c.stats.i_x_y_given_u <= cfg.tol)
        .collect();
    let (best, converged) = match feasible
        .iter()
        .copied()
        .min_by(|a, b| a.stats.i_xy_u.total_cmp(&b.stats.i_xy_u))
    {
        Some(b) => (b, b.converged),
        None => (
            cands
                .iter()
                .min_by(|a, b| a.stats.i_x_y_given_u.total_cmp(&b.stats.i_x_y_given_u))
                .expect("restarts >= 1"),
            false,
        ),
    };
    let decomposition = AuxDecomposition::new(pmf, best.q.clone(), k)?;
    let multiple_optima = feasible.iter().any(|c| {
        (c.stats.i_xy_u - best.stats.i_xy_u).abs() <= 1e-7
            && AuxDecomposition::new(pmf, c.q.clone(), k)
                .map(|d| d.canonical_distance(&decomposition) > 1e-3)
                .unwrap_or(false)
    });
    Ok(WynerSolution {
        value: best.stats.i_xy_u,
        residual: best.stats.i_x_y_given_u,
        converged,
        multiple_optima,
        decomposition,
    })
}

fn transmit_point(pmf: &JointPMF, d: AuxDecomposition, w: f64, converged: bool) -> CurvePoint {
    let s = d.stats(pmf);
    CurvePoint {
        excess_rate: s.i_x_y_given_u,
        shared_rate: s.i_xy_u,
        decomposition: d,
        lagrange_weight: w,
        residual: s.i_x_y_given_u,
        converged,
    }
}

fn receive_point(pmf: &JointPMF, d: AuxDecomposition, w: f64, converged: bool) -> CurvePoint {
    let s = d.stats(pmf);
    CurvePoint {
        excess_rate: s.receive_excess,
        shared_rate: s.i_xy_u,
        decomposition: d,
        lagrange_weight: w,
        residual: s.i_x_y_given_u,
        converged,
    }
}

/// Best of several fixed-point runs of `G_beta` from the given starts plus
/// `restarts` random kernels.
fn best_for_beta(
    src: &Source,
    k: usize,
    beta: f64,
    cfg: &SolverConfig,
    warm: &[Vec<f64>],
    salt: u64,
) -> (Vec<f64>, bool) {
    let mut starts: Vec<Vec<f64>> = warm.to_vec();
    for i in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.rng_seed
                .wrapping_add(i as u64)
                .wrapping_add(salt.wrapping_mul(0x9E37_79B9)),
        );
        starts.push(random_kernel(&mut rng, src.cells(), k));
    }
    let runs: Vec<(Vec<f64>, f64, f64, bool)> = starts
        .into_par_iter()
        .map(|mut q| {
            let run = src.minimize(&mut q, k, beta, cfg.max_iters);
            let g = src.objective(&q, k, beta);
            let res = src.stats(&q, k).i_x_y_given_u;
            (q, g, res, run.converged)
        })
        .collect();
    let best = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)))
        .expect("at least one start");
    let (mut q, converged) = (best.0, best.3);
    if converged {
        return (q, true);
    }
    // critical slowing down near a bifurcation: continue the winner only
    let run = src.minimize(&mut q, k, beta, 10 * cfg.max_iters);
    (q, run.converged)
}

fn pad_kernel(q: &[f64], k_from: usize, k_to: usize) -> Vec<f64> {
    if k_from == k_to {
        return q.to_vec();
    }
    let n = q.len() / k_from;
    let mut out = vec![0.0; n * k_to];
    for c in 0..n {
        for u in 0..k_from.min(k_to) {
            out[c * k_to + u] = q[c * k_from + u];
        }
        if k_from > k_to {
            for u in k_to..k_from {
                out[c * k_to + k_to - 1] += q[c * k_from + u];
            }
        }
    }
    out
}

/// Indices of the lower convex hull of `pts` (sorted by x).
fn lower_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        while h.len() >= 2 {
            let (a, b) = (pts[h[h.len() - 2]], pts[h[h.len() - 1]]);
            let c = pts[i];
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Sorts by excess rate, keeps the best shared rate per abscissa and
/// returns the lower (or upper) hull.
/// Abscissae closer than this are treated as one point of a curve.
const ABSCISSA_MERGE: f64 = 1e-8;

fn hull_points(mut pts: Vec<CurvePoint>, upper: bool) -> Vec<CurvePoint> {
    let sign = if upper { -1.0 } else { 1.0 };
    pts.sort_by(|a, b| {
        a.excess_rate
            .total_cmp(&b.excess_rate)
            .then((sign * a.shared_rate).total_cmp(&(sign * b.shared_rate)))
    });
    // among near-equal abscissae keep the best ordinate, not the first one;
    // slopes over gaps this small are dominated by solver noise
    let mut grouped: Vec<CurvePoint> = Vec::with_capacity(pts.len());
    for p in pts {
        match grouped.last_mut() {
            Some(last) if (p.excess_rate - last.excess_rate).abs() <= ABSCISSA_MERGE => {
                if sign * p.shared_rate <= sign * last.shared_rate + 1e-15 {
                    *last = p;
                }
            }
            _ => grouped.push(p),
        }
    }
    let pts = grouped;
    let xy: Vec<(f64, f64)> = pts
        .iter()
        .map(|p| (p.excess_rate, sign * p.shared_rate))
        .collect();
    let keep = lower_hull(&xy);
    let mut out = Vec::with_capacity(keep.len());
    let mut it = pts.into_iter().enumerate();
    for &i in &keep {
        for (j, p) in it.by_ref() {
            if j == i {
                out.push(p);
                break;
            }
        }
    }
    out
}

/// Inserts time-sharing midpoints until the curve has at least three points
/// (unless it is a single point).
fn densify(pmf: &JointPMF, pts: Vec<CurvePoint>, receive: bool) -> Result<Vec<CurvePoint>> {
    if pts.len() != 2 {
        return Ok(pts);
    }
    let (a, b) = (&pts[0], &pts[1]);
    let mut out = vec![a.clone()];
    for t in [2.0 / 3.0, 1.0 / 3.0] {
        let d = AuxDecomposition::mixture(pmf, &a.decomposition, &b.decomposition, t)?;
        let p = if receive {
            receive_point(pmf, d, f64::NAN, true)
        } else {
            transmit_point(pmf, d, f64::NAN, true)
        };
        out.push(p);
    }
    out.push(b.clone());
    Ok(out)
}

/// Transmit curve `C(R')` on `[0, I(X;Y)]` from a Lagrangian sweep.
///
/// For each weight `lambda`, `I(X,Y;U) + lambda I(X;Y|U)` is minimized by
/// multi-start descent. The Wyner solution and the separate-encoding point
/// `(I(X;Y), 0)` are always included and the result is the lower convex hull
/// of all points found, sorted by excess rate.
pub fn c_curve(pmf: &JointPMF, cfg: &SolverConfig) -> Result<Vec<CurvePoint>> {
    let w = wyner_ci(pmf, cfg)?;
    c_curve_with(pmf, cfg, &w)
}

/// [`c_curve`] reusing an existing Wyner solution.
pub fn c_curve_with(
    pmf: &JointPMF,
    cfg: &SolverConfig,
    wyner: &WynerSolution,
) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let src = Source::new(pmf);
    let mi = src.mi();
    let k = u_card_for(pmf, cfg);
    let warm = vec![pad_kernel(
        wyner.decomposition.q(),
        wyner.decomposition.u_card(),
        k,
    )];
    let mut pts = vec![
        transmit_point(pmf, AuxDecomposition::constant(pmf), 0.0, true),
        transmit_point(pmf, wyner.decomposition.clone(), f64::INFINITY, wyner.converged),
    ];
    let solved: Vec<Result<CurvePoint>> = cfg
        .lagrange_grid
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let beta = lambda / (1.0 + lambda);
            let (q, conv) = best_for_beta(&src, k, beta, cfg, &warm, i as u64 + 1);
            Ok(transmit_point(pmf, AuxDecomposition::new(pmf, q, k)?, lambda, conv))
        })
        .collect();
    for p in solved {
        pts.push(p?);
    }
    pts.retain(|p| p.excess_rate <= mi + 1e-12);
    for p in &mut pts {
        p.excess_rate = p.excess_rate.min(mi);
    }
    densify(pmf, hull_points(pts, false), false)
}

/// Set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
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
        return vec![Vec::new()];
    }
    rec(1, 0, &mut a, &mut out);
    out
}

/// Largest support for which deterministic maps are enumerated.
pub const PARTITION_LIMIT: usize = 9;

/// Receive curve `K(R'')` on `[0, H(X,Y) - I(X;Y)]`.
///
/// For each weight `mu`, `I(X,Y;W) - mu (I(X;W|Y) + I(Y;W|X))` is maximized
/// over deterministic maps `W = f(X,Y)` (when the support has at most
/// [`PARTITION_LIMIT`] cells) and by multi-start ascent. The endpoints
/// `(0, C_GK)` and `(H(X,Y) - I(X;Y), H(X,Y))` are always present; the
/// result is the upper concave hull of all points found.
pub fn k_curve(pmf: &JointPMF, cfg: &SolverConfig) -> Result<Vec<CurvePoint>> {
    let w = wyner_ci(pmf, cfg)?;
    k_curve_with(pmf, cfg, &w)
}

/// [`k_curve`] reusing an existing Wyner solution as a warm start.
pub fn k_curve_with(
    pmf: &JointPMF,
    cfg: &SolverConfig,
    wyner: &WynerSolution,
) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let src = Source::new(pmf);
    let span = (src.hxy - src.mi()).max(0.0);
    let k = u_card_for(pmf, cfg);
    let n = src.cells();
    let mut pts = vec![
        receive_point(pmf, AuxDecomposition::ergodic_class(pmf), f64::INFINITY, true),
        receive_point(pmf, AuxDecomposition::identity(pmf), 0.0, true),
        receive_point(pmf, wyner.decomposition.clone(), 1.0, wyner.converged),
    ];

    let support: Vec<usize> = (0..n).filter(|&c| src.p[c] > 0.0).collect();
    let mut partition_pts: Vec<(Vec<usize>, f64, f64)> = Vec::new();
    if support.len() <= PARTITION_LIMIT {
        partition_pts = set_partitions(support.len())
            .into_par_iter()
            .map(|blocks| {
                let mut labels = vec![0usize; n];
                for (i, &c) in support.iter().enumerate() {
                    labels[c] = blocks[i];
                }
                let d = AuxDecomposition::deterministic(pmf, &labels).expect("labels");
                let s = d.stats(pmf);
                (labels, s.receive_excess, s.i_xy_u)
            })
            .collect();
    }

    let warm = vec![pad_kernel(
        wyner.decomposition.q(),
        wyner.decomposition.u_card(),
        k,
    )];
    let solved: Vec<Result<Vec<CurvePoint>>> = cfg
        .lagrange_grid
        .par_iter()
        .enumerate()
        .map(|(i, &mu)| {
            let mut out = Vec::new();
            if mu <= 1.0 {
                out.push(receive_point(pmf, AuxDecomposition::identity(pmf), mu, true));
                return Ok(out);
            }
            let score = |ex: f64, sh: f64| sh - mu * ex;
            let mut starts = warm.clone();
            if let Some((labels, _, _)) = partition_pts
                .iter()
                .max_by(|a, b| score(a.1, a.2).total_cmp(&score(b.1, b.2)))
            {
                let d = AuxDecomposition::deterministic(pmf, labels)?;
                let q: Vec<f64> = pad_kernel(d.q(), d.u_card(), k.max(d.u_card()))
                    .iter()
                    .map(|v| 0.98 * v + 0.02 / k.max(d.u_card()) as f64)
                    .collect();
                if k >= d.u_card() {
                    starts.push(q);
                }
                out.push(receive_point(pmf, d, mu, true));
            }
            let beta = mu / (2.0 * mu - 1.0);
            let (q, conv) = best_for_beta(&src, k, beta, cfg, &starts, 1000 + i as u64);
            out.push(receive_point(pmf, AuxDecomposition::new(pmf, q, k)?, mu, conv));
            Ok(out)
        })
        .collect();
    for s in solved {
        pts.extend(s?);
    }
    for (labels, ex, sh) in &partition_pts {
        // partition points are cheap to rebuild; keep only hull candidates
        if *ex <= span + 1e-12 && *sh >= 0.0 {
            pts.push(receive_point(
                pmf,
                AuxDecomposition::deterministic(pmf, labels)?,
                f64::NAN,
                true,
            ));
        }
    }
    pts.retain(|p| p.excess_rate <= span + 1e-9);
    for p in &mut pts {
        p.excess_rate = p.excess_rate.min(span);
    }
    densify(pmf, hull_points(pts, true), true)
}

/// Brute-force transmit curve for sources with at most four cells.
///
/// Every kernel `q(u|x,y)` on a simplex grid of spacing `grid_step` is
/// evaluated, the best shared rate per excess-rate bin is kept, and the
/// lower convex hull is returned. The `R' = 0` end is resolved separately
/// for binary `U` by enumerating exactly Markov factorizations
/// `p(u) p(x|u) p(y|u)` on a grid ten times finer.
pub fn oracle_c_curve(pmf: &JointPMF, u_card: usize, grid_step: f64) -> Result<Vec<CurvePoint>> {
    let n = pmf.nx() * pmf.ny();
    if n > 4 {
        return Err(Error::TooLarge(format!("{n} cells; the oracle handles at most 4")));
    }
    if u_card == 0 || u_card > 3 {
        return Err(Error::TooLarge(format!("u_card {u_card}; the oracle handles 1..=3")));
    }
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::InvalidConfig("grid_step must lie in (0, 0.5]".into()));
    }
    let m = (1.0 / grid_step).round() as usize;
    let simplex = simplex_grid(u_card, m);
    let total = (simplex.len() as f64).powi(n as i32);
    if total > 5e7 {
        return Err(Error::TooLarge(format!("{total:.0} grid kernels")));
    }
    let src = Source::new(pmf);
    let mi = src.mi();

    const BINS: usize = 4096;
    let s = simplex.len();
    // -sum_u m log m of each cell for each simplex point
    let cell_h: Vec<Vec<f64>> = src
        .p
        .iter()
        .map(|&pc| {
            simplex
                .iter()
                .map(|row| -row.iter().map(|&v| plog2p(pc * v)).sum::<f64>())
                .collect()
        })
        .collect();
    let (nx, ny) = (src.nx, src.ny);
    // relabelling U permutes the first row, so it may be taken nonincreasing
    let firsts: Vec<usize> = (0..s)
        .filter(|&j| simplex[j].windows(2).all(|w| w[0] >= w[1]))
        .collect();
    let chunks: Vec<Vec<(f64, usize)>> = firsts
        .into_par_iter()
        .map(|first| {
            let mut best = vec![(f64::INFINITY, usize::MAX); BINS + 1];
            let mut js = vec![first; n];
            let mut r = vec![0.0; u_card];
            let mut xu = vec![0.0; nx * u_card];
            let mut yu = vec![0.0; ny * u_card];
            let rest = s.pow(n as u32 - 1);
            for idx in 0..rest {
                let mut code = idx;
                for j in js.iter_mut().skip(1) {
                    *j = code % s;
                    code /= s;
                }
                r.iter_mut().for_each(|v| *v = 0.0);
                xu.iter_mut().for_each(|v| *v = 0.0);
                yu.iter_mut().for_each(|v| *v = 0.0);
                let mut h_xyu = 0.0;
                for (c, &j) in js.iter().enumerate() {
                    let pc = src.p[c];
                    let (x, y) = (c / ny, c % ny);
                    h_xyu += cell_h[c][j];
                    for (u, &v) in simplex[j].iter().enumerate() {
                        let m = pc * v;
                        r[u] += m;
                        xu[x * u_card + u] += m;
                        yu[y * u_card + u] += m;
                    }
                }
                let h = |v: &[f64]| -v.iter().map(|&m| plog2p(m)).sum::<f64>();
                let hu = h(&r);
                let excess = clamp_info(h(&xu) + h(&yu) - h_xyu - hu);
                if excess > mi + 1e-12 {
                    continue;
                }
                let shared = clamp_info(hu + src.hxy - h_xyu);
                let bin = if mi > 0.0 {
                    ((excess / mi) * BINS as f64).floor() as usize
                } else {
                    0
                }
                .min(BINS);
                if shared < best[bin].0 {
                    best[bin] = (shared, first * rest + idx);
                }
            }
            best
        })
        .collect();

    let mut bins = vec![(f64::INFINITY, usize::MAX); BINS + 1];
    for ch in &chunks {
        for (b, &(v, code)) in ch.iter().enumerate() {
            if v < bins[b].0 {
                bins[b] = (v, code);
            }
        }
    }
    let decode = |code: usize| -> Vec<f64> {
        let rest = s.pow(n as u32 - 1);
        let (first, mut idx) = (code / rest, code % rest);
        let mut q = simplex[first].clone();
        for _ in 1..n {
            q.extend_from_slice(&simplex[idx % s]);
            idx /= s;
        }
        q
    };
    let mut pts = vec![transmit_point(pmf, AuxDecomposition::constant(pmf), 0.0, true)];
    for &(v, code) in &bins {
        if v.is_finite() {
            let d = AuxDecomposition::new(pmf, decode(code), u_card)?;
            pts.push(transmit_point(pmf, d, f64::NAN, true));
        }
    }
    if u_card >= 2 && pmf.nx() == 2 && pmf.ny() == 2 {
        if let Some(q) = markov_factorization_grid(pmf, grid_step / 10.0) {
            let d = AuxDecomposition::new(pmf, pad_kernel(&q, 2, u_card), u_card)?;
            pts.push(transmit_point(pmf, d, f64::NAN, true));
        }
    }
    if n == 1 || mi == 0.0 {
        pts.push(transmit_point(pmf, AuxDecomposition::constant(pmf), 0.0, true));
    }
    for p in &mut pts {
        p.excess_rate = p.excess_rate.min(mi);
    }
    Ok(hull_points(pts, false))
}

fn simplex_grid(k: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&v| v as f64 / m as f64).collect());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(k - 1, left - v, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, m, m, &mut Vec::new(), &mut out);
    out
}

/// Best exactly Markov binary-`U` decomposition of a 2x2 source found on a
/// grid over the first atom's product law `a = P(X=0|U=0)`,
/// `b = P(Y=0|U=0)`. Returns the kernel `q(u|x,y)`.
///
/// Writing `P = pi v + R` with `v = (a, 1-a) x (b, 1-b)`, the remainder `R`
/// is a product (so `U` is Markov) iff `det R = 0`, which is linear in `pi`.
fn markov_factorization_grid(pmf: &JointPMF, step: f64) -> Option<Vec<f64>> {
    let p = pmf.probs();
    let det = p[0] * p[3] - p[1] * p[2];
    let m = (1.0 / step).round() as usize;
    let src = Source::new(pmf);
    (0..=m)
        .into_par_iter()
        .map(|i| {
            let a = i as f64 / m as f64;
            let mut best: Option<(f64, Vec<f64>)> = None;
            let mut buf = Scratch::default();
            for j in 0..=m {
                let b = j as f64 / m as f64;
                let v = [a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)];
                let c = p[0] * v[3] + p[3] * v[0] - p[1] * v[2] - p[2] * v[1];
                if c.abs() < 1e-15 {
                    continue;
                }
                let pi = det / c;
                if !(pi > 0.0 && pi <= 1.0) {
                    continue;
                }
                let mut q = vec![0.0; 8];
                let mut ok = true;
                for cell in 0..4 {
                    let first = pi * v[cell];
                    let rest = p[cell] - first;
                    if rest < -1e-12 {
                        ok = false;
                        break;
                    }
                    if p[cell] > 0.0 {
                        q[cell * 2] = (first / p[cell]).min(1.0);
                        q[cell * 2 + 1] = 1.0 - q[cell * 2];
                    } else {
                        q[cell * 2] = 0.5;
                        q[cell * 2 + 1] = 0.5;
                    }
                }
                if !ok {
                    continue;
                }
                let v = src.stats_with(&q, 2, &mut buf).i_xy_u;
                if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                    best = Some((v, q));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, q)| q)
}

/// One operating point of the transmit/receive tradeoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TradeoffPoint {
    /// `R0 + R1 + R2`
    pub transmit: f64,
    /// `2 R0 + R1 + R2`
    pub receive: f64,
}

/// Minimal receive rate as a function of the transmit rate, from the
/// transmit curve: `R_t = H(X,Y) + R'`, `R_r = R_t + C(R')`.
pub fn transmit_receive_tradeoff(
    c_points: &[CurvePoint],
    pmf: &JointPMF,
) -> Result<Vec<TradeoffPoint>> {
    if c_points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let h = pmf.entropy_xy();
    let mut out: Vec<TradeoffPoint> = c_points
        .iter()
        .map(|p| TradeoffPoint {
            transmit: h + p.excess_rate,
            receive: h + p.excess_rate + p.shared_rate,
        })
        .collect();
    out.sort_by(|a, b| a.transmit.total_cmp(&b.transmit));
    Ok(out)
}

/// The same tradeoff from the receive curve: `R_r = H(X) + H(Y) + R''`,
/// `R_t = R_r - K(R'')`.
pub fn receive_transmit_tradeoff(
    k_points: &[CurvePoint],
    pmf: &JointPMF,
) -> Result<Vec<TradeoffPoint>> {
    if k_points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let base = pmf.entropy_x() + pmf.entropy_y();
    let mut out: Vec<TradeoffPoint> = k_points
        .iter()
        .map(|p| TradeoffPoint {
            transmit: base + p.excess_rate - p.shared_rate,
            receive: base + p.excess_rate,
        })
        .collect();
    out.sort_by(|a, b| a.transmit.total_cmp(&b.transmit));
    Ok(out)
}

/// Piecewise-linear interpolation of a curve sorted by excess rate.
pub fn interpolate(points: &[CurvePoint], x: f64) -> Option<f64> {
    let first = points.first()?;
    let last = points.last()?;
    if x <= first.excess_rate {
        return Some(first.shared_rate);
    }
    if x >= last.excess_rate {
        return Some(last.shared_rate);
    }
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (x >= a.excess_rate && x <= b.excess_rate).then(|| {
            let dx = b.excess_rate - a.excess_rate;
            if dx <= 0.0 {
                a.shared_rate
            } else {
                a.shared_rate + (b.shared_rate - a.shared_rate) * (x - a.excess_rate) / dx
            }
        })
    })
}

fn slope_extract(points: &[CurvePoint], target: f64, slope_tol: f64, fallback: f64) -> Result<f64> {
    let first = points.first().ok_or(Error::EmptyCurve)?;
    let last = points.last().expect("nonempty");
    if (last.excess_rate - first.excess_rate).abs() <= 1e-12 {
        return Ok(first.shared_rate);
    }
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            found: points.len(),
            needed: 3,
        });
    }
    for w in points.windows(2) {
        let dx = w[1].excess_rate - w[0].excess_rate;
        if dx <= 1e-12 {
            continue;
        }
        let slope = (w[1].shared_rate - w[0].shared_rate) / dx;
        if (slope - target).abs() <= slope_tol {
            return Ok(w[0].shared_rate);
        }
    }
    Ok(fallback)
}

/// Gács-Körner common information read off the transmit curve: the shared
/// rate where the curve first reaches slope `-1`, or 0 if it never does.
pub fn gk_from_curve(c_points: &[CurvePoint], slope_tol: f64) -> Result<f64> {
    slope_extract(c_points, -1.0, slope_tol, 0.0)
}

/// Wyner common information read off the receive curve: the shared rate
/// where the curve first reaches slope `+1`, or `H(X,Y)` if it never does.
pub fn wyner_from_curve(k_points: &[CurvePoint], slope_tol: f64) -> Result<f64> {
    let fallback = k_points.last().map_or(0.0, |p| p.shared_rate);
    slope_extract(k_points, 1.0, slope_tol, fallback)
}

/// Default slope tolerance for [`gk_from_curve`] and [`wyner_from_curve`].
pub const SLOPE_TOL: f64 = 5e-2;

/// Lossless common information summary used by the CLI.
pub fn gk_and_wyner(pmf: &JointPMF, cfg: &SolverConfig) -> Result<(f64, WynerSolution)> {
    Ok((gk_common_information(pmf), wyner_ci(pmf, cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sources::*;

    fn quick() -> SolverConfig {
        SolverConfig {
            restarts: 4,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(n).len(), b);
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(simplex_grid(2, 50).len(), 51);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        let g = geometric_grid(0.5, 64.0, 20);
        assert_eq!(g.len(), 20);
        assert!((g[19] - 64.0).abs() < 1e-12);
    }

    #[test]
    fn update_is_monotone() {
        let pmf = dsbs(0.1).unwrap();
        let src = Source::new(&pmf);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut q = random_kernel(&mut rng, 4, 4);
        let mut next = vec![0.0; 16];
        for beta in [0.3, 0.6, 0.95] {
            let mut g = src.objective(&q, 4, beta);
            for _ in 0..200 {
                src.ba_step(&q, 4, beta, &mut next);
                let g2 = src.objective(&next, 4, beta);
                assert!(g2 <= g + 1e-12);
                g = g2;
                q.copy_from_slice(&next);
            }
        }
    }

    #[test]
    fn wyner_trivial_sources() {
        let ind = independent(&[0.3, 0.7], &[0.4, 0.6]).unwrap();
        assert_eq!(wyner_ci(&ind, &quick()).unwrap().value, 0.0);
        let id = identity(2).unwrap();
        let w = wyner_ci(&id, &quick()).unwrap();
        assert!((w.value - 1.0).abs() < 1e-4, "{}", w.value);
    }

    #[test]
    fn mixture_averages_rates() {
        let pmf = dsbs(0.2).unwrap();
        let a = AuxDecomposition::identity(&pmf);
        let b = AuxDecomposition::constant(&pmf);
        let m = AuxDecomposition::mixture(&pmf, &a, &b, 0.25).unwrap();
        let (sa, sb, sm) = (a.stats(&pmf), b.stats(&pmf), m.stats(&pmf));
        assert!((sm.i_xy_u - (0.25 * sa.i_xy_u + 0.75 * sb.i_xy_u)).abs() < 1e-12);
        assert!((sm.i_x_y_given_u - (0.25 * sa.i_x_y_given_u + 0.75 * sb.i_x_y_given_u)).abs() < 1e-12);
    }

    #[test]
    fn stats_agree_with_generic_machinery() {
        let pmf = JointPMF::from_rows(&[vec![0.1, 0.2, 0.05], vec![0.3, 0.15, 0.2]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_kernel(&mut rng, 6, 3);
        let d = AuxDecomposition::new(&pmf, q, 3).unwrap();
        let s = d.stats(&pmf);
        let nd = d.induced();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(s.i_xy_u, nd.mutual_information(&["X", "Y"], &["U"]).unwrap()));
        assert!(close(
            s.i_x_y_given_u,
            nd.conditional_mutual_information(&["X"], &["Y"], &["U"]).unwrap()
        ));
        let rx = nd.conditional_mutual_information(&["X"], &["U"], &["Y"]).unwrap()
            + nd.conditional_mutual_information(&["Y"], &["U"], &["X"]).unwrap();
        assert!(close(s.receive_excess, rx));
        assert!(close(s.h_x_given_u, nd.conditional_entropy(&["X"], &["U"]).unwrap()));
    }

    #[test]
    fn canonical_form_ignores_relabelling() {
        let pmf = dsbs(0.1).unwrap();
        let a = AuxDecomposition::deterministic(&pmf, &[0, 1, 1, 0]).unwrap();
        let b = AuxDecomposition::deterministic(&pmf, &[1, 0, 0, 1]).unwrap();
        assert!(a.canonical_distance(&b) < 1e-12);
        let c = AuxDecomposition::deterministic(&pmf, &[0, 0, 1, 1]).unwrap();
        assert!(a.canonical_distance(&c) > 1e-3);
    }
}
