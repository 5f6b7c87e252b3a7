//! Closed forms for the standardized bivariate Gaussian source under
//! squared-error distortion.
//!
//! With `D̄ = 1 - D`, the joint rate-distortion function has three cases and
//! the lossy Wyner common information four regimes plus the degenerate zone
//! `D >= 1`. Points on a boundary between two regimes are assigned to the
//! lower-numbered one; every formula is continuous across the boundaries so
//! the choice does not affect values.

use serde::Serialize;

use crate::error::{Error, Result};

/// Zero-mean, unit-variance Gaussian pair with correlation `rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianSource {
    rho: f64,
}

impl GaussianSource {
    /// Negative correlations are mapped to `|rho|`; the problem is symmetric
    /// under `Y -> -Y`.
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::InvalidCorrelation(rho));
        }
        Ok(Self { rho: rho.abs() })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `max(D1, D2) <= 1 - rho`: the lossless value.
    LosslessCi,
    /// `D̄1 D̄2 <= rho^2`: everything is sent on the shared branch.
    AllShared,
    /// `D1 > 1 - rho`, `D̄1 D̄2 > rho^2`.
    D1Excess,
    /// `D2 > 1 - rho`, `D̄1 D̄2 > rho^2`.
    D2Excess,
    /// `D1 >= 1` or `D2 >= 1`.
    DegenerateZero,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::LosslessCi => "I",
            Regime::AllShared => "II",
            Regime::D1Excess => "III",
            Regime::D2Excess => "IV",
            Regime::DegenerateZero => "degenerate",
        }
    }
}

fn check_positive(d1: f64, d2: f64) -> Result<()> {
    for d in [d1, d2] {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NonPositiveDistortion(d));
        }
    }
    Ok(())
}

fn half_log2(x: f64) -> f64 {
    0.5 * x.log2()
}

/// Joint rate-distortion function `R_{X,Y}(D1, D2)` in bits.
pub fn gaussian_joint_rd(src: &GaussianSource, d1: f64, d2: f64) -> Result<f64> {
    check_positive(d1, d2)?;
    let r2 = src.rho * src.rho;
    if d1 >= 1.0 && d2 >= 1.0 {
        return Ok(0.0);
    }
    let (b1, b2) = (1.0 - d1, 1.0 - d2);
    if b1 * b2 >= r2 && b1 > 0.0 && b2 > 0.0 {
        return Ok(half_log2((1.0 - r2) / (d1 * d2)));
    }
    if b1 > 0.0 && b2 > 0.0 && (b1 / b2).min(b2 / b1) >= r2 {
        let gap = src.rho - (b1 * b2).sqrt();
        return Ok(half_log2((1.0 - r2) / (d1 * d2 - gap * gap)));
    }
    Ok(half_log2(1.0 / d1.min(d2)).max(0.0))
}

/// `C_W(X;Y) = ½ log2((1 + rho) / (1 - rho))`.
pub fn gaussian_wyner_ci_lossless(src: &GaussianSource) -> f64 {
    half_log2((1.0 + src.rho) / (1.0 - src.rho))
}

pub fn classify_regime(src: &GaussianSource, d1: f64, d2: f64) -> Result<Regime> {
    check_positive(d1, d2)?;
    let rho = src.rho;
    if d1 >= 1.0 || d2 >= 1.0 {
        return Ok(Regime::DegenerateZero);
    }
    if d1.max(d2) <= 1.0 - rho {
        return Ok(Regime::LosslessCi);
    }
    if (1.0 - d1) * (1.0 - d2) <= rho * rho {
        return Ok(Regime::AllShared);
    }
    if d1 > 1.0 - rho {
        Ok(Regime::D1Excess)
    } else {
        Ok(Regime::D2Excess)
    }
}

fn excess_formula(rho: f64, d: f64) -> f64 {
    let r2 = rho * rho;
    half_log2((1.0 - r2) / ((1.0 - r2 / (1.0 - d)) * d))
}

/// Lossy Wyner common information `C_W(X,Y;D1,D2)` in bits.
pub fn gaussian_lossy_wyner_ci(src: &GaussianSource, d1: f64, d2: f64) -> Result<f64> {
    Ok(match classify_regime(src, d1, d2)? {
        Regime::LosslessCi => gaussian_wyner_ci_lossless(src),
        Regime::AllShared => gaussian_joint_rd(src, d1, d2)?,
        Regime::D1Excess => excess_formula(src.rho, d1),
        Regime::D2Excess => excess_formula(src.rho, d2),
        Regime::DegenerateZero => 0.0,
    })
}

/// Lossy Gács-Körner common information; zero for every `|rho| < 1`.
pub fn gaussian_lossy_gk(_src: &GaussianSource, d1: f64, d2: f64) -> Result<f64> {
    check_positive(d1, d2)?;
    Ok(0.0)
}

/// Shannon lower bound `½ log2((1 - rho^2) / (D1 D2))` and whether it is
/// tight (`D̄1 D̄2 >= rho^2`).
pub fn gaussian_slb(src: &GaussianSource, d1: f64, d2: f64) -> Result<(f64, bool)> {
    check_positive(d1, d2)?;
    let r2 = src.rho * src.rho;
    let tight = (1.0 - d1) * (1.0 - d2) >= r2 && d1 < 1.0 && d2 < 1.0;
    Ok((half_log2((1.0 - r2) / (d1 * d2)), tight))
}

/// Lossy CI along a line of constant `D2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Curve {
    pub points: Vec<(f64, f64)>,
    /// End of the constant segment, `D1 = 1 - rho`.
    pub a: f64,
    /// Peak, `D1 = 1 - rho^2 / (1 - D2)`.
    pub b: f64,
}

pub fn fig2_curve(src: &GaussianSource, d2: f64, d1_grid: &[f64]) -> Result<Fig2Curve> {
    let points = d1_grid
        .iter()
        .map(|&d1| gaussian_lossy_wyner_ci(src, d1, d2).map(|v| (d1, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig2Curve {
        points,
        a: 1.0 - src.rho,
        b: 1.0 - src.rho * src.rho / (1.0 - d2),
    })
}

/// Covariance-algebra check of the Gaussian achievability construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionReport {
    /// Covariance of `(X, Y, Xh, Yh, U)`.
    pub covariance: [[f64; 5]; 5],
    /// Deviation of `Cov(Xh, Yh)` from `[[D̄1, rho], [rho, D̄2]]`.
    pub reconstruction_cov_error: f64,
    /// Deviation of `Cov(X, Y)` from the source covariance.
    pub source_cov_error: f64,
    /// `|Cov(Xh,Yh|U)|`
    pub reconstruction_markov: f64,
    /// `|Cov(X,Y|U)|`
    pub source_markov: f64,
    /// `max |Cov((X,Y),U | Xh,Yh)|`
    pub reconstruction_to_u_markov: f64,
    pub mse: (f64, f64),
    /// `I(X,Y;U)` of the construction.
    pub shared_rate: f64,
}

impl ConstructionReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.reconstruction_cov_error,
            self.source_cov_error,
            self.reconstruction_markov,
            self.source_markov,
            self.reconstruction_to_u_markov,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn covariance_from_loadings(a: &[[f64; 5]; 5]) -> [[f64; 5]; 5] {
    let mut s = [[0.0; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            s[i][j] = (0..5).map(|k| a[i][k] * a[j][k]).sum();
        }
    }
    s
}

fn det2(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Builds `(X, Y, Xh, Yh, U)` from independent standard sources and checks
/// the covariance identities and Markov chains of the construction.
///
/// `coef_perturbation` is added to the `U` loading of `Xh` (0 for the
/// faithful construction).
pub fn verify_gaussian_construction_with(
    src: &GaussianSource,
    d1: f64,
    d2: f64,
    coef_perturbation: f64,
) -> Result<ConstructionReport> {
    check_positive(d1, d2)?;
    let rho = src.rho;
    if d1.max(d2) > 1.0 - rho {
        return Err(Error::RegimeMismatch { rho, d1, d2 });
    }
    let sr = rho.sqrt();
    // latent order: U, N1, N2, Z1, Z2
    let xh = [sr + coef_perturbation, (1.0 - d1 - rho).max(0.0).sqrt(), 0.0, 0.0, 0.0];
    let yh = [sr, 0.0, (1.0 - d2 - rho).max(0.0).sqrt(), 0.0, 0.0];
    let mut x = xh;
    x[3] = d1.sqrt();
    let mut y = yh;
    y[4] = d2.sqrt();
    let u = [1.0, 0.0, 0.0, 0.0, 0.0];
    let s = covariance_from_loadings(&[x, y, xh, yh, u]);
    let (ix, iy, ixh, iyh, iu) = (0, 1, 2, 3, 4);

    let reconstruction_cov_error = [
        (s[ixh][ixh] - (1.0 - d1)).abs(),
        (s[iyh][iyh] - (1.0 - d2)).abs(),
        (s[ixh][iyh] - rho).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let source_cov_error = [
        (s[ix][ix] - 1.0).abs(),
        (s[iy][iy] - 1.0).abs(),
        (s[ix][iy] - rho).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let partial = |a: usize, b: usize| s[a][b] - s[a][iu] * s[iu][b] / s[iu][iu];
    let reconstruction_markov = partial(ixh, iyh).abs();
    let source_markov = partial(ix, iy).abs();

    // Cov((X,Y), U | Xh, Yh) through the 2x2 inverse of Cov(Xh, Yh)
    let c = [[s[ixh][ixh], s[ixh][iyh]], [s[iyh][ixh], s[iyh][iyh]]];
    let det = det2(c);
    let inv = [[c[1][1] / det, -c[0][1] / det], [-c[1][0] / det, c[0][0] / det]];
    let mut reconstruction_to_u_markov: f64 = 0.0;
    for a in [ix, iy] {
        let la = [s[a][ixh], s[a][iyh]];
        let lu = [s[iu][ixh], s[iu][iyh]];
        let mut proj = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                proj += la[i] * inv[i][j] * lu[j];
            }
        }
        reconstruction_to_u_markov = reconstruction_to_u_markov.max((s[a][iu] - proj).abs());
    }

    let mse = |a: usize, b: usize| s[a][a] + s[b][b] - 2.0 * s[a][b];
    // I(X,Y;U) = ½ log det Cov(X,Y) / det Cov(X,Y | U)
    let cxy = [[s[ix][ix], s[ix][iy]], [s[iy][ix], s[iy][iy]]];
    let cxy_u = [
        [partial(ix, ix), partial(ix, iy)],
        [partial(iy, ix), partial(iy, iy)],
    ];
    Ok(ConstructionReport {
        covariance: s,
        reconstruction_cov_error,
        source_cov_error,
        reconstruction_markov,
        source_markov,
        reconstruction_to_u_markov,
        mse: (mse(ix, ixh), mse(iy, iyh)),
        shared_rate: half_log2(det2(cxy) / det2(cxy_u)),
    })
}

pub fn verify_gaussian_construction(
    src: &GaussianSource,
    d1: f64,
    d2: f64,
) -> Result<ConstructionReport> {
    verify_gaussian_construction_with(src, d1, d2, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rho: f64) -> GaussianSource {
        GaussianSource::new(rho).unwrap()
    }

    #[test]
    fn joint_rd_cases() {
        let v = gaussian_joint_rd(&g(0.5), 0.9, 0.9).unwrap();
        assert!((v - 0.5 * (0.75f64 / 0.65).log2()).abs() < 1e-12);
        assert!((v - 0.10328).abs() < 1e-4);
        assert!((gaussian_joint_rd(&g(0.0), 0.25, 0.25).unwrap() - 2.0).abs() < 1e-12);
        let c3 = gaussian_joint_rd(&g(0.5), 0.02, 0.98).unwrap();
        assert!((c3 - 0.5 * 50f64.log2()).abs() < 1e-12);
        assert!((c3 - 2.82193).abs() < 1e-5);
        assert_eq!(gaussian_joint_rd(&g(0.5), 1.0, 1.2).unwrap(), 0.0);
        assert!(matches!(
            gaussian_joint_rd(&g(0.5), 0.0, 0.5),
            Err(Error::NonPositiveDistortion(_))
        ));
    }

    #[test]
    fn lossless_values() {
        assert_eq!(gaussian_wyner_ci_lossless(&g(0.0)), 0.0);
        assert!((gaussian_wyner_ci_lossless(&g(0.5)) - 0.5 * 3f64.log2()).abs() < 1e-12);
        assert!((gaussian_wyner_ci_lossless(&g(0.99)) - 0.5 * 199f64.log2()).abs() < 1e-12);
        assert!(GaussianSource::new(1.0).is_err());
        assert_eq!(g(-0.3).rho(), 0.3);
    }

    #[test]
    fn regimes() {
        let s = g(0.5);
        assert_eq!(classify_regime(&s, 0.3, 0.3).unwrap(), Regime::LosslessCi);
        assert_eq!(classify_regime(&s, 0.9, 0.9).unwrap(), Regime::AllShared);
        assert_eq!(classify_regime(&s, 0.6, 0.2).unwrap(), Regime::D1Excess);
        assert_eq!(classify_regime(&s, 0.2, 0.6).unwrap(), Regime::D2Excess);
        assert_eq!(classify_regime(&s, 1.0, 0.2).unwrap(), Regime::DegenerateZero);
        // boundary goes to the lower-numbered regime
        assert_eq!(classify_regime(&s, 0.5, 0.5).unwrap(), Regime::LosslessCi);
    }

    #[test]
    fn lossy_ci_values() {
        let s = g(0.5);
        let l = 0.5 * 3f64.log2();
        assert!((gaussian_lossy_wyner_ci(&s, 0.3, 0.3).unwrap() - l).abs() < 1e-12);
        let v3 = gaussian_lossy_wyner_ci(&s, 0.6, 0.2).unwrap();
        assert!((v3 - 0.5 * (0.75f64 / 0.225).log2()).abs() < 1e-12);
        assert!((v3 - 0.86848).abs() < 1e-5);
        assert!(v3 > l);
        let v2 = gaussian_lossy_wyner_ci(&s, 0.9, 0.9).unwrap();
        assert_eq!(v2, gaussian_joint_rd(&s, 0.9, 0.9).unwrap());
        assert_eq!(gaussian_lossy_wyner_ci(&s, 1.5, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn sweep_markers() {
        let c = fig2_curve(&g(0.5), 0.2, &[0.3, 0.49, 0.6875]).unwrap();
        assert!((c.a - 0.5).abs() < 1e-15);
        assert!((c.b - 0.6875).abs() < 1e-15);
        assert_eq!(c.points[0].1, c.points[1].1);
        let s = g(0.5);
        let at_b = excess_formula(0.5, 0.6875);
        let joint = gaussian_joint_rd(&s, 0.6875, 0.2).unwrap();
        assert!((at_b - joint).abs() < 1e-9);
    }

    #[test]
    fn slb_examples() {
        let (v, t) = gaussian_slb(&g(0.5), 0.3, 0.3).unwrap();
        assert!((v - 0.5 * (0.75f64 / 0.09).log2()).abs() < 1e-12);
        assert!((v - 1.52943).abs() < 1e-4);
        assert!(t);
        assert!(!gaussian_slb(&g(0.5), 0.9, 0.9).unwrap().1);
        let (v0, t0) = gaussian_slb(&g(0.0), 0.25, 0.5).unwrap();
        assert!(t0);
        assert!((v0 - (0.5 * 4f64.log2() + 0.5 * 2f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn construction_checks() {
        let s = g(0.5);
        let r = verify_gaussian_construction(&s, 0.3, 0.3).unwrap();
        assert!(r.max_residual() <= 1e-12);
        assert!((r.mse.0 - 0.3).abs() < 1e-12 && (r.mse.1 - 0.3).abs() < 1e-12);
        assert!((r.shared_rate - gaussian_wyner_ci_lossless(&s)).abs() < 1e-12);
        let b = verify_gaussian_construction(&s, 0.5, 0.5).unwrap();
        assert!(b.max_residual() <= 1e-12);
        let bad = verify_gaussian_construction_with(&s, 0.3, 0.3, 0.01).unwrap();
        assert!(bad.max_residual() > 1e-4);
        assert!(matches!(
            verify_gaussian_construction(&s, 0.6, 0.2),
            Err(Error::RegimeMismatch { .. })
        ));
    }
}
