//! Gray-Wyner rate points generated from witness distributions.

use serde::Serialize;

use crate::aux::AuxDecomposition;
use crate::error::{Error, Result};
use crate::lossy::DistortionSpec;
use crate::prob::{JointPMF, NDDist, MASS_TOL};

/// `(R0, R1, R2)` in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
}

fn clamp_rate(v: f64) -> f64 {
    if v < 0.0 && v >= -1e-9 {
        0.0
    } else {
        v
    }
}

impl RatePoint {
    pub fn new(r0: f64, r1: f64, r2: f64) -> Self {
        Self {
            r0: clamp_rate(r0),
            r1: clamp_rate(r1),
            r2: clamp_rate(r2),
        }
    }

    pub fn sum(&self) -> f64 {
        self.r0 + self.r1 + self.r2
    }

    /// Total rate counting the shared branch once per decoder.
    pub fn receive(&self) -> f64 {
        2.0 * self.r0 + self.r1 + self.r2
    }
}

/// Corner `(I(X,Y;U), H(X|U), H(Y|U))` of the lossless region for `U`.
pub fn lossless_point(pmf: &JointPMF, aux: &AuxDecomposition) -> Result<RatePoint> {
    let xy = aux.induced().marginal(&["X", "Y"])?;
    let gap = xy
        .probs()
        .iter()
        .zip(pmf.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if xy.probs().len() != pmf.probs().len() || gap > MASS_TOL {
        return Err(Error::MarginalMismatch(gap));
    }
    let s = aux.stats(pmf);
    Ok(RatePoint::new(s.i_xy_u, s.h_x_given_u, s.h_y_given_u))
}

const LOSSY_AXES: [&str; 5] = ["X", "Y", "Xh", "Yh", "U"];

fn check_joint5(joint: &NDDist, spec: &DistortionSpec) -> Result<()> {
    for name in LOSSY_AXES {
        joint.axis_index(name)?;
    }
    let len = |n: &str| joint.axes()[joint.axis_index(n).expect("checked")].len();
    if len("X") != spec.d_x.len() || len("Xh") != spec.mx() || len("Y") != spec.d_y.len() || len("Yh") != spec.my() {
        return Err(Error::ShapeMismatch(
            "joint alphabets do not match the distortion matrices".into(),
        ));
    }
    Ok(())
}

/// Expected distortions `(E d_X, E d_Y)` under a five-variable joint.
pub fn expected_distortions(joint: &NDDist, spec: &DistortionSpec) -> Result<(f64, f64)> {
    check_joint5(joint, spec)?;
    let xx = joint.marginal(&["X", "Xh"])?;
    let yy = joint.marginal(&["Y", "Yh"])?;
    let e = |m: &NDDist, d: &[Vec<f64>]| {
        let w = d[0].len();
        m.probs()
            .iter()
            .enumerate()
            .map(|(i, p)| p * d[i / w][i % w])
            .sum::<f64>()
    };
    Ok((e(&xx, &spec.d_x), e(&yy, &spec.d_y)))
}

/// Corner `(I(X,Y;U), I(X;X̂|U), I(Y;Ŷ|U))` of the lossy region with the
/// achieved distortions.
pub fn lossy_point(joint: &NDDist, spec: &DistortionSpec) -> Result<(RatePoint, f64, f64)> {
    let (d1, d2) = expected_distortions(joint, spec)?;
    let r0 = joint.mutual_information(&["X", "Y"], &["U"])?;
    let r1 = joint.conditional_mutual_information(&["X"], &["Xh"], &["U"])?;
    let r2 = joint.conditional_mutual_information(&["Y"], &["Yh"], &["U"])?;
    Ok((RatePoint::new(r0, r1, r2), d1, d2))
}

/// The alternate characterization evaluated on one joint: its corner and
/// the four lower bounds on `R0`, `R0+R1`, `R0+R2` and the sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VkgPoint {
    /// `(I(X,Y;U), I(X,Y;X̂|U), I(X,Y;Ŷ|U,X̂))`
    pub corner: RatePoint,
    pub r0_bound: f64,
    pub r01_bound: f64,
    pub r02_bound: f64,
    /// `I(X,Y;U,X̂,Ŷ) + I(X̂;Ŷ|U)`
    pub sum_bound: f64,
}

impl VkgPoint {
    /// Whether `p` meets all four bounds within `tol`.
    pub fn admits(&self, p: &RatePoint, tol: f64) -> bool {
        p.r0 >= self.r0_bound - tol
            && p.r0 + p.r1 >= self.r01_bound - tol
            && p.r0 + p.r2 >= self.r02_bound - tol
            && p.sum() >= self.sum_bound - tol
    }
}

pub fn vkg_point(joint: &NDDist, spec: &DistortionSpec) -> Result<VkgPoint> {
    check_joint5(joint, spec)?;
    let xy = ["X", "Y"];
    let r0 = joint.mutual_information(&xy, &["U"])?;
    let r1 = joint.conditional_mutual_information(&xy, &["Xh"], &["U"])?;
    let r2 = joint.conditional_mutual_information(&xy, &["Yh"], &["U", "Xh"])?;
    Ok(VkgPoint {
        corner: RatePoint::new(r0, r1, r2),
        r0_bound: r0,
        r01_bound: joint.mutual_information(&xy, &["U", "Xh"])?,
        r02_bound: joint.mutual_information(&xy, &["U", "Yh"])?,
        sum_bound: joint.mutual_information(&xy, &["U", "Xh", "Yh"])?
            + joint.conditional_mutual_information(&["Xh"], &["Yh"], &["U"])?,
    })
}

/// Signed distance of the point's sum rate from `target_sum`.
pub fn pangloss_gap(point: &RatePoint, target_sum: f64) -> f64 {
    point.sum() - target_sum
}

/// `(R0+R1 - target_x, R0+R2 - target_y)`; targets are `H(X), H(Y)` in
/// the lossless case and `R_X(D1), R_Y(D2)` in the lossy one.
pub fn gk_plane_gap(point: &RatePoint, target_x: f64, target_y: f64) -> (f64, f64) {
    (point.r0 + point.r1 - target_x, point.r0 + point.r2 - target_y)
}

/// `(H(X), H(Y))` targets for [`gk_plane_gap`].
pub fn lossless_gk_targets(pmf: &JointPMF) -> (f64, f64) {
    (pmf.entropy_x(), pmf.entropy_y())
}

/// A rate point with its distortions and the witness that generated it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionPoint {
    pub rate: RatePoint,
    pub d1: f64,
    pub d2: f64,
    pub witness_id: String,
    pub witness: NDDist,
}

impl RegionPoint {
    pub fn lossless(pmf: &JointPMF, aux: &AuxDecomposition, witness_id: impl Into<String>) -> Result<Self> {
        Ok(Self {
            rate: lossless_point(pmf, aux)?,
            d1: 0.0,
            d2: 0.0,
            witness_id: witness_id.into(),
            witness: aux.induced().clone(),
        })
    }

    pub fn lossy(joint: &NDDist, spec: &DistortionSpec, witness_id: impl Into<String>) -> Result<Self> {
        let (rate, d1, d2) = lossy_point(joint, spec)?;
        Ok(Self {
            rate,
            d1,
            d2,
            witness_id: witness_id.into(),
            witness: joint.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sources::*;
    use crate::prob::Axis;

    fn copy_joint(pmf: &JointPMF) -> NDDist {
        let (nx, ny) = (pmf.nx(), pmf.ny());
        let mut p = vec![0.0; nx * ny * nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                p[((x * ny + y) * nx + x) * ny + y] = pmf.get(x, y);
            }
        }
        NDDist::new(
            vec![
                Axis::indexed("X", nx),
                Axis::indexed("Y", ny),
                Axis::indexed("Xh", nx),
                Axis::indexed("Yh", ny),
                Axis::indexed("U", 1),
            ],
            p,
        )
        .unwrap()
    }

    #[test]
    fn lossless_corners() {
        let pmf = dsbs(0.1).unwrap();
        let c = lossless_point(&pmf, &AuxDecomposition::constant(&pmf)).unwrap();
        assert!((c.r0).abs() < 1e-12 && (c.r1 - 1.0).abs() < 1e-12 && (c.r2 - 1.0).abs() < 1e-12);
        assert!((pangloss_gap(&c, pmf.entropy_xy()) - pmf.mutual_information()).abs() < 1e-12);
        let i = lossless_point(&pmf, &AuxDecomposition::identity(&pmf)).unwrap();
        assert!((i.r0 - pmf.entropy_xy()).abs() < 1e-12 && i.r1.abs() < 1e-12);
        let (gx, gy) = gk_plane_gap(&i, pmf.entropy_x(), pmf.entropy_y());
        assert!((gx - (pmf.entropy_xy() - pmf.entropy_x())).abs() < 1e-12);
        assert!((gy - (pmf.entropy_xy() - pmf.entropy_y())).abs() < 1e-12);
    }

    #[test]
    fn mismatched_marginal() {
        let a = dsbs(0.1).unwrap();
        let b = dsbs(0.2).unwrap();
        let aux = AuxDecomposition::constant(&b);
        assert!(matches!(lossless_point(&a, &aux), Err(Error::MarginalMismatch(_))));
    }

    #[test]
    fn copy_reconstruction() {
        let pmf = dsbs(0.1).unwrap();
        let j = copy_joint(&pmf);
        let spec = DistortionSpec::hamming(2, 2);
        let (p, d1, d2) = lossy_point(&j, &spec).unwrap();
        assert_eq!((d1, d2), (0.0, 0.0));
        assert!((p.r1 - 1.0).abs() < 1e-12 && (p.r2 - 1.0).abs() < 1e-12 && p.r0.abs() < 1e-12);
        let v = vkg_point(&j, &spec).unwrap();
        assert!((v.sum_bound - (pmf.entropy_xy() + pmf.mutual_information())).abs() < 1e-12);
        let bad = DistortionSpec::hamming(3, 2);
        assert!(matches!(lossy_point(&j, &bad), Err(Error::ShapeMismatch(_))));
    }
}
