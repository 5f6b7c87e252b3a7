//! Finite-alphabet probability machinery.
//!
//! [`JointPMF`] is the source pair every lossless quantity starts from.
//! [`NDDist`] is a dense distribution over a product of named axes and is
//! used to build larger joints such as `(X, Y, U)` or `(X, Y, Xh, Yh, U)`.
//!
//! All information quantities are in bits. `0 log 0` is taken as `0` and tiny
//! negative mutual-information values produced by rounding are clamped to
//! exactly zero.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass accepted by [`NDDist::new`].
pub const MASS_TOL: f64 = 1e-9;

/// Sum-to-one slack tolerated when reading a PMF file.
pub const FILE_MASS_TOL: f64 = 1e-6;

/// Rounding floor below which information quantities are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn plog2p(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits of a (not necessarily normalized) mass vector.
pub fn entropy_of(probs: &[f64]) -> f64 {
    clamp_info(-probs.iter().map(|&p| plog2p(p)).sum::<f64>())
}

/// Binary entropy function `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

pub(crate) fn clamp_info(v: f64) -> f64 {
    if v < 0.0 {
        0.0
    } else {
        v
    }
}

/// A named axis with labelled outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub labels: Vec<String>,
}

impl Axis {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            labels,
        }
    }

    /// Axis whose labels are `0..n`.
    pub fn indexed(name: impl Into<String>, n: usize) -> Self {
        Self::new(name, (0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Dense distribution over the product of its axes, row-major (last axis
/// fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NDDist {
    axes: Vec<Axis>,
    p: Vec<f64>,
}

impl NDDist {
    /// Builds a distribution, renormalizing away mass error up to
    /// [`MASS_TOL`].
    pub fn new(axes: Vec<Axis>, p: Vec<f64>) -> Result<Self> {
        let size: usize = axes.iter().map(Axis::len).product();
        if size != p.len() {
            return Err(Error::ShapeMismatch(format!(
                "axes describe {size} states but {} probabilities were given",
                p.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::ShapeMismatch(format!(
                    "duplicate axis name `{}`",
                    a.name
                )));
            }
        }
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry {
                    row: i,
                    col: 0,
                    value: v,
                });
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Normalization {
                sum: total,
                tolerance: MASS_TOL,
            });
        }
        let p = p.into_iter().map(|v| v / total).collect();
        Ok(Self { axes, p })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.axis_index(n)?;
            if out.contains(&i) {
                return Err(Error::OverlappingGroups(n.to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.axes[i + 1].len();
        }
        s
    }

    /// Marginal mass vector over the axes `idx`, in the given order.
    fn marginal_mass(&self, idx: &[usize]) -> Vec<f64> {
        let strides = self.strides();
        let shape = self.shape();
        let mut out_strides = vec![1usize; idx.len()];
        for k in (0..idx.len().saturating_sub(1)).rev() {
            out_strides[k] = out_strides[k + 1] * shape[idx[k + 1]];
        }
        let out_len: usize = idx.iter().map(|&i| shape[i]).product();
        let mut out = vec![0.0; out_len];
        for (flat, &v) in self.p.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut o = 0;
            for (k, &ax) in idx.iter().enumerate() {
                o += (flat / strides[ax]) % shape[ax] * out_strides[k];
            }
            out[o] += v;
        }
        out
    }

    /// Marginal distribution on `names`, with axes in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<NDDist> {
        let idx = self.indices(names)?;
        let axes = idx.iter().map(|&i| self.axes[i].clone()).collect();
        Ok(NDDist {
            axes,
            p: self.marginal_mass(&idx),
        })
    }

    /// Joint entropy `H(names)` in bits.
    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Err(Error::UnknownAxis("<empty axis set>".into()));
        }
        let idx = self.indices(names)?;
        Ok(entropy_of(&self.marginal_mass(&idx)))
    }

    fn joint_entropy_of(&self, groups: &[&[&str]]) -> Result<f64> {
        let all: Vec<&str> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        if all.is_empty() {
            return Ok(0.0);
        }
        self.entropy(&all)
    }

    fn check_disjoint(groups: &[&[&str]]) -> Result<()> {
        for (i, g) in groups.iter().enumerate() {
            for name in *g {
                if groups[i + 1..].iter().any(|h| h.contains(name)) {
                    return Err(Error::OverlappingGroups(name.to_string()));
                }
            }
        }
        Ok(())
    }

    /// `H(a | b)` in bits.
    pub fn conditional_entropy(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        Self::check_disjoint(&[a, b])?;
        let hab = self.joint_entropy_of(&[a, b])?;
        let hb = self.joint_entropy_of(&[b])?;
        Ok(clamp_info(hab - hb))
    }

    /// `I(a; b)` in bits.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        Self::check_disjoint(&[a, b])?;
        let ha = self.entropy(a)?;
        let hb = self.entropy(b)?;
        let hab = self.joint_entropy_of(&[a, b])?;
        Ok(clamp_info(ha + hb - hab))
    }

    /// `I(a; b | c)` in bits. An empty `c` gives the unconditional value.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
    ) -> Result<f64> {
        Self::check_disjoint(&[a, b, c])?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::UnknownAxis("<empty axis set>".into()));
        }
        let hac = self.joint_entropy_of(&[a, c])?;
        let hbc = self.joint_entropy_of(&[b, c])?;
        let habc = self.joint_entropy_of(&[a, b, c])?;
        let hc = self.joint_entropy_of(&[c])?;
        Ok(clamp_info(hac + hbc - habc - hc))
    }

    /// Splits the distribution into the marginal on `given` and the
    /// conditional law of the remaining axes.
    pub fn condition(&self, given: &[&str]) -> Result<Conditional> {
        let gidx = self.indices(given)?;
        let ridx: Vec<usize> = (0..self.axes.len()).filter(|i| !gidx.contains(i)).collect();
        let mut order = gidx.clone();
        order.extend(&ridx);
        let reordered = self.marginal_mass(&order);
        let marginal = NDDist {
            axes: gidx.iter().map(|&i| self.axes[i].clone()).collect(),
            p: self.marginal_mass(&gidx),
        };
        let width: usize = ridx.iter().map(|&i| self.axes[i].len()).product();
        let mut table = reordered;
        for (row, &m) in table.chunks_mut(width).zip(marginal.p.iter()) {
            if m > 0.0 {
                row.iter_mut().for_each(|v| *v /= m);
            } else {
                let u = 1.0 / width as f64;
                row.iter_mut().for_each(|v| *v = u);
            }
        }
        Ok(Conditional {
            marginal,
            target: ridx.iter().map(|&i| self.axes[i].clone()).collect(),
            table,
        })
    }

    /// Appends a new axis through a kernel `k(new | existing)`, stored
    /// row-major as `states(self) x axis.len()`. This is how joints such as
    /// `p(x,y) q(u|x,y)` are built.
    pub fn extend(&self, axis: Axis, kernel: &[f64]) -> Result<NDDist> {
        let m = axis.len();
        if kernel.len() != self.p.len() * m {
            return Err(Error::ShapeMismatch(format!(
                "kernel has {} entries, expected {} x {}",
                kernel.len(),
                self.p.len(),
                m
            )));
        }
        if self.axes.iter().any(|a| a.name == axis.name) {
            return Err(Error::ShapeMismatch(format!(
                "axis `{}` already present",
                axis.name
            )));
        }
        let mut p = Vec::with_capacity(kernel.len());
        for (row, &w) in kernel.chunks(m).zip(self.p.iter()) {
            let s: f64 = row.iter().sum();
            if row.iter().any(|&v| v < 0.0) || (w > 0.0 && (s - 1.0).abs() > MASS_TOL) {
                return Err(Error::ShapeMismatch(
                    "kernel rows must be probability vectors".into(),
                ));
            }
            p.extend(row.iter().map(|&v| v * w));
        }
        let mut axes = self.axes.clone();
        axes.push(axis);
        NDDist::new(axes, p)
    }

    /// Reorders axes; `names` must be a permutation of the axis names.
    pub fn permute(&self, names: &[&str]) -> Result<NDDist> {
        if names.len() != self.axes.len() {
            return Err(Error::ShapeMismatch("permutation must list every axis".into()));
        }
        self.marginal(names)
    }

    /// Largest absolute difference to another distribution with identical
    /// axes.
    pub fn max_abs_diff(&self, other: &NDDist) -> Result<f64> {
        if self.axes != other.axes {
            return Err(Error::ShapeMismatch("axes differ".into()));
        }
        Ok(self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Marginal on a set of conditioning axes together with the conditional law
/// of the remaining axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditional {
    pub marginal: NDDist,
    pub target: Vec<Axis>,
    /// Row-major `states(marginal) x states(target)`; rows with zero
    /// conditioning mass are uniform.
    pub table: Vec<f64>,
}

impl Conditional {
    /// Recombines into a joint with axes `marginal ++ target`.
    pub fn compose(&self) -> Result<NDDist> {
        let width: usize = self.target.iter().map(Axis::len).product();
        let mut p = Vec::with_capacity(self.table.len());
        for (row, &m) in self.table.chunks(width).zip(self.marginal.probs()) {
            p.extend(row.iter().map(|v| v * m));
        }
        let mut axes = self.marginal.axes().to_vec();
        axes.extend(self.target.iter().cloned());
        NDDist::new(axes, p)
    }
}

/// Finite joint distribution of the source pair `(X, Y)` with every row and
/// column carrying positive mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPMF {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    p: Vec<f64>,
}

#[derive(Deserialize)]
struct PmfFile {
    #[serde(default)]
    x_labels: Option<Vec<String>>,
    #[serde(default)]
    y_labels: Option<Vec<String>>,
    p: Vec<Vec<f64>>,
}

impl JointPMF {
    /// Validates, normalizes and trims a raw nonnegative matrix. Rows and
    /// columns with no mass are removed together with their labels.
    pub fn new(raw: &[Vec<f64>], x_labels: Vec<String>, y_labels: Vec<String>) -> Result<Self> {
        let nx = raw.len();
        let ny = raw.first().map_or(0, Vec::len);
        if nx == 0 || ny == 0 {
            return Err(Error::ShapeMismatch("empty matrix".into()));
        }
        if raw.iter().any(|r| r.len() != ny) {
            return Err(Error::ShapeMismatch("rows have different lengths".into()));
        }
        if x_labels.len() != nx || y_labels.len() != ny {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix with {} x-labels and {} y-labels",
                nx,
                ny,
                x_labels.len(),
                y_labels.len()
            )));
        }
        for (i, row) in raw.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        let total: f64 = raw.iter().flatten().sum();
        if total <= 0.0 {
            return Err(Error::AllZero);
        }
        let keep_x: Vec<usize> = (0..nx)
            .filter(|&i| raw[i].iter().any(|&v| v > 0.0))
            .collect();
        let keep_y: Vec<usize> = (0..ny)
            .filter(|&j| raw.iter().any(|r| r[j] > 0.0))
            .collect();
        let mut p = Vec::with_capacity(keep_x.len() * keep_y.len());
        for &i in &keep_x {
            for &j in &keep_y {
                p.push(raw[i][j] / total);
            }
        }
        Ok(Self {
            x_labels: keep_x.iter().map(|&i| x_labels[i].clone()).collect(),
            y_labels: keep_y.iter().map(|&j| y_labels[j].clone()).collect(),
            p,
        })
    }

    /// Same as [`JointPMF::new`] with labels `0..n`.
    pub fn from_rows(raw: &[Vec<f64>]) -> Result<Self> {
        let nx = raw.len();
        let ny = raw.first().map_or(0, Vec::len);
        Self::new(
            raw,
            (0..nx).map(|i| i.to_string()).collect(),
            (0..ny).map(|i| i.to_string()).collect(),
        )
    }

    /// Parses the JSON PMF document `{"x_labels": [...], "y_labels": [...],
    /// "p": [[...], ...]}`. Labels are optional. The mass may be off by at
    /// most [`FILE_MASS_TOL`].
    pub fn parse_str(text: &str) -> Result<Self> {
        let doc: PmfFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let total: f64 = doc.p.iter().flatten().sum();
        if total.is_finite() && total > 0.0 && (total - 1.0).abs() > FILE_MASS_TOL {
            return Err(Error::Normalization {
                sum: total,
                tolerance: FILE_MASS_TOL,
            });
        }
        let nx = doc.p.len();
        let ny = doc.p.first().map_or(0, Vec::len);
        let xl = doc
            .x_labels
            .unwrap_or_else(|| (0..nx).map(|i| i.to_string()).collect());
        let yl = doc
            .y_labels
            .unwrap_or_else(|| (0..ny).map(|i| i.to_string()).collect());
        Self::new(&doc.p, xl, yl)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<f64>> = self.p.chunks(self.ny()).map(<[f64]>::to_vec).collect();
        serde_json::json!({
            "x_labels": self.x_labels,
            "y_labels": self.y_labels,
            "p": rows,
        })
        .to_string()
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_labels.len()
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    /// Row-major `nx * ny` probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny() + y]
    }

    pub fn px(&self) -> Vec<f64> {
        self.p.chunks(self.ny()).map(|r| r.iter().sum()).collect()
    }

    pub fn py(&self) -> Vec<f64> {
        let ny = self.ny();
        let mut out = vec![0.0; ny];
        for (k, &v) in self.p.iter().enumerate() {
            out[k % ny] += v;
        }
        out
    }

    pub fn entropy_x(&self) -> f64 {
        entropy_of(&self.px())
    }

    pub fn entropy_y(&self) -> f64 {
        entropy_of(&self.py())
    }

    pub fn entropy_xy(&self) -> f64 {
        entropy_of(&self.p)
    }

    pub fn mutual_information(&self) -> f64 {
        clamp_info(self.entropy_x() + self.entropy_y() - self.entropy_xy())
    }

    /// The pair as a two-axis [`NDDist`] with axes `X` and `Y`.
    pub fn to_nd(&self) -> NDDist {
        NDDist {
            axes: vec![
                Axis::new("X", self.x_labels.clone()),
                Axis::new("Y", self.y_labels.clone()),
            ],
            p: self.p.clone(),
        }
    }

    /// Relabels and reorders the alphabets; used for invariance checks.
    pub fn permuted(&self, x_perm: &[usize], y_perm: &[usize]) -> Result<Self> {
        if x_perm.len() != self.nx() || y_perm.len() != self.ny() {
            return Err(Error::ShapeMismatch("permutation length".into()));
        }
        let raw: Vec<Vec<f64>> = x_perm
            .iter()
            .map(|&i| y_perm.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        Self::new(
            &raw,
            x_perm.iter().map(|&i| self.x_labels[i].clone()).collect(),
            y_perm.iter().map(|&j| self.y_labels[j].clone()).collect(),
        )
    }
}

/// Common test and demo sources.
pub mod sources {
    use super::JointPMF;
    use crate::error::Result;

    /// Doubly symmetric binary source: uniform `X`, `Y` a crossover-`p`
    /// observation of `X`.
    pub fn dsbs(p: f64) -> Result<JointPMF> {
        JointPMF::from_rows(&[
            vec![(1.0 - p) / 2.0, p / 2.0],
            vec![p / 2.0, (1.0 - p) / 2.0],
        ])
    }

    /// `X = Y` uniform on `n` symbols.
    pub fn identity(n: usize) -> Result<JointPMF> {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        JointPMF::from_rows(&rows)
    }

    /// Product distribution `px x py`.
    pub fn independent(px: &[f64], py: &[f64]) -> Result<JointPMF> {
        let rows: Vec<Vec<f64>> = px
            .iter()
            .map(|&a| py.iter().map(|&b| a * b).collect())
            .collect();
        JointPMF::from_rows(&rows)
    }

    /// Block-diagonal joint; each block is scaled by its mass.
    pub fn block_diagonal(blocks: &[(f64, Vec<Vec<f64>>)]) -> Result<JointPMF> {
        let nx: usize = blocks.iter().map(|(_, b)| b.len()).sum();
        let ny: usize = blocks.iter().map(|(_, b)| b[0].len()).sum();
        let mut rows = vec![vec![0.0; ny]; nx];
        let (mut r0, mut c0) = (0, 0);
        for (mass, b) in blocks {
            let total: f64 = b.iter().flatten().sum();
            for (i, row) in b.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    rows[r0 + i][c0 + j] = mass * v / total;
                }
            }
            r0 += b.len();
            c0 += b[0].len();
        }
        JointPMF::from_rows(&rows)
    }

    /// Two uniform 2x2 blocks of mass 1/2 each on a 4x4 alphabet.
    pub fn two_block() -> Result<JointPMF> {
        let b = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        block_diagonal(&[(0.5, b.clone()), (0.5, b)])
    }
}

#[cfg(test)]
mod tests {
    use super::sources::*;
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn trims_and_normalizes() {
        let u = JointPMF::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert_eq!((u.nx(), u.ny()), (2, 2));
        let t = JointPMF::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5], vec![0.0, 0.0]]).unwrap();
        assert_eq!((t.nx(), t.ny()), (2, 2));
        assert_eq!(t.x_labels(), &["0".to_string(), "1".to_string()]);
        let n = JointPMF::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(n.probs().iter().all(|&v| approx(v, 0.25, 1e-15)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            JointPMF::from_rows(&[vec![0.5, -0.1]]),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            JointPMF::from_rows(&[vec![0.0, 0.0]]),
            Err(Error::AllZero)
        ));
        assert!(matches!(
            JointPMF::from_rows(&[vec![0.5, 0.2], vec![0.3]]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn trimming_keeps_label_bookkeeping() {
        let t = JointPMF::new(
            &[vec![0.0, 0.0, 0.0], vec![0.3, 0.0, 0.2], vec![0.1, 0.0, 0.4]],
            vec!["a".into(), "b".into(), "c".into()],
            vec!["p".into(), "q".into(), "r".into()],
        )
        .unwrap();
        assert_eq!(t.x_labels(), &["b".to_string(), "c".to_string()]);
        assert_eq!(t.y_labels(), &["p".to_string(), "r".to_string()]);
        assert!(approx(t.get(1, 1), 0.4, 1e-15));
    }

    #[test]
    fn entropy_examples() {
        assert!(approx(binary_entropy(0.5), 1.0, 1e-15));
        assert_eq!(entropy_of(&[1.0, 0.0]), 0.0);
        assert!(approx(binary_entropy(0.1), 0.46900, 1e-5));
        let d = dsbs(0.1).unwrap().to_nd();
        assert!(approx(d.entropy(&["X"]).unwrap(), 1.0, 1e-12));
        assert!(matches!(d.entropy(&["Z"]), Err(Error::UnknownAxis(_))));
    }

    #[test]
    fn mutual_information_examples() {
        let prod = independent(&[0.3, 0.7], &[0.6, 0.4]).unwrap().to_nd();
        assert_eq!(prod.mutual_information(&["X"], &["Y"]).unwrap(), 0.0);
        let id = identity(2).unwrap().to_nd();
        assert!(approx(id.mutual_information(&["X"], &["Y"]).unwrap(), 1.0, 1e-12));
        let d = dsbs(0.1).unwrap().to_nd();
        let mi = d.mutual_information(&["X"], &["Y"]).unwrap();
        assert!(approx(mi, 0.53100, 1e-5));
        assert!(approx(mi, 1.0 - binary_entropy(0.1), 1e-12));
        assert!(matches!(
            d.mutual_information(&["X"], &["X"]),
            Err(Error::OverlappingGroups(_))
        ));
    }

    #[test]
    fn conditional_mutual_information_examples() {
        let pmf = dsbs(0.1).unwrap();
        let d = pmf.to_nd();
        // U = (X, Y)
        let mut k = vec![0.0; 16];
        for s in 0..4 {
            k[s * 4 + s] = 1.0;
        }
        let full = d.extend(Axis::indexed("U", 4), &k).unwrap();
        assert!(full
            .conditional_mutual_information(&["X"], &["Y"], &["U"])
            .unwrap()
            .abs()
            < 1e-12);
        // constant U
        let c = d.extend(Axis::indexed("U", 1), &[1.0; 4]).unwrap();
        let i0 = c.conditional_mutual_information(&["X"], &["Y"], &["U"]).unwrap();
        assert!(approx(i0, pmf.mutual_information(), 1e-12));
        // independent coin
        let coin: Vec<f64> = (0..4).flat_map(|_| [0.3, 0.7]).collect();
        let ind = d.extend(Axis::indexed("U", 2), &coin).unwrap();
        let i1 = ind
            .conditional_mutual_information(&["X"], &["Y"], &["U"])
            .unwrap();
        assert!(approx(i1, 0.53100, 1e-5));
        assert!(matches!(
            ind.conditional_mutual_information(&["X"], &["Y"], &["X"]),
            Err(Error::OverlappingGroups(_))
        ));
    }

    #[test]
    fn marginalize_condition_compose() {
        let u = JointPMF::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.25]])
            .unwrap()
            .to_nd();
        let mx = u.marginal(&["X"]).unwrap();
        assert_eq!(mx.probs(), &[0.5, 0.5]);

        let d = dsbs(0.1).unwrap().to_nd();
        let back = d.condition(&["X"]).unwrap().compose().unwrap();
        assert!(back.max_abs_diff(&d).unwrap() < 1e-12);
        let back_y = d
            .condition(&["Y"])
            .unwrap()
            .compose()
            .unwrap()
            .permute(&["X", "Y"])
            .unwrap();
        assert!(back_y.max_abs_diff(&d).unwrap() < 1e-12);

        // deterministic u = x
        let k = [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0];
        let xyu = d.extend(Axis::indexed("U", 2), &k).unwrap();
        assert_eq!(xyu.axes().len(), 3);
        assert!(approx(xyu.entropy(&["U"]).unwrap(), 1.0, 1e-12));
        assert!(matches!(
            d.extend(Axis::indexed("U", 2), &[1.0; 3]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn parses_json_document() {
        let p = JointPMF::parse_str(
            r#"{"x_labels": ["a","b"], "y_labels": ["c","d"], "p": [[0.45, 0.05], [0.05, 0.4500001]]}"#,
        )
        .unwrap();
        assert_eq!(p.x_labels()[1], "b");
        assert!(approx(p.probs().iter().sum::<f64>(), 1.0, 1e-15));
        assert!(matches!(
            JointPMF::parse_str(r#"{"p": [[0.5, 0.6]]}"#),
            Err(Error::Normalization { .. })
        ));
        assert!(matches!(
            JointPMF::parse_str("not json"),
            Err(Error::Parse(_))
        ));
        let back = JointPMF::parse_str(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }
}
