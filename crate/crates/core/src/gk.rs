//! Ergodic decomposition of a finite joint and the Gács-Körner common
//! information `H(J)`.

use serde::Serialize;

use crate::prob::{entropy_of, JointPMF};

/// Masses at or below this value are treated as outside the support.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Connected components of the bipartite support graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicDecomposition {
    /// `(x indices, y indices)` per component, ordered by smallest x index.
    pub components: Vec<(Vec<usize>, Vec<usize>)>,
    pub j_pmf: Vec<f64>,
}

impl ErgodicDecomposition {
    /// Component index of each x symbol.
    pub fn x_class(&self, nx: usize) -> Vec<usize> {
        let mut out = vec![0; nx];
        for (j, (xs, _)) in self.components.iter().enumerate() {
            for &x in xs {
                out[x] = j;
            }
        }
        out
    }

    /// Component index of each y symbol.
    pub fn y_class(&self, ny: usize) -> Vec<usize> {
        let mut out = vec![0; ny];
        for (j, (_, ys)) in self.components.iter().enumerate() {
            for &y in ys {
                out[y] = j;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Decomposition with the default support threshold.
pub fn ergodic_decomposition(pmf: &JointPMF) -> ErgodicDecomposition {
    ergodic_decomposition_eps(pmf, SUPPORT_EPS)
}

/// Decomposition where `(x, y)` is an edge iff `p(x, y) > eps`.
pub fn ergodic_decomposition_eps(pmf: &JointPMF, eps: f64) -> ErgodicDecomposition {
    let (nx, ny) = (pmf.nx(), pmf.ny());
    // nodes 0..nx are x symbols, nx..nx+ny are y symbols
    let mut uf = UnionFind::new(nx + ny);
    for x in 0..nx {
        for y in 0..ny {
            if pmf.get(x, y) > eps {
                uf.union(x, nx + y);
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut components: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let slot = |root: usize, roots: &mut Vec<usize>, comps: &mut Vec<(Vec<usize>, Vec<usize>)>| {
        match roots.iter().position(|&r| r == root) {
            Some(i) => i,
            None => {
                roots.push(root);
                comps.push((Vec::new(), Vec::new()));
                roots.len() - 1
            }
        }
    };
    for x in 0..nx {
        let r = uf.find(x);
        let i = slot(r, &mut roots, &mut components);
        components[i].0.push(x);
    }
    for y in 0..ny {
        let r = uf.find(nx + y);
        let i = slot(r, &mut roots, &mut components);
        components[i].1.push(y);
    }
    let j_pmf = components
        .iter()
        .map(|(xs, ys)| {
            xs.iter()
                .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
                .map(|(x, y)| pmf.get(x, y))
                .sum()
        })
        .collect();
    ErgodicDecomposition { components, j_pmf }
}

/// `C_GK(X;Y) = H(J)`.
pub fn gk_common_information(pmf: &JointPMF) -> f64 {
    entropy_of(&ergodic_decomposition(pmf).j_pmf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::sources::*;

    #[test]
    fn component_counts() {
        let full = dsbs(0.1).unwrap();
        assert_eq!(ergodic_decomposition(&full).len(), 1);
        assert_eq!(gk_common_information(&full), 0.0);

        let d3 = identity(3).unwrap();
        let dec = ergodic_decomposition(&d3);
        assert_eq!(dec.len(), 3);
        assert_eq!(dec.components[1], (vec![1], vec![1]));

        assert!((gk_common_information(&identity(4).unwrap()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rounding_never_goes_negative() {
        let p = JointPMF::from_rows(&[vec![0.9586571637695184], vec![0.13413675725746566]]).unwrap();
        assert_eq!(gk_common_information(&p), 0.0);
    }

    #[test]
    fn two_block_source() {
        let tb = two_block().unwrap();
        let dec = ergodic_decomposition(&tb);
        assert_eq!(dec.components, vec![(vec![0, 1], vec![0, 1]), (vec![2, 3], vec![2, 3])]);
        assert!(dec.j_pmf.iter().all(|&m| (m - 0.5).abs() < 1e-15));
        assert!((gk_common_information(&tb) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dust_below_threshold_is_ignored() {
        let p = JointPMF::from_rows(&[vec![0.5, 1e-14], vec![0.0, 0.5]]).unwrap();
        assert_eq!(ergodic_decomposition(&p).len(), 2);
        assert_eq!(ergodic_decomposition_eps(&p, 0.0).len(), 1);
    }

    #[test]
    fn interleaved_components_are_ordered_by_smallest_x() {
        // x0-y1, x1-y0, x2-y1
        let p = JointPMF::from_rows(&[
            vec![0.0, 0.3],
            vec![0.4, 0.0],
            vec![0.0, 0.3],
        ])
        .unwrap();
        let dec = ergodic_decomposition(&p);
        assert_eq!(dec.components, vec![(vec![0, 2], vec![1]), (vec![1], vec![0])]);
        assert_eq!(dec.x_class(3), vec![0, 1, 0]);
        assert_eq!(dec.y_class(2), vec![1, 0]);
    }
}
