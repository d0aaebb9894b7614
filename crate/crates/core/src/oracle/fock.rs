//! Product basis of bosonic modes and three-level atoms, truncated per site
//! and by total excitation number.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Unused when std is linked (its inherent f64 methods take precedence).
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Matrix;

/// One tensor factor of the Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    /// Harmonic oscillator truncated to `dim` number states.
    Boson { dim: usize },
    /// Ladder atom with levels `g = 0`, `e = 1`, `r = 2`.
    Atom,
}

impl Site {
    pub fn dim(self) -> usize {
        match self {
            Site::Boson { dim } => dim,
            Site::Atom => 3,
        }
    }

    /// Excitations carried by local level `level`.
    pub fn weight(self, level: usize) -> usize {
        match self {
            Site::Boson { .. } => level,
            Site::Atom => usize::from(level > 0),
        }
    }
}

/// Local operator as a list of `(to, from, value)` matrix elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp(pub Vec<(usize, usize, Complex64)>);

impl LocalOp {
    pub fn annihilation(dim: usize) -> Self {
        LocalOp(
            (1..dim)
                .map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0)))
                .collect(),
        )
    }

    pub fn number(dim: usize) -> Self {
        LocalOp(
            (1..dim)
                .map(|n| (n, n, Complex64::new(n as f64, 0.0)))
                .collect(),
        )
    }

    /// `|to><from|`.
    pub fn transition(to: usize, from: usize) -> Self {
        LocalOp(vec![(to, from, Complex64::new(1.0, 0.0))])
    }

    pub fn adjoint(&self) -> Self {
        LocalOp(self.0.iter().map(|&(t, f, v)| (f, t, v.conj())).collect())
    }
}

#[derive(Debug, Clone)]
pub struct Basis {
    sites: Vec<Site>,
    cap: usize,
    states: Vec<Vec<u8>>,
    // Mixed-radix code of a product state -> basis index, or u32::MAX.
    lookup: Vec<u32>,
    strides: Vec<usize>,
}

impl Basis {
    /// All product states whose total excitation number is at most `cap`.
    pub fn new(sites: Vec<Site>, cap: usize) -> Self {
        let mut strides = vec![1usize; sites.len()];
        for k in (0..sites.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sites[k + 1].dim();
        }
        let total: usize = sites.iter().map(|s| s.dim()).product();
        let mut lookup = vec![u32::MAX; total];
        let mut states = Vec::new();
        for code in 0..total {
            let levels: Vec<u8> = sites
                .iter()
                .zip(&strides)
                .map(|(s, st)| ((code / st) % s.dim()) as u8)
                .collect();
            let w: usize = sites
                .iter()
                .zip(&levels)
                .map(|(s, &l)| s.weight(l as usize))
                .sum();
            if w <= cap {
                lookup[code] = states.len() as u32;
                states.push(levels);
            }
        }
        Basis {
            sites,
            cap,
            states,
            lookup,
            strides,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    fn index_of(&self, levels: &[u8]) -> Option<usize> {
        let code: usize = levels
            .iter()
            .zip(&self.strides)
            .map(|(&l, st)| l as usize * st)
            .sum();
        let i = self.lookup[code];
        (i != u32::MAX).then_some(i as usize)
    }

    /// True when a state touches the truncation: a boson at its top level or
    /// the excitation budget exhausted.
    pub fn is_edge(&self, i: usize) -> bool {
        let s = &self.states[i];
        let w: usize = self
            .sites
            .iter()
            .zip(s)
            .map(|(site, &l)| site.weight(l as usize))
            .sum();
        w == self.cap
            || self
                .sites
                .iter()
                .zip(s)
                .any(|(site, &l)| matches!(site, Site::Boson { dim } if l as usize + 1 == *dim))
    }

    /// Projection onto the basis of `coeff * prod_k op_k`, each factor acting
    /// on a distinct site.
    pub fn operator(&self, coeff: Complex64, factors: &[(usize, &LocalOp)]) -> Matrix {
        let n = self.len();
        let mut m = Matrix::zeros(n);
        let mut work: Vec<(Vec<u8>, Complex64)> = Vec::new();
        let mut next: Vec<(Vec<u8>, Complex64)> = Vec::new();
        for col in 0..n {
            work.clear();
            work.push((self.states[col].clone(), coeff));
            for &(site, op) in factors.iter().rev() {
                next.clear();
                for (st, v) in work.iter() {
                    for &(to, from, x) in &op.0 {
                        if st[site] as usize == from {
                            let mut s2 = st.clone();
                            s2[site] = to as u8;
                            next.push((s2, v * x));
                        }
                    }
                }
                core::mem::swap(&mut work, &mut next);
            }
            for (st, v) in work.iter() {
                if let Some(row) = self.index_of(st) {
                    m[(row, col)] += *v;
                }
            }
        }
        m
    }
}

/// Dense helpers on the (small) system-space matrices.
pub fn adjoint(m: &Matrix) -> Matrix {
    let n = m.dim();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += x * b[(k, j)];
            }
        }
    }
    out
}

pub fn add_assign(a: &mut Matrix, b: &Matrix) {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] += b[(i, j)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excitation_cap_counts_states() {
        let b = Basis::new(vec![Site::Boson { dim: 4 }; 3], 3);
        assert_eq!(b.len(), 20);
        let b = Basis::new(vec![Site::Boson { dim: 5 }; 3], 4);
        assert_eq!(b.len(), 35);
        let b = Basis::new(vec![Site::Boson { dim: 5 }, Site::Atom, Site::Atom], 4);
        assert_eq!(b.len(), 5 + 2 * 2 * 4 + 4 * 3);
    }

    #[test]
    fn bosonic_commutator_below_the_cap() {
        let b = Basis::new(vec![Site::Boson { dim: 6 }], 5);
        let a = b.operator(Complex64::new(1.0, 0.0), &[(0, &LocalOp::annihilation(6))]);
        let ad = adjoint(&a);
        let comm = {
            let mut x = matmul(&a, &ad);
            let y = matmul(&ad, &a);
            for i in 0..6 {
                for j in 0..6 {
                    x[(i, j)] -= y[(i, j)];
                }
            }
            x
        };
        for i in 0..5 {
            assert!((comm[(i, i)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn products_on_two_sites() {
        let b = Basis::new(vec![Site::Boson { dim: 3 }, Site::Atom], 2);
        // a sigma_eg maps |0, e> to nothing and |1, g> to |0, e>.
        let a = LocalOp::annihilation(3);
        let s_eg = LocalOp::transition(1, 0);
        let m = b.operator(Complex64::new(2.0, 0.0), &[(0, &a), (1, &s_eg)]);
        let from = (0..b.len()).find(|&i| b.state(i) == [1, 0]).unwrap();
        let to = (0..b.len()).find(|&i| b.state(i) == [0, 1]).unwrap();
        assert_eq!(m[(to, from)], Complex64::new(2.0, 0.0));
        let nnz = (0..b.len())
            .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| m[(i, j)].norm() > 0.0)
            .count();
        assert_eq!(nnz, 2);
    }
}
