//! Dense many-body states and operators on `2^N` dimensional spin space.
//!
//! Basis index bit `s - 1` holds site `s`; a set bit is spin up, which is an
//! occupied fermion mode.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn site_bit(site: usize) -> usize {
    1 << (site - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(n_sites: usize) -> Self {
        Self {
            n_sites,
            amplitudes: vec![ZERO; 1 << n_sites],
        }
    }

    /// Product basis state with the given bit pattern.
    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut s = Self::zeros(n_sites);
        s.amplitudes[index] = ONE;
        s
    }

    /// The fermion vacuum, every spin down.
    pub fn vacuum(n_sites: usize) -> Self {
        Self::basis(n_sites, 0)
    }

    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<Complex64>) -> Self {
        assert_eq!(amplitudes.len(), 1 << n_sites, "state length must be 2^N");
        Self {
            n_sites,
            amplitudes,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector {
            n_sites: self.n_sites,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies a single-site 2x2 matrix (indexed by bit value) in place of a
    /// full dense product.
    pub fn apply_local(&self, site: usize, m: &[[Complex64; 2]; 2]) -> StateVector {
        let bit = site_bit(site);
        let mut out = vec![ZERO; self.dim()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let row = usize::from(idx & bit != 0);
            let lo = idx & !bit;
            let hi = idx | bit;
            *slot = m[row][0] * self.amplitudes[lo] + m[row][1] * self.amplitudes[hi];
        }
        StateVector {
            n_sites: self.n_sites,
            amplitudes: out,
        }
    }
}

impl Add for &StateVector {
    type Output = StateVector;

    fn add(self, rhs: &StateVector) -> StateVector {
        StateVector {
            n_sites: self.n_sites,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&rhs.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Dense `2^N x 2^N` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_sites: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(n_sites: usize) -> Self {
        let dim = 1 << n_sites;
        Self {
            n_sites,
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(n_sites: usize) -> Self {
        let mut op = Self::zeros(n_sites);
        for i in 0..op.dim {
            op.entries[i * op.dim + i] = ONE;
        }
        op
    }

    /// Row-major entries of a `2^N x 2^N` matrix.
    pub fn from_entries(n_sites: usize, entries: Vec<Complex64>) -> Self {
        let dim = 1 << n_sites;
        assert_eq!(entries.len(), dim * dim, "operator must be 2^N x 2^N");
        Self {
            n_sites,
            dim,
            entries,
        }
    }

    /// `1 ⊗ .. ⊗ m ⊗ .. ⊗ 1` with `m` on `site`.
    pub fn local(n_sites: usize, site: usize, m: &[[Complex64; 2]; 2]) -> Self {
        let bit = site_bit(site);
        let mut op = Self::zeros(n_sites);
        let dim = op.dim;
        for col in 0..dim {
            let c = usize::from(col & bit != 0);
            for (r, row_m) in m.iter().enumerate() {
                let amp = row_m[c];
                if amp != ZERO {
                    let row = if r == 1 { col | bit } else { col & !bit };
                    op.entries[row * dim + col] += amp;
                }
            }
        }
        op
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|a| a * factor).collect(),
            ..*self
        }
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim;
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[c * dim + r] = self.entries[r * dim + c].conj();
            }
        }
        Self { entries, ..*self }
    }

    /// Matrix product; zero entries of `self` are skipped, so products with
    /// sparse left factors (Pauli strings, fermion operators) are cheap.
    pub fn matmul(&self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let dim = self.dim;
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            let out_row = &mut entries[i * dim..(i + 1) * dim];
            for k in 0..dim {
                let a = self.entries[i * dim + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.entries[k * dim..(k + 1) * dim];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        DenseOperator {
            n_sites: self.n_sites,
            dim,
            entries,
        }
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.dim, state.dim(), "dimension mismatch");
        let dim = self.dim;
        let amps = state.amplitudes();
        let out = (0..dim)
            .map(|r| {
                self.entries[r * dim..(r + 1) * dim]
                    .iter()
                    .zip(amps)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        StateVector::from_amplitudes(self.n_sites, out)
    }

    /// `self^dag |state>` without forming the adjoint.
    pub fn apply_adjoint(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.dim, state.dim(), "dimension mismatch");
        let dim = self.dim;
        let mut out = vec![ZERO; dim];
        for (r, &v) in state.amplitudes().iter().enumerate() {
            if v == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&self.entries[r * dim..(r + 1) * dim]) {
                *o += a.conj() * v;
            }
        }
        StateVector::from_amplitudes(self.n_sites, out)
    }

    /// `<bra| self |ket>`
    pub fn expectation(&self, bra: &StateVector, ket: &StateVector) -> Complex64 {
        bra.inner(&self.apply(ket))
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst
                    .max((self.entries[r * dim + c] - self.entries[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    /// `AB + BA`
    pub fn anticommutator(&self, other: &DenseOperator) -> DenseOperator {
        &self.matmul(other) + &other.matmul(self)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.entries.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    /// Largest deviation from the identity matrix.
    pub fn identity_defect(&self) -> f64 {
        let dim = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((self.entries[r * dim + c] - target).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseOperator {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
            ..*self
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;

    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        DenseOperator {
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
            ..*self
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.matmul(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn local_matches_apply_local() {
        let m = [[c(0.3, 0.1), c(-1.0, 0.5)], [c(0.0, 2.0), c(0.7, 0.0)]];
        let amps: Vec<Complex64> = (0..8).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let psi = StateVector::from_amplitudes(3, amps);
        for site in 1..=3 {
            let dense = DenseOperator::local(3, site, &m).apply(&psi);
            let fast = psi.apply_local(site, &m);
            assert!(dense.max_abs_diff(&fast) < 1e-14);
        }
    }

    #[test]
    fn adjoint_application() {
        let m = [[c(0.3, 0.1), c(-1.0, 0.5)], [c(0.0, 2.0), c(0.7, 0.0)]];
        let op = &DenseOperator::local(2, 1, &m) * &DenseOperator::local(2, 2, &m);
        let psi = StateVector::from_amplitudes(
            2,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0), c(0.5, 0.5)],
        );
        let a = op.apply_adjoint(&psi);
        let b = op.adjoint().apply(&psi);
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn matmul_with_identity() {
        let m = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let x = DenseOperator::local(3, 2, &m);
        let id = DenseOperator::identity(3);
        assert_eq!(x.matmul(&id), x);
        assert_eq!(id.matmul(&x), x);
        assert!((&x * &x).identity_defect() < 1e-15);
        assert!(x.hermiticity_defect() == 0.0);
    }

    #[test]
    fn inner_product_is_antilinear_in_bra() {
        let a = StateVector::from_amplitudes(1, vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let b = StateVector::from_amplitudes(1, vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(a.inner(&b), c(0.0, -1.0));
        assert_eq!((&a + &b).norm_sqr(), 3.0);
    }
}
