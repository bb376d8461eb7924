//! Free-fermion propagator `G_ij(t) = sum_k u_ik u_jk exp(i eps_k t)`.
//!
//! `G(t)` is `exp(i h t)` restricted to the single-particle space, and
//! `f_j^dag(t) = sum_i G_ij(t) f_i^dag` in the Heisenberg picture.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{eigenbasis, ChainParams, Convention, SingleParticleBasis};

/// Mode table for one `(N, J, mu, convention)`; evaluates propagator entries
/// by direct O(N) mode sums.
#[derive(Debug, Clone)]
pub struct Propagator {
    basis: SingleParticleBasis,
}

impl Propagator {
    pub fn new(params: &ChainParams, convention: Convention) -> Self {
        Self {
            basis: eigenbasis(params, convention),
        }
    }

    pub fn from_basis(basis: SingleParticleBasis) -> Self {
        Self { basis }
    }

    pub fn basis(&self) -> &SingleParticleBasis {
        &self.basis
    }

    pub fn params(&self) -> &ChainParams {
        self.basis.params()
    }

    pub fn convention(&self) -> Convention {
        self.basis.convention()
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    fn check_site(&self, site: usize) -> Result<()> {
        let n_sites = self.n_sites();
        if site == 0 || site > n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
        Ok(())
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.basis
            .modes()
            .iter()
            .map(|m| Complex64::cis(m.epsilon_k * t))
            .collect()
    }

    fn entry_with_phases(&self, i: usize, j: usize, phases: &[Complex64]) -> Complex64 {
        let row_i = self.basis.site_row(i);
        let row_j = self.basis.site_row(j);
        row_i
            .iter()
            .zip(row_j)
            .zip(phases)
            .map(|((a, b), p)| p * (a * b))
            .sum()
    }

    /// `G_ij(t)` for 1-based sites.
    pub fn entry(&self, i: usize, j: usize, t: f64) -> Result<Complex64> {
        self.check_site(i)?;
        self.check_site(j)?;
        Ok(self.entry_with_phases(i, j, &self.phases(t)))
    }

    /// Column `j` of `G(t)`: the coefficients of `f_j^dag(t)` on the site
    /// operators `f_1^dag .. f_N^dag`.
    pub fn column(&self, j: usize, t: f64) -> Result<Vec<Complex64>> {
        self.check_site(j)?;
        let phases = self.phases(t);
        Ok((1..=self.n_sites())
            .map(|i| self.entry_with_phases(i, j, &phases))
            .collect())
    }

    /// `(G_NN(t), G_1N(t))`, the two entries the CH functional depends on.
    pub fn end_entries(&self, t: f64) -> (Complex64, Complex64) {
        let n = self.n_sites();
        let phases = self.phases(t);
        (
            self.entry_with_phases(n, n, &phases),
            self.entry_with_phases(1, n, &phases),
        )
    }

    pub fn matrix(&self, t: f64) -> PropagatorMatrix {
        let n = self.n_sites();
        let phases = self.phases(t);
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 1..=n {
            for j in i..=n {
                let g = self.entry_with_phases(i, j, &phases);
                entries[(i - 1) * n + (j - 1)] = g;
                entries[(j - 1) * n + (i - 1)] = g;
            }
        }
        PropagatorMatrix {
            time_t: t,
            params: *self.params(),
            convention: self.convention(),
            entries,
        }
    }
}

/// Dense `N x N` propagator at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    pub time_t: f64,
    pub params: ChainParams,
    pub convention: Convention,
    // row-major, 0-based storage
    entries: Vec<Complex64>,
}

impl PropagatorMatrix {
    pub fn n_sites(&self) -> usize {
        self.params.n_sites()
    }

    /// `G_ij` for 1-based sites. Panics when out of range.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let n = self.n_sites();
        self.entries[(i - 1) * n + (j - 1)]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Plain matrix product `self * other` (same chain length).
    pub fn compose(&self, other: &PropagatorMatrix) -> Vec<Complex64> {
        let n = self.n_sites();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                for j in 0..n {
                    out[i * n + j] += a * other.entries[l * n + j];
                }
            }
        }
        out
    }

    /// Largest entrywise deviation of `G G^dag` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n_sites();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    s += self.entries[i * n + l] * self.entries[j * n + l].conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

pub fn propagator_entry(
    i: usize,
    j: usize,
    t: f64,
    params: &ChainParams,
    convention: Convention,
) -> Result<Complex64> {
    Propagator::new(params, convention).entry(i, j, t)
}

pub fn propagator_matrix(t: f64, params: &ChainParams, convention: Convention) -> PropagatorMatrix {
    Propagator::new(params, convention).matrix(t)
}

pub fn fermion_heisenberg_coefficients(
    j: usize,
    t: f64,
    params: &ChainParams,
    convention: Convention,
) -> Result<Vec<Complex64>> {
    Propagator::new(params, convention).column(j, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn identity_at_time_zero() {
        let p = ChainParams::new(7, 1.0, -1.0).unwrap();
        let prop = Propagator::new(&p, Convention::Plain);
        for i in 1..=7 {
            for j in 1..=7 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(close(
                    prop.entry(i, j, 0.0).unwrap(),
                    expected.into(),
                    1e-14
                ));
            }
        }
    }

    #[test]
    fn two_site_closed_form() {
        let (j, mu) = (0.8, -1.3);
        let p = ChainParams::new(2, j, mu).unwrap();
        let prop = Propagator::new(&p, Convention::Plain);
        for &t in &[0.0, 0.37, 1.9, 12.5] {
            let phase = Complex64::cis(-mu * t);
            let g11 = phase * (j * t).cos();
            let g12 = -Complex64::i() * phase * (j * t).sin();
            assert!(close(prop.entry(1, 1, t).unwrap(), g11, 1e-14));
            assert!(close(prop.entry(2, 2, t).unwrap(), g11, 1e-14));
            assert!(close(prop.entry(1, 2, t).unwrap(), g12, 1e-14));
            let col = prop.column(2, t).unwrap();
            assert!(close(col[0], g12, 1e-14));
            assert!(close(col[1], g11, 1e-14));
        }
    }

    #[test]
    fn out_of_range_sites() {
        let p = ChainParams::new(3, 1.0, 0.0).unwrap();
        let prop = Propagator::new(&p, Convention::Plain);
        assert_eq!(
            prop.entry(0, 1, 0.1),
            Err(Error::SiteOutOfRange {
                site: 0,
                n_sites: 3
            })
        );
        assert!(prop.entry(1, 4, 0.1).is_err());
        assert!(prop.column(4, 0.1).is_err());
    }

    #[test]
    fn column_norm_is_one() {
        let p = ChainParams::new(3, 1.0, -1.0).unwrap();
        let prop = Propagator::new(&p, Convention::Plain);
        for &t in &[0.0, 0.3, 4.1, 77.0] {
            let col = prop.column(3, t).unwrap();
            let norm2: f64 = col.iter().map(|c| c.norm_sqr()).sum();
            assert!((norm2 - 1.0).abs() < 1e-12);
        }
        let col0 = prop.column(2, 0.0).unwrap();
        assert!(close(col0[1], 1.0.into(), 1e-15) && col0[0].norm() < 1e-15);
    }

    #[test]
    fn reversed_time_is_adjoint() {
        let p = ChainParams::new(9, 1.0, 0.6).unwrap();
        let prop = Propagator::new(&p, Convention::Plain);
        let fwd = prop.matrix(2.7);
        let back = prop.matrix(-2.7);
        for i in 1..=9 {
            for j in 1..=9 {
                assert!(close(back.get(i, j), fwd.get(j, i).conj(), 1e-12));
            }
        }
    }

    #[test]
    fn alternating_equals_plain_with_flipped_coupling() {
        for &(n, j, mu) in &[(2, 1.0, -1.0), (5, 0.7, 0.3), (12, 1.0, 2.0)] {
            let alt = propagator_matrix(
                1.3,
                &ChainParams::new(n, j, mu).unwrap(),
                Convention::Alternating,
            );
            let plain = propagator_matrix(
                1.3,
                &ChainParams::new(n, -j, mu).unwrap(),
                Convention::Plain,
            );
            for (a, b) in alt.entries().iter().zip(plain.entries()) {
                assert!(close(*a, *b, 1e-12));
            }
        }
    }

    #[test]
    fn conventions_differ_by_a_site_gauge() {
        // u_alt = D u_plain with D = diag((-1)^(j-1)), so G_alt = D G_plain D.
        let p = ChainParams::new(6, 1.0, -1.0).unwrap();
        let plain = propagator_matrix(0.9, &p, Convention::Plain);
        let alt = propagator_matrix(0.9, &p, Convention::Alternating);
        for i in 1..=6 {
            for j in 1..=6 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                assert!(close(alt.get(i, j), plain.get(i, j) * sign, 1e-12));
            }
        }
    }
}
