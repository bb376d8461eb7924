//! Pauli operators and Jordan-Wigner fermions as dense matrices.
//!
//! `f_i = prod_{j<i} (1 - 2 n_j) sigma_i^-` with `n_j = sigma_j^+ sigma_j^-`.

use num_complex::Complex64;

use super::operator::{DenseOperator, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `sigma^+ = |up><down|`
    Plus,
    /// `sigma^- = |down><up|`
    Minus,
}

impl Pauli {
    /// 2x2 matrix indexed by bit value (0 = down, 1 = up).
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, I], [-I, ZERO]],
            Pauli::Z => [[-ONE, ZERO], [ZERO, ONE]],
            Pauli::Plus => [[ZERO, ZERO], [ONE, ZERO]],
            Pauli::Minus => [[ZERO, ONE], [ZERO, ZERO]],
        }
    }
}

/// Single-site Pauli operator on a chain of `n_sites`, built directly in the
/// product basis.
pub fn pauli(n_sites: usize, site: usize, which: Pauli) -> DenseOperator {
    DenseOperator::local(n_sites, site, &which.matrix())
}

/// The N annihilation operators of the chain.
#[derive(Debug, Clone)]
pub struct FermionSet {
    n_sites: usize,
    f: Vec<DenseOperator>,
}

/// Builds `f_1 .. f_N` by multiplying the string factors `1 - 2 n_j` onto
/// `sigma_i^-`.
pub fn jordan_wigner(n_sites: usize) -> FermionSet {
    let identity = DenseOperator::identity(n_sites);
    let strings: Vec<DenseOperator> = (1..=n_sites)
        .map(|j| {
            let n_j = &pauli(n_sites, j, Pauli::Plus) * &pauli(n_sites, j, Pauli::Minus);
            &identity - &n_j.scaled(2.0.into())
        })
        .collect();
    let f = (1..=n_sites)
        .map(|i| {
            let lowering = pauli(n_sites, i, Pauli::Minus);
            strings[..i - 1]
                .iter()
                .rev()
                .fold(lowering, |acc, string| string * &acc)
        })
        .collect();
    FermionSet { n_sites, f }
}

impl FermionSet {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Annihilation operator `f_site` (1-based).
    pub fn annihilation(&self, site: usize) -> &DenseOperator {
        &self.f[site - 1]
    }

    pub fn creation(&self, site: usize) -> DenseOperator {
        self.f[site - 1].adjoint()
    }

    /// `n_site = f^dag f`
    pub fn number(&self, site: usize) -> DenseOperator {
        &self.creation(site) * self.annihilation(site)
    }

    /// `f_site^dag |state>`
    pub fn create(&self, site: usize, state: &StateVector) -> StateVector {
        self.f[site - 1].apply_adjoint(state)
    }

    /// `f_site |state>`
    pub fn annihilate(&self, site: usize, state: &StateVector) -> StateVector {
        self.f[site - 1].apply(state)
    }

    /// `prod_{j<site} (1 - 2 f_j^dag f_j)`
    pub fn string(&self, site: usize) -> DenseOperator {
        let identity = DenseOperator::identity(self.n_sites);
        (1..site).fold(identity.clone(), |acc, j| {
            let factor = &identity - &self.number(j).scaled(2.0.into());
            &factor * &acc
        })
    }

    /// `sigma_i^+` rebuilt from fermions: `prod_{j<i} (1 - 2 n_j) f_i^dag`.
    pub fn sigma_plus(&self, site: usize) -> DenseOperator {
        &self.string(site) * &self.creation(site)
    }

    /// `sigma_i^x = prod_{j<i} (1 - 2 n_j) (f_i^dag + f_i)`.
    pub fn sigma_x(&self, site: usize) -> DenseOperator {
        let hop = &self.creation(site) + self.annihilation(site);
        &self.string(site) * &hop
    }

    /// Largest deviation of `{f_i, f_j^dag}` from `delta_ij` and of
    /// `{f_i, f_j}` from zero over all pairs.
    pub fn anticommutator_defect(&self) -> f64 {
        let n = self.n_sites;
        let creations: Vec<DenseOperator> = (1..=n).map(|j| self.creation(j)).collect();
        let identity = DenseOperator::identity(n);
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                let mixed = self.annihilation(i).anticommutator(&creations[j - 1]);
                let defect = if i == j {
                    mixed.max_abs_diff(&identity)
                } else {
                    mixed.max_abs()
                };
                worst = worst.max(defect);
                if j >= i {
                    let pure = self.annihilation(i).anticommutator(self.annihilation(j));
                    worst = worst.max(pure.max_abs());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::operator::site_bit;

    #[test]
    fn anticommutators_small_chains() {
        for n in 1..=5 {
            assert!(jordan_wigner(n).anticommutator_defect() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn annihilates_vacuum() {
        let fs = jordan_wigner(4);
        let vac = StateVector::vacuum(4);
        for i in 1..=4 {
            assert_eq!(fs.annihilate(i, &vac).norm_sqr(), 0.0);
        }
    }

    #[test]
    fn end_pair_creation_sign() {
        for n in 2..=6 {
            let fs = jordan_wigner(n);
            let state = fs.create(1, &fs.create(n, &StateVector::vacuum(n)));
            let expected = StateVector::basis(n, site_bit(1) | site_bit(n));
            assert!(state.max_abs_diff(&expected) < 1e-15, "n={n}");
        }
    }

    #[test]
    fn string_sign_counts_occupied_sites() {
        // f_3^dag on |up, up, down> picks up (-1)^2.
        let fs = jordan_wigner(3);
        let occupied = StateVector::basis(3, 0b011);
        let out = fs.create(3, &occupied);
        assert!((out.amplitudes()[0b111] - 1.0).norm() < 1e-15);
        let out = fs.create(2, &StateVector::basis(3, 0b001));
        assert!((out.amplitudes()[0b011] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn inverse_map_reproduces_pauli_operators() {
        let n = 4;
        let fs = jordan_wigner(n);
        for site in 1..=n {
            let plus = fs.sigma_plus(site);
            assert!(plus.max_abs_diff(&pauli(n, site, Pauli::Plus)) < 1e-14);
            assert!(fs.sigma_x(site).max_abs_diff(&pauli(n, site, Pauli::X)) < 1e-14);
        }
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli(2, 1, Pauli::X);
        let y = pauli(2, 1, Pauli::Y);
        let z = pauli(2, 1, Pauli::Z);
        // x y = i z
        let xy = &x * &y;
        assert!(xy.max_abs_diff(&z.scaled(I)) < 1e-15);
        let plus = &(&x + &y.scaled(I)).scaled(0.5.into()) - &pauli(2, 1, Pauli::Plus);
        assert!(plus.max_abs() < 1e-15);
        for idx in 0..4 {
            let up = idx & site_bit(1) != 0;
            assert_eq!(z.get(idx, idx).re, if up { 1.0 } else { -1.0 });
        }
    }
}
