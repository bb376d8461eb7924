//! Hidden-variable rewrites of two-step measurement probabilities.
//!
//! Without a medium between the parties, both the probability of repeated
//! measurements by one party and that of a causally connected pair of
//! measurements can be written as a mixture of deterministic responses.
//! Each check evaluates the probability twice, once from the quantum
//! formula and once from the hidden-variable sum, by independent
//! arithmetic paths.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const VALIDATION_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Complete set of orthogonal projectors. When built from an orthonormal
/// basis the basis vectors are kept for the rank-1 formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    projectors: Vec<CMatrix>,
    vectors: Option<CMatrix>,
}

impl Measurement {
    /// Rank-1 projectors onto the columns of `basis`.
    pub fn from_basis(basis: &CMatrix) -> Self {
        let projectors = basis.column_iter().map(|v| v * v.adjoint()).collect();
        Self {
            projectors,
            vectors: Some(basis.clone()),
        }
    }

    /// Projectors of a basis on the A factor, extended by the identity on B.
    pub fn local_on_a(basis_a: &CMatrix, dim_b: usize) -> Self {
        let id_b = CMatrix::identity(dim_b, dim_b);
        let projectors = basis_a
            .column_iter()
            .map(|v| (v * v.adjoint()).kronecker(&id_b))
            .collect();
        Self {
            projectors,
            vectors: None,
        }
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dimension(&self) -> usize {
        self.projectors.first().map_or(0, |p| p.nrows())
    }

    fn completeness_defect(&self) -> f64 {
        let d = self.dimension();
        let total = self
            .projectors
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, p| acc + p);
        (total - CMatrix::identity(d, d)).camax()
    }
}

/// A system `A ⊗ B` (index `a * dim_b + b`) prepared in `rho`, evolved by
/// `evolution` between the two measurements.
///
/// `first` is the measurement at `T = 0` (Alice's `A` or `A_1`), `second`
/// an orthonormal basis of the whole system for the repeated scenario
/// (`A_2`) and `bob` an orthonormal basis of the B factor.
#[derive(Debug, Clone, PartialEq)]
pub struct HvInstance {
    pub dim_a: usize,
    pub dim_b: usize,
    pub rho: CMatrix,
    pub evolution: CMatrix,
    pub first: Measurement,
    pub second: CMatrix,
    pub bob: CMatrix,
    pub rng_seed: Option<u64>,
}

fn random_gaussian_matrix<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let qr = random_gaussian_matrix(rng, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            c(1.0)
        };
        col *= phase;
    }
    q
}

/// Random full-rank density matrix `G G^dag / Tr(G G^dag)`.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let g = random_gaussian_matrix(rng, d);
    let rho = &g * g.adjoint();
    let trace = rho.trace();
    rho / trace
}

impl HvInstance {
    pub fn dimension(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Two qubits (`dim_a = dim_b = 2`) with random state, evolution and
    /// measurement bases drawn from `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn random_two_qubit(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, 4);
        let evolution = random_unitary(&mut rng, 4);
        let first = Measurement::from_basis(&random_unitary(&mut rng, 4));
        let second = random_unitary(&mut rng, 4);
        let bob = random_unitary(&mut rng, 2);
        Self {
            dim_a: 2,
            dim_b: 2,
            rho,
            evolution,
            first,
            second,
            bob,
            rng_seed: Some(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension();
        let square = |m: &CMatrix, n: usize| m.nrows() == n && m.ncols() == n;
        if !square(&self.rho, d) || !square(&self.evolution, d) || !square(&self.second, d) {
            return Err(Error::InvalidInstance(format!("matrices must be {d}x{d}")));
        }
        if self.first.dimension() != d {
            return Err(Error::PartitionMismatch(format!(
                "first measurement acts on dimension {}, system has {d}",
                self.first.dimension()
            )));
        }
        if !square(&self.bob, self.dim_b) {
            return Err(Error::PartitionMismatch(format!(
                "Bob's basis must be {0}x{0}",
                self.dim_b
            )));
        }
        if (&self.rho - self.rho.adjoint()).camax() > VALIDATION_TOL {
            return Err(Error::InvalidInstance("rho is not Hermitian".into()));
        }
        if (self.rho.trace() - c(1.0)).norm() > VALIDATION_TOL {
            return Err(Error::InvalidInstance("rho must have unit trace".into()));
        }
        let min_eig = SymmetricEigen::new(self.rho.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -VALIDATION_TOL {
            return Err(Error::InvalidInstance(format!(
                "rho has negative eigenvalue {min_eig}"
            )));
        }
        for (name, u, n) in [
            ("evolution", &self.evolution, d),
            ("second basis", &self.second, d),
            ("Bob basis", &self.bob, self.dim_b),
        ] {
            if (u.adjoint() * u - CMatrix::identity(n, n)).camax() > VALIDATION_TOL {
                return Err(Error::InvalidInstance(format!("{name} is not unitary")));
            }
        }
        if self.first.completeness_defect() > VALIDATION_TOL {
            return Err(Error::InvalidInstance(
                "first measurement projectors do not sum to identity".into(),
            ));
        }
        Ok(())
    }

    /// `Tr_A` of an operator on `A ⊗ B`.
    pub fn partial_trace_a(&self, m: &CMatrix) -> CMatrix {
        let db = self.dim_b;
        CMatrix::from_fn(db, db, |b, bp| {
            (0..self.dim_a).map(|a| m[(a * db + b, a * db + bp)]).sum()
        })
    }

    /// Post-measurement state of outcome `a`, evolved: `U Pi_a rho Pi_a U^dag`.
    fn evolved_branch(&self, a: usize) -> CMatrix {
        let p = &self.first.projectors[a];
        &self.evolution * p * &self.rho * p * self.evolution.adjoint()
    }
}

/// Probability of Alice finding `a1` for `A_1` at `T = 0` and then `a2` for
/// `A_2` at `T = t`.
///
/// Returns `(direct, hidden_variable)`: the first is
/// `Tr[Pi_a2 U Pi_a1 rho Pi_a1 U^dag]`, the second the sum over
/// `lambda = (a1', a2')` of `pi(lambda) D_a1' D_a1'a2'` with
/// `pi = delta_a1a1' delta_a2a2'`.
pub fn hv_repeated_check(instance: &HvInstance, outcomes: (usize, usize)) -> Result<(f64, f64)> {
    instance.validate()?;
    let vectors = instance.first.vectors.as_ref().ok_or_else(|| {
        Error::InvalidInstance("repeated measurement needs a rank-1 first measurement".into())
    })?;
    let d = instance.dimension();
    let (a1, a2) = outcomes;
    if a1 >= d || a2 >= d {
        return Err(Error::InvalidArgument(format!(
            "outcomes must be below {d}"
        )));
    }
    let second_projector = {
        let v = instance.second.column(a2);
        v * v.adjoint()
    };
    let direct = (second_projector * instance.evolved_branch(a1)).trace().re;

    let mut hidden = 0.0;
    for a1p in 0..d {
        for a2p in 0..d {
            let pi = if a1p == a1 && a2p == a2 { 1.0 } else { 0.0 };
            let v1 = vectors.column(a1p);
            let v2 = instance.second.column(a2p);
            let d_initial = (v1.adjoint() * &instance.rho * v1)[(0, 0)].re;
            let d_transition = (v2.adjoint() * &instance.evolution * v1)[(0, 0)].norm_sqr();
            hidden += pi * d_initial * d_transition;
        }
    }
    Ok((direct, hidden))
}

/// Probability of Alice's outcome `a` at `T = 0` and Bob's outcome `b` on
/// the B factor at `T = t`.
///
/// Returns `(direct, hidden_variable)`: the first is
/// `<B,b| Tr_A[rho(A,a,t)] |B,b>` with an explicit partial trace, the second
/// the sum over `lambda = (a', b')` of `pi(a', b') delta_aa' delta_bb'` with
/// `pi` evaluated as a full-space trace against `1 ⊗ |B,b'><B,b'|`.
pub fn hv_causal_check(instance: &HvInstance, outcomes: (usize, usize)) -> Result<(f64, f64)> {
    instance.validate()?;
    let (a, b) = outcomes;
    if a >= instance.first.outcomes() || b >= instance.dim_b {
        return Err(Error::InvalidArgument("outcome index out of range".into()));
    }
    let bob_vec = instance.bob.column(b);
    let branch = match &instance.first.vectors {
        // <A,a|rho|A,a> U|A,a><A,a|U^dag
        Some(vectors) => {
            let v = vectors.column(a);
            let weight = (v.adjoint() * &instance.rho * v)[(0, 0)].re;
            let evolved = &instance.evolution * v;
            (&evolved * evolved.adjoint()) * c(weight)
        }
        None => instance.evolved_branch(a),
    };
    let reduced = instance.partial_trace_a(&branch);
    let direct = (bob_vec.adjoint() * reduced * bob_vec)[(0, 0)].re;

    let id_a = CMatrix::identity(instance.dim_a, instance.dim_a);
    let mut hidden = 0.0;
    for ap in 0..instance.first.outcomes() {
        let branch = instance.evolved_branch(ap);
        for bp in 0..instance.dim_b {
            let deterministic = if ap == a && bp == b { 1.0 } else { 0.0 };
            let v = instance.bob.column(bp);
            let bob_projector = id_a.kronecker(&(v * v.adjoint()));
            let pi = (bob_projector * &branch).trace().re;
            hidden += pi * deterministic;
        }
    }
    Ok((direct, hidden))
}

/// Worst disagreement between the two routes over every outcome pair of a
/// set of instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HvSummary {
    pub instances: usize,
    pub base_seed: u64,
    pub max_repeated_deviation: f64,
    pub max_causal_deviation: f64,
    /// Largest `|sum_{a1,a2} P - 1|` of the repeated scenario.
    pub max_completeness_defect: f64,
}

/// Runs both identities on `count` instances seeded `base_seed`,
/// `base_seed + 1`, ...
pub fn run_hv_checks(base_seed: u64, count: usize) -> Result<HvSummary> {
    let mut summary = HvSummary {
        instances: count,
        base_seed,
        max_repeated_deviation: 0.0,
        max_causal_deviation: 0.0,
        max_completeness_defect: 0.0,
    };
    for i in 0..count {
        let instance = HvInstance::random_two_qubit(base_seed.wrapping_add(i as u64));
        let d = instance.dimension();
        let mut total = 0.0;
        for a1 in 0..d {
            for a2 in 0..d {
                let (x, y) = hv_repeated_check(&instance, (a1, a2))?;
                summary.max_repeated_deviation = summary.max_repeated_deviation.max((x - y).abs());
                total += x;
            }
        }
        summary.max_completeness_defect = summary.max_completeness_defect.max((total - 1.0).abs());
        for a in 0..instance.first.outcomes() {
            for b in 0..instance.dim_b {
                let (x, y) = hv_causal_check(&instance, (a, b))?;
                summary.max_causal_deviation = summary.max_causal_deviation.max((x - y).abs());
            }
        }
    }
    Ok(summary)
}

/// Single qubit in `|+>`, `A_1 = sigma_z`, `A_2 = sigma_x`, no evolution.
pub fn plus_state_instance() -> HvInstance {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CMatrix::from_element(2, 1, c(s));
    let rho = &plus * plus.adjoint();
    let z_basis = CMatrix::identity(2, 2);
    let x_basis = CMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
    HvInstance {
        dim_a: 2,
        dim_b: 1,
        rho,
        evolution: CMatrix::identity(2, 2),
        first: Measurement::from_basis(&z_basis),
        second: x_basis,
        bob: CMatrix::identity(1, 1),
        rng_seed: None,
    }
}

/// The four `(direct, hidden_variable)` pairs of [`plus_state_instance`],
/// indexed `[a1][a2]`.
pub fn plus_state_example() -> Result<[[(f64, f64); 2]; 2]> {
    let instance = plus_state_instance();
    let mut out = [[(0.0, 0.0); 2]; 2];
    for (a1, row) in out.iter_mut().enumerate() {
        for (a2, slot) in row.iter_mut().enumerate() {
            *slot = hv_repeated_check(&instance, (a1, a2))?;
        }
    }
    Ok(out)
}
