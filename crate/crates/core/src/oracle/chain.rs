//! Brute-force evaluation of the chain protocol: Bell pair on sites 1 and N,
//! Alice measures site 1 at `t = 0`, Bob measures site N at time `t`.

use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::fermions::{jordan_wigner, pauli, FermionSet, Pauli};
use super::operator::{site_bit, DenseOperator, StateVector};
use super::OracleLimits;
use crate::error::Result;
use crate::inequality::{LocalObservable, MeasurementSettings};
use crate::propagator::Propagator;
use crate::spectral::{ChainParams, Convention};

/// Which of Alice's two settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AliceSetting {
    A1,
    A2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BobSetting {
    B1,
    B2,
}

/// Measurement outcome `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(&self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    fn index(&self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

impl AliceSetting {
    pub const BOTH: [AliceSetting; 2] = [AliceSetting::A1, AliceSetting::A2];

    pub fn observable(&self) -> LocalObservable {
        let s = MeasurementSettings::default();
        match self {
            AliceSetting::A1 => s.a1,
            AliceSetting::A2 => s.a2,
        }
    }

    fn index(&self) -> usize {
        match self {
            AliceSetting::A1 => 0,
            AliceSetting::A2 => 1,
        }
    }
}

impl BobSetting {
    pub const BOTH: [BobSetting; 2] = [BobSetting::B1, BobSetting::B2];

    pub fn observable(&self) -> LocalObservable {
        let s = MeasurementSettings::default();
        match self {
            BobSetting::B1 => s.b1,
            BobSetting::B2 => s.b2,
        }
    }

    fn index(&self) -> usize {
        match self {
            BobSetting::B1 => 0,
            BobSetting::B2 => 1,
        }
    }
}

/// `(1 + outcome * O) / 2` as a 2x2 matrix.
pub fn local_projector(observable: LocalObservable, outcome: Outcome) -> [[Complex64; 2]; 2] {
    let m = observable.matrix();
    let mut p = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { 1.0 } else { 0.0 };
            p[r][c] = Complex64::new(0.5 * (id + outcome.sign() * m[r][c]), 0.0);
        }
    }
    p
}

pub fn observable_operator(
    n_sites: usize,
    site: usize,
    observable: LocalObservable,
) -> DenseOperator {
    let m = observable.matrix();
    let m = [
        [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
        [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
    ];
    DenseOperator::local(n_sites, site, &m)
}

pub fn projector_operator(
    n_sites: usize,
    site: usize,
    observable: LocalObservable,
    outcome: Outcome,
) -> DenseOperator {
    DenseOperator::local(n_sites, site, &local_projector(observable, outcome))
}

/// `H = -(J/2) sum (X_i X_{i+1} + Y_i Y_{i+1}) - (mu/2) sum (Z_i + 1)` built
/// term by term from Pauli matrices.
pub fn build_hamiltonian(params: &ChainParams, limits: &OracleLimits) -> Result<DenseOperator> {
    let n = params.n_sites();
    limits.check(n)?;
    let (j, mu) = (params.coupling_j(), params.mu());
    let identity = DenseOperator::identity(n);
    let mut h = DenseOperator::zeros(n);
    for i in 1..n {
        let xx = &pauli(n, i, Pauli::X) * &pauli(n, i + 1, Pauli::X);
        let yy = &pauli(n, i, Pauli::Y) * &pauli(n, i + 1, Pauli::Y);
        h = &h + &(&xx + &yy).scaled((-0.5 * j).into());
    }
    for i in 1..=n {
        let field = &pauli(n, i, Pauli::Z) + &identity;
        h = &h + &field.scaled((-0.5 * mu).into());
    }
    Ok(h)
}

/// The same Hamiltonian from fermions,
/// `-J sum (f_i^dag f_{i+1} + h.c.) - mu sum n_i`.
pub fn fermionic_hamiltonian(params: &ChainParams, fermions: &FermionSet) -> DenseOperator {
    let n = params.n_sites();
    let (j, mu) = (params.coupling_j(), params.mu());
    let mut h = DenseOperator::zeros(n);
    for i in 1..n {
        let forward = &fermions.creation(i) * fermions.annihilation(i + 1);
        let backward = &fermions.creation(i + 1) * fermions.annihilation(i);
        h = &h + &(&forward + &backward).scaled((-j).into());
    }
    for i in 1..=n {
        h = &h + &fermions.number(i).scaled((-mu).into());
    }
    h
}

/// `(|up up> + |down down>)/sqrt 2` on sites 1 and N, every other site down.
pub fn initial_state(n_sites: usize) -> StateVector {
    let amp = Complex64::new(1.0 / SQRT_2, 0.0);
    let mut psi = StateVector::zeros(n_sites);
    psi.amplitudes_mut()[0] = amp;
    psi.amplitudes_mut()[site_bit(1) | site_bit(n_sites)] = amp;
    psi
}

/// Alice's projection of the initial state; the squared norm is the outcome
/// probability.
pub fn projected_state(setting: AliceSetting, outcome: Outcome, n_sites: usize) -> StateVector {
    initial_state(n_sites).apply_local(1, &local_projector(setting.observable(), outcome))
}

/// Exact evolution from one dense eigendecomposition of the (real
/// symmetric) Hamiltonian.
#[derive(Debug, Clone)]
pub struct Evolution {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl Evolution {
    pub fn new(h: &DenseOperator) -> Self {
        let dim = h.dim();
        debug_assert!(h.max_abs_imag() == 0.0, "XX Hamiltonian is real");
        let real = DMatrix::from_fn(dim, dim, |r, c| h.get(r, c).re);
        let eig = SymmetricEigen::new(real);
        Self {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `exp(-i H t) |psi>`
    pub fn evolve(&self, psi: &StateVector, t: f64) -> StateVector {
        let dim = psi.dim();
        let re = DVector::from_iterator(dim, psi.amplitudes().iter().map(|a| a.re));
        let im = DVector::from_iterator(dim, psi.amplitudes().iter().map(|a| a.im));
        let c_re = self.vectors.tr_mul(&re);
        let c_im = self.vectors.tr_mul(&im);
        let mut r_re = DVector::zeros(dim);
        let mut r_im = DVector::zeros(dim);
        for k in 0..dim {
            let phase = Complex64::cis(-self.energies[k] * t);
            let c = Complex64::new(c_re[k], c_im[k]) * phase;
            r_re[k] = c.re;
            r_im[k] = c.im;
        }
        let out_re = &self.vectors * r_re;
        let out_im = &self.vectors * r_im;
        let amps = (0..dim)
            .map(|i| Complex64::new(out_re[i], out_im[i]))
            .collect();
        StateVector::from_amplitudes(psi.n_sites(), amps)
    }

    /// Dense `exp(-i H t)`.
    pub fn unitary(&self, n_sites: usize, t: f64) -> DenseOperator {
        let dim = self.energies.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for c in 0..dim {
            let col = self.evolve(&StateVector::basis(n_sites, c), t);
            for (r, a) in col.amplitudes().iter().enumerate() {
                entries[r * dim + c] = *a;
            }
        }
        DenseOperator::from_entries(n_sites, entries)
    }

    /// Heisenberg picture `O(t) = exp(iHt) O exp(-iHt)`.
    pub fn heisenberg(&self, op: &DenseOperator, t: f64) -> DenseOperator {
        let u = self.unitary(op.n_sites(), t);
        &u.adjoint() * &(op * &u)
    }
}

/// All sixteen `p_{ab}(A_i, B_j(t))` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityTable {
    pub t: f64,
    // [alice setting][alice outcome][bob setting][bob outcome]
    table: [[[[f64; 2]; 2]; 2]; 2],
}

impl ProbabilityTable {
    pub fn get(&self, a: AliceSetting, a_out: Outcome, b: BobSetting, b_out: Outcome) -> f64 {
        self.table[a.index()][a_out.index()][b.index()][b_out.index()]
    }

    /// `I(t) = p_11(A1,B2) + p_-1-1(A1,B1) + p_11(A2,B1) - p_11(A2,B2)`
    pub fn i_ch(&self) -> f64 {
        use AliceSetting::*;
        use BobSetting::*;
        use Outcome::*;
        self.get(A1, Plus, B2, Plus) + self.get(A1, Minus, B1, Minus) + self.get(A2, Plus, B1, Plus)
            - self.get(A2, Plus, B2, Plus)
    }

    /// `P_A(1|A_1) = sum_b p_{1b}(A_1, B_j)` for Bob's setting `B_j`.
    pub fn alice_marginal_a1(&self, bob: BobSetting) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&b| self.get(AliceSetting::A1, Outcome::Plus, bob, b))
            .sum()
    }

    /// `P_B(1|B_1) = sum_a p_{a1}(A_i, B_1)` for Alice's setting `A_i`.
    pub fn bob_marginal_b1(&self, alice: AliceSetting) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&a| self.get(alice, a, BobSetting::B1, Outcome::Plus))
            .sum()
    }

    /// Time-independent CH combination with Bob's operators evolved:
    /// `p11(A1,B1) + p11(A1,B2) + p11(A2,B1) - p11(A2,B2) - P_A(1|A1) - P_B(1|B1)`,
    /// marginals taken with the `i = 1` settings.
    pub fn i_ch_prime(&self) -> f64 {
        use AliceSetting::*;
        use BobSetting::*;
        use Outcome::*;
        self.get(A1, Plus, B1, Plus) + self.get(A1, Plus, B2, Plus) + self.get(A2, Plus, B1, Plus)
            - self.get(A2, Plus, B2, Plus)
            - self.alice_marginal_a1(B1)
            - self.bob_marginal_b1(A1)
    }

    /// Largest `|sum_{a,b} p_ab - 1|` over the four setting pairs.
    pub fn completeness_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in AliceSetting::BOTH {
            for b in BobSetting::BOTH {
                let total: f64 = Outcome::BOTH
                    .iter()
                    .flat_map(|&x| Outcome::BOTH.iter().map(move |&y| (x, y)))
                    .map(|(x, y)| self.get(a, x, b, y))
                    .sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
        worst
    }
}

/// Vacuum contractions entering the analytic derivation, all at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumContractions {
    /// `<0| f_N f_1 f_N^dag(t) f_N(t) f_1^dag f_N^dag |0>`
    pub pair_number: Complex64,
    /// `<0| f_N f_1 sigma_N^x(t) f_1^dag f_N^dag |0>`
    pub pair_sigma_x: Complex64,
    /// `<0| sigma_N^x(t) f_N^dag |0>`
    pub sigma_x_fn: Complex64,
    /// `<0| sigma_N^x(t) f_1^dag |0>`
    pub sigma_x_f1: Complex64,
    /// `<0| f_N f_1 sigma_N^x(t) f_1^dag |0>`
    pub pair_sigma_x_f1: Complex64,
    /// `<0| f_N f_1 sigma_N^x(t) f_N^dag |0>`
    pub pair_sigma_x_fn: Complex64,
}

/// Deviation of one relation over a time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub n_sites: usize,
    pub convention: Convention,
    pub max_deviation: f64,
    pub worst_t: f64,
}

/// Dense oracle for one chain: Hamiltonian, eigendecomposition and (on
/// demand) the Jordan-Wigner fermions.
#[derive(Debug)]
pub struct ChainOracle {
    params: ChainParams,
    hamiltonian: DenseOperator,
    evolution: Evolution,
    fermions: OnceLock<FermionSet>,
    sigma_x_end: OnceLock<DenseOperator>,
}

impl ChainOracle {
    pub fn new(params: &ChainParams, limits: &OracleLimits) -> Result<Self> {
        let hamiltonian = build_hamiltonian(params, limits)?;
        let evolution = Evolution::new(&hamiltonian);
        Ok(Self {
            params: *params,
            hamiltonian,
            evolution,
            fermions: OnceLock::new(),
            sigma_x_end: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn n_sites(&self) -> usize {
        self.params.n_sites()
    }

    pub fn hamiltonian(&self) -> &DenseOperator {
        &self.hamiltonian
    }

    pub fn evolution(&self) -> &Evolution {
        &self.evolution
    }

    pub fn fermions(&self) -> &FermionSet {
        self.fermions.get_or_init(|| jordan_wigner(self.n_sites()))
    }

    /// `sigma_N^x` assembled from the fermionic string identity.
    pub fn sigma_x_end(&self) -> &DenseOperator {
        self.sigma_x_end
            .get_or_init(|| self.fermions().sigma_x(self.n_sites()))
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> StateVector {
        self.evolution.evolve(psi, t)
    }

    /// `|| Pi_b exp(-iHt) Pi_a psi(0-) ||^2`
    pub fn conditional_probability(
        &self,
        alice: AliceSetting,
        a_out: Outcome,
        bob: BobSetting,
        b_out: Outcome,
        t: f64,
    ) -> f64 {
        let n = self.n_sites();
        let evolved = self.evolve(&projected_state(alice, a_out, n), t);
        evolved
            .apply_local(n, &local_projector(bob.observable(), b_out))
            .norm_sqr()
    }

    pub fn probability_table(&self, t: f64) -> ProbabilityTable {
        let n = self.n_sites();
        let mut table = [[[[0.0; 2]; 2]; 2]; 2];
        for alice in AliceSetting::BOTH {
            for a_out in Outcome::BOTH {
                let evolved = self.evolve(&projected_state(alice, a_out, n), t);
                for bob in BobSetting::BOTH {
                    for b_out in Outcome::BOTH {
                        table[alice.index()][a_out.index()][bob.index()][b_out.index()] = evolved
                            .apply_local(n, &local_projector(bob.observable(), b_out))
                            .norm_sqr();
                    }
                }
            }
        }
        ProbabilityTable { t, table }
    }

    pub fn i_ch(&self, t: f64) -> f64 {
        self.probability_table(t).i_ch()
    }

    pub fn i_ch_prime(&self, t: f64) -> f64 {
        self.probability_table(t).i_ch_prime()
    }

    /// `<bra| O(t) |ket>` evaluated as `<U bra| O |U ket>`, `U = exp(-iHt)`.
    pub fn heisenberg_matrix_element(
        &self,
        op: &DenseOperator,
        bra: &StateVector,
        ket: &StateVector,
        t: f64,
    ) -> Complex64 {
        op.expectation(&self.evolve(bra, t), &self.evolve(ket, t))
    }

    pub fn vacuum_contractions(&self, t: f64) -> VacuumContractions {
        let n = self.n_sites();
        let fs = self.fermions();
        let sigma = self.sigma_x_end();
        let vacuum = StateVector::vacuum(n);
        let f1 = fs.create(1, &vacuum);
        let fn_ = fs.create(n, &vacuum);
        // (f_N f_1)^dag |0> = f_1^dag f_N^dag |0>
        let pair = fs.create(1, &fn_);
        let number = fs.number(n);
        let el = |op: &DenseOperator, bra: &StateVector, ket: &StateVector| {
            self.heisenberg_matrix_element(op, bra, ket, t)
        };
        VacuumContractions {
            pair_number: el(&number, &pair, &pair),
            pair_sigma_x: el(sigma, &pair, &pair),
            sigma_x_fn: el(sigma, &vacuum, &fn_),
            sigma_x_f1: el(sigma, &vacuum, &f1),
            pair_sigma_x_f1: el(sigma, &pair, &f1),
            pair_sigma_x_fn: el(sigma, &pair, &fn_),
        }
    }

    /// `<0| f_i f_j^dag(t) |0>` for all sites, row-major `[i][j]`.
    pub fn single_particle_propagator(&self, t: f64) -> Vec<Complex64> {
        let n = self.n_sites();
        let fs = self.fermions();
        let vacuum = StateVector::vacuum(n);
        let evolved_vacuum = self.evolve(&vacuum, t);
        let bras: Vec<StateVector> = (1..=n)
            .map(|i| self.evolve(&fs.create(i, &vacuum), t))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 1..=n {
            let ket = fs.create(j, &evolved_vacuum);
            for i in 1..=n {
                out[(i - 1) * n + (j - 1)] = bras[i - 1].inner(&ket);
            }
        }
        out
    }

    /// Largest `|<0|f_i f_j^dag(t)|0> - G_ij(t)|` under a convention.
    pub fn propagator_deviation(&self, convention: Convention, t: f64) -> f64 {
        let oracle = self.single_particle_propagator(t);
        let closed = Propagator::new(&self.params, convention).matrix(t);
        oracle
            .iter()
            .zip(closed.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `Re[<0|f_N f_1 sx(t) f_1^dag|0> + <0|f_N f_1 sx(t) f_N^dag|0>]` against
    /// `Re[G_NN(t) - G_1N(t)]` over a grid.
    pub fn conjecture_check(&self, t_grid: &[f64], convention: Convention) -> ConjectureReport {
        let prop = Propagator::new(&self.params, convention);
        let mut report = ConjectureReport {
            n_sites: self.n_sites(),
            convention,
            max_deviation: 0.0,
            worst_t: t_grid.first().copied().unwrap_or(0.0),
        };
        for &t in t_grid {
            let c = self.vacuum_contractions(t);
            let lhs = (c.pair_sigma_x_f1 + c.pair_sigma_x_fn).re;
            let (gnn, g1n) = prop.end_entries(t);
            let rhs = (gnn - g1n).re;
            let dev = (lhs - rhs).abs();
            if dev > report.max_deviation {
                report.max_deviation = dev;
                report.worst_t = t;
            }
        }
        report
    }
}

pub fn i_ch_oracle(t: f64, params: &ChainParams, limits: &OracleLimits) -> Result<f64> {
    Ok(ChainOracle::new(params, limits)?.i_ch(t))
}

pub fn i_ch_prime_oracle(t: f64, params: &ChainParams, limits: &OracleLimits) -> Result<f64> {
    Ok(ChainOracle::new(params, limits)?.i_ch_prime(t))
}

pub fn conditional_probability(
    alice: AliceSetting,
    a_out: Outcome,
    bob: BobSetting,
    b_out: Outcome,
    t: f64,
    params: &ChainParams,
    limits: &OracleLimits,
) -> Result<f64> {
    Ok(ChainOracle::new(params, limits)?.conditional_probability(alice, a_out, bob, b_out, t))
}

pub fn vacuum_contractions(
    t: f64,
    params: &ChainParams,
    limits: &OracleLimits,
) -> Result<VacuumContractions> {
    Ok(ChainOracle::new(params, limits)?.vacuum_contractions(t))
}

pub fn pair_contraction_check(
    params: &ChainParams,
    t_grid: &[f64],
    convention: Convention,
    limits: &OracleLimits,
) -> Result<ConjectureReport> {
    Ok(ChainOracle::new(params, limits)?.conjecture_check(t_grid, convention))
}

/// Outcome of comparing the oracle's single-particle propagator with both
/// eigenvector conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConventionProbe {
    pub selected: Option<Convention>,
    pub plain_deviation: f64,
    pub alternating_deviation: f64,
    pub tolerance: f64,
}

/// Picks the convention whose `G_ij(t)` matches `<0|f_i f_j^dag(t)|0>`;
/// `selected` is `None` unless exactly one matches.
pub fn resolve_convention(oracle: &ChainOracle, t: f64, tolerance: f64) -> ConventionProbe {
    let plain_deviation = oracle.propagator_deviation(Convention::Plain, t);
    let alternating_deviation = oracle.propagator_deviation(Convention::Alternating, t);
    let selected = match (
        plain_deviation <= tolerance,
        alternating_deviation <= tolerance,
    ) {
        (true, false) => Some(Convention::Plain),
        (false, true) => Some(Convention::Alternating),
        _ => None,
    };
    ConventionProbe {
        selected,
        plain_deviation,
        alternating_deviation,
        tolerance,
    }
}
