//! Single-particle spectrum of the open XX chain.
//!
//! After the Jordan-Wigner mapping the chain is a tight-binding model with
//! hopping `-J` and on-site energy `-mu`. Its modes sit at `k_m = pi m / (N+1)`
//! with energies `eps_k = -2 J cos(k) - mu` and sine-shaped eigenvectors,
//! which are Chebyshev polynomials of the second kind evaluated at `cos(k)`.
//!
//! Site and mode numbers in the public API are 1-based.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chain length, hopping and chemical potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    n_sites: usize,
    coupling_j: f64,
    mu: f64,
}

impl ChainParams {
    pub fn new(n_sites: usize, coupling_j: f64, mu: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidParams(format!(
                "n_sites must be at least 2, got {n_sites}"
            )));
        }
        if !coupling_j.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParams(format!(
                "coupling_j and mu must be finite, got J={coupling_j}, mu={mu}"
            )));
        }
        Ok(Self {
            n_sites,
            coupling_j,
            mu,
        })
    }

    /// Parameters in units of J, the way sweeps are usually specified.
    pub fn from_ratio(n_sites: usize, coupling_j: f64, mu_over_j: f64) -> Result<Self> {
        Self::new(n_sites, coupling_j, mu_over_j * coupling_j)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn coupling_j(&self) -> f64 {
        self.coupling_j
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Natural energy scale used to size time grids: |J|, else |mu|, else 1.
    pub fn energy_scale(&self) -> f64 {
        if self.coupling_j != 0.0 {
            self.coupling_j.abs()
        } else if self.mu != 0.0 {
            self.mu.abs()
        } else {
            1.0
        }
    }
}

/// Sign convention of the single-particle eigenvectors.
///
/// `Plain` uses `u_jk ∝ U_{j-1}(cos k)`. `Alternating` multiplies by
/// `(-1)^(j-1)`, which amounts to relabeling `k -> pi - k` in the
/// eigenvectors while keeping `eps_k`; the resulting propagator is the
/// plain one with `J -> -J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Plain,
    Alternating,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Plain, Convention::Alternating];

    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Plain => "plain",
            Convention::Alternating => "alternating",
        }
    }

    pub fn other(&self) -> Convention {
        match self {
            Convention::Plain => Convention::Alternating,
            Convention::Alternating => Convention::Plain,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Convention::Plain),
            "alternating" => Ok(Convention::Alternating),
            other => Err(Error::InvalidArgument(format!(
                "unknown convention '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub index_m: usize,
    pub momentum_k: f64,
    pub lambda_k: f64,
    pub epsilon_k: f64,
}

/// The N modes of the open chain, ordered by `m = 1..=N`.
pub fn build_modes(params: &ChainParams) -> Vec<Mode> {
    let n = params.n_sites();
    let spacing = PI / (n as f64 + 1.0);
    (1..=n)
        .map(|m| {
            let momentum_k = spacing * m as f64;
            let lambda_k = momentum_k.cos();
            Mode {
                index_m: m,
                momentum_k,
                lambda_k,
                epsilon_k: -2.0 * params.coupling_j() * lambda_k - params.mu(),
            }
        })
        .collect()
}

/// Chebyshev polynomial of the second kind, `U_n(lambda)`.
///
/// Evaluated as `sin((n+1)k) / sin(k)` with `lambda = cos(k)`; the endpoints
/// use the limits `U_n(±1) = (±1)^n (n+1)`.
pub fn chebyshev_u(order: usize, lambda: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::ChebyshevDomain(lambda));
    }
    if lambda == 1.0 {
        return Ok(order as f64 + 1.0);
    }
    if lambda == -1.0 {
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(sign * (order as f64 + 1.0));
    }
    let k = lambda.acos();
    Ok(((order as f64 + 1.0) * k).sin() / k.sin())
}

/// Same polynomial through the three-term recurrence. Kept as a cross-check
/// of [`chebyshev_u`]; it accumulates error for large orders.
pub fn chebyshev_u_recurrence(order: usize, lambda: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * lambda);
    if order == 0 {
        return prev;
    }
    for _ in 1..order {
        let next = 2.0 * lambda * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal single-particle eigenvectors together with their modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleBasis {
    params: ChainParams,
    convention: Convention,
    modes: Vec<Mode>,
    // row-major: u[(site - 1) * n + (mode - 1)]
    u: Vec<f64>,
}

impl SingleParticleBasis {
    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_sites(&self) -> usize {
        self.params.n_sites()
    }

    /// `u_jk` for site `j` and mode `m`, both 1-based.
    pub fn u(&self, site: usize, mode: usize) -> f64 {
        let n = self.n_sites();
        self.u[(site - 1) * n + (mode - 1)]
    }

    /// Amplitudes of all modes on one site (1-based), a row of `u`.
    pub fn site_row(&self, site: usize) -> &[f64] {
        let n = self.n_sites();
        &self.u[(site - 1) * n..site * n]
    }

    /// One eigenvector (1-based mode index) as a column of `u`.
    pub fn column(&self, mode: usize) -> Vec<f64> {
        (1..=self.n_sites()).map(|j| self.u(j, mode)).collect()
    }
}

pub fn eigenbasis(params: &ChainParams, convention: Convention) -> SingleParticleBasis {
    let n = params.n_sites();
    let modes = build_modes(params);
    let mut u = vec![0.0; n * n];
    for (col, mode) in modes.iter().enumerate() {
        let mut norm2 = 0.0;
        for j in 1..=n {
            let mut value =
                chebyshev_u(j - 1, mode.lambda_k).expect("cos(k_m) lies strictly inside [-1, 1]");
            if convention == Convention::Alternating && (j - 1) % 2 == 1 {
                value = -value;
            }
            u[(j - 1) * n + col] = value;
            norm2 += value * value;
        }
        let norm = norm2.sqrt();
        for j in 0..n {
            u[j * n + col] /= norm;
        }
    }
    SingleParticleBasis {
        params: *params,
        convention,
        modes,
        u,
    }
}

/// Dense single-particle hopping matrix `h`, row-major: `-J` on the first
/// off-diagonals and `-mu` on the diagonal.
pub fn hopping_matrix(params: &ChainParams) -> Vec<f64> {
    let n = params.n_sites();
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = -params.mu();
        if i + 1 < n {
            h[i * n + i + 1] = -params.coupling_j();
            h[(i + 1) * n + i] = -params.coupling_j();
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupVelocity {
    pub velocity: f64,
    pub crossing_momentum: f64,
    /// Energy of the pre-measurement state, `-mu`; `eps_k` equals it at the
    /// crossing momentum.
    pub initial_energy: f64,
}

/// Group velocity `d eps_k / dk` at the momentum where the band crosses the
/// initial energy.
pub fn group_velocity(params: &ChainParams) -> Result<GroupVelocity> {
    let j = params.coupling_j();
    if j == 0.0 {
        return Err(Error::DegenerateBand);
    }
    let crossing_momentum = FRAC_PI_2;
    Ok(GroupVelocity {
        velocity: 2.0 * j * crossing_momentum.sin(),
        crossing_momentum,
        initial_energy: -params.mu(),
    })
}
