//! The computing subcommands. Each returns a data table, named checks and a
//! JSON summary; `main` turns them into files, a manifest and an exit code.

use std::f64::consts::SQRT_2;

use chainbell_core::inequality::{
    find_violations, sample_curve, uniform_grid, ChFunctional, PeakSignal, ViolationReport,
    I_CH_AT_ZERO,
};
use chainbell_core::oracle::hidden_variable::{
    hv_causal_check, hv_repeated_check, plus_state_example, HvInstance,
};
use chainbell_core::oracle::{
    jordan_wigner, memory_estimate_bytes, resolve_convention, AliceSetting, BobSetting,
    ChainOracle, OracleLimits, Outcome,
};
use chainbell_core::{ChainParams, Convention, Propagator};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CommandKind, RunConfig};
use crate::output::{Cell, Check, Table};
use crate::CliError;

pub const ORACLE_TOL: f64 = 1e-9;
pub const EXACT_TOL: f64 = 1e-12;
pub const PROBE_TIME: f64 = 0.7;

pub struct RunOutcome {
    pub table: Table,
    pub checks: Vec<Check>,
    pub convention: Option<Convention>,
    pub probe: Option<Value>,
    pub summary: Value,
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    match config.command {
        CommandKind::Curve => curve(config),
        CommandKind::Sweep => sweep(config),
        CommandKind::Verify => verify(config),
        CommandKind::Conjecture => conjecture(config),
        CommandKind::Hv => hv(config),
    }
}

struct Resolved {
    convention: Convention,
    probe: Option<Value>,
}

/// Forced conventions are taken as given. `auto` compares the oracle's
/// `<0|f_i f_j^dag(t)|0>` with both conventions on a four-site chain at
/// `mu/J = -1`.
fn resolve(config: &RunConfig) -> Result<Resolved, CliError> {
    if let Some(convention) = config.convention.forced() {
        return Ok(Resolved {
            convention,
            probe: None,
        });
    }
    let j = if config.coupling_j != 0.0 {
        config.coupling_j
    } else {
        1.0
    };
    let params = ChainParams::from_ratio(4, j, -1.0)?;
    let oracle = ChainOracle::new(&params, &OracleLimits::default())?;
    let probe = resolve_convention(&oracle, PROBE_TIME / j.abs(), ORACLE_TOL);
    let probe_json = json!({
        "n_sites": 4,
        "mu_over_j": -1.0,
        "t": PROBE_TIME / j.abs(),
        "plain_deviation": probe.plain_deviation,
        "alternating_deviation": probe.alternating_deviation,
        "tolerance": probe.tolerance,
        "selected": probe.selected,
    });
    match probe.selected {
        Some(convention) => Ok(Resolved {
            convention,
            probe: Some(probe_json),
        }),
        None => Err(CliError::ConventionUnresolved(probe_json)),
    }
}

const CURVE_COLUMNS: [&str; 8] = [
    "t",
    "tJ",
    "tJ_over_N",
    "i_ch",
    "gnn_abs2",
    "g1n_abs2",
    "re_gnn",
    "violation_flag",
];

struct Series {
    n: usize,
    mu_over_j: f64,
    rows: Vec<Vec<Cell>>,
    report: ViolationReport,
    mismatch: f64,
}

fn series(
    config: &RunConfig,
    n: usize,
    mu_over_j: f64,
    convention: Convention,
) -> Result<Series, CliError> {
    let params = config.params(n, mu_over_j)?;
    let grid = uniform_grid(config.t_max, config.t_steps)?;
    let curve = sample_curve(&params, convention, &grid)?;
    let report = find_violations(&curve)?;
    let j = config.coupling_j;
    let rows = curve
        .samples
        .iter()
        .map(|s| {
            let c = s.components.expect("sample_curve stores components");
            vec![
                s.t.into(),
                (s.t * j).into(),
                (s.t * j / n as f64).into(),
                s.i_ch.into(),
                c.gnn_abs2.into(),
                c.g1n_abs2.into(),
                c.re_gnn.into(),
                (s.i_ch > 1.0).into(),
            ]
        })
        .collect();
    Ok(Series {
        n,
        mu_over_j,
        rows,
        mismatch: curve.component_mismatch(),
        report,
    })
}

fn series_summary(s: &Series) -> Value {
    json!({
        "n_sites": s.n,
        "mu_over_j": s.mu_over_j,
        "violation_intervals": s.report.violation_intervals,
        "interval_count": s.report.violation_intervals.len(),
        "negative_intervals": s.report.negative_intervals,
        "t_star_numeric": s.report.t_star_numeric,
        "t_star_estimate": s.report.t_star_estimate,
        "first_revival_gnn": s.report.first_revival(PeakSignal::Gnn, 0.1),
        "first_revival_g1n": s.report.first_revival(PeakSignal::G1n, 0.1),
    })
}

fn curve(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let resolved = resolve(config)?;
    let s = series(
        config,
        config.n_sites[0],
        config.mu_over_j[0],
        resolved.convention,
    )?;
    let mut table = Table::new("curve", &CURVE_COLUMNS);
    table.rows = s.rows.clone();
    Ok(RunOutcome {
        checks: vec![Check::new("components_recombine", s.mismatch, EXACT_TOL)],
        summary: series_summary(&s),
        table,
        convention: Some(resolved.convention),
        probe: resolved.probe,
    })
}

fn sweep(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let resolved = resolve(config)?;
    let points: Vec<(usize, f64)> = config
        .sorted_sites()
        .into_iter()
        .flat_map(|n| config.sorted_fields().into_iter().map(move |mu| (n, mu)))
        .collect();
    // collect() keeps input order, so the output never depends on scheduling
    let all: Vec<Series> = points
        .par_iter()
        .map(|&(n, mu)| series(config, n, mu, resolved.convention))
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["n_sites", "mu_over_j"];
    columns.extend(CURVE_COLUMNS);
    let mut table = Table::new("sweep", &columns);
    let mut mismatch: f64 = 0.0;
    for s in &all {
        mismatch = mismatch.max(s.mismatch);
        for row in &s.rows {
            let mut full = vec![s.n.into(), s.mu_over_j.into()];
            full.extend(row.iter().cloned());
            table.push(full);
        }
    }
    Ok(RunOutcome {
        table,
        checks: vec![Check::new("components_recombine", mismatch, EXACT_TOL)],
        convention: Some(resolved.convention),
        probe: resolved.probe,
        summary: json!({ "series": all.iter().map(series_summary).collect::<Vec<_>>() }),
    })
}

fn announce_oracle(config: &RunConfig) -> Result<OracleLimits, CliError> {
    let limits = config.oracle_limits()?;
    let sites = config.sorted_sites();
    for &n in &sites {
        if n < 2 {
            return Err(CliError::Usage(format!(
                "oracle chains need at least 2 sites, got {n}"
            )));
        }
        limits.check(n)?;
    }
    let largest = *sites.last().expect("validated nonempty");
    eprintln!(
        "oracle: largest chain N={largest}, about {:.1} MiB per dense operator set",
        memory_estimate_bytes(largest) as f64 / (1024.0 * 1024.0)
    );
    Ok(limits)
}

#[derive(Debug, Clone, Copy, Default)]
struct ChainDeviations {
    i_ch_at_zero: f64,
    oracle_equivalence: f64,
    vacuum_branch: f64,
    b2_structure: f64,
    interference_structure: f64,
    completeness: f64,
    prime_shift: f64,
    marginal_independence: f64,
    propagator_free_fermion: f64,
    pair_number: f64,
    pair_sigma_x: f64,
    single_sigma_x: f64,
    pair_contraction: f64,
}

impl ChainDeviations {
    fn fields(&self) -> [(&'static str, f64, f64); 13] {
        [
            ("i_ch_at_zero", self.i_ch_at_zero, EXACT_TOL),
            ("oracle_equivalence", self.oracle_equivalence, ORACLE_TOL),
            ("vacuum_branch_constant", self.vacuum_branch, 1e-10),
            ("b2_branch_structure", self.b2_structure, ORACLE_TOL),
            (
                "interference_structure",
                self.interference_structure,
                ORACLE_TOL,
            ),
            ("outcome_completeness", self.completeness, 1e-10),
            ("i_ch_prime_shift", self.prime_shift, EXACT_TOL),
            (
                "marginal_setting_independence",
                self.marginal_independence,
                EXACT_TOL,
            ),
            (
                "propagator_free_fermion",
                self.propagator_free_fermion,
                ORACLE_TOL,
            ),
            ("pair_number_contraction", self.pair_number, ORACLE_TOL),
            ("pair_sigma_x_vanishes", self.pair_sigma_x, 1e-10),
            (
                "single_sigma_x_contraction",
                self.single_sigma_x,
                ORACLE_TOL,
            ),
            (
                "pair_contraction_relation",
                self.pair_contraction,
                ORACLE_TOL,
            ),
        ]
    }

    fn merge(&mut self, o: &ChainDeviations) {
        let mine = [
            &mut self.i_ch_at_zero,
            &mut self.oracle_equivalence,
            &mut self.vacuum_branch,
            &mut self.b2_structure,
            &mut self.interference_structure,
            &mut self.completeness,
            &mut self.prime_shift,
            &mut self.marginal_independence,
            &mut self.propagator_free_fermion,
            &mut self.pair_number,
            &mut self.pair_sigma_x,
            &mut self.single_sigma_x,
            &mut self.pair_contraction,
        ];
        for (slot, (_, v, _)) in mine.into_iter().zip(o.fields()) {
            *slot = slot.max(v);
        }
    }
}

fn verify_chain(
    params: &ChainParams,
    limits: &OracleLimits,
    convention: Convention,
    grid: &[f64],
) -> Result<ChainDeviations, CliError> {
    use AliceSetting::*;
    use BobSetting::*;
    use Outcome::*;

    let oracle = ChainOracle::new(params, limits)?;
    let closed = ChFunctional::new(params, convention);
    let prop = Propagator::new(params, convention);
    let mut d = ChainDeviations {
        i_ch_at_zero: (closed.value(0.0) - I_CH_AT_ZERO).abs(),
        ..Default::default()
    };
    d.pair_contraction = oracle.conjecture_check(grid, convention).max_deviation;
    for &t in grid {
        let table = oracle.probability_table(t);
        let (gnn, g1n) = prop.end_entries(t);
        let max = |slot: &mut f64, v: f64| *slot = slot.max(v);

        max(
            &mut d.oracle_equivalence,
            (table.i_ch() - closed.value(t)).abs(),
        );
        max(
            &mut d.vacuum_branch,
            (table.get(A1, Minus, B1, Minus) - (2.0 + SQRT_2) / 8.0).abs(),
        );
        let b2 = table.get(A1, Plus, B2, Plus) - (2.0 - SQRT_2) / 8.0;
        max(
            &mut d.b2_structure,
            (b2 - SQRT_2 / 4.0 * (gnn.norm_sqr() + g1n.norm_sqr())).abs(),
        );
        let interference = table.get(A2, Plus, B1, Plus) - table.get(A2, Plus, B2, Plus);
        max(
            &mut d.interference_structure,
            (interference - SQRT_2 / 4.0 * gnn.re).abs(),
        );
        max(&mut d.completeness, table.completeness_defect());
        max(
            &mut d.prime_shift,
            (table.i_ch() - table.i_ch_prime() - 1.0).abs(),
        );
        max(
            &mut d.marginal_independence,
            (table.alice_marginal_a1(B1) - table.alice_marginal_a1(B2)).abs(),
        );
        max(
            &mut d.propagator_free_fermion,
            oracle.propagator_deviation(convention, t),
        );

        let c = oracle.vacuum_contractions(t);
        max(
            &mut d.pair_number,
            (c.pair_number - (gnn.norm_sqr() + g1n.norm_sqr())).norm(),
        );
        max(&mut d.pair_sigma_x, c.pair_sigma_x.norm());
        max(
            &mut d.single_sigma_x,
            (c.sigma_x_fn - gnn.conj())
                .norm()
                .max((c.sigma_x_f1 - g1n.conj()).norm()),
        );
    }
    Ok(d)
}

struct HvTotals {
    rows: Vec<Vec<Cell>>,
    repeated: f64,
    causal: f64,
    completeness: f64,
}

fn hv_instances(base_seed: u64, count: usize) -> Result<HvTotals, CliError> {
    let per_instance: Vec<(u64, f64, f64, f64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i as u64);
            let inst = HvInstance::random_two_qubit(seed);
            let d = inst.dimension();
            let (mut repeated, mut causal, mut total): (f64, f64, f64) = (0.0, 0.0, 0.0);
            for a1 in 0..d {
                for a2 in 0..d {
                    let (x, y) = hv_repeated_check(&inst, (a1, a2))?;
                    repeated = repeated.max((x - y).abs());
                    total += x;
                }
            }
            for a in 0..inst.first.outcomes() {
                for b in 0..inst.dim_b {
                    let (x, y) = hv_causal_check(&inst, (a, b))?;
                    causal = causal.max((x - y).abs());
                }
            }
            Ok((seed, repeated, causal, (total - 1.0).abs()))
        })
        .collect::<Result<_, CliError>>()?;
    let mut totals = HvTotals {
        rows: Vec::with_capacity(count),
        repeated: 0.0,
        causal: 0.0,
        completeness: 0.0,
    };
    for (i, (seed, r, c, t)) in per_instance.into_iter().enumerate() {
        totals.repeated = totals.repeated.max(r);
        totals.causal = totals.causal.max(c);
        totals.completeness = totals.completeness.max(t);
        totals
            .rows
            .push(vec![i.into(), seed.into(), r.into(), c.into(), t.into()]);
    }
    Ok(totals)
}

const HV_COLUMNS: [&str; 5] = [
    "instance",
    "seed",
    "repeated_deviation",
    "causal_deviation",
    "repeated_completeness_defect",
];

fn verify(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let limits = announce_oracle(config)?;
    let resolved = resolve(config)?;
    let grid = uniform_grid(config.t_max, config.t_steps)?;
    let points: Vec<(usize, f64)> = config
        .sorted_sites()
        .into_iter()
        .flat_map(|n| config.sorted_fields().into_iter().map(move |mu| (n, mu)))
        .collect();
    let per_chain: Vec<ChainDeviations> = points
        .par_iter()
        .map(|&(n, mu)| verify_chain(&config.params(n, mu)?, &limits, resolved.convention, &grid))
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["n_sites", "mu_over_j"];
    columns.extend(ChainDeviations::default().fields().map(|(name, _, _)| name));
    let mut table = Table::new("verify", &columns);
    let mut worst = ChainDeviations::default();
    for (&(n, mu), d) in points.iter().zip(&per_chain) {
        let mut row: Vec<Cell> = vec![n.into(), mu.into()];
        row.extend(d.fields().map(|(_, v, _)| Cell::from(v)));
        table.push(row);
        worst.merge(d);
    }
    let mut checks: Vec<Check> = worst
        .fields()
        .iter()
        .map(|&(name, v, tol)| Check::new(name, v, tol))
        .collect();

    let largest = *config.sorted_sites().last().expect("nonempty");
    checks.push(Check::new(
        "fermion_anticommutators",
        jordan_wigner(largest).anticommutator_defect(),
        1e-10,
    ));
    let hv = hv_instances(config.rng_seed, config.instances)?;
    checks.push(Check::new(
        "hidden_variable_repeated",
        hv.repeated,
        EXACT_TOL,
    ));
    checks.push(Check::new("hidden_variable_causal", hv.causal, EXACT_TOL));

    Ok(RunOutcome {
        table,
        checks,
        convention: Some(resolved.convention),
        probe: resolved.probe,
        summary: json!({
            "grid_points": grid.len(),
            "chains": points.len(),
            "hv_instances": config.instances,
        }),
    })
}

fn conjecture(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let limits = announce_oracle(config)?;
    let resolved = resolve(config)?;
    let grid = uniform_grid(config.t_max, config.t_steps)?;
    let points: Vec<(usize, f64)> = config
        .sorted_sites()
        .into_iter()
        .flat_map(|n| config.sorted_fields().into_iter().map(move |mu| (n, mu)))
        .collect();
    let reports: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&(n, mu)| {
            let oracle = ChainOracle::new(&config.params(n, mu)?, &limits)?;
            let r = oracle.conjecture_check(&grid, resolved.convention);
            Ok((r.max_deviation, r.worst_t))
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new(
        "conjecture",
        &[
            "n_sites",
            "mu_over_j",
            "max_deviation",
            "worst_t",
            "within_tolerance",
        ],
    );
    let mut checks: Vec<Check> = Vec::new();
    for (&(n, mu), &(dev, worst_t)) in points.iter().zip(&reports) {
        table.push(vec![
            n.into(),
            mu.into(),
            dev.into(),
            worst_t.into(),
            (dev <= ORACLE_TOL).into(),
        ]);
        let name = format!("pair_contraction_relation N={n}");
        match checks.iter_mut().find(|c| c.name == name) {
            Some(c) => *c = Check::new(name, c.max_deviation.max(dev), ORACLE_TOL),
            None => checks.push(Check::new(name, dev, ORACLE_TOL)),
        }
    }
    Ok(RunOutcome {
        table,
        checks,
        convention: Some(resolved.convention),
        probe: resolved.probe,
        summary: json!({ "grid_points": grid.len() }),
    })
}

fn hv(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let totals = hv_instances(config.rng_seed, config.instances)?;
    let example = plus_state_example()?;
    let example_dev = example
        .iter()
        .flatten()
        .map(|&(a, b)| (a - 0.25).abs().max((b - 0.25).abs()))
        .fold(0.0, f64::max);
    let mut table = Table::new("hv", &HV_COLUMNS);
    table.rows = totals.rows;
    let worked: Vec<Value> = example
        .iter()
        .enumerate()
        .flat_map(|(a1, row)| {
            row.iter().enumerate().map(move |(a2, &(direct, hidden))| {
                json!({ "a1": a1, "a2": a2, "direct": direct, "hidden_variable": hidden })
            })
        })
        .collect();
    Ok(RunOutcome {
        table,
        checks: vec![
            Check::new("hidden_variable_repeated", totals.repeated, EXACT_TOL),
            Check::new("hidden_variable_causal", totals.causal, EXACT_TOL),
            Check::new("repeated_completeness", totals.completeness, EXACT_TOL),
            Check::new("plus_state_quarter", example_dev, EXACT_TOL),
        ],
        convention: None,
        probe: None,
        summary: json!({
            "instances": config.instances,
            "base_seed": config.rng_seed,
            "plus_state_example": worked,
        }),
    })
}
