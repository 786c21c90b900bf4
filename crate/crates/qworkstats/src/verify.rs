//! Verification suites: every documented invariant run as a seeded,
//! deterministic batch with a machine-readable summary.
//!
//! Each suite reports its worst residual against a fixed tolerance. Most
//! suites pass when the residual stays at or below tolerance; the
//! counterexample-style suites (negative claims: a definition *must* break,
//! a quasi-probability *must* go negative) pass when the residual exceeds
//! their threshold. Identical configs produce byte-identical summaries.

use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::energetics::{
    energy_reports, family_numerator, quasiprob_distribution, requirement_residuals_for,
    sequential_energy_chain, tpm_distribution, weak_value, EnergeticsConfig, InitialEnergy,
};
use crate::error::Error;
use crate::measurement::{
    extend_model_commuting, induced_povm, instrument_apply, make_repeatable_model,
    outcome_branches, Outcome, Povm, RepeatableSpec,
};
use crate::opcore::{
    shannon_entropy, spectral_decompose, DensityState, Operator, DEGENERACY_TOL,
};
use crate::scenarios::{
    build_qubit_model, default_theta2_grid, figure2_sweep, haar_unitary_operator, initial_state,
    random_full_rank_state, random_hermitian, random_model, random_pure_state, ModelFlags,
    QubitScenarioConfig,
};
use crate::thermo::{projective_comparison, thermo_report};
use crate::workstats::{average_work, total_energy_change, work_reports};

/// Configuration for a verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Baseline trial count; per-suite counts scale linearly with it, with
    /// 200 reproducing each suite's documented count.
    pub trials: usize,
    pub max_dim_s: usize,
    pub max_dim_a: usize,
    /// Test hook: scales the pass tolerances. 1.0 for real runs.
    pub tolerance_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 200,
            max_dim_s: 4,
            max_dim_a: 4,
            tolerance_scale: 1.0,
        }
    }
}

/// How a suite's residual relates to its tolerance when passing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff max_residual <= tolerance.
    AtMost,
    /// Counterexample suite: pass iff max_residual > tolerance.
    Exceeds,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub trials: usize,
    pub dims: [usize; 2],
    pub all_pass: bool,
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn first_failure(&self) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| !s.pass)
    }
}

struct Suite {
    name: &'static str,
    base_trials: usize,
    tolerance: f64,
    comparison: Comparison,
    run: fn(&VerifyConfig, u64, usize) -> f64,
}

fn rng_for(cfg_seed: u64, suite_seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(cfg_seed ^ suite_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn dims_for(rng: &mut ChaCha12Rng, cfg: &VerifyConfig) -> (usize, usize, usize) {
    let dim_s = rng.random_range(2..=cfg.max_dim_s.max(2));
    let dim_a = rng.random_range(2..=cfg.max_dim_a.max(2));
    let n_out = rng.random_range(2..=dim_a);
    (dim_s, dim_a, n_out)
}

fn model_seed(rng: &mut ChaCha12Rng) -> u64 {
    rng.random::<u64>()
}

// ---------------------------------------------------------------- opcore --

fn suite_spectral_reconstruction(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=8);
        let h = random_hermitian(&mut rng, dim);
        let sd = spectral_decompose(&h, DEGENERACY_TOL).expect("hermitian");
        worst = worst.max((&sd.reconstruct() - &h).frobenius_norm());
    }
    worst
}

fn suite_partial_trace_linearity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let a = random_hermitian(&mut rng, da * db)
            .regrouped(vec![da, db])
            .expect("dims");
        let b = random_hermitian(&mut rng, da * db)
            .regrouped(vec![da, db])
            .expect("dims");
        let alpha = rng.random::<f64>() - 0.5;
        let beta = rng.random::<f64>() - 0.5;
        for keep in [&[0usize][..], &[1usize][..]] {
            let lhs = (&a.scale_re(alpha) + &b.scale_re(beta))
                .partial_trace(keep)
                .expect("keep");
            let rhs = &a.partial_trace(keep).expect("keep").scale_re(alpha)
                + &b.partial_trace(keep).expect("keep").scale_re(beta);
            worst = worst.max((&lhs - &rhs).frobenius_norm());
        }
        worst = worst.max((a.partial_trace(&[0]).expect("keep").trace() - a.trace()).norm());
    }
    worst
}

fn suite_tensor_trace_roundtrip(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let a = random_hermitian(&mut rng, da);
        let rho = random_full_rank_state(&mut rng, db);
        let back = a
            .tensor(rho.operator())
            .partial_trace(&[0])
            .expect("keep first");
        worst = worst.max((&back - &a).frobenius_norm());
    }
    worst
}

fn suite_entropy_additivity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let a = random_full_rank_state(&mut rng, da);
        let b = random_full_rank_state(&mut rng, db);
        worst = worst.max((a.tensor(&b).entropy() - a.entropy() - b.entropy()).abs());
    }
    worst
}

fn suite_entropy_orthogonal_mixture(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let block = rng.random_range(2..=3);
        let a = random_full_rank_state(&mut rng, block);
        let b = random_full_rank_state(&mut rng, block);
        let p = 0.1 + 0.8 * rng.random::<f64>();
        let dim = 2 * block;
        let mut mat = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for i in 0..block {
            for j in 0..block {
                mat[(i, j)] = a.matrix()[(i, j)] * C64::new(p, 0.0);
                mat[(block + i, block + j)] = b.matrix()[(i, j)] * C64::new(1.0 - p, 0.0);
            }
        }
        let mix = DensityState::from_matrix(vec![dim], mat).expect("valid");
        let expected =
            shannon_entropy(&[p, 1.0 - p]) + p * a.entropy() + (1.0 - p) * b.entropy();
        worst = worst.max((mix.entropy() - expected).abs());
    }
    worst
}

// ----------------------------------------------------------- measurement --

fn suite_born_rule(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model =
            random_model(model_seed(&mut rng), ds, da, nx, ModelFlags::default()).expect("model");
        let rho = random_full_rank_state(&mut rng, ds);
        let povm = induced_povm(&model).expect("povm");
        let mut total = 0.0;
        for x in model.outcomes() {
            let via_effect = povm.probability(x, &rho).expect("effect");
            let via_instrument = instrument_apply(&model, &rho, x)
                .expect("instrument")
                .trace()
                .re;
            worst = worst.max((via_effect - via_instrument).abs());
            total += via_instrument;
        }
        worst = worst.max((total - 1.0).abs());
    }
    worst
}

fn suite_gemenge_orthogonality(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model =
            random_model(model_seed(&mut rng), ds, da, nx, ModelFlags::default()).expect("model");
        let rho = random_full_rank_state(&mut rng, ds);
        let branches = outcome_branches(&model, &rho).expect("branches");
        for (i, a) in branches.iter().enumerate() {
            let Some(ja) = &a.joint_x else { continue };
            for b in &branches[i + 1..] {
                let Some(jb) = &b.joint_x else { continue };
                worst = worst.max(ja.operator().hs_inner(jb.operator()).norm());
            }
        }
    }
    worst
}

fn suite_unitality(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model =
            random_model(model_seed(&mut rng), ds, da, nx, ModelFlags::default()).expect("model");
        let d = ds * da;
        let max_mixed = Operator::identity(vec![ds, da]).scale_re(1.0 / d as f64);
        let u = model.premeasurement_unitary();
        let moved = &(u * &max_mixed) * &u.adjoint();
        let out = model.apply_objectification(&moved);
        worst = worst.max((&out - &max_mixed).frobenius_norm());
    }
    worst
}

fn random_projective_setup(
    rng: &mut ChaCha12Rng,
    dim: usize,
    per_outcome_v: bool,
) -> (Povm, RepeatableSpec) {
    // Random PVM from a Haar basis with a possibly degenerate split.
    let w = haar_unitary_operator(rng, vec![dim]);
    let n_out = rng.random_range(2..=dim);
    let base = dim / n_out;
    let extra = dim % n_out;
    let mut start = 0;
    let mut blocks = Vec::new();
    for k in 0..n_out {
        let size = base + usize::from(k < extra);
        blocks.push((start, size));
        start += size;
    }
    let mut outcomes = Vec::new();
    let mut effects = Vec::new();
    for (k, &(s, size)) in blocks.iter().enumerate() {
        let mut p = Operator::zeros(vec![dim]);
        for i in s..s + size {
            p = &p + &Operator::basis_projector(vec![dim], i);
        }
        outcomes.push(Outcome::new(format!("m{k}")));
        effects.push((&(&w * &p) * &w.adjoint()).hermitized());
    }
    let pvm = Povm::new(outcomes, effects).expect("projective by construction");

    // Mixture of two intra-support unitaries per outcome.
    let weights = {
        let q = 0.2 + 0.6 * rng.random::<f64>();
        vec![q, 1.0 - q]
    };
    let mut unitaries = Vec::new();
    for &(s, size) in &blocks {
        let mut row = Vec::new();
        for i in 0..weights.len() {
            let rotate = if per_outcome_v { true } else { i > 0 };
            let block_u = if rotate && size > 0 {
                haar_unitary_operator(rng, vec![size])
            } else {
                Operator::identity(vec![size.max(1)])
            };
            // Embed the block rotation inside the support, identity outside.
            let mut full = nalgebra::DMatrix::<C64>::identity(dim, dim);
            for r in 0..size {
                for c in 0..size {
                    full[(s + r, s + c)] = block_u.matrix()[(r, c)];
                }
            }
            let v = Operator::new(vec![dim], full).expect("square");
            row.push(&(&w * &v) * &w.adjoint());
        }
        unitaries.push(row);
    }
    // When per_outcome_v is set, make V_{x,i} identical across i.
    if per_outcome_v {
        for row in &mut unitaries {
            let first = row[0].clone();
            for v in row.iter_mut() {
                *v = first.clone();
            }
        }
    }
    (pvm, RepeatableSpec::new(weights, unitaries).expect("valid spec"))
}

fn suite_repeatability(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let (pvm, spec) = random_projective_setup(&mut rng, dim, false);
        let h = random_hermitian(&mut rng, dim);
        let model = make_repeatable_model(&pvm, &spec, &h, &h).expect("constructor");
        let rho = random_full_rank_state(&mut rng, dim);
        for x in model.outcomes() {
            let once = instrument_apply(&model, &rho, x).expect("instrument");
            let p = once.trace().re;
            if p < 1e-6 {
                continue;
            }
            let cond = DensityState::new(once.scale_re(1.0 / p).hermitized()).expect("state");
            let again = instrument_apply(&model, &cond, x).expect("instrument");
            worst = worst.max((again.trace().re - 1.0).abs());
        }
    }
    worst
}

fn suite_rank_bound(cfg: &VerifyConfig, seed: u64, _n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
    let (pvm, spec) = random_projective_setup(&mut rng, dim, false);
    let squeezed = spec.with_apparatus_dim(pvm.len()); // r·|X| = 2|X| > |X|
    let h = Operator::zeros(vec![dim]);
    match make_repeatable_model(&pvm, &squeezed, &h, &h) {
        Err(Error::RankBound { .. }) => 0.0,
        _ => 1.0,
    }
}

// ------------------------------------------------------------ energetics --

fn random_ensemble(
    rng: &mut ChaCha12Rng,
    dim: usize,
    parts: usize,
) -> (DensityState, Vec<(f64, DensityState)>) {
    let mut weights: Vec<f64> = (0..parts).map(|_| rng.random::<f64>() + 0.2).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let states: Vec<DensityState> = (0..parts)
        .map(|_| random_full_rank_state(rng, dim))
        .collect();
    let mut avg = Operator::zeros(vec![dim]);
    for (w, s) in weights.iter().zip(&states) {
        avg = &avg + &s.operator().scale_re(*w);
    }
    (
        DensityState::new(avg).expect("convex mix"),
        weights.into_iter().zip(states).collect(),
    )
}

fn requirement_suite(cfg: &VerifyConfig, seed: u64, n: usize, which: u8) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let config = EnergeticsConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model =
            random_model(model_seed(&mut rng), ds, da, nx, ModelFlags::default()).expect("model");
        let (rho, ensemble) = random_ensemble(&mut rng, ds, 3);
        let res = requirement_residuals_for(&model, &rho, &config, &ensemble, InitialEnergy::Family)
            .expect("residuals");
        worst = worst.max(match which {
            1 => res.req1,
            _ => res.req2,
        });
    }
    worst
}

fn suite_requirement1(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    requirement_suite(cfg, seed, n, 1)
}

fn suite_requirement2(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    requirement_suite(cfg, seed, n, 2)
}

fn suite_requirement3(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    // Constructed commuting cases: an energy-diagonal PVM measured ideally.
    let mut rng = rng_for(cfg.seed, seed);
    let config = EnergeticsConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let diag: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 3.0 - 1.5).collect();
        let h = Operator::from_diagonal(vec![dim], &diag).expect("diag");
        let split = rng.random_range(1..dim.max(2));
        let mut p = Operator::zeros(vec![dim]);
        for i in 0..split {
            p = &p + &Operator::basis_projector(vec![dim], i);
        }
        let q = &Operator::identity(vec![dim]) - &p;
        let pvm = Povm::new(
            vec![Outcome::new("lo"), Outcome::new("hi")],
            vec![p, q],
        )
        .expect("projective");
        let model = crate::measurement::make_ideal_model(&pvm, &h, &h).expect("constructor");
        let (rho, ensemble) = random_ensemble(&mut rng, dim, 2);
        let res = requirement_residuals_for(&model, &rho, &config, &ensemble, InitialEnergy::Family)
            .expect("residuals");
        if let Some(r3) = res.req3 {
            worst = worst.max(r3);
        } else {
            worst = f64::INFINITY; // commuting construction must be non-contextual
        }
    }
    worst
}

fn counterexample_suite(cfg: &VerifyConfig, seed: u64, n: usize, initial: InitialEnergy) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let config = EnergeticsConfig::default();
    let mut best: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model =
            random_model(model_seed(&mut rng), ds, da, nx, ModelFlags::default()).expect("model");
        let (rho, ensemble) = random_ensemble(&mut rng, ds, 3);
        let res = requirement_residuals_for(&model, &rho, &config, &ensemble, initial)
            .expect("residuals");
        best = best.max(match initial {
            InitialEnergy::ProjectedExpectation => res.req1.max(res.req2),
            _ => res.req2,
        });
    }
    best
}

fn suite_eq6_counterexample(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    counterexample_suite(cfg, seed, n, InitialEnergy::ProjectedExpectation)
}

fn suite_eq13_counterexample(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    counterexample_suite(cfg, seed, n, InitialEnergy::UnconditionalMean)
}

fn suite_family_gamma_necessity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    // A wrong gamma at either end must break Requirement 1 somewhere.
    let mut rng = rng_for(cfg.seed, seed);
    let mut best: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model =
            random_model(model_seed(&mut rng), ds, da, nx, ModelFlags::default()).expect("model");
        let rho = random_full_rank_state(&mut rng, ds);
        let rho_tau = DensityState::new(
            model
                .premeasured(&rho)
                .partial_trace(&[0])
                .expect("keep")
                .hermitized(),
        )
        .expect("state");
        let mut sum0 = C64::ZERO;
        let mut sum_tau = C64::ZERO;
        for x in model.outcomes() {
            sum0 += family_numerator(&model, rho.operator(), x, model.h_s0(), 1.0, 0.5)
                .expect("family");
            sum_tau += family_numerator(&model, rho.operator(), x, model.h_s_tau(), 0.0, 0.5)
                .expect("family");
        }
        let bad0 = (sum0 - C64::new(rho.expectation(model.h_s0()), 0.0)).norm();
        let bad_tau =
            (sum_tau - C64::new(rho_tau.expectation(model.h_s_tau()), 0.0)).norm();
        best = best.max(bad0.min(bad_tau));
    }
    best
}

fn suite_weak_value_imaginary(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let rho = random_full_rank_state(&mut rng, dim);
        let h = random_hermitian(&mut rng, dim);
        let m = random_full_rank_state(&mut rng, dim).operator().scale_re(0.9);
        let prod = Operator::new(vec![dim], m.matrix() * h.matrix() * rho.matrix())
            .expect("square");
        if prod.hermiticity_violation() < 1e-10 {
            worst = worst.max(weak_value(&rho, &m, &h).expect("prob").im.abs());
        }
        // Constructed commuting instance always applies.
        let d1: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let d2: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let mut probs: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let dh = Operator::from_diagonal(vec![dim], &d1).expect("diag");
        let dm = Operator::from_diagonal(vec![dim], &d2).expect("diag");
        let dr = DensityState::new(Operator::from_diagonal(vec![dim], &probs).expect("diag"))
            .expect("state");
        worst = worst.max(weak_value(&dr, &dm, &dh).expect("prob").im.abs());
    }
    worst
}

fn suite_sequential_additivity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let config = EnergeticsConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let ds = rng.random_range(2..=cfg.max_dim_s.max(2));
        let models: Vec<_> = (0..3)
            .map(|_| {
                random_model(model_seed(&mut rng), ds, 2, 2, ModelFlags::default())
                    .expect("model")
            })
            .collect();
        let hams: Vec<Operator> = (0..4).map(|_| random_hermitian(&mut rng, ds)).collect();
        let rho = random_full_rank_state(&mut rng, ds);
        let mut outcomes = Vec::new();
        let mut state = rho.clone();
        for model in &models {
            let branches = outcome_branches(model, &state).expect("branches");
            let best = branches
                .iter()
                .filter(|b| b.defined)
                .max_by(|a, b| a.prob.total_cmp(&b.prob))
                .expect("some branch");
            outcomes.push(best.outcome.clone());
            state = best.rho_x.clone().expect("defined");
        }
        let chain = sequential_energy_chain(&models, &rho, &outcomes, &hams, &config)
            .expect("chain");
        let total: f64 = chain.iter().map(|s| s.delta_e).sum();

        let mut num = Operator::new(vec![ds], hams[0].matrix() * rho.matrix()).expect("square");
        let mut den = rho.operator().clone();
        for (model, x) in models.iter().zip(&outcomes) {
            num = crate::measurement::instrument_apply_operator(model, &num, x).expect("map");
            den = crate::measurement::instrument_apply_operator(model, &den, x).expect("map");
        }
        let p = den.trace().re;
        let e_first = num.trace().re / p;
        let rho_final = DensityState::new(den.scale_re(1.0 / p).hermitized()).expect("state");
        let e_last = rho_final.expectation(&hams[3]);
        worst = worst.max((total - (e_last - e_first)).abs());
    }
    worst
}

fn suite_tpm_exactness(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let u = haar_unitary_operator(&mut rng, vec![dim]);
        let h0 = random_hermitian(&mut rng, dim);
        let h_tau = random_hermitian(&mut rng, dim);
        let rho = random_full_rank_state(&mut rng, dim);
        let sd0 = spectral_decompose(&h0, DEGENERACY_TOL).expect("hermitian");
        let sd_tau = spectral_decompose(&h_tau, DEGENERACY_TOL).expect("hermitian");
        for b in tpm_distribution(&u, &h0, &h_tau, &rho).expect("tpm") {
            if b.defined {
                let want = sd_tau.eigenvalues[b.n] - sd0.eigenvalues[b.m];
                worst = worst.max((b.delta_e.expect("defined") - want).abs());
            }
        }
    }
    worst
}

fn quasiprob_suite(cfg: &VerifyConfig, seed: u64, n: usize, normalization: bool) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let u = haar_unitary_operator(&mut rng, vec![dim]);
        let h0 = random_hermitian(&mut rng, dim);
        let h_tau = random_hermitian(&mut rng, dim);
        let rho = random_full_rank_state(&mut rng, dim);
        let qp = quasiprob_distribution(&u, &h0, &h_tau, &rho).expect("quasi");
        if normalization {
            let total: f64 = qp.quasi.iter().flatten().sum();
            worst = worst.max((total - 1.0).abs());
        } else {
            for (nn, &pn) in qp.probs.iter().enumerate() {
                let lhs: f64 = qp
                    .quasi
                    .iter()
                    .enumerate()
                    .map(|(m, row)| row[nn] * (qp.eps_final[nn] - qp.eps_initial[m]))
                    .sum();
                if let Some(de) = qp.delta_e[nn] {
                    worst = worst.max((lhs - pn * de).abs());
                }
            }
        }
    }
    worst
}

fn suite_quasiprob_identity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    quasiprob_suite(cfg, seed, n, false)
}

fn suite_quasiprob_normalization(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    quasiprob_suite(cfg, seed, n, true)
}

fn suite_quasiprob_negativity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    // Counterexample search over coherent pure states: report the largest
    // negativity magnitude found.
    let mut rng = rng_for(cfg.seed, seed);
    let mut best: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let u = haar_unitary_operator(&mut rng, vec![dim]);
        let h0 = random_hermitian(&mut rng, dim);
        let h_tau = random_hermitian(&mut rng, dim);
        let rho = random_pure_state(&mut rng, dim);
        let qp = quasiprob_distribution(&u, &h0, &h_tau, &rho).expect("quasi");
        best = best.max(-qp.most_negative());
    }
    best
}

// ------------------------------------------------------------- workstats --

fn suite_vanishing_work(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let flags = ModelFlags {
        commuting_pointer: true,
        energy_conserving: true,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model = random_model(model_seed(&mut rng), ds, da, nx, flags).expect("model");
        let rho = random_full_rank_state(&mut rng, ds);
        for rep in work_reports(&model, &rho).expect("commuting pointer") {
            worst = worst.max(rep.work.abs());
        }
    }
    worst
}

fn suite_work_average_consistency(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let flags = ModelFlags {
        commuting_pointer: true,
        energy_conserving: false,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model = random_model(model_seed(&mut rng), ds, da, nx, flags).expect("model");
        let rho = random_full_rank_state(&mut rng, ds);
        let weighted: f64 = work_reports(&model, &rho)
            .expect("commuting pointer")
            .iter()
            .map(|r| r.prob * r.work)
            .sum();
        worst = worst.max((weighted - average_work(&model, &rho)).abs());
    }
    worst
}

// ----------------------------------------------------------------- thermo --

fn thermo_suite(cfg: &VerifyConfig, seed: u64, n: usize, which: u8) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let flags = ModelFlags {
        commuting_pointer: true,
        energy_conserving: false,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model = random_model(model_seed(&mut rng), ds, da, nx, flags).expect("model");
        let rho = random_full_rank_state(&mut rng, ds);
        let rep = thermo_report(&model, &rho, 1.0).expect("commuting pointer");
        let v = match which {
            0 => (-rep.w_irr).max(0.0),
            1 => (-rep.w_inc_irr).max(0.0),
            2 => (rep.w_inc_irr - rep.w_irr).max(0.0),
            _ => {
                let line1 = rep.d_f_s
                    + rep.d_f_a
                    + rep.k_t * (rep.i_sa + rep.shannon_h - rep.holevo_x);
                let line2 = rep.d_f_sa
                    + rep.k_t * (rep.i_sa - rep.i_sa_prime + rep.shannon_h - rep.holevo_x);
                (line1 - rep.avg_work)
                    .abs()
                    .max((line2 - rep.avg_work).abs())
            }
        };
        worst = worst.max(v);
    }
    worst
}

fn suite_second_law_noninclusive(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    thermo_suite(cfg, seed, n, 0)
}

fn suite_second_law_inclusive(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    thermo_suite(cfg, seed, n, 1)
}

fn suite_work_ordering(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    thermo_suite(cfg, seed, n, 2)
}

fn suite_eq18_decomposition(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    thermo_suite(cfg, seed, n, 3)
}

fn suite_repeatable_entropy_identity(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2));
        let (pvm, spec) = random_projective_setup(&mut rng, dim, false);
        let h = random_hermitian(&mut rng, dim);
        let model = make_repeatable_model(&pvm, &spec, &h, &h).expect("constructor");
        let rho = random_full_rank_state(&mut rng, dim);
        let s_xi = model.xi().entropy();
        for b in outcome_branches(&model, &rho).expect("branches") {
            if b.defined {
                worst = worst.max((b.xi_x.expect("defined").entropy() - s_xi).abs());
            }
        }
    }
    worst
}

fn suite_eq24_ordering(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=cfg.max_dim_s.max(2)).max(3);
        let (pvm, spec) = random_projective_setup(&mut rng, dim, false);
        let xi = random_full_rank_state(&mut rng, dim);
        let rho = if rng.random::<f64>() < 0.5 {
            random_full_rank_state(&mut rng, dim)
        } else {
            random_pure_state(&mut rng, dim)
        };
        let cmp = projective_comparison(&pvm, &spec, &xi, &rho, 1.0).expect("comparison");
        // The ideal-noisy gap is k_B T times the outcome entropy, which is
        // the difference of the two reduced forms.
        let gap_identity = (cmp.w_irr_ideal - cmp.w_irr_noisy)
            - (cmp.w_irr_ideal_reduced - cmp.w_inc_reduced);
        let v = [
            (cmp.w_irr_ideal - cmp.w_irr_rep).max(0.0),
            (cmp.w_irr_noisy - cmp.w_irr_ideal).max(0.0),
            (cmp.w_inc_rep - cmp.w_inc_ideal).abs(),
            (cmp.w_inc_ideal - cmp.w_inc_noisy).abs(),
            (cmp.w_irr_rep - cmp.w_irr_rep_reduced).abs(),
            (cmp.w_irr_ideal - cmp.w_irr_ideal_reduced).abs(),
            (cmp.w_inc_ideal - cmp.w_inc_reduced).abs(),
            (cmp.w_irr_noisy - cmp.w_inc_reduced).abs(),
            gap_identity.abs(),
        ];
        worst = worst.max(v.into_iter().fold(0.0, f64::max));
    }
    worst
}

fn suite_uhlmann_equality(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    // V_{x,i} = V_x for all i must give zero gap.
    let mut rng = rng_for(cfg.seed, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(3..=cfg.max_dim_s.max(3));
        let (pvm, spec) = random_projective_setup(&mut rng, dim, true);
        let xi = random_full_rank_state(&mut rng, dim);
        let rho = random_pure_state(&mut rng, dim);
        let cmp = projective_comparison(&pvm, &spec, &xi, &rho, 1.0).expect("comparison");
        worst = worst.max((cmp.w_irr_rep - cmp.w_irr_ideal).abs());
    }
    worst
}

fn suite_uhlmann_gap(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    // A genuinely mixed intra-block rotation must open a strict gap
    // somewhere in the batch.
    let mut rng = rng_for(cfg.seed, seed);
    let mut best: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(3..=cfg.max_dim_s.max(3));
        let (pvm, spec) = random_projective_setup(&mut rng, dim, false);
        let xi = random_full_rank_state(&mut rng, dim);
        let rho = random_pure_state(&mut rng, dim);
        let cmp = projective_comparison(&pvm, &spec, &xi, &rho, 1.0).expect("comparison");
        best = best.max(cmp.w_irr_rep - cmp.w_irr_ideal);
    }
    best
}

fn suite_extension_invariance(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    let flags = ModelFlags {
        commuting_pointer: true,
        energy_conserving: false,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let model = random_model(model_seed(&mut rng), ds, da, nx, flags).expect("model");
        let extended = extend_model_commuting(&model).expect("commuting pointer");
        let rho = random_full_rank_state(&mut rng, ds);
        for b in outcome_branches(&model, &rho).expect("branches") {
            if !b.defined {
                continue;
            }
            let base = total_energy_change(&model, &rho, &b.outcome).expect("defined");
            let ext = total_energy_change(&extended, &rho, &b.outcome).expect("defined");
            worst = worst.max((base - ext).abs());
        }
    }
    worst
}

// -------------------------------------------------------------- scenarios --

fn suite_figure2_anchor_coincidence(_cfg: &VerifyConfig, _seed: u64, _n: usize) -> f64 {
    // Δθ = 0: the conditional and trajectory-reference changes coincide.
    let cfg = QubitScenarioConfig::default();
    let rows = figure2_sweep(&cfg, &[std::f64::consts::FRAC_PI_2]).expect("sweep");
    let row = &rows[0];
    (row.d_e_plus_e.expect("defined") - row.d_e_ref_plus_e.expect("defined")).abs()
}

fn suite_figure2_anchor_zero_work(_cfg: &VerifyConfig, _seed: u64, _n: usize) -> f64 {
    // θ₂ = 0: all four works vanish.
    let cfg = QubitScenarioConfig::default();
    let rows = figure2_sweep(&cfg, &[0.0]).expect("sweep");
    rows[0]
        .work
        .values()
        .fold(0.0_f64, |acc, w| acc.max(w.abs()))
}

fn suite_figure2_reference_constant(_cfg: &VerifyConfig, _seed: u64, _n: usize) -> f64 {
    // ΔẼ(+,e) = +1/2 at every grid point for the equatorial initial state.
    let cfg = QubitScenarioConfig::default();
    let rows = figure2_sweep(&cfg, &default_theta2_grid(61)).expect("sweep");
    rows.iter()
        .map(|r| (r.d_e_ref_plus_e.expect("defined") - 0.5).abs())
        .fold(0.0, f64::max)
}

fn suite_model_determinism(cfg: &VerifyConfig, seed: u64, n: usize) -> f64 {
    let mut rng = rng_for(cfg.seed, seed);
    for _ in 0..n.min(5) {
        let (ds, da, nx) = dims_for(&mut rng, cfg);
        let s = model_seed(&mut rng);
        let a = random_model(s, ds, da, nx, ModelFlags::default()).expect("model");
        let b = random_model(s, ds, da, nx, ModelFlags::default()).expect("model");
        if a != b {
            return 1.0;
        }
    }
    0.0
}

fn suite_appendix_e_energy_anchor(cfg: &VerifyConfig, seed: u64, _n: usize) -> f64 {
    // Post-measurement conditional energies of the scenario: ±1/2 exactly.
    let mut rng = rng_for(cfg.seed, seed);
    let scen = QubitScenarioConfig {
        theta2: rng.random::<f64>() * std::f64::consts::PI,
        q: 0.2 + 0.6 * rng.random::<f64>(),
        ..Default::default()
    };
    let model = build_qubit_model(&scen).expect("scenario");
    let rho = initial_state(&scen);
    let reports = energy_reports(&model, &rho, &EnergeticsConfig::default()).expect("reports");
    let mut worst: f64 = 0.0;
    for rep in reports {
        let want = if rep.outcome.parts()[1] == "e" { 0.5 } else { -0.5 };
        worst = worst.max((rep.e_after - want).abs());
    }
    worst
}

const SUITES: &[Suite] = &[
    Suite { name: "spectral_reconstruction", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_spectral_reconstruction },
    Suite { name: "partial_trace_linearity", base_trials: 200, tolerance: 1e-12, comparison: Comparison::AtMost, run: suite_partial_trace_linearity },
    Suite { name: "tensor_trace_roundtrip", base_trials: 200, tolerance: 1e-12, comparison: Comparison::AtMost, run: suite_tensor_trace_roundtrip },
    Suite { name: "entropy_additivity", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_entropy_additivity },
    Suite { name: "entropy_orthogonal_mixture", base_trials: 100, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_entropy_orthogonal_mixture },
    Suite { name: "born_rule_consistency", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_born_rule },
    Suite { name: "gemenge_orthogonality", base_trials: 100, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_gemenge_orthogonality },
    Suite { name: "measurement_unitality", base_trials: 100, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_unitality },
    Suite { name: "repeatable_double_application", base_trials: 50, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_repeatability },
    Suite { name: "repeatable_rank_bound", base_trials: 1, tolerance: 0.5, comparison: Comparison::AtMost, run: suite_rank_bound },
    Suite { name: "requirement1", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_requirement1 },
    Suite { name: "requirement2", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_requirement2 },
    Suite { name: "requirement3_commuting", base_trials: 50, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_requirement3 },
    Suite { name: "eq6_initial_energy_fails", base_trials: 50, tolerance: 1e-3, comparison: Comparison::Exceeds, run: suite_eq6_counterexample },
    Suite { name: "eq13_reference_fails_mixing", base_trials: 50, tolerance: 1e-3, comparison: Comparison::Exceeds, run: suite_eq13_counterexample },
    Suite { name: "family_gamma_necessity", base_trials: 50, tolerance: 1e-3, comparison: Comparison::Exceeds, run: suite_family_gamma_necessity },
    Suite { name: "weak_value_imaginary_part", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_weak_value_imaginary },
    Suite { name: "sequential_additivity", base_trials: 100, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_sequential_additivity },
    Suite { name: "tpm_eigenvalue_differences", base_trials: 100, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_tpm_exactness },
    Suite { name: "quasiprob_identity", base_trials: 100, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_quasiprob_identity },
    Suite { name: "quasiprob_normalization", base_trials: 100, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_quasiprob_normalization },
    Suite { name: "quasiprob_negativity_found", base_trials: 1000, tolerance: 1e-12, comparison: Comparison::Exceeds, run: suite_quasiprob_negativity },
    Suite { name: "vanishing_work", base_trials: 100, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_vanishing_work },
    Suite { name: "work_average_consistency", base_trials: 200, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_work_average_consistency },
    Suite { name: "second_law_noninclusive", base_trials: 200, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_second_law_noninclusive },
    Suite { name: "second_law_inclusive", base_trials: 200, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_second_law_inclusive },
    Suite { name: "nonrecoverable_work_ordering", base_trials: 200, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_work_ordering },
    Suite { name: "average_work_decomposition", base_trials: 200, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_eq18_decomposition },
    Suite { name: "repeatable_entropy_identity", base_trials: 50, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_repeatable_entropy_identity },
    Suite { name: "projective_class_ordering", base_trials: 50, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_eq24_ordering },
    Suite { name: "uhlmann_equality_same_v", base_trials: 25, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_uhlmann_equality },
    Suite { name: "uhlmann_gap_strict", base_trials: 25, tolerance: 1e-6, comparison: Comparison::Exceeds, run: suite_uhlmann_gap },
    Suite { name: "extension_invariance", base_trials: 50, tolerance: 1e-9, comparison: Comparison::AtMost, run: suite_extension_invariance },
    Suite { name: "figure2_anchor_coincidence", base_trials: 1, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_figure2_anchor_coincidence },
    Suite { name: "figure2_anchor_zero_work", base_trials: 1, tolerance: 1e-10, comparison: Comparison::AtMost, run: suite_figure2_anchor_zero_work },
    Suite { name: "figure2_reference_constant", base_trials: 1, tolerance: 1e-12, comparison: Comparison::AtMost, run: suite_figure2_reference_constant },
    Suite { name: "scenario_energy_anchor", base_trials: 1, tolerance: 1e-12, comparison: Comparison::AtMost, run: suite_appendix_e_energy_anchor },
    Suite { name: "generator_determinism", base_trials: 5, tolerance: 0.5, comparison: Comparison::AtMost, run: suite_model_determinism },
];

/// Runs every suite and collects the summary.
pub fn run_all(cfg: &VerifyConfig) -> VerifySummary {
    let mut suites = Vec::with_capacity(SUITES.len());
    for (idx, suite) in SUITES.iter().enumerate() {
        let n = (cfg.trials * suite.base_trials).div_ceil(200).max(1);
        let raw = (suite.run)(cfg, idx as u64 + 1, n);
        // JSON has no infinities; a non-finite residual is an unambiguous
        // failure for at-most suites either way.
        let residual = if raw.is_finite() { raw } else { f64::MAX };
        let tolerance = match suite.comparison {
            Comparison::AtMost => suite.tolerance * cfg.tolerance_scale,
            Comparison::Exceeds => suite.tolerance,
        };
        let pass = match suite.comparison {
            Comparison::AtMost => residual <= tolerance,
            Comparison::Exceeds => residual > tolerance,
        };
        suites.push(SuiteResult {
            name: suite.name.to_string(),
            trials: n,
            max_residual: residual,
            tolerance,
            comparison: suite.comparison,
            pass,
        });
    }
    let all_pass = suites.iter().all(|s| s.pass);
    VerifySummary {
        seed: cfg.seed,
        trials: cfg.trials,
        dims: [cfg.max_dim_s, cfg.max_dim_a],
        all_pass,
        suites,
    }
}
