//! The two-level sequential-measurement scenario, its parameter sweep, and
//! seeded random-model generators for the property suites.
//!
//! The scenario measures a qubit twice: first projectively along the
//! |θ₂,±⟩ basis (recorded by a qubit apparatus A), then by a two-outcome
//! POVM that drives the system to |e⟩ or |g⟩ (recorded by a four-level
//! register B). Both records are read jointly, giving outcomes (±, e/g).
//! Everything is expressed in units of ħω.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::energetics::{energy_reports, EnergeticsConfig};
use crate::error::{Error, Result};
use crate::measurement::{MeasurementModel, Outcome, PointerObservable};
use crate::opcore::{spectral_decompose, DensityState, Operator, DEGENERACY_TOL};
use crate::workstats::work_reports;

/// Parameters of the two-level scenario.
///
/// `theta1` fixes the initial pure state |θ₁,+⟩, `theta2` the basis of the
/// first measurement, `q` the weight of register B's |1⟩ component (the
/// probability that the second measurement reports `e`), and `omega` the
/// energy unit (ħω = 1 by default).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitScenarioConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub q: f64,
    pub omega: f64,
}

impl Default for QubitScenarioConfig {
    fn default() -> Self {
        Self {
            theta1: FRAC_PI_2,
            theta2: FRAC_PI_2,
            q: 0.5,
            omega: 1.0,
        }
    }
}

impl QubitScenarioConfig {
    fn check(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "q must lie strictly inside (0,1), got {}",
                self.q
            )));
        }
        if !self.theta1.is_finite() || !self.theta2.is_finite() || !self.omega.is_finite() {
            return Err(Error::InvalidConfig("angles and omega must be finite".into()));
        }
        Ok(())
    }
}

/// Amplitudes of |θ,±⟩ = ±cos(θ/2)|g/e⟩ + sin(θ/2)|e/g⟩ in the (g, e) basis.
pub fn theta_state(theta: f64, plus: bool) -> [C64; 2] {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    if plus {
        [C64::new(c, 0.0), C64::new(s, 0.0)]
    } else {
        [C64::new(s, 0.0), C64::new(-c, 0.0)]
    }
}

/// Initial system state |θ₁,+⟩⟨θ₁,+| of the scenario.
pub fn initial_state(cfg: &QubitScenarioConfig) -> DensityState {
    let amps = theta_state(cfg.theta1, true);
    DensityState::pure(vec![2], &amps).expect("unit vector")
}

/// The four scenario outcomes in a fixed order.
pub fn scenario_outcomes() -> [Outcome; 4] {
    [
        Outcome::tuple(["+", "e"]),
        Outcome::tuple(["+", "g"]),
        Outcome::tuple(["-", "e"]),
        Outcome::tuple(["-", "g"]),
    ]
}

/// Builds the sequential two-level measurement model.
///
/// System: H_S = (ω/2)(|e⟩⟨e| - |g⟩⟨g|). Apparatus: A ⊗ B with dims 2 and
/// 4, H_A = ω·1, H_B = ω Σ_n n `P_B[n]`, prepared in |0⟩⟨0| ⊗ (q `P_B[1]` +
/// (1-q) `P_B[2]`). The premeasurement is U = U_{S+B} U_{S+A}: first the
/// θ₂-controlled pointer write on A, then the four-line basis map on S⊗B.
/// The basis map is completed off the populated subspace by its own inverse
/// lines (a self-inverse permutation), which also conserves H_S + H_B
/// exactly; the completion never acts on the support of ρ ⊗ ξ_B. The
/// pointer is the joint eigenbasis of the two records with outcomes
/// (±, e/g).
pub fn build_qubit_model(cfg: &QubitScenarioConfig) -> Result<MeasurementModel> {
    cfg.check()?;
    let w = cfg.omega;
    let full_dims = [2usize, 2, 4];

    // θ₂-controlled write of |φ_±⟩ = (|0⟩ ± |1⟩)/√2 onto A.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r_plus = Operator::from_rows(
        vec![2],
        &[
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
        ],
    )?;
    let r_minus = Operator::from_rows(
        vec![2],
        &[
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(-s, 0.0), C64::new(s, 0.0)],
        ],
    )?;
    let plus = theta_state(cfg.theta2, true);
    let minus = theta_state(cfg.theta2, false);
    let proj_plus = Operator::ket_bra(vec![2], &plus, &plus)?;
    let proj_minus = Operator::ket_bra(vec![2], &minus, &minus)?;
    let u_sa = &proj_plus.tensor(&r_plus) + &proj_minus.tensor(&r_minus);

    // Basis map on S⊗B: swaps (g,1)↔(e,0) and (e,2)↔(g,3).
    let mut u_sb_mat = DMatrix::<C64>::identity(8, 8);
    for (a, b) in [(1usize, 4usize), (6, 3)] {
        u_sb_mat[(a, a)] = C64::ZERO;
        u_sb_mat[(b, b)] = C64::ZERO;
        u_sb_mat[(a, b)] = C64::ONE;
        u_sb_mat[(b, a)] = C64::ONE;
    }
    let u_sb = Operator::new(vec![2, 4], u_sb_mat)?;

    let u_sa_full = u_sa.embed(&full_dims, &[0, 1])?;
    let u_sb_full = u_sb.embed(&full_dims, &[0, 2])?;
    let u = (&u_sb_full * &u_sa_full).regrouped(vec![2, 8])?;

    // ξ = |0⟩⟨0|_A ⊗ (q P_B[1] + (1-q) P_B[2]).
    let xi_a = Operator::basis_projector(vec![2], 0);
    let xi_b = Operator::from_diagonal(vec![4], &[0.0, cfg.q, 1.0 - cfg.q, 0.0])?;
    let xi = DensityState::new(xi_a.tensor(&xi_b).regrouped(vec![8])?)?;

    // Joint pointer: P_A^± ⊗ P_B^{e/g}.
    let phi_plus = [C64::new(s, 0.0), C64::new(s, 0.0)];
    let phi_minus = [C64::new(s, 0.0), C64::new(-s, 0.0)];
    let p_a_plus = Operator::ket_bra(vec![2], &phi_plus, &phi_plus)?;
    let p_a_minus = Operator::ket_bra(vec![2], &phi_minus, &phi_minus)?;
    let p_b_e = Operator::from_diagonal(vec![4], &[1.0, 1.0, 0.0, 0.0])?;
    let p_b_g = Operator::from_diagonal(vec![4], &[0.0, 0.0, 1.0, 1.0])?;
    let [o_pe, o_pg, o_me, o_mg] = scenario_outcomes();
    let pointer = PointerObservable::new(
        vec![o_pe, o_pg, o_me, o_mg],
        vec![
            p_a_plus.tensor(&p_b_e).regrouped(vec![8])?,
            p_a_plus.tensor(&p_b_g).regrouped(vec![8])?,
            p_a_minus.tensor(&p_b_e).regrouped(vec![8])?,
            p_a_minus.tensor(&p_b_g).regrouped(vec![8])?,
        ],
    )?;

    let h_s = Operator::from_diagonal(vec![2], &[-w / 2.0, w / 2.0])?;
    let h_a_part = Operator::identity(vec![2]).scale_re(w);
    let h_b = Operator::from_diagonal(vec![4], &[0.0, w, 2.0 * w, 3.0 * w])?;
    let h_a = (&h_a_part.tensor(&Operator::identity(vec![4]))
        + &Operator::identity(vec![2]).tensor(&h_b))
        .regrouped(vec![8])?;

    MeasurementModel::new(xi, u, pointer, h_s.clone(), h_s, h_a.clone(), h_a)
}

/// One row of the Fig.-2-style sweep over θ₂.
///
/// `delta_theta` is π/2 - θ₂. Conditional quantities for outcomes whose
/// probability falls below the floor are reported as gaps (`None` /
/// missing map entries), not errors.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub delta_theta: f64,
    pub d_e_plus_e: Option<f64>,
    pub d_e_ref_plus_e: Option<f64>,
    pub work: BTreeMap<Outcome, f64>,
    pub probs: BTreeMap<Outcome, f64>,
}

/// Default sweep grid: `n` values of θ₂ with Δθ = π/2 - θ₂ spanning
/// [-π/2, π/2] inclusive.
pub fn default_theta2_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    (0..n)
        .map(|i| {
            let delta = -FRAC_PI_2 + PI * i as f64 / (n - 1) as f64;
            FRAC_PI_2 - delta
        })
        .collect()
}

/// Sweeps the scenario over a θ₂ grid, reporting the conditional energy
/// change of the (+, e) outcome along with all four works and probabilities.
pub fn figure2_sweep(
    cfg_base: &QubitScenarioConfig,
    theta2_grid: &[f64],
) -> Result<Vec<SweepRow>> {
    let config = EnergeticsConfig::default();
    let plus_e = Outcome::tuple(["+", "e"]);
    let mut rows = Vec::with_capacity(theta2_grid.len());
    for &theta2 in theta2_grid {
        let cfg = QubitScenarioConfig { theta2, ..*cfg_base };
        let model = build_qubit_model(&cfg)?;
        let rho = initial_state(&cfg);

        let mut probs = BTreeMap::new();
        for b in crate::measurement::outcome_branches(&model, &rho)? {
            probs.insert(b.outcome.clone(), b.prob);
        }
        let mut d_e_plus_e = None;
        let mut d_e_ref_plus_e = None;
        for rep in energy_reports(&model, &rho, &config)? {
            if rep.outcome == plus_e {
                d_e_plus_e = Some(rep.delta_e);
                d_e_ref_plus_e = Some(rep.delta_e_reference);
            }
        }
        let mut work = BTreeMap::new();
        for rep in work_reports(&model, &rho)? {
            work.insert(rep.outcome.clone(), rep.work);
        }
        rows.push(SweepRow {
            delta_theta: FRAC_PI_2 - theta2,
            d_e_plus_e,
            d_e_ref_plus_e,
            work,
            probs,
        });
    }
    Ok(rows)
}

/// Structural constraints for [`random_model`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelFlags {
    /// Make the pointer sectors commute with H_A(τ).
    pub commuting_pointer: bool,
    /// Make U commute with the (then time-constant) total Hamiltonian.
    pub energy_conserving: bool,
}

fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn ginibre(rng: &mut ChaCha12Rng, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng))
    })
}

/// Haar-distributed random unitary via QR of a Ginibre matrix with the
/// standard phase fix.
pub fn haar_unitary(rng: &mut ChaCha12Rng, dim: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, dim).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random unitary wrapped as an [`Operator`] with the given dims.
pub fn haar_unitary_operator(rng: &mut ChaCha12Rng, dims: Vec<usize>) -> Operator {
    let dim: usize = dims.iter().product();
    Operator::new(dims, haar_unitary(rng, dim)).expect("square by construction")
}

/// Random Hermitian operator with Gaussian entries.
pub fn random_hermitian(rng: &mut ChaCha12Rng, dim: usize) -> Operator {
    let g = ginibre(rng, dim);
    Operator::new(vec![dim], (&g + g.adjoint()) * C64::new(0.5, 0.0)).expect("square")
}

/// Random full-rank state: a normalized Wishart matrix mixed with a sliver
/// of the maximally mixed state so the minimum eigenvalue stays well above
/// the positivity tolerance.
pub fn random_full_rank_state(rng: &mut ChaCha12Rng, dim: usize) -> DensityState {
    let g = ginibre(rng, dim);
    let w = &g * g.adjoint();
    let tr = w.diagonal().sum().re;
    let base = w / C64::new(tr, 0.0);
    let mixed = base * C64::new(0.95, 0.0)
        + DMatrix::<C64>::identity(dim, dim) * C64::new(0.05 / dim as f64, 0.0);
    DensityState::from_matrix(vec![dim], mixed).expect("valid by construction")
}

/// Random pure state.
pub fn random_pure_state(rng: &mut ChaCha12Rng, dim: usize) -> DensityState {
    let amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(standard_normal(rng), standard_normal(rng)))
        .collect();
    DensityState::pure(vec![dim], &amps).expect("nonzero with probability one")
}

/// Deterministic random measurement model.
///
/// The pointer sectors partition a Haar-random apparatus basis into
/// `n_outcomes` groups. With `commuting_pointer`, H_A(τ) is drawn diagonal
/// in that same basis. With `energy_conserving`, the Hamiltonians are made
/// time-constant and U is the exponential of a Hermitian generator
/// block-diagonal in the total-energy eigenbasis, so [U, H] = 0 up to
/// eigensolve error. The same seed always produces the identical model.
pub fn random_model(
    seed: u64,
    dim_s: usize,
    dim_a: usize,
    n_outcomes: usize,
    flags: ModelFlags,
) -> Result<MeasurementModel> {
    if dim_s < 2 || dim_a < 2 {
        return Err(Error::DimensionMismatch(
            "system and apparatus need dimension at least 2".into(),
        ));
    }
    if n_outcomes == 0 || n_outcomes > dim_a {
        return Err(Error::DimensionMismatch(format!(
            "{n_outcomes} outcomes do not fit an apparatus of dimension {dim_a}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let h_s0 = random_hermitian(&mut rng, dim_s);
    let h_s_tau = if flags.energy_conserving {
        h_s0.clone()
    } else {
        random_hermitian(&mut rng, dim_s)
    };

    // Apparatus basis shared by the pointer and, when requested, H_A(τ).
    let w_a = haar_unitary_operator(&mut rng, vec![dim_a]);
    let h_a_tau = if flags.commuting_pointer {
        let diag: Vec<f64> = (0..dim_a).map(|_| standard_normal(&mut rng)).collect();
        let d = Operator::from_diagonal(vec![dim_a], &diag)?;
        (&(&w_a * &d) * &w_a.adjoint()).hermitized()
    } else {
        random_hermitian(&mut rng, dim_a)
    };
    let h_a0 = if flags.energy_conserving {
        h_a_tau.clone()
    } else {
        random_hermitian(&mut rng, dim_a)
    };

    // Balanced contiguous basis groups rotated by w_a.
    let base = dim_a / n_outcomes;
    let extra = dim_a % n_outcomes;
    let mut start = 0;
    let mut outcomes = Vec::with_capacity(n_outcomes);
    let mut projectors = Vec::with_capacity(n_outcomes);
    for k in 0..n_outcomes {
        let size = base + usize::from(k < extra);
        let mut block = Operator::zeros(vec![dim_a]);
        for i in start..start + size {
            block = &block + &Operator::basis_projector(vec![dim_a], i);
        }
        start += size;
        outcomes.push(Outcome::new(format!("x{k}")));
        projectors.push((&(&w_a * &block) * &w_a.adjoint()).hermitized());
    }
    let pointer = PointerObservable::new(outcomes, projectors)?;

    let xi = random_full_rank_state(&mut rng, dim_a);

    let u = if flags.energy_conserving {
        let h_tot = &h_s0.tensor(&Operator::identity(vec![dim_a]))
            + &Operator::identity(vec![dim_s]).tensor(&h_a_tau);
        let sd = spectral_decompose(&h_tot, DEGENERACY_TOL)?;
        let k = random_hermitian(&mut rng, dim_s * dim_a)
            .regrouped(vec![dim_s, dim_a])?;
        let mut k_block = Operator::zeros(vec![dim_s, dim_a]);
        for p in &sd.projectors {
            k_block = &k_block + &(&(p * &k) * p);
        }
        let k_block = k_block.hermitized();
        let ksd = spectral_decompose(&k_block, 0.0)?;
        let mut u = Operator::zeros(vec![dim_s, dim_a]);
        for (ev, p) in ksd.eigenvalues.iter().zip(&ksd.projectors) {
            u = &u + &p.scale(C64::new(0.0, *ev).exp());
        }
        u
    } else {
        haar_unitary_operator(&mut rng, vec![dim_s, dim_a])
    };

    MeasurementModel::new(xi, u, pointer, h_s0, h_s_tau, h_a0, h_a_tau)
}
