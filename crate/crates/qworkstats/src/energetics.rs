//! Conditional energies before and after a measurement, the weak-value
//! definition and its requirement residuals, sequential bookkeeping, and the
//! two classical reduction limits (eigenvalue-difference statistics and
//! quasi-probabilities).
//!
//! The conditional energy after the measurement is the expected energy of
//! the conditional post-measurement state. The conditional energy before the
//! measurement is the real part of the generalised weak value of the
//! Hamiltonian, postselected on the outcome. Their difference is the
//! conditional energy change, which averages to the change in mean energy,
//! is insensitive to how the initial state was prepared as a mixture, and
//! reduces to classical conditional expectations when the measurement does
//! not disturb the energy basis.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::measurement::{
    induced_povm, instrument_apply, instrument_apply_operator, outcome_branches, MeasurementModel,
    Outcome,
};
use crate::opcore::{
    spectral_decompose, DensityState, Operator, DEGENERACY_TOL, P_FLOOR, TOL_HERM,
};

/// Mixing parameters for the general family of admissible conditional
/// energies, used by the requirement residual suites. The headline API
/// always evaluates the operational member: λ = 1/2 before the measurement,
/// the post-state expectation after.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergeticsConfig {
    /// Weight of the weak value against its conjugate; 1/2 is the real part.
    pub lambda: f64,
    /// Weight of the post-state expectation against the weak-value form in
    /// the initial-energy family. The physical member has gamma = 0.
    pub gamma: f64,
    /// Probability floor below which conditional quantities are undefined.
    pub p_floor: f64,
}

impl Default for EnergeticsConfig {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            gamma: 0.0,
            p_floor: P_FLOOR,
        }
    }
}

impl EnergeticsConfig {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) || !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidConfig(format!(
                "lambda and gamma must lie in [0,1], got ({lambda}, {gamma})"
            )));
        }
        Ok(Self {
            lambda,
            gamma,
            p_floor: P_FLOOR,
        })
    }
}

/// Per-outcome conditional energy record.
#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub outcome: Outcome,
    pub prob: f64,
    /// Initial conditional energy E_{x,0} (real part of the weak value).
    pub e_before: f64,
    /// Final conditional energy E_{x,τ} = tr[H_S(τ) ρ(x)].
    pub e_after: f64,
    /// ΔE(x) = e_after - e_before, stored as the difference by construction.
    pub delta_e: f64,
    /// Trajectory-style reference ΔẼ(x) = tr[H_S(τ)ρ(x)] - tr[H_S(0)ρ].
    pub delta_e_reference: f64,
    /// The full (complex) generalised weak value of H_S(0).
    pub weak_value: C64,
}

/// Generalised weak value tr[M_x H ρ] / tr[M_x ρ].
pub fn weak_value(rho: &DensityState, effect: &Operator, h: &Operator) -> Result<C64> {
    let hv = h.hermiticity_violation();
    if hv > TOL_HERM {
        return Err(Error::NonHermitianInput { violation: hv });
    }
    let prob = (effect.matrix() * rho.matrix()).diagonal().sum().re;
    if prob < P_FLOOR {
        return Err(Error::ZeroProbability {
            prob,
            floor: P_FLOOR,
        });
    }
    let num = (effect.matrix() * h.matrix() * rho.matrix()).diagonal().sum();
    Ok(num / C64::new(prob, 0.0))
}

/// Initial conditional energy: λ·(weak value) + (1-λ)·(its conjugate),
/// reported as its real value. At λ = 1/2 this is
/// tr[(M_x H + H M_x) ρ] / (2 p(x)).
pub fn conditional_energy_before(
    rho: &DensityState,
    effect: &Operator,
    h0: &Operator,
    config: &EnergeticsConfig,
) -> Result<f64> {
    let w = weak_value(rho, effect, h0)?;
    let mixed = w * C64::new(config.lambda, 0.0) + w.conj() * C64::new(1.0 - config.lambda, 0.0);
    Ok(mixed.re)
}

/// Final conditional energy tr[H_S(τ) ρ(x)].
pub fn conditional_energy_after(
    model: &MeasurementModel,
    rho: &DensityState,
    x: &Outcome,
    h_s_tau: &Operator,
) -> Result<f64> {
    let unnorm = instrument_apply(model, rho, x)?;
    let prob = unnorm.trace().re;
    if prob < P_FLOOR {
        return Err(Error::ZeroProbability {
            prob,
            floor: P_FLOOR,
        });
    }
    Ok((h_s_tau.matrix() * unnorm.matrix()).diagonal().sum().re / prob)
}

/// One [`EnergyReport`] per defined outcome branch.
pub fn energy_reports(
    model: &MeasurementModel,
    rho: &DensityState,
    config: &EnergeticsConfig,
) -> Result<Vec<EnergyReport>> {
    let povm = induced_povm(model)?;
    let branches = outcome_branches(model, rho)?;
    let mean_e0 = rho.expectation(model.h_s0());
    let mut reports = Vec::new();
    for b in branches {
        if !b.defined || b.prob < config.p_floor {
            continue;
        }
        let effect = povm
            .effect(&b.outcome)
            .ok_or_else(|| Error::UnknownOutcome(b.outcome.clone()))?;
        let wv = weak_value(rho, effect, model.h_s0())?;
        let e_before = conditional_energy_before(rho, effect, model.h_s0(), config)?;
        let rho_x = b.rho_x.as_ref().expect("defined branch");
        let e_after = rho_x.expectation(model.h_s_tau());
        reports.push(EnergyReport {
            outcome: b.outcome,
            prob: b.prob,
            e_before,
            e_after,
            delta_e: e_after - e_before,
            delta_e_reference: e_after - mean_e0,
            weak_value: wv,
        });
    }
    Ok(reports)
}

/// Which definition of the initial conditional energy a residual run probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialEnergy {
    /// The admissible family: γ tr[H I_x(ρ)] + (1-γ)(λ tr[I_x(Hρ)] + c.c.),
    /// normalized by p(x). γ and λ come from the config; γ = 0, λ = 1/2 is
    /// the weak-value definition.
    Family,
    /// Conditional expectation obtained by an ideal energy measurement
    /// before the process (fails Requirements 1 and 2 off the commuting
    /// case).
    ProjectedExpectation,
    /// The trajectory-style unconditional mean tr[H ρ] (fails Requirement 2
    /// for mixed states).
    UnconditionalMean,
}

/// Residuals of the three physical requirements.
///
/// `req3` is only evaluated when the non-contextuality condition holds for
/// the model within 1e-9; otherwise it is `None`.
#[derive(Clone, Copy, Debug)]
pub struct RequirementResiduals {
    pub req1: f64,
    pub req2: f64,
    pub req3: Option<f64>,
}

/// Tolerance for the non-contextuality (classical-limit) condition.
pub const CLASSICAL_LIMIT_TOL: f64 = 1e-9;

/// Linear numerator f_{x,t}(σ) of the family member (γ, λ) for the
/// Hamiltonian `h`: γ tr[h I_x(σ)] + (1-γ)(λ tr[I_x(hσ)] + (1-λ) c.c.).
///
/// Exposed so the property suites can probe arbitrary (γ, λ) at either
/// time; E_{x,t} = f_{x,t}(ρ) / p(x).
pub fn family_numerator(
    model: &MeasurementModel,
    sigma: &Operator,
    x: &Outcome,
    h: &Operator,
    gamma: f64,
    lambda: f64,
) -> Result<C64> {
    let direct = if gamma != 0.0 {
        let moved = instrument_apply_operator(model, sigma, x)?;
        (h.matrix() * moved.matrix()).diagonal().sum()
    } else {
        C64::ZERO
    };
    let weak = if gamma != 1.0 {
        let hs = Operator::new(
            vec![model.dim_s()],
            h.matrix() * sigma.matrix(),
        )?;
        let moved = instrument_apply_operator(model, &hs, x)?;
        let t = moved.trace();
        t * C64::new(lambda, 0.0) + t.conj() * C64::new(1.0 - lambda, 0.0)
    } else {
        C64::ZERO
    };
    Ok(direct * C64::new(gamma, 0.0) + weak * C64::new(1.0 - gamma, 0.0))
}

/// Conditional energy of the family member (γ, λ) at the given Hamiltonian.
pub fn family_conditional_energy(
    model: &MeasurementModel,
    rho: &DensityState,
    x: &Outcome,
    h: &Operator,
    gamma: f64,
    lambda: f64,
) -> Result<C64> {
    let prob = instrument_apply(model, rho, x)?.trace().re;
    if prob < P_FLOOR {
        return Err(Error::ZeroProbability {
            prob,
            floor: P_FLOOR,
        });
    }
    Ok(family_numerator(model, rho.operator(), x, h, gamma, lambda)? / C64::new(prob, 0.0))
}

/// Heisenberg-dual effect D_x(P) = tr_A[(1⊗ξ^{1/2}) U† (P⊗P_A^x) U (1⊗ξ^{1/2})],
/// satisfying tr[P I_x(ρ)] = tr[D_x(P) ρ].
fn dual_effect(model: &MeasurementModel, p_sys: &Operator, x: &Outcome) -> Result<Operator> {
    let sqrt_xi = model.xi().operator().sqrt_psd()?;
    let lift = Operator::identity(vec![model.dim_s()]).tensor(&sqrt_xi);
    let pointer = model.joint_pointer(x)?;
    let big = p_sys.tensor(&Operator::identity(vec![model.dim_a()]));
    let u = model.premeasurement_unitary();
    let inner = &(&(&u.adjoint() * &(&big * &pointer)) * u);
    let full = &(&lift * inner) * &lift;
    full.partial_trace(&[0])
}

/// Checks the non-contextuality condition tr[I_x(P_j ρ P_j)] = tr[P_j I_x(ρ)]
/// for all ρ, at both Hamiltonian times, returning the largest violation.
pub fn classical_limit_violation(model: &MeasurementModel) -> Result<f64> {
    let povm = induced_povm(model)?;
    let mut worst: f64 = 0.0;
    for h in [model.h_s0(), model.h_s_tau()] {
        let sd = spectral_decompose(h, DEGENERACY_TOL)?;
        for x in model.outcomes() {
            let m = povm.effect(x).expect("outcome known");
            for proj in &sd.projectors {
                let lhs = &(proj * m) * proj;
                let rhs = dual_effect(model, proj, x)?;
                worst = worst.max((&lhs - &rhs).frobenius_norm());
            }
        }
    }
    Ok(worst)
}

/// Residuals of Requirements 1-3 for the chosen initial-energy definition,
/// evaluated over the given ensemble decomposition of ρ.
pub fn requirement_residuals_for(
    model: &MeasurementModel,
    rho: &DensityState,
    config: &EnergeticsConfig,
    ensemble: &[(f64, DensityState)],
    initial: InitialEnergy,
) -> Result<RequirementResiduals> {
    // The ensemble must actually average to ρ.
    let mut avg = Operator::zeros(vec![model.dim_s()]);
    for (p, state) in ensemble {
        avg = &avg + &state.operator().scale_re(*p);
    }
    let gap = (&avg - rho.operator()).frobenius_norm();
    if gap > 1e-10 {
        return Err(Error::BadEnsemble(gap));
    }

    let branches = outcome_branches(model, rho)?;
    let rho_tau = DensityState::new(
        model.premeasured(rho).partial_trace(&[0])?.hermitized(),
    )?;

    // E_{x,t}(σ) for the chosen definition, as (numerator, probability).
    let energy = |state: &DensityState, x: &Outcome, at_tau: bool| -> Result<(C64, f64)> {
        let p = instrument_apply(model, state, x)?.trace().re;
        let h = if at_tau { model.h_s_tau() } else { model.h_s0() };
        let num = match (initial, at_tau) {
            // The final energy is pinned to the post-state expectation for
            // every definition.
            (_, true) => family_numerator(model, state.operator(), x, h, 1.0, config.lambda)?,
            (InitialEnergy::Family, false) => family_numerator(
                model,
                state.operator(),
                x,
                h,
                config.gamma,
                config.lambda,
            )?,
            (InitialEnergy::UnconditionalMean, false) => {
                C64::new(p * state.expectation(h), 0.0)
            }
            (InitialEnergy::ProjectedExpectation, false) => {
                let sd = spectral_decompose(h, DEGENERACY_TOL)?;
                let mut weighted = C64::ZERO;
                let mut total = 0.0;
                for (ev, proj) in sd.eigenvalues.iter().zip(&sd.projectors) {
                    let sandwiched = &(proj * state.operator()) * proj;
                    let q = instrument_apply_operator(model, &sandwiched, x)?
                        .trace()
                        .re;
                    weighted += C64::new(ev * q, 0.0);
                    total += q;
                }
                if total < P_FLOOR {
                    C64::ZERO
                } else {
                    // Rescale so that num / p(x) is the Eq.-6 style value.
                    weighted * C64::new(p / total, 0.0)
                }
            }
        };
        Ok((num, p))
    };

    // Requirement 1: Σ_x p(x) E_{x,t} = tr[H(t) ρ_t].
    let mut req1: f64 = 0.0;
    for at_tau in [false, true] {
        let mut sum = C64::ZERO;
        for x in model.outcomes() {
            let (num, _) = energy(rho, x, at_tau)?;
            sum += num;
        }
        let target = if at_tau {
            rho_tau.expectation(model.h_s_tau())
        } else {
            rho.expectation(model.h_s0())
        };
        req1 = req1.max((sum - C64::new(target, 0.0)).norm());
    }

    // Requirement 2: Σ_k p_k p_k(x) E_{x,t}(ρ_k) / p(x) = E_{x,t}(ρ).
    let mut req2: f64 = 0.0;
    for at_tau in [false, true] {
        for b in &branches {
            if !b.defined {
                continue;
            }
            let (num_rho, p_rho) = energy(rho, &b.outcome, at_tau)?;
            let mut mixed = C64::ZERO;
            for (pk, state) in ensemble {
                let (num_k, _) = energy(state, &b.outcome, at_tau)?;
                mixed += num_k * C64::new(*pk, 0.0);
            }
            req2 = req2.max((mixed - num_rho).norm() / p_rho);
        }
    }

    // Requirement 3, only meaningful in the non-contextual regime.
    let req3 = if classical_limit_violation(model)? <= CLASSICAL_LIMIT_TOL {
        let mut worst: f64 = 0.0;
        for at_tau in [false, true] {
            let h = if at_tau { model.h_s_tau() } else { model.h_s0() };
            for b in &branches {
                if !b.defined {
                    continue;
                }
                let (num, p) = energy(rho, &b.outcome, at_tau)?;
                let target = b.rho_x.as_ref().expect("defined").expectation(h);
                worst = worst.max((num / C64::new(p, 0.0) - C64::new(target, 0.0)).norm());
            }
        }
        Some(worst)
    } else {
        None
    };

    Ok(RequirementResiduals { req1, req2, req3 })
}

/// Residuals of Requirements 1-3 for the weak-value family member selected
/// by the config.
pub fn requirement_residuals(
    model: &MeasurementModel,
    rho: &DensityState,
    config: &EnergeticsConfig,
    ensemble: &[(f64, DensityState)],
) -> Result<RequirementResiduals> {
    requirement_residuals_for(model, rho, config, ensemble, InitialEnergy::Family)
}

/// One step of a measurement sequence: the conditional energy before the
/// step and the conditional change across it.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub outcome: Outcome,
    /// E_i: conditional energy before the i-th measurement.
    pub energy: f64,
    /// ΔE_i = E_{i+1} - E_i.
    pub delta_e: f64,
}

/// Additive conditional energy bookkeeping along a sequence of measurements.
///
/// `hamiltonians[i]` is the system Hamiltonian in force before measurement
/// i+1 (so it has one more entry than there are measurements); a trivial
/// single-outcome measurement is appended internally, making the step
/// energies sum to the whole-sequence energy change exactly.
pub fn sequential_energy_chain(
    models: &[MeasurementModel],
    rho: &DensityState,
    outcomes: &[Outcome],
    hamiltonians: &[Operator],
    config: &EnergeticsConfig,
) -> Result<Vec<ChainStep>> {
    let steps = models.len();
    if steps == 0 {
        return Err(Error::InvalidConfig("empty measurement sequence".into()));
    }
    if outcomes.len() != steps {
        return Err(Error::InvalidConfig(format!(
            "{} outcomes for {} measurements",
            outcomes.len(),
            steps
        )));
    }
    if hamiltonians.len() != steps + 1 {
        return Err(Error::InvalidConfig(format!(
            "need {} Hamiltonians for {} measurements, got {}",
            steps + 1,
            steps,
            hamiltonians.len()
        )));
    }
    let dim = rho.dim();
    for m in models {
        if m.dim_s() != dim {
            return Err(Error::DimensionMismatch(
                "all measurements in a chain must share the system space".into(),
            ));
        }
    }

    // Conditional states ρ(x_0) = ρ, ..., ρ(x_I).
    let mut cond_states: Vec<DensityState> = vec![rho.clone()];
    for (model, x) in models.iter().zip(outcomes) {
        let moved = instrument_apply(model, cond_states.last().expect("nonempty"), x)?;
        let p = moved.trace().re;
        if p < config.p_floor {
            return Err(Error::ZeroProbability {
                prob: p,
                floor: config.p_floor,
            });
        }
        cond_states.push(DensityState::new(moved.scale_re(1.0 / p).hermitized())?);
    }

    // E_i: push H(t_i) ρ(x_{i-1}) through the remaining instruments (the
    // trailing trivial measurement is the identity map).
    let mut energies = Vec::with_capacity(steps + 1);
    for i in 0..steps {
        let prior = &cond_states[i];
        let mut num = Operator::new(
            vec![dim],
            hamiltonians[i].matrix() * prior.matrix(),
        )?;
        let mut den = prior.operator().clone();
        for (model, x) in models.iter().zip(outcomes).skip(i) {
            num = instrument_apply_operator(model, &num, x)?;
            den = instrument_apply_operator(model, &den, x)?;
        }
        energies.push(num.trace().re / den.trace().re);
    }
    // After the last measurement the trivial step gives a plain expectation.
    energies.push(cond_states[steps].expectation(&hamiltonians[steps]));

    Ok(outcomes
        .iter()
        .enumerate()
        .map(|(i, x)| ChainStep {
            outcome: x.clone(),
            energy: energies[i],
            delta_e: energies[i + 1] - energies[i],
        })
        .collect())
}

/// A branch of the double energy-projection statistics: first projecting
/// onto eigenspace m of H(0), evolving by U, then projecting onto
/// eigenspace n of H(τ).
#[derive(Clone, Debug)]
pub struct TpmBranch {
    pub m: usize,
    pub n: usize,
    pub prob: f64,
    pub defined: bool,
    /// Conditional energy change; equals ε_n(τ) - ε_m(0) on defined branches.
    pub delta_e: Option<f64>,
}

/// Work distribution of the two-point energy-measurement scheme, computed
/// through the conditional-energy machinery rather than asserted: each
/// branch's ΔE comes out as an eigenvalue difference.
pub fn tpm_distribution(
    u: &Operator,
    h_s0: &Operator,
    h_s_tau: &Operator,
    rho: &DensityState,
) -> Result<Vec<TpmBranch>> {
    let uv = u.unitarity_violation();
    if uv > crate::opcore::TOL_UNITARY {
        return Err(Error::NotUnitary { violation: uv });
    }
    let sd0 = spectral_decompose(h_s0, DEGENERACY_TOL)?;
    let sd_tau = spectral_decompose(h_s_tau, DEGENERACY_TOL)?;
    let mut branches = Vec::new();
    for (m, pm) in sd0.projectors.iter().enumerate() {
        for (n, pn) in sd_tau.projectors.iter().enumerate() {
            // Kraus operator A = P^n(τ) U P^m(0).
            let a = &(pn * u) * pm;
            let moved = &(&a * rho.operator()) * &a.adjoint();
            let prob = moved.trace().re.max(0.0);
            if prob < P_FLOOR {
                branches.push(TpmBranch {
                    m,
                    n,
                    prob,
                    defined: false,
                    delta_e: None,
                });
                continue;
            }
            let e_after = (h_s_tau.matrix() * moved.matrix()).diagonal().sum().re / prob;
            let effect = &a.adjoint() * &a;
            let num = (effect.matrix() * h_s0.matrix() * rho.matrix())
                .diagonal()
                .sum();
            let e_before = num.re / prob;
            branches.push(TpmBranch {
                m,
                n,
                prob,
                defined: true,
                delta_e: Some(e_after - e_before),
            });
        }
    }
    Ok(branches)
}

/// Energy statistics of the ideal measurement of the Heisenberg-evolved
/// Hamiltonian, together with the quasi-probability table over eigenvalue
/// pairs that reproduces it.
#[derive(Clone, Debug)]
pub struct QuasiprobDistribution {
    /// Eigenvalues of H(0), ascending.
    pub eps_initial: Vec<f64>,
    /// Eigenvalues of H(τ), ascending.
    pub eps_final: Vec<f64>,
    /// p(n) = tr[P̃^n(τ) ρ].
    pub probs: Vec<f64>,
    /// ΔE(n); `None` where p(n) is below the floor.
    pub delta_e: Vec<Option<f64>>,
    /// `quasi[m][n]` = Re tr(P̃^n(τ) P^m(0) ρ); may be negative for coherent ρ.
    pub quasi: Vec<Vec<f64>>,
}

impl QuasiprobDistribution {
    /// Most negative entry of the table (0 if none are negative).
    pub fn most_negative(&self) -> f64 {
        self.quasi
            .iter()
            .flatten()
            .cloned()
            .fold(0.0_f64, f64::min)
    }
}

pub fn quasiprob_distribution(
    u: &Operator,
    h_s0: &Operator,
    h_s_tau: &Operator,
    rho: &DensityState,
) -> Result<QuasiprobDistribution> {
    let uv = u.unitarity_violation();
    if uv > crate::opcore::TOL_UNITARY {
        return Err(Error::NotUnitary { violation: uv });
    }
    let sd0 = spectral_decompose(h_s0, DEGENERACY_TOL)?;
    let sd_tau = spectral_decompose(h_s_tau, DEGENERACY_TOL)?;
    // Heisenberg-evolved projectors P̃^n(τ) = U† P^n(τ) U.
    let moved: Vec<Operator> = sd_tau
        .projectors
        .iter()
        .map(|pn| &(&u.adjoint() * pn) * u)
        .collect();
    let mut probs = Vec::with_capacity(moved.len());
    let mut delta_e = Vec::with_capacity(moved.len());
    for (n, pt) in moved.iter().enumerate() {
        let p = (pt.matrix() * rho.matrix()).diagonal().sum().re.max(0.0);
        probs.push(p);
        if p < P_FLOOR {
            delta_e.push(None);
        } else {
            let num = (pt.matrix() * h_s0.matrix() * rho.matrix())
                .diagonal()
                .sum()
                .re;
            delta_e.push(Some(sd_tau.eigenvalues[n] - num / p));
        }
    }
    let quasi = sd0
        .projectors
        .iter()
        .map(|pm| {
            moved
                .iter()
                .map(|pt| {
                    (pt.matrix() * pm.matrix() * rho.matrix())
                        .diagonal()
                        .sum()
                        .re
                })
                .collect()
        })
        .collect();
    Ok(QuasiprobDistribution {
        eps_initial: sd0.eigenvalues,
        eps_final: sd_tau.eigenvalues,
        probs,
        delta_e,
        quasi,
    })
}
