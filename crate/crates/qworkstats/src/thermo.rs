//! Free energies, information measures, and the non-recoverable work of
//! measurement.
//!
//! Closing the measurement cycle with a single bath of temperature T costs
//! at least the free energy the measurement consumed; what remains of the
//! average work is non-recoverable. Resetting system and apparatus
//! separately gives the non-inclusive value W_irr = k_B T (I_{S:A} + H -
//! X_A); resetting them jointly exploits their correlations and leaves the
//! inclusive value W_inc = W_irr - k_B T I'_{S:A}. Both are non-negative,
//! and for repeatable and noisy projective measurements they collapse to
//! system-only entropy differences.

use crate::error::{Error, Result};
use crate::measurement::{
    make_ideal_model, make_noisy_model, make_repeatable_model, outcome_branches, MeasurementModel,
    Povm, RepeatableSpec, POINTER_COMMUTATOR_TOL,
};
use crate::opcore::{
    shannon_entropy, spectral_decompose, DensityState, Operator, DEGENERACY_TOL, TOL_HERM,
};
use crate::workstats::average_work;

/// Mutual informations this close below zero are eigensolve noise and get
/// clamped to zero.
const MI_CLAMP: f64 = 1e-12;

/// Free energy F(ρ) = tr(Hρ) - k_B T S(ρ).
pub fn free_energy(rho: &DensityState, h: &Operator, k_t: f64) -> Result<f64> {
    if k_t <= 0.0 {
        return Err(Error::NonPositiveTemperature(k_t));
    }
    let hv = h.hermiticity_violation();
    if hv > TOL_HERM {
        return Err(Error::NonHermitianInput { violation: hv });
    }
    Ok(rho.expectation(h) - k_t * rho.entropy())
}

/// Gibbs state e^{-H/k_B T} / Z.
pub fn gibbs_state(h: &Operator, k_t: f64) -> Result<DensityState> {
    if k_t <= 0.0 {
        return Err(Error::NonPositiveTemperature(k_t));
    }
    let sd = spectral_decompose(h, DEGENERACY_TOL)?;
    let unnorm = sd.map_eigenvalues(|e| (-e / k_t).exp());
    let z = unnorm.trace().re;
    DensityState::new(unnorm.scale_re(1.0 / z))
}

/// Energetic and informational account of one measurement at temperature T.
#[derive(Clone, Debug)]
pub struct ThermoReport {
    pub k_t: f64,
    pub avg_work: f64,
    /// ΔF_S: free-energy change of the system, ρ ↦ ρ_τ.
    pub d_f_s: f64,
    /// ΔF_A: free-energy change of the apparatus, ξ ↦ ξ_τ.
    pub d_f_a: f64,
    /// ΔF_{S+A}: free-energy change of the compound, ρ⊗ξ ↦ ϱ_{S+A}.
    pub d_f_sa: f64,
    /// Mutual information after premeasurement.
    pub i_sa: f64,
    /// Mutual information after objectification.
    pub i_sa_prime: f64,
    /// Shannon entropy of the outcome distribution.
    pub shannon_h: f64,
    /// Holevo information of the apparatus pointer ensemble.
    pub holevo_x: f64,
    /// Non-inclusive non-recoverable work.
    pub w_irr: f64,
    /// Inclusive non-recoverable work.
    pub w_inc_irr: f64,
    /// Work cost of measurement when only the apparatus is reset:
    /// E_cost = W_irr + ΔF_S.
    pub e_cost: f64,
}

fn clamp_mi(v: f64) -> f64 {
    if (-MI_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Full thermodynamic report for a measurement model at temperature T.
///
/// Requires the pointer to commute with H_A(τ) so that the objectification
/// step does not move apparatus energy and the free-energy decompositions
/// of the average work hold.
pub fn thermo_report(
    model: &MeasurementModel,
    rho: &DensityState,
    k_t: f64,
) -> Result<ThermoReport> {
    if k_t <= 0.0 {
        return Err(Error::NonPositiveTemperature(k_t));
    }
    let norm = model.pointer_commutator_norm();
    if norm > POINTER_COMMUTATOR_TOL {
        return Err(Error::CommutatorViolation { norm });
    }

    let joint_in = DensityState::new(model.joint_input(rho))?;
    let premeasured = DensityState::new(model.premeasured(rho).hermitized())?;
    let objectified = DensityState::new(model.objectified(rho).hermitized())?;
    let rho_tau = premeasured.partial_trace(&[0])?;
    let xi_prime = premeasured.partial_trace(&[1])?;
    let xi_tau = objectified.partial_trace(&[1])?;

    let s_rho_tau = rho_tau.entropy();
    let s_xi_prime = xi_prime.entropy();
    let s_xi_tau = xi_tau.entropy();
    let s_premeasured = premeasured.entropy();
    let s_objectified = objectified.entropy();
    let s_joint_in = joint_in.entropy();

    let branches = outcome_branches(model, rho)?;
    let mut probs = Vec::with_capacity(branches.len());
    let mut cond_apparatus_entropy = 0.0;
    for b in &branches {
        probs.push(b.prob);
        if b.defined {
            if let Some(xi_x) = &b.xi_x {
                cond_apparatus_entropy += b.prob * xi_x.entropy();
            }
        }
    }
    let shannon_h = shannon_entropy(&probs);
    let holevo_x = s_xi_prime - cond_apparatus_entropy;

    let i_sa = clamp_mi(s_rho_tau + s_xi_prime - s_premeasured);
    let i_sa_prime = clamp_mi(s_rho_tau + s_xi_tau - s_objectified);

    let d_f_s = free_energy(&rho_tau, model.h_s_tau(), k_t)?
        - free_energy(rho, model.h_s0(), k_t)?;
    let d_f_a = free_energy(&xi_tau, model.h_a_tau(), k_t)?
        - free_energy(model.xi(), model.h_a0(), k_t)?;
    let d_f_sa = free_energy(&objectified, &model.total_h_tau(), k_t)?
        - free_energy(&joint_in, &model.total_h0(), k_t)?;

    let avg_work = average_work(model, rho);
    let w_irr = k_t * (i_sa + shannon_h - holevo_x);
    let w_inc_irr = k_t * (s_objectified - s_joint_in);

    Ok(ThermoReport {
        k_t,
        avg_work,
        d_f_s,
        d_f_a,
        d_f_sa,
        i_sa,
        i_sa_prime,
        shannon_h,
        holevo_x,
        w_irr,
        w_inc_irr,
        e_cost: w_irr + d_f_s,
    })
}

/// Non-recoverable works of the three projective realizations of one PVM,
/// with the system-only closed forms they reduce to.
#[derive(Clone, Debug)]
pub struct ProjectiveComparison {
    pub w_irr_rep: f64,
    pub w_irr_ideal: f64,
    pub w_irr_noisy: f64,
    pub w_inc_rep: f64,
    pub w_inc_ideal: f64,
    pub w_inc_noisy: f64,
    /// k_B T (H + S(ρ_τ^Rep) - S(ρ)): closed form for `w_irr_rep`.
    pub w_irr_rep_reduced: f64,
    /// k_B T (H + S(ρ_τ^Ideal) - S(ρ)): closed form for `w_irr_ideal`.
    pub w_irr_ideal_reduced: f64,
    /// k_B T (S(ρ_τ^Ideal) - S(ρ)): closed form shared by every inclusive
    /// value and by both noisy values.
    pub w_inc_reduced: f64,
}

/// Builds the ideal, repeatable and noisy models of a projective POVM and
/// compares their non-recoverable works against the closed forms.
///
/// The comparison is Hamiltonian-free: the constructors are run with zero
/// system Hamiltonians since only entropic quantities enter.
pub fn projective_comparison(
    pvm: &Povm,
    spec: &RepeatableSpec,
    xi_noisy: &DensityState,
    rho: &DensityState,
    k_t: f64,
) -> Result<ProjectiveComparison> {
    if k_t <= 0.0 {
        return Err(Error::NonPositiveTemperature(k_t));
    }
    let dim_s = pvm.effects()[0].dim();
    let h_zero = Operator::zeros(vec![dim_s]);

    let ideal = make_ideal_model(pvm, &h_zero, &h_zero)?;
    let repeatable = make_repeatable_model(pvm, spec, &h_zero, &h_zero)?;
    let noisy = make_noisy_model(pvm, xi_noisy, &h_zero, &h_zero)?;

    let t_ideal = thermo_report(&ideal, rho, k_t)?;
    let t_rep = thermo_report(&repeatable, rho, k_t)?;
    let t_noisy = thermo_report(&noisy, rho, k_t)?;

    // Closed forms from the system side alone.
    let s_rho = rho.entropy();
    let mut probs = Vec::with_capacity(pvm.len());
    let mut rho_tau_ideal = Operator::zeros(vec![dim_s]);
    for m in pvm.effects() {
        let moved = &(m * rho.operator()) * m;
        probs.push(moved.trace().re.max(0.0));
        rho_tau_ideal = &rho_tau_ideal + &moved;
    }
    let s_tau_ideal = DensityState::new(rho_tau_ideal.hermitized())?.entropy();
    let rho_tau_rep = DensityState::new(
        repeatable.premeasured(rho).partial_trace(&[0])?.hermitized(),
    )?
    .entropy();
    let shannon = shannon_entropy(&probs);

    Ok(ProjectiveComparison {
        w_irr_rep: t_rep.w_irr,
        w_irr_ideal: t_ideal.w_irr,
        w_irr_noisy: t_noisy.w_irr,
        w_inc_rep: t_rep.w_inc_irr,
        w_inc_ideal: t_ideal.w_inc_irr,
        w_inc_noisy: t_noisy.w_inc_irr,
        w_irr_rep_reduced: k_t * (shannon + rho_tau_rep - s_rho),
        w_irr_ideal_reduced: k_t * (shannon + s_tau_ideal - s_rho),
        w_inc_reduced: k_t * (s_tau_ideal - s_rho),
    })
}
