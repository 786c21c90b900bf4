//! Conditional work for the system-plus-apparatus compound.
//!
//! The compound conditional energy change Δℰ(x) is always defined; it can be
//! read as work W(x) only when the pointer observable commutes with the
//! final apparatus Hamiltonian, so that reading the pointer with a further
//! apparatus would not change the energy books. When the premeasurement
//! unitary commutes with a time-constant total Hamiltonian, every W(x)
//! vanishes, not just the average.

use crate::error::{Error, Result};
use crate::measurement::{MeasurementModel, Outcome, POINTER_COMMUTATOR_TOL};
use crate::opcore::{DensityState, Operator, P_FLOOR};

/// Per-outcome work record.
#[derive(Clone, Debug)]
pub struct WorkReport {
    pub outcome: Outcome,
    pub prob: f64,
    /// Conditional work W(x) of the compound system.
    pub work: f64,
    /// Raw compound conditional energy change Δℰ(x); equals `work` whenever
    /// the pointer commutes with H_A(τ).
    pub total_delta: f64,
    /// Pointer-sector commutator norm of the model.
    pub commutator_norm: f64,
}

fn branch_probability(model: &MeasurementModel, rho: &DensityState, x: &Outcome) -> Result<f64> {
    let p_op = model.joint_pointer(x)?;
    let premeasured = model.premeasured(rho);
    Ok((&(&p_op * &premeasured) * &p_op).trace().re.max(0.0))
}

/// Conditional work for outcome `x`:
/// W(x) = tr[P_A^x H(τ) U(ρ⊗ξ)U†]/p - Re tr[P_A^x U H(0)(ρ⊗ξ) U†]/p,
/// with H(t) = H_S(t) + H_A(t).
///
/// Errors with `CommutatorViolation` unless [Z_A, H_A(τ)] = 0, which is
/// what licenses calling the energy change of S+A "work".
pub fn conditional_work(
    model: &MeasurementModel,
    rho: &DensityState,
    x: &Outcome,
) -> Result<WorkReport> {
    let norm = model.pointer_commutator_norm();
    if norm > POINTER_COMMUTATOR_TOL {
        return Err(Error::CommutatorViolation { norm });
    }
    let prob = branch_probability(model, rho, x)?;
    if prob < P_FLOOR {
        return Err(Error::ZeroProbability {
            prob,
            floor: P_FLOOR,
        });
    }
    let p_op = model.joint_pointer(x)?;
    let h0 = model.total_h0();
    let h_tau = model.total_h_tau();
    let u = model.premeasurement_unitary();
    let joint = model.joint_input(rho);

    let premeasured = &(u * &joint) * &u.adjoint();
    let after = (p_op.matrix() * h_tau.matrix() * premeasured.matrix())
        .diagonal()
        .sum()
        .re
        / prob;
    let moved_h0 = &(&(u * &(&h0 * &joint)) * &u.adjoint());
    let before = (p_op.matrix() * moved_h0.matrix()).diagonal().sum().re / prob;
    let work = after - before;
    let total_delta = total_energy_change(model, rho, x)?;
    Ok(WorkReport {
        outcome: x.clone(),
        prob,
        work,
        total_delta,
        commutator_norm: norm,
    })
}

/// Work reports for every branch above the probability floor.
pub fn work_reports(model: &MeasurementModel, rho: &DensityState) -> Result<Vec<WorkReport>> {
    let mut out = Vec::new();
    for x in model.outcomes() {
        match conditional_work(model, rho, x) {
            Ok(rep) => out.push(rep),
            Err(Error::ZeroProbability { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Raw compound conditional energy change Δℰ(x), defined with or without
/// the pointer commutation condition:
/// Δℰ(x) = tr[H(τ) J_x(ρ⊗ξ)]/p - Re tr[J_x(H(0)(ρ⊗ξ))]/p with
/// J_x(Y) = P_A^x U Y U† P_A^x.
pub fn total_energy_change(
    model: &MeasurementModel,
    rho: &DensityState,
    x: &Outcome,
) -> Result<f64> {
    let prob = branch_probability(model, rho, x)?;
    if prob < P_FLOOR {
        return Err(Error::ZeroProbability {
            prob,
            floor: P_FLOOR,
        });
    }
    let p_op = model.joint_pointer(x)?;
    let u = model.premeasurement_unitary();
    let joint = model.joint_input(rho);
    let h0 = model.total_h0();
    let h_tau = model.total_h_tau();

    let sandwich = |y: &Operator| -> Operator {
        let moved = &(u * y) * &u.adjoint();
        &(&p_op * &moved) * &p_op
    };
    let after = (h_tau.matrix() * sandwich(&joint).matrix())
        .diagonal()
        .sum()
        .re
        / prob;
    let before = sandwich(&(&h0 * &joint)).trace().re / prob;
    Ok(after - before)
}

/// Average work over all outcomes: tr[(U†H(τ)U - H(0))(ρ⊗ξ)].
pub fn average_work(model: &MeasurementModel, rho: &DensityState) -> f64 {
    let u = model.premeasurement_unitary();
    let moved = &(&u.adjoint() * &(&model.total_h_tau() * u)) - &model.total_h0();
    (moved.matrix() * model.joint_input(rho).matrix())
        .diagonal()
        .sum()
        .re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::outcome_branches;
    use crate::scenarios::{
        build_qubit_model, initial_state, random_full_rank_state, random_model, ModelFlags,
        QubitScenarioConfig,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn vanishing_work_for_energy_conserving_models() {
        let flags = ModelFlags {
            commuting_pointer: true,
            energy_conserving: true,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(211);
        for seed in 0..25 {
            let model = random_model(2000 + seed, 3, 3, 2, flags).unwrap();
            let rho = random_full_rank_state(&mut rng, 3);
            for rep in work_reports(&model, &rho).unwrap() {
                assert!(
                    rep.work.abs() < 1e-9,
                    "seed {seed}, outcome {}: W = {}",
                    rep.outcome,
                    rep.work
                );
            }
        }
    }

    #[test]
    fn trivial_model_has_zero_work() {
        let xi = DensityState::basis_state(vec![2], 0).unwrap();
        let u = Operator::identity(vec![2, 2]);
        let pointer = crate::measurement::PointerObservable::from_basis_groups(
            2,
            &[
                (Outcome::new("0"), vec![0]),
                (Outcome::new("1"), vec![1]),
            ],
        )
        .unwrap();
        let h = Operator::from_diagonal(vec![2], &[-0.5, 0.5]).unwrap();
        let ha = Operator::identity(vec![2]);
        let model = crate::measurement::MeasurementModel::new(
            xi,
            u,
            pointer,
            h.clone(),
            h,
            ha.clone(),
            ha,
        )
        .unwrap();
        let rho = DensityState::basis_state(vec![2], 1).unwrap();
        for rep in work_reports(&model, &rho).unwrap() {
            assert!(rep.work.abs() < 1e-12);
        }
        assert!(average_work(&model, &rho).abs() < 1e-12);
    }

    #[test]
    fn appendix_e_work_vanishes_at_theta2_zero() {
        let cfg = QubitScenarioConfig {
            theta2: 0.0,
            ..Default::default()
        };
        let model = build_qubit_model(&cfg).unwrap();
        let rho = initial_state(&cfg);
        let reports = work_reports(&model, &rho).unwrap();
        assert_eq!(reports.len(), 4);
        for rep in reports {
            assert!(rep.work.abs() < 1e-10, "{}: {}", rep.outcome, rep.work);
        }
    }

    #[test]
    fn appendix_scenario_average_matches_weighted_sum() {
        let cfg = QubitScenarioConfig {
            theta2: std::f64::consts::FRAC_PI_4,
            q: 0.5,
            ..Default::default()
        };
        let model = build_qubit_model(&cfg).unwrap();
        let rho = initial_state(&cfg);
        let avg = average_work(&model, &rho);
        let weighted: f64 = work_reports(&model, &rho)
            .unwrap()
            .iter()
            .map(|r| r.prob * r.work)
            .sum();
        assert!((avg - weighted).abs() < 1e-10);
        assert!(avg.abs() > 1e-3, "work is genuinely nonzero off the commuting point");
    }

    #[test]
    fn average_is_probability_weighted_sum() {
        let mut rng = ChaCha12Rng::seed_from_u64(223);
        for seed in 0..15 {
            let flags = ModelFlags {
                commuting_pointer: true,
                energy_conserving: false,
            };
            let model = random_model(2100 + seed, 2, 4, 3, flags).unwrap();
            let rho = random_full_rank_state(&mut rng, 2);
            let avg = average_work(&model, &rho);
            let weighted: f64 = work_reports(&model, &rho)
                .unwrap()
                .iter()
                .map(|r| r.prob * r.work)
                .sum();
            assert!((avg - weighted).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn total_delta_equals_work_when_commuting() {
        let flags = ModelFlags {
            commuting_pointer: true,
            energy_conserving: false,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(227);
        let model = random_model(2200, 2, 3, 3, flags).unwrap();
        let rho = random_full_rank_state(&mut rng, 2);
        for rep in work_reports(&model, &rho).unwrap() {
            assert!((rep.work - rep.total_delta).abs() < 1e-10);
        }
    }

    #[test]
    fn noncommuting_pointer_still_gives_total_delta() {
        let model = random_model(2300, 2, 3, 2, ModelFlags::default()).unwrap();
        assert!(model.pointer_commutator_norm() > POINTER_COMMUTATOR_TOL);
        let mut rng = ChaCha12Rng::seed_from_u64(229);
        let rho = random_full_rank_state(&mut rng, 2);
        let x = &model.outcomes()[0].clone();
        assert!(matches!(
            conditional_work(&model, &rho, x),
            Err(Error::CommutatorViolation { .. })
        ));
        // Δℰ is still defined for every branch.
        for b in outcome_branches(&model, &rho).unwrap() {
            if b.defined {
                assert!(total_energy_change(&model, &rho, &b.outcome)
                    .unwrap()
                    .is_finite());
            }
        }
    }

    #[test]
    fn total_delta_averages_to_average_work_when_commuting() {
        // With a commuting pointer the objectification step moves no
        // energy, so Σ p(x) Δℰ(x) is the average work.
        let flags = ModelFlags {
            commuting_pointer: true,
            energy_conserving: false,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(239);
        for seed in 0..10 {
            let model = random_model(2500 + seed, 2, 3, 2, flags).unwrap();
            let rho = random_full_rank_state(&mut rng, 2);
            let mut avg = 0.0;
            for b in outcome_branches(&model, &rho).unwrap() {
                if b.defined {
                    avg += b.prob * total_energy_change(&model, &rho, &b.outcome).unwrap();
                }
            }
            assert!((avg - average_work(&model, &rho)).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn work_minus_system_change_is_apparatus_change() {
        // W(x) - ΔE_S(x) equals the apparatus-side conditional change
        // computed directly.
        let flags = ModelFlags {
            commuting_pointer: true,
            energy_conserving: false,
        };
        let mut rng = ChaCha12Rng::seed_from_u64(233);
        let model = random_model(2400, 2, 3, 2, flags).unwrap();
        let rho = random_full_rank_state(&mut rng, 2);
        let cfg = crate::energetics::EnergeticsConfig::default();
        let energy = crate::energetics::energy_reports(&model, &rho, &cfg).unwrap();
        for rep in work_reports(&model, &rho).unwrap() {
            let e = energy.iter().find(|r| r.outcome == rep.outcome).unwrap();
            // Apparatus conditional change via Eq.-17-style traces with the
            // apparatus Hamiltonian alone.
            let p_op = model.joint_pointer(&rep.outcome).unwrap();
            let u = model.premeasurement_unitary();
            let joint = model.joint_input(&rho);
            let id_s = Operator::identity(vec![model.dim_s()]);
            let ha_tau = id_s.tensor(model.h_a_tau());
            let ha0 = id_s.tensor(model.h_a0());
            let premeasured = &(u * &joint) * &u.adjoint();
            let after = (p_op.matrix() * ha_tau.matrix() * premeasured.matrix())
                .diagonal()
                .sum()
                .re
                / rep.prob;
            let moved = &(&(u * &(&ha0 * &joint)) * &u.adjoint());
            let before =
                (p_op.matrix() * moved.matrix()).diagonal().sum().re / rep.prob;
            let apparatus_delta = after - before;
            assert!((rep.work - e.delta_e - apparatus_delta).abs() < 1e-9);
        }
    }
}
