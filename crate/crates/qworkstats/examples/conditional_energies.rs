//! Conditional energies of a qubit under an ideal σ_z measurement.
//!
//! The energy before the measurement, conditional on the outcome, is the
//! real part of the weak value of the Hamiltonian; the energy after is the
//! expectation in the conditional post-measurement state. Their
//! probability-weighted difference reproduces the change in mean energy.
//!
//! Run with: cargo run --example conditional_energies

use num_complex::Complex64 as C64;
use qworkstats::energetics::{energy_reports, EnergeticsConfig};
use qworkstats::measurement::{make_ideal_model, Outcome, Povm};
use qworkstats::opcore::{DensityState, Operator};

fn main() {
    // H = (1/2)(|e><e| - |g><g|), measurement of sigma_z, state |+>.
    let h = Operator::from_diagonal(vec![2], &[-0.5, 0.5]).unwrap();
    let pvm = Povm::new(
        vec![Outcome::new("g"), Outcome::new("e")],
        vec![
            Operator::basis_projector(vec![2], 0),
            Operator::basis_projector(vec![2], 1),
        ],
    )
    .unwrap();
    let model = make_ideal_model(&pvm, &h, &h).unwrap();

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityState::pure(vec![2], &[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();

    println!("measuring sigma_z on |+>. with H = sigma_z/2:");
    println!("{:<8} {:>8} {:>10} {:>10} {:>10} {:>10}", "outcome", "p", "E_before", "E_after", "dE", "dE_ref");
    let reports = energy_reports(&model, &plus, &EnergeticsConfig::default()).unwrap();
    let mut avg = 0.0;
    for r in &reports {
        println!(
            "{:<8} {:>8.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            r.outcome.to_string(),
            r.prob,
            r.e_before,
            r.e_after,
            r.delta_e,
            r.delta_e_reference
        );
        avg += r.prob * r.delta_e;
    }
    println!("probability-weighted dE: {avg:.6} (mean energy is unchanged: 0)");
    println!();
    println!("the weak value is generally complex; here the full values are:");
    for r in &reports {
        println!("  outcome {}: {:.4} + {:.4}i", r.outcome, r.weak_value.re, r.weak_value.im);
    }
}
