//! Conditional work of the compound system-plus-apparatus, per outcome.
//!
//! Work is defined only when the pointer observable commutes with the
//! final apparatus Hamiltonian. When the premeasurement additionally
//! commutes with a time-constant total Hamiltonian, the work vanishes for
//! every single outcome, not just on average.
//!
//! Run with: cargo run --example measurement_work

use qworkstats::scenarios::{random_full_rank_state, random_model, ModelFlags};
use qworkstats::workstats::{average_work, work_reports};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let mut rng = ChaCha12Rng::seed_from_u64(5);

    // A generic commuting-pointer model: per-outcome works are nonzero but
    // average to the unitary work.
    let flags = ModelFlags {
        commuting_pointer: true,
        energy_conserving: false,
    };
    let model = random_model(12, 2, 3, 3, flags).unwrap();
    let rho = random_full_rank_state(&mut rng, 2);
    println!("generic commuting-pointer model:");
    println!("{:<6} {:>10} {:>12} {:>12}", "x", "p(x)", "W(x)", "dE_comp(x)");
    let mut weighted = 0.0;
    for rep in work_reports(&model, &rho).unwrap() {
        println!(
            "{:<6} {:>10.6} {:>12.6} {:>12.6}",
            rep.outcome.to_string(),
            rep.prob,
            rep.work,
            rep.total_delta
        );
        weighted += rep.prob * rep.work;
    }
    println!("sum p(x) W(x) = {weighted:.10}");
    println!("average work  = {:.10}", average_work(&model, &rho));

    // The same construction with an energy-conserving premeasurement.
    let conserving = ModelFlags {
        commuting_pointer: true,
        energy_conserving: true,
    };
    let model = random_model(12, 2, 3, 3, conserving).unwrap();
    let rho = random_full_rank_state(&mut rng, 2);
    println!();
    println!("energy-conserving premeasurement ([U, H] = 0, H constant):");
    for rep in work_reports(&model, &rho).unwrap() {
        println!("  W({}) = {:.3e}", rep.outcome, rep.work);
    }
}
