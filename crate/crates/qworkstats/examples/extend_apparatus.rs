//! Reading the pointer with a second apparatus changes nothing.
//!
//! When the pointer observable commutes with the final apparatus
//! Hamiltonian, a record register B can copy the outcome with a unitary
//! that commutes with the apparatus energy. Outcome probabilities and the
//! compound conditional energy changes are unchanged, which is what lets
//! the compound change be read as work.
//!
//! Run with: cargo run --example extend_apparatus

use qworkstats::measurement::{extend_model_commuting, outcome_branches};
use qworkstats::scenarios::{random_full_rank_state, random_model, ModelFlags};
use qworkstats::workstats::total_energy_change;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let flags = ModelFlags {
        commuting_pointer: true,
        energy_conserving: false,
    };
    let model = random_model(31, 2, 3, 3, flags).unwrap();
    let extended = extend_model_commuting(&model).unwrap();
    println!(
        "apparatus grows from dim {} to dim {} (record register of {} states)",
        model.dim_a(),
        extended.dim_a(),
        extended.dim_a() / model.dim_a()
    );

    let mut rng = ChaCha12Rng::seed_from_u64(17);
    let rho = random_full_rank_state(&mut rng, 2);
    println!();
    println!("{:<6} {:>12} {:>12} {:>14} {:>14}", "x", "p", "p (ext)", "dE_comp", "dE_comp (ext)");
    for b in outcome_branches(&model, &rho).unwrap() {
        if !b.defined {
            continue;
        }
        let ext_branches = outcome_branches(&extended, &rho).unwrap();
        let e = ext_branches
            .iter()
            .find(|eb| eb.outcome == b.outcome)
            .unwrap();
        let de = total_energy_change(&model, &rho, &b.outcome).unwrap();
        let de_ext = total_energy_change(&extended, &rho, &b.outcome).unwrap();
        println!(
            "{:<6} {:>12.8} {:>12.8} {:>14.8} {:>14.8}",
            b.outcome.to_string(),
            b.prob,
            e.prob,
            de,
            de_ext
        );
    }
}
