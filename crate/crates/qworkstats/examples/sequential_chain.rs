//! Additive conditional energy bookkeeping along a sequence of
//! measurements.
//!
//! Naively summing per-measurement energy changes does not reproduce the
//! whole-sequence change; evaluating each step's conditional energy through
//! the remaining instruments (with a trivial trailing measurement) restores
//! additivity exactly.
//!
//! Run with: cargo run --example sequential_chain

use qworkstats::energetics::{sequential_energy_chain, EnergeticsConfig};
use qworkstats::measurement::outcome_branches;
use qworkstats::opcore::Operator;
use qworkstats::scenarios::{random_full_rank_state, random_hermitian, random_model, ModelFlags};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let models: Vec<_> = (0..3)
        .map(|k| random_model(900 + k, 2, 2, 2, ModelFlags::default()).unwrap())
        .collect();
    let hams: Vec<Operator> = (0..4).map(|_| random_hermitian(&mut rng, 2)).collect();
    let rho = random_full_rank_state(&mut rng, 2);

    // Follow the most likely outcome at each step.
    let mut outcomes = Vec::new();
    let mut state = rho.clone();
    for model in &models {
        let best = outcome_branches(model, &state)
            .unwrap()
            .into_iter()
            .filter(|b| b.defined)
            .max_by(|a, b| a.prob.total_cmp(&b.prob))
            .unwrap();
        outcomes.push(best.outcome.clone());
        state = best.rho_x.unwrap();
    }

    let chain =
        sequential_energy_chain(&models, &rho, &outcomes, &hams, &EnergeticsConfig::default())
            .unwrap();
    println!("three-measurement chain along outcomes {:?}:", labels(&outcomes));
    println!("{:>4} {:>12} {:>12}", "step", "E_i", "dE_i");
    let mut total = 0.0;
    for (i, step) in chain.iter().enumerate() {
        println!("{:>4} {:>12.6} {:>12.6}", i + 1, step.energy, step.delta_e);
        total += step.delta_e;
    }
    let e_last = chain.last().unwrap().energy + chain.last().unwrap().delta_e;
    println!();
    println!("sum of step changes:        {total:.10}");
    println!("whole-sequence E_end-E_1:   {:.10}", e_last - chain[0].energy);
}

fn labels(outcomes: &[qworkstats::Outcome]) -> Vec<String> {
    outcomes.iter().map(|o| o.to_string()).collect()
}
