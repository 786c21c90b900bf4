//! Quasi-probability representation of the energy statistics of measuring
//! the Heisenberg-evolved Hamiltonian.
//!
//! For a state with coherence in the initial energy basis the table
//! Re tr[P̃ⁿ(τ) Pᵐ(0) ρ] can carry negative entries, yet it still sums to
//! one and reproduces both the per-outcome energy changes and the full
//! unitary mean-energy change.
//!
//! Run with: cargo run --example quasiprobability

use num_complex::Complex64 as C64;
use qworkstats::energetics::quasiprob_distribution;
use qworkstats::opcore::{DensityState, Operator};
use qworkstats::scenarios::haar_unitary_operator;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let u = haar_unitary_operator(&mut rng, vec![2]);
    let h = Operator::from_diagonal(vec![2], &[-0.5, 0.5]).unwrap();
    // A state far from the energy basis.
    let theta: f64 = 1.1;
    let rho = DensityState::pure(
        vec![2],
        &[
            C64::new((theta / 2.0).cos(), 0.0),
            C64::new((theta / 2.0).sin(), 0.2),
        ],
    )
    .unwrap();

    let qp = quasiprob_distribution(&u, &h, &h, &rho).unwrap();
    println!("quasi-probability table p~(m,n):");
    for (m, row) in qp.quasi.iter().enumerate() {
        for (n, v) in row.iter().enumerate() {
            print!("  p~({m},{n}) = {v:>9.6}");
        }
        println!();
    }
    let total: f64 = qp.quasi.iter().flatten().sum();
    println!("sum of the table: {total:.12}");
    println!("most negative entry: {:.6}", qp.most_negative());
    println!();
    for (n, (&p, de)) in qp.probs.iter().zip(&qp.delta_e).enumerate() {
        let lhs: f64 = qp
            .quasi
            .iter()
            .enumerate()
            .map(|(m, row)| row[n] * (qp.eps_final[n] - qp.eps_initial[m]))
            .sum();
        println!(
            "outcome {n}: p = {p:.6}, dE = {:.6}; sum_m p~(m,{n})(eps_n - eps_m) = {lhs:.6}",
            de.unwrap()
        );
    }
}
