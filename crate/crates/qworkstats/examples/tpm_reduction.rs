//! Two-point energy-measurement statistics recovered from the general
//! conditional-energy definition.
//!
//! Projecting onto an eigenspace of H(0), evolving unitarily, then
//! projecting onto an eigenspace of H(τ) makes every conditional energy
//! change an exact eigenvalue difference ε_n(τ) - ε_m(0).
//!
//! Run with: cargo run --example tpm_reduction

use qworkstats::energetics::tpm_distribution;
use qworkstats::opcore::{spectral_decompose, DEGENERACY_TOL};
use qworkstats::scenarios::{haar_unitary_operator, random_full_rank_state, random_hermitian};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let dim = 3;
    let u = haar_unitary_operator(&mut rng, vec![dim]);
    let h0 = random_hermitian(&mut rng, dim);
    let h_tau = random_hermitian(&mut rng, dim);
    let rho = random_full_rank_state(&mut rng, dim);

    let sd0 = spectral_decompose(&h0, DEGENERACY_TOL).unwrap();
    let sd_tau = spectral_decompose(&h_tau, DEGENERACY_TOL).unwrap();
    println!("eigenvalues of H(0):   {:?}", rounded(&sd0.eigenvalues));
    println!("eigenvalues of H(tau): {:?}", rounded(&sd_tau.eigenvalues));
    println!();
    println!("{:>3} {:>3} {:>10} {:>12} {:>14}", "m", "n", "p(m,n)", "dE(m,n)", "eps_n - eps_m");

    let mut avg = 0.0;
    for b in tpm_distribution(&u, &h0, &h_tau, &rho).unwrap() {
        if !b.defined {
            continue;
        }
        let de = b.delta_e.unwrap();
        avg += b.prob * de;
        println!(
            "{:>3} {:>3} {:>10.6} {:>12.6} {:>14.6}",
            b.m,
            b.n,
            b.prob,
            de,
            sd_tau.eigenvalues[b.n] - sd0.eigenvalues[b.m]
        );
    }
    println!();
    println!("average energy change over all branches: {avg:.6}");
    println!("(equals the dephased-then-evolved mean, not the coherent unitary mean)");
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
