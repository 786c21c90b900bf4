//! Non-recoverable work of the three projective realizations of the same
//! observable: ideal (Lüders), repeatable (intra-eigenspace unitary
//! mixing), and noisy (full-rank apparatus, SWAP premeasurement).
//!
//! The non-inclusive values order as Rep >= Ideal >= Noisy, with the
//! Ideal-Noisy gap exactly k_B T times the outcome entropy; the inclusive
//! values coincide across all three classes.
//!
//! Run with: cargo run --example projective_classes

use num_complex::Complex64 as C64;
use qworkstats::measurement::{Outcome, Povm, RepeatableSpec};
use qworkstats::opcore::{DensityState, Operator};
use qworkstats::thermo::projective_comparison;

fn main() {
    // Measurement of sigma_z on |+> at k_B T = 1.
    let pvm = Povm::new(
        vec![Outcome::new("g"), Outcome::new("e")],
        vec![
            Operator::basis_projector(vec![2], 0),
            Operator::basis_projector(vec![2], 1),
        ],
    )
    .unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityState::pure(vec![2], &[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
    let spec = RepeatableSpec::trivial(vec![0.5, 0.5], 2, 2).unwrap();
    let xi_noisy = DensityState::maximally_mixed(vec![2]);

    let cmp = projective_comparison(&pvm, &spec, &xi_noisy, &plus, 1.0).unwrap();
    let ln2 = 2f64.ln();
    println!("sigma_z on |+>, k_B T = 1 (ln 2 = {ln2:.6}):");
    println!("  W_irr:  rep = {:.6}, ideal = {:.6}, noisy = {:.6}", cmp.w_irr_rep, cmp.w_irr_ideal, cmp.w_irr_noisy);
    println!("  W_inc:  rep = {:.6}, ideal = {:.6}, noisy = {:.6}", cmp.w_inc_rep, cmp.w_inc_ideal, cmp.w_inc_noisy);
    println!("  ideal - noisy gap = {:.6} = k_B T * H", cmp.w_irr_ideal - cmp.w_irr_noisy);
    println!();

    // A degenerate observable in dim 3 with a genuinely mixed repeatable
    // instrument: the repeatable class pays strictly more.
    let p01 = &Operator::basis_projector(vec![3], 0) + &Operator::basis_projector(vec![3], 1);
    let p2 = Operator::basis_projector(vec![3], 2);
    let pvm3 = Povm::new(
        vec![Outcome::new("in"), Outcome::new("out")],
        vec![p01, p2],
    )
    .unwrap();
    let theta: f64 = 0.7;
    let rot = Operator::from_rows(
        vec![3],
        &[
            vec![C64::new(theta.cos(), 0.0), C64::new(-theta.sin(), 0.0), C64::ZERO],
            vec![C64::new(theta.sin(), 0.0), C64::new(theta.cos(), 0.0), C64::ZERO],
            vec![C64::ZERO, C64::ZERO, C64::ONE],
        ],
    )
    .unwrap();
    let id = Operator::identity(vec![3]);
    let spec3 = RepeatableSpec::new(vec![0.5, 0.5], vec![vec![id.clone(), rot], vec![id.clone(), id]]).unwrap();
    let xi3 = DensityState::maximally_mixed(vec![3]);
    let psi = DensityState::pure(
        vec![3],
        &[C64::new(0.8, 0.0), C64::new(0.6, 0.0), C64::ZERO],
    )
    .unwrap();
    let cmp3 = projective_comparison(&pvm3, &spec3, &xi3, &psi, 1.0).unwrap();
    println!("degenerate observable, mixed intra-block rotations:");
    println!("  W_irr:  rep = {:.6} > ideal = {:.6} >= noisy = {:.6}", cmp3.w_irr_rep, cmp3.w_irr_ideal, cmp3.w_irr_noisy);
    println!("  W_inc:  rep = {:.6} = ideal = {:.6} = noisy = {:.6}", cmp3.w_inc_rep, cmp3.w_inc_ideal, cmp3.w_inc_noisy);
    println!("  mixing penalty (Uhlmann gap) = {:.6}", cmp3.w_irr_rep - cmp3.w_irr_ideal);
}
