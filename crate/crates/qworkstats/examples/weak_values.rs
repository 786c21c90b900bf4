//! Generalised weak values as pre-measurement conditional energies.
//!
//! tr[M_x H ρ]/tr[M_x ρ] is generally complex; its real part is the
//! conditional energy before the measurement. When the state is a mixture
//! of orthogonal pure states and the measurement first projects onto one of
//! them, the weak value collapses to that pure state's energy — the
//! stochastic-trajectory picture.
//!
//! Run with: cargo run --example weak_values

use num_complex::Complex64 as C64;
use qworkstats::energetics::weak_value;
use qworkstats::opcore::{DensityState, Operator};

fn main() {
    let h = Operator::from_diagonal(vec![2], &[-0.5, 0.5]).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityState::pure(vec![2], &[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();

    // Postselecting |+> on the ground state: the weak value -1/2 sits at
    // the edge of the spectrum.
    let m_g = Operator::basis_projector(vec![2], 0);
    let wv = weak_value(&plus, &m_g, &h).unwrap();
    println!("postselect g:  {:.4} + {:.4}i", wv.re, wv.im);

    // A postselection that is not diagonal in the energy basis picks up an
    // imaginary part; an anomalous real part can leave the spectrum.
    let post = DensityState::pure(vec![2], &[C64::new(0.97, 0.0), C64::new(0.15, 0.19)]).unwrap();
    let wv = weak_value(&plus, post.operator(), &h).unwrap();
    println!("skew postselection: {:.4} + {:.4}i", wv.re, wv.im);

    // Trajectory reduction: mixture of orthogonal pure states, measurement
    // projecting onto the first one.
    let psi = DensityState::pure(vec![2], &[C64::new(0.6, 0.0), C64::new(0.8, 0.0)]).unwrap();
    let perp = DensityState::pure(vec![2], &[C64::new(0.8, 0.0), C64::new(-0.6, 0.0)]).unwrap();
    let rho = DensityState::new(
        &psi.operator().scale_re(0.3) + &perp.operator().scale_re(0.7),
    )
    .unwrap();
    let m2 = Operator::identity(vec![2]).scale_re(0.4); // any second effect
    let effect = &(psi.operator() * &m2) * psi.operator();
    let wv = weak_value(&rho, &effect, &h).unwrap();
    println!();
    println!("trajectory start at |psi>: weak value = {:.6} + {:.6}i", wv.re, wv.im);
    println!("<psi|H|psi>               = {:.6}", psi.expectation(&h));
}
