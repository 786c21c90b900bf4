//! Sweep of the two-level sequential-measurement scenario over Δθ,
//! printing CSV identical to the `figure2` CLI subcommand.
//!
//! The conditional change ΔE(+,e) varies with the first measurement's
//! basis angle while the trajectory-style reference ΔẼ(+,e) stays at +1/2;
//! the two coincide at Δθ = 0, and every conditional work vanishes at
//! Δθ = π/2 where the premeasurement conserves the total energy.
//!
//! Run with: cargo run --example figure2_sweep

use qworkstats::scenarios::{
    default_theta2_grid, figure2_sweep, scenario_outcomes, QubitScenarioConfig,
};

fn main() {
    let cfg = QubitScenarioConfig::default(); // theta1 = pi/2, q = 0.5
    let rows = figure2_sweep(&cfg, &default_theta2_grid(19)).unwrap();
    let outcomes = scenario_outcomes();

    println!("delta_theta,dE_plus_e,dE_ref_plus_e,W_plus_e,W_minus_g,p_plus_e");
    for row in &rows {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "NA".into());
        println!(
            "{:.6},{},{},{},{},{}",
            row.delta_theta,
            fmt(row.d_e_plus_e),
            fmt(row.d_e_ref_plus_e),
            fmt(row.work.get(&outcomes[0]).copied()),
            fmt(row.work.get(&outcomes[3]).copied()),
            fmt(row.probs.get(&outcomes[0]).copied()),
        );
    }

    let mid = rows.iter().find(|r| r.delta_theta.abs() < 1e-12).unwrap();
    eprintln!();
    eprintln!(
        "at delta_theta = 0: dE(+,e) = {:.6} equals dE_ref(+,e) = {:.6}",
        mid.d_e_plus_e.unwrap(),
        mid.d_e_ref_plus_e.unwrap()
    );
    let end = rows.last().unwrap();
    let max_w = end.work.values().fold(0.0_f64, |a, w| a.max(w.abs()));
    eprintln!("at delta_theta = pi/2: max |W(x)| = {max_w:.2e}");
}
