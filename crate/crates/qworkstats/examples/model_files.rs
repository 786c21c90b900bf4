//! Writing and reading the JSON model/state file format consumed by the
//! `report` CLI subcommand.
//!
//! Run with: cargo run --example model_files

use qworkstats::modelfile::{load_model, load_state, save_model, save_state};
use qworkstats::scenarios::{build_qubit_model, initial_state, QubitScenarioConfig};
use qworkstats::thermo::thermo_report;
use qworkstats::workstats::work_reports;

fn main() {
    let cfg = QubitScenarioConfig {
        theta2: 0.9,
        ..Default::default()
    };
    let model = build_qubit_model(&cfg).unwrap();
    let rho = initial_state(&cfg);

    let dir = std::env::temp_dir();
    let model_path = dir.join("qworkstats-example-model.json");
    let state_path = dir.join("qworkstats-example-state.json");
    save_model(&model_path, &model).unwrap();
    save_state(&state_path, &rho).unwrap();
    println!("wrote {}", model_path.display());
    println!("wrote {}", state_path.display());

    let loaded = load_model(&model_path).unwrap();
    let loaded_rho = load_state(&state_path, loaded.dim_s()).unwrap();
    assert_eq!(model, loaded);
    println!("reloaded model is identical to the original");

    println!();
    println!("per-outcome work from the reloaded files:");
    for rep in work_reports(&loaded, &loaded_rho).unwrap() {
        println!("  W({}) = {:>10.6} at p = {:.6}", rep.outcome, rep.work, rep.prob);
    }
    let t = thermo_report(&loaded, &loaded_rho, 1.0).unwrap();
    println!("non-recoverable work at k_B T = 1: {:.6}", t.w_irr);

    let _ = std::fs::remove_file(model_path);
    let _ = std::fs::remove_file(state_path);
}
