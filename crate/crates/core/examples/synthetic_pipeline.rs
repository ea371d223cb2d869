//! Generates a synthetic corpus, runs every stage on it, and prints where
//! the outputs went.
//!
//! cargo run --example synthetic_pipeline -- [out_dir] [seed]

use std::path::PathBuf;

use newstrust::io::synth::SynthParams;
use newstrust::pipeline::{cmd_pipeline, cmd_synth};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("newstrust-demo"));
    let seed = args.next().map_or(1, |s| s.parse().expect("integer seed"));

    let params = SynthParams {
        n_orgs: 150,
        seed,
        ..SynthParams::default()
    };
    let files = cmd_synth(&params, &dir).expect("corpus written");
    let run = cmd_pipeline(&files.config).expect("pipeline runs");

    let m = &run.manifest;
    println!(
        "TSM: {} iterations, converged={}; {} analysis rows",
        m.tsm.iterations_run, m.tsm.converged, m.analysis_rows
    );
    for out in &m.outputs {
        println!("  {}", out.display());
    }
    for r in &run.reports {
        let last = r.final_model().expect("at least one model");
        println!(
            "{}: final adjusted R² {:.3}, trustworthiness entered: {}",
            r.dv_name,
            last.fit.adjusted_r_squared,
            r.entered("trustworthiness")
        );
    }
}
