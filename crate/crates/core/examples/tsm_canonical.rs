//! Scores the five-node graph where A is followed by B, C and D, and E
//! follows those three. Prints both scores after every iteration.

use newstrust::graph::{EdgeSpec, TrustGraph};
use newstrust::tsm::{run_tsm_observed, TsmConfig};

fn main() {
    let edges: Vec<EdgeSpec> = [
        ("B", "A"),
        ("C", "A"),
        ("D", "A"),
        ("E", "B"),
        ("E", "C"),
        ("E", "D"),
    ]
    .into_iter()
    .map(|(s, d)| EdgeSpec::new(s, d))
    .collect();
    let g = TrustGraph::build(&edges, &[]).expect("valid graph");

    let mut iteration = 0;
    let scores = run_tsm_observed(&g, &TsmConfig::default(), None, |s| {
        iteration += 1;
        let row: Vec<String> = s
            .rows()
            .map(|(id, ti, tw)| format!("{id}: ti={ti:.4} tw={tw:.4}"))
            .collect();
        println!("iter {iteration:>2}  {}", row.join("  "));
    })
    .expect("graph has edges");

    println!(
        "converged={} after {} iterations (last change {:.2e})",
        scores.converged, scores.iterations_run, scores.final_delta
    );
}
