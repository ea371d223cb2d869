//! Blockwise stepwise regression on simulated organization data, rendered
//! as a text table and as JSON.

use newstrust::regression::{blockwise_stepwise, Dataset, ReportFormat, StepwiseConfig};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64;

fn main() {
    let mut rng = Pcg64::seed_from_u64(2018);
    let z = Normal::new(0.0, 1.0).unwrap();
    let n = 310;
    let mut draw = || (0..n).map(|_| z.sample(&mut rng)).collect::<Vec<f64>>();
    let circulation = draw();
    let trust = draw();
    let quantity = draw();
    let skill = draw();
    let noise = draw();
    let likes: Vec<f64> = (0..n)
        .map(|i| 0.3 * circulation[i] + 0.7 * trust[i] + 0.15 * skill[i] + noise[i])
        .collect();

    let data = Dataset::new(
        (0..n).map(|i| format!("org{i}")).collect(),
        [
            "circulation",
            "trustworthiness",
            "quantity_of_tweets",
            "skillfulness",
            "avg_likes",
        ]
        .map(String::from)
        .to_vec(),
        vec![circulation, trust, quantity, skill, likes],
    )
    .unwrap();
    let blocks = vec![
        vec!["circulation".to_string()],
        vec!["trustworthiness".to_string()],
        vec!["quantity_of_tweets".to_string(), "skillfulness".to_string()],
    ];
    let report =
        blockwise_stepwise(&data, "avg_likes", &blocks, &StepwiseConfig::default()).unwrap();
    print!("{}", report.render(ReportFormat::Text));

    if std::env::args().any(|a| a == "--json") {
        println!("{}", report.render(ReportFormat::Json));
    }
}
