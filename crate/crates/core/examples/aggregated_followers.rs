//! Compares a uniform start with the follower-count start, where each news
//! organization begins with trustingness 1 / follower_count.

use newstrust::graph::{EdgeSpec, NodeAttrs, TrustGraph};
use newstrust::tsm::{aggregated_initialization, run_tsm, TsmConfig};

fn main() {
    let edges = vec![
        EdgeSpec::new("reader1", "daily"),
        EdgeSpec::new("reader2", "daily"),
        EdgeSpec::new("reader2", "weekly"),
        EdgeSpec::new("daily", "reader1"),
        EdgeSpec::new("weekly", "daily"),
        EdgeSpec::new("weekly", "reader2"),
    ];
    let nodes = vec![
        NodeAttrs::news_org("daily", 1_000_000),
        NodeAttrs::news_org("weekly", 10),
    ];
    let g = TrustGraph::build(&edges, &nodes).expect("valid graph");
    let cfg = TsmConfig::default();

    let init = aggregated_initialization(&g).expect("orgs have follower counts");
    for (id, ti, _) in init.rows() {
        println!("start  {id:<8} ti={ti:e}");
    }

    let uniform = run_tsm(&g, &cfg, None).unwrap();
    let seeded = run_tsm(&g, &cfg, Some(&init)).unwrap();
    println!("\n{:<8} {:>12} {:>12}", "node", "tw uniform", "tw seeded");
    for id in g.ids().iter() {
        println!(
            "{id:<8} {:>12.8} {:>12.8}",
            uniform.trustworthiness_of(id).unwrap(),
            seeded.trustworthiness_of(id).unwrap()
        );
    }
}
