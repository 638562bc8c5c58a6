//! Two completely strongly porous sets whose union is not: E1 = {τ_n} with
//! τ_n = 2^(-n³) and E1* = {2^(-m(n)) τ_n} for the 2-adic partition m.

use porosity::constructions::{default_split_pair, ratio_growth_check};
use porosity::gap_analysis::default_epsilon;
use porosity::porosity_metrics::classify_csp;

fn main() -> porosity::Result<()> {
    let eps = default_epsilon();
    let family = default_split_pair();
    println!("first points of E1*: {:?}", family.e1_star.enumerate(5)?);
    for depth in [8, 16] {
        println!(
            "min τ*_n/τ*_(n+1) over the deep half at depth {depth}: 2^{}",
            ratio_growth_check(&family, depth)?.floor_log2()
        );
    }

    for (label, set) in [
        ("E1", family.e1.clone()),
        ("E1*", family.e1_star.clone()),
        ("E1 ∪ E1*", family.union()?),
    ] {
        let cert = classify_csp(&set, 24, &eps)?;
        println!("{label}: {}", cert.verdict);
        if let Some(w) = cert.witness {
            println!("  witness sequence: {}", w.tau.rule().unwrap_or("?"));
            for v in w.violations.iter().filter(|v| v.k == porosity::rat(2, 1)).take(5) {
                println!(
                    "  n = {:2}  k = {}  K = {:5}  point 2^{}",
                    v.index,
                    v.k,
                    v.big_k.to_string(),
                    v.point.floor_log2()
                );
            }
        }
    }
    Ok(())
}
