//! Geometric sets {qⁿ} have p+ = 1 - q and are never completely strongly
//! porous. The certificate names the sequence and the (k, K) intervals that
//! keep meeting the set.

use porosity::gap_analysis::{default_epsilon, porosity_plus};
use porosity::porosity_metrics::classify_csp;
use porosity::rat;
use porosity::set_model::{make_set, SetSpec};

fn main() -> porosity::Result<()> {
    for q in [rat(1, 2), rat(1, 3), rat(9, 10)] {
        let set = make_set(SetSpec::geometric(q.clone()))?;
        let p = porosity_plus(&set, 32)?;
        let cert = classify_csp(&set, 32, &default_epsilon())?;
        println!(
            "q = {q}: p+ = {} (converged {}), verdict {}",
            p.estimate, p.converged, cert.verdict
        );
        if let Some(w) = cert.witness {
            println!(
                "  every k up to {} is defeated; {} violations, first {:?}",
                w.k,
                w.violations.len(),
                w.violations.first()
            );
        }
    }
    Ok(())
}
