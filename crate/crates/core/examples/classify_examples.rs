//! CSP certificates for the named constructions.

use porosity::constructions::{named_construction, CONSTRUCTION_NAMES};
use porosity::gap_analysis::default_epsilon;
use porosity::porosity_metrics::classify_csp;

fn main() -> porosity::Result<()> {
    let eps = default_epsilon();
    for name in CONSTRUCTION_NAMES {
        let c = named_construction(name, None)?;
        let cert = classify_csp(&c.set, 24, &eps)?;
        let m = cert
            .m_value
            .as_ref()
            .map_or("-".to_string(), |m| format!("{} (converged {})", m.value, m.converged));
        let chain = cert.universal_chain.as_ref().map_or(0, |ch| ch.len());
        println!(
            "{name:16} verdict {:<13} expected {:<8} M {m}  chain length {chain}",
            cert.verdict.to_string(),
            c.expected_verdict.to_string()
        );
        if let Some(reason) = &cert.reason {
            println!("  {reason}");
        }
    }
    Ok(())
}
