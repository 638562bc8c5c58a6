//! Doubling a fast-decaying set by a factor c puts the gaps (c·x_{n+1}, x_n)
//! in the universal chain, so M = C_E = c.

use porosity::constructions::doubled_gap_set;
use porosity::gap_analysis::default_epsilon;
use porosity::porosity_metrics::{c_e_estimate, classify_csp};
use porosity::rat;
use porosity::set_model::{ExponentRule, SetSpec};

fn main() -> porosity::Result<()> {
    let eps = default_epsilon();
    for c in [rat(2, 1), rat(3, 1), rat(5, 2)] {
        let built = doubled_gap_set(SetSpec::super_geometric(ExponentRule::square()), c.clone())?;
        let cert = classify_csp(&built.set, 24, &eps)?;
        let ce = c_e_estimate(&built.set, 24, &eps, 4)?;
        let m = cert.m_value.map(|m| m.value.to_string()).unwrap_or_default();
        println!(
            "c = {c}: verdict {}, M = {m}, C_E = {} over {} sequences",
            cert.verdict, ce.value, ce.samples
        );
    }

    // A factor that makes c·x_2 reach x_1 is refused.
    let err = doubled_gap_set(SetSpec::geometric(rat(1, 2)), rat(2, 1)).unwrap_err();
    println!("geometric base: {err}");
    Ok(())
}
