//! Gaps of {2^(-n²)} near 0: the consecutive gaps, λ(E,0,h) at a few
//! windows, and the porosity profile λ(E,0,h)/h.

use porosity::gap_analysis::{gaps, largest_gap_length, porosity_plus};
use porosity::set_model::{make_set, ExponentRule, SetSpec};
use porosity::{rat, ExactRational};

fn main() -> porosity::Result<()> {
    let w = make_set(SetSpec::super_geometric(ExponentRule::square()))?;

    println!("consecutive gaps (left, right) and relative length:");
    for g in gaps(&w, 6)? {
        println!("  ({}, {})  {}", g.left, g.right, g.relative_length());
    }

    for h in [rat(1, 1), rat(1, 3), ExactRational::pow2(-5)] {
        let l = largest_gap_length(&w, &h, 16)?;
        println!("λ(E,0,{h}) = {} via ({}, {})", l.value, l.gap.left, l.gap.right);
    }

    let p = porosity_plus(&w, 16)?;
    println!("profile at depth 16:");
    for pt in p.profile.iter().take(6) {
        println!("  h = {:<12} λ/h = {:.12}", pt.h.to_string(), pt.ratio.to_f64());
    }
    println!("p+ ≈ {:.15} converged: {}", p.estimate.to_f64(), p.converged);
    Ok(())
}
