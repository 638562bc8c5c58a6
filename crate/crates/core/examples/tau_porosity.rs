//! Porosity along a chosen sequence τ: the (kτ_n, Kτ_n) interval test, the
//! dominating-chain constant C(τ), and ≍ comparison of sequences.

use porosity::gap_analysis::default_epsilon;
use porosity::porosity_metrics::{c_tau, is_asymp, tau_porosity_test};
use porosity::sequence::{SequenceSource, TruncatedSequence};
use porosity::set_model::{make_set, ExponentRule, SetSpec};
use porosity::{rat, ExactRational};

fn main() -> porosity::Result<()> {
    let eps = default_epsilon();
    let doubled = make_set(SetSpec::doubled(
        SetSpec::super_geometric(ExponentRule::square()),
        rat(2, 1),
    ))?;
    let pts = doubled.enumerate(24)?;

    // Every other point: the lower copy x_n of each pair.
    let lower: Vec<ExactRational> = pts.iter().skip(1).step_by(2).cloned().collect();
    let tau = TruncatedSequence::new(lower, SequenceSource::FromSetEnumeration)?;
    for (k, big_k) in [(rat(3, 2), rat(8, 1)), (rat(3, 1), rat(64, 1))] {
        let r = tau_porosity_test(&doubled, &tau, &k, &big_k, 24)?;
        println!(
            "k = {k}, K = {big_k}: holds eventually {:?}, violations {}",
            r.holds_eventually,
            r.violations.len()
        );
    }
    let c = c_tau(&doubled, &tau, 24, &eps)?;
    println!("C(τ) = {}", c.value);

    let geo = make_set(SetSpec::geometric(rat(1, 2)))?;
    let g_tau = TruncatedSequence::from_set(&geo, 16)?;
    println!(
        "geometric 1/2, C(enumeration) = {}",
        c_tau(&geo, &g_tau, 16, &eps)?.value
    );

    let a = TruncatedSequence::from_set(&geo, 16)?;
    let b = a.scaled(&rat(3, 1))?;
    let r = is_asymp(&a, &b, 16)?;
    println!(
        "(2^-n) ≍ (3·2^-n): {:?} with c1 = {:?}, c2 = {:?}",
        r.equivalent, r.c1, r.c2
    );
    Ok(())
}
