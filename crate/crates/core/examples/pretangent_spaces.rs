//! Finite-depth pretangent spaces: stability of distance ratios, a
//! self-stable family with its metric identification, and sampled R*.

use porosity::gap_analysis::default_tol;
use porosity::pretangent::{
    build_self_stable, limit_ratio, sample_r_star, space_extremes, PointSequence, ScalingSequence,
};
use porosity::rat;
use porosity::sequence::{SequenceSource, TruncatedSequence};
use porosity::set_model::{make_set, ExponentRule, SetSpec};

fn main() -> porosity::Result<()> {
    let tol = default_tol();
    let set = make_set(SetSpec::doubled(
        SetSpec::super_geometric(ExponentRule::square()),
        rat(2, 1),
    ))?;
    let pts = set.enumerate(36)?;

    // Scaling r_n = x_n on the lower copies; candidates are the upper copies
    // 2·x_n and the next lower copy.
    let idx: Vec<usize> = (1..34).step_by(2).collect();
    let r_vals: Vec<_> = idx.iter().map(|&i| pts[i].clone()).collect();
    let r = ScalingSequence::from_set_values(TruncatedSequence::new(
        r_vals.clone(),
        SequenceSource::FromSetEnumeration,
    )?);
    let upper = PointSequence::new("upper copy", idx.iter().map(|&i| pts[i - 1].clone()).collect());
    let same = PointSequence::new("scaling itself", r_vals);
    let next = PointSequence::new("next pair", idx.iter().map(|&i| pts[i + 1].clone()).collect());

    let st = limit_ratio(&upper, &same, &r, &tol)?;
    println!(
        "|2x_n - x_n| / x_n: {:?}, limit {:?}",
        st.status,
        st.limit.map(|l| l.to_string())
    );

    let omega = build_self_stable(&r, &[upper, same, next], &tol)?;
    println!(
        "{} members in {} classes, {} retained indices",
        omega.members.len(),
        omega.class_count(),
        omega.indices.len()
    );
    for (i, row) in omega.distances.iter().enumerate() {
        let row: Vec<String> = row.iter().map(|d| d.to_string()).collect();
        println!("  class {i}: {}", row.join("  "));
    }
    let ext = space_extremes(&omega);
    println!(
        "ρ* = {}, ρ₊ = {}, triangle inequality {}",
        ext.rho_star,
        ext.rho_low,
        omega.satisfies_triangle_inequality()
    );

    let s = sample_r_star(&set, 24, 4, &tol)?;
    println!(
        "sampled R* = {}, R₊ = {}, C_E = {}, {} spaces, {} skipped",
        s.r_star,
        s.r_low,
        s.c_e,
        s.spaces.len(),
        s.skipped
    );
    if let Some(w) = s.witness {
        println!("proof witness space: ρ* = {}", w.rho_star);
    }
    Ok(())
}
