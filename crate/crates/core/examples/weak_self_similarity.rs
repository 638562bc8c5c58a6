//! Q(𝔉) and weak self-similarity for families of pointed spaces given by
//! their distance sets from the marked point.

use porosity::pretangent::family_q;
use porosity::rat;

fn main() -> porosity::Result<()> {
    let families = [
        (
            "{0,1,2}, {0,1/2,1}",
            vec![
                vec![rat(0, 1), rat(1, 1), rat(2, 1)],
                vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            ],
        ),
        ("{0,1,2} alone", vec![vec![rat(0, 1), rat(1, 1), rat(2, 1)]]),
        ("{0,1}", vec![vec![rat(0, 1), rat(1, 1)]]),
        ("{0}, {0,1}", vec![vec![rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]),
    ];
    for (label, spaces) in families {
        let f = family_q(&spaces)?;
        println!(
            "{label:22} Q = {:<4} weakly self-similar {:<5} spheres nonempty {:<5} R* = {} R₊ = {}",
            f.q.to_string(),
            f.weakly_self_similar,
            f.spheres_nonempty,
            f.r_star,
            f.r_low
        );
    }
    Ok(())
}
