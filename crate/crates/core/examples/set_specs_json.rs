//! Set specs as JSON: parse, build, combine and write them back.

use porosity::constructions::named_construction;
use porosity::rat;
use porosity::set_model::{make_set, make_set_with_budget, rescale, union, SetSpec};

fn main() -> porosity::Result<()> {
    let text = r#"{"kind": "explicit",
                   "params": {"points": ["1", "1/3", "1/10"],
                              "tail": {"kind": "rescaled",
                                       "params": {"base": {"kind": "factorial-decay", "params": {}},
                                                  "factor": "1/20"}}}}"#;
    let spec: SetSpec = serde_json::from_str(text)?;
    let e = make_set(spec)?;
    println!("explicit with tail: {:?}", e.enumerate(6)?);

    let g = make_set(SetSpec::geometric(rat(1, 2)))?;
    let u = union(&e, &rescale(&g, &rat(1, 7))?)?;
    println!("union with (1/7)·2^-n: {:?}", u.enumerate(8)?);
    println!("{}", serde_json::to_string(u.spec())?);

    let d = named_construction("doubled", Some(rat(3, 1)))?;
    println!("{}", serde_json::to_string_pretty(&d.record())?);

    // A tight bit budget stops the enumeration instead of growing without bound.
    let tight = make_set_with_budget(SetSpec::factorial(), 40)?;
    println!("factorial with 40 bits: {:?}", tight.enumerate(20).unwrap_err());
    Ok(())
}
