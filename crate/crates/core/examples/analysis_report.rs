//! The JSON report behind `porosity analyze`, plus its plot table.

use porosity::gap_analysis::{default_epsilon, default_tol};
use porosity::report::{build_report, AnalysisReport, Parameters, Stages};
use porosity::set_model::{make_set, SetSpec, DEFAULT_BIT_BUDGET};

fn main() -> porosity::Result<()> {
    let set = make_set(SetSpec::factorial())?;
    let params = Parameters {
        depth: 16,
        epsilon: default_epsilon(),
        tol: default_tol(),
        bit_budget: DEFAULT_BIT_BUDGET,
    };
    let report = build_report("analyze", Stages::Analyze, &set, params, false)?;
    let json = report.to_json()?;
    assert_eq!(AnalysisReport::from_json(&json)?, report);

    let q = &report.quantities;
    for (name, v) in [("M", &q.m), ("C_E", &q.c_e), ("R*", &q.r_star), ("R₊", &q.r_low)] {
        if let Some(v) = v {
            println!(
                "{name:4} {:<6} converged {:<5} {}",
                v.value.to_string(),
                v.converged,
                v.provenance
            );
        }
    }
    print!("{}", report.plot_tsv().lines().take(5).collect::<Vec<_>>().join("\n"));
    println!();
    println!("{} bytes of JSON", json.len());
    Ok(())
}
