// Reference correlation tables for a four-outcome target, checked against
// themselves and printed block by block.

use selftest::correlations::{reference_tables, verify_tables, CONSTRAINED_PAIRS, VERIFY_TOL};
use selftest::SchmidtCoefficients;

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::new(vec![0.8, 0.4, 0.4, 0.2])?;
    let tables = reference_tables(&sc);
    let d = sc.d();

    for &(x, y) in &CONSTRAINED_PAIRS {
        println!("T[{x},{y}]");
        let t = tables.require(x, y)?;
        for row in t.chunks(d) {
            let cells: Vec<String> = row.iter().map(|p| format!("{p:8.5}")).collect();
            println!("  {}", cells.join(" "));
        }
    }

    let report = verify_tables(&tables, &sc, VERIFY_TOL)?;
    println!("self-check: pass = {}, block residual = {:.1e}", report.pass, report.block_residual);
    assert!(report.pass);
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
