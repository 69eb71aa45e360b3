// Diagnostics for realizations that do not produce the reference
// correlation: a corrupted table and a realization with a mis-wired Bob.

use selftest::correlations::{reference_tables, verify_tables, VERIFY_TOL};
use selftest::extraction::{extract, EXTRACT_TOL};
use selftest::ideal::ideal_realization;
use selftest::{Error, Realization, SchmidtCoefficients};

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::new(vec![0.8, 0.6])?;

    let mut tables = reference_tables(&sc);
    if let Some(t) = tables.get_mut(1, 1) {
        t[1] += 1e-3;
    }
    let rep = verify_tables(&tables, &sc, VERIFY_TOL)?;
    println!("corrupted table: pass = {}, block residual {:.3e}", rep.pass, rep.block_residual);
    assert!(!rep.pass);

    // Swap Bob's two unprimed settings.
    let ideal = ideal_realization(&sc);
    let mut bob = ideal.bob_measurements().to_vec();
    bob.swap(0, 1);
    let r = Realization::new(2, 2, sc.target_state(), ideal.alice_measurements().to_vec(), bob)?;
    match extract(&r, &sc, EXTRACT_TOL) {
        Ok(ex) => {
            println!(
                "mis-wired Bob: pass = {}, fidelity {:.6}, lemma residuals {:?}",
                ex.report.pass,
                ex.report.fidelity,
                ex.report.lemma.iter().map(|l| (l.z_residual, l.x_residual)).collect::<Vec<_>>()
            );
            assert!(!ex.report.pass);
        }
        Err(e @ Error::IsometryConsistency { .. }) => println!("mis-wired Bob: {e}"),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
