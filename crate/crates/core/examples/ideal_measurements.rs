// The ideal measurements reproduce the reference tables through the Born rule.

use selftest::correlations::{compute_tables, verify_tables};
use selftest::ideal::{ideal_alice, ideal_bob, ideal_realization};
use selftest::SchmidtCoefficients;

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::new(vec![0.6, 0.48, 0.64])?;

    // Bob's first setting rotates each unprimed block by mu/2.
    let b0 = ideal_bob(&sc, 0)?;
    let overlap = b0.projector(0)[(0, 0)].re;
    let mu = sc.angles().mu[0];
    println!("Bob y=0: <0|P_0|0> = {overlap:.12}, cos^2(mu/2) = {:.12}", (mu / 2.0).cos().powi(2));
    println!("Alice x=1 has {} outcomes", ideal_alice(&sc, 1)?.outcomes());

    let r = ideal_realization(&sc);
    let born = compute_tables(&r)?;
    let report = verify_tables(&born, &sc, 1e-10)?;
    println!(
        "Born-rule tables vs reference: block {:.1e}, off-block {:.1e}, no-signaling {:.1e}",
        report.block_residual, report.offblock_mass, report.nosignal_residual
    );
    assert!(report.pass);
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
