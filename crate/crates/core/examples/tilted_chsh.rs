// Every block of the reference correlation saturates its tilted CHSH bound.

use selftest::chsh::all_block_violations;
use selftest::correlations::reference_tables;
use selftest::SchmidtCoefficients;

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::new(vec![0.8, 0.4, 0.4, 0.2])?;
    let tables = reference_tables(&sc);
    println!("{:>6} {:>7} {:>9} {:>10} {:>10} {:>9}", "block", "primed", "alpha", "beta", "target", "residual");
    for rep in all_block_violations(&tables, &sc)? {
        println!(
            "{:>6} {:>7} {:>9.5} {:>10.6} {:>10.6} {:>9.1e}",
            rep.block, rep.primed, rep.alpha, rep.beta, rep.target, rep.residual
        );
        assert!(rep.residual < 1e-9);
    }
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
