// Finite-shot estimates of the maximally entangled qubit tables, compared
// with the exact ones in units of the largest standard error.

use selftest::correlations::{compute_tables, verify_tables};
use selftest::harness::sample_tables;
use selftest::ideal::ideal_realization;
use selftest::SchmidtCoefficients;

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::maximally_entangled(2)?;
    let r = ideal_realization(&sc);
    let exact = compute_tables(&r)?;

    for shots in [1_000, 100_000, 1_000_000] {
        let s = sample_tables(&r, shots, 7)?;
        let dev = s.estimated.max_difference(&exact);
        let strict = verify_tables(&s.estimated, &sc, 1e-8)?.pass;
        println!(
            "{shots:>8} shots: stderr_max {:.2e}, max deviation {dev:.2e} ({:.2} stderr), exact verify passes: {strict}",
            s.stderr_max,
            dev / s.stderr_max
        );
    }
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
