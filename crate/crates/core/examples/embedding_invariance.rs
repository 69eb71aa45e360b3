// A realization hidden behind extra dimensions and random local unitaries has
// the same correlations, and extraction still recovers the target.

use selftest::correlations::compute_tables;
use selftest::extraction::{extract, EXTRACT_TOL};
use selftest::harness::{embed_realization, EmbeddingSpec};
use selftest::ideal::ideal_realization;
use selftest::SchmidtCoefficients;

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::new(vec![0.8, 0.4, 0.4, 0.2])?;
    let ideal = ideal_realization(&sc);
    let exact = compute_tables(&ideal)?;

    for (extra_a, extra_b, seed) in [(0, 0, 1), (1, 2, 42), (3, 3, 7)] {
        let hidden = embed_realization(&ideal, &EmbeddingSpec::new(extra_a, extra_b, seed)?)?;
        let drift = compute_tables(&hidden)?.max_difference(&exact);
        let ex = extract(&hidden, &sc, EXTRACT_TOL)?;
        println!(
            "dims {}x{} seed {seed:>2}: table drift {drift:.1e}, fidelity 1 - {:.1e}, max residual {:.1e}",
            hidden.dim_a(),
            hidden.dim_b(),
            1.0 - ex.report.fidelity,
            ex.report.max_residual()
        );
        assert!(ex.report.pass && drift < 1e-10);
    }
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
