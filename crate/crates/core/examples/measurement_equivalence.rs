// The isometry carries each block observable onto the ideal observable
// acting on the extracted target, even after an embedding.

use selftest::extraction::{extract, measurement_equivalence, EXTRACT_TOL};
use selftest::harness::{embed_realization, EmbeddingSpec};
use selftest::ideal::ideal_realization;
use selftest::{SchmidtCoefficients, Side};

pub fn run() -> selftest::Result<()> {
    let sc = SchmidtCoefficients::new(vec![0.6, 0.48, 0.64])?;
    let r = embed_realization(&ideal_realization(&sc), &EmbeddingSpec::new(2, 1, 11)?)?;
    let ex = extract(&r, &sc, EXTRACT_TOL)?;
    for e in measurement_equivalence(&r, &sc, &ex)? {
        let side = match e.side {
            Side::Alice => "A",
            Side::Bob => "B",
        };
        let tick = if e.primed { "'" } else { "" };
        println!("block {}{tick} {side}{}: residual {:.1e}", e.block, e.role, e.residual);
        assert!(e.residual < 1e-7);
    }
    Ok(())
}

fn main() -> selftest::Result<()> {
    run()
}
