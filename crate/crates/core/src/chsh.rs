//! Tilted CHSH value of each block, read off the correlation tables.

use serde::Serialize;

use crate::correlations::CorrelationTables;
use crate::error::{Error, Result};
use crate::schmidt::{Block, SchmidtCoefficients};

/// Block correlators `<A_f B_g>` for roles `(f, g)` in order
/// `[00, 01, 10, 11]`, and the Alice marginal `<A_0>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockCorrelators {
    pub ab: [f64; 4],
    pub marginal: f64,
}

fn sign(k: usize, lo: usize) -> f64 {
    if k == lo {
        1.0
    } else {
        -1.0
    }
}

/// Correlators restricted to the block's outcome pair, with `+1` on `lo` and
/// `-1` on `hi`. The marginal uses full row sums of the `(A_0, B_0)` table.
pub fn block_correlators(t: &CorrelationTables, block: Block) -> Result<BlockCorrelators> {
    let d = t.d();
    block.check_range(d)?;
    let (lo, hi) = block.outcomes(d);
    let [x0, x1] = block.alice_settings();
    let [y0, y1] = block.bob_settings();
    let mut ab = [0.0; 4];
    for (k, (x, y)) in [(x0, y0), (x0, y1), (x1, y0), (x1, y1)].into_iter().enumerate() {
        let table = t.require(x, y)?;
        for a in [lo, hi] {
            for b in [lo, hi] {
                ab[k] += sign(a, lo) * sign(b, lo) * table[a * d + b];
            }
        }
    }
    let table = t.require(x0, y0)?;
    let row = |a: usize| table[a * d..(a + 1) * d].iter().sum::<f64>();
    let marginal = row(lo) - row(hi);
    Ok(BlockCorrelators { ab, marginal })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockViolationReport {
    pub block: usize,
    pub primed: bool,
    pub correlators: [f64; 4],
    pub marginal: f64,
    pub alpha: f64,
    /// `α<A_0> + <A_0B_0> + <A_0B_1> + <A_1B_0> - <A_1B_1>`.
    pub beta: f64,
    /// `√(8+2α²)` times the block mass.
    pub target: f64,
    pub residual: f64,
    pub mass: f64,
}

pub fn block_violation(t: &CorrelationTables, sc: &SchmidtCoefficients, block: Block) -> Result<BlockViolationReport> {
    if t.d() != sc.d() {
        return Err(Error::InvalidArgument(format!("tables have d = {}, coefficients d = {}", t.d(), sc.d())));
    }
    let corr = block_correlators(t, block)?;
    let angles = sc.angles().block(block);
    let [e00, e01, e10, e11] = corr.ab;
    let beta = angles.alpha * corr.marginal + e00 + e01 + e10 - e11;
    let mass = sc.mass(block);
    let target = angles.max_violation() * mass;
    Ok(BlockViolationReport {
        block: block.index,
        primed: block.primed,
        correlators: corr.ab,
        marginal: corr.marginal,
        alpha: angles.alpha,
        beta,
        target,
        residual: (beta - target).abs(),
        mass,
    })
}

/// Reports for every unprimed then every primed block.
pub fn all_block_violations(t: &CorrelationTables, sc: &SchmidtCoefficients) -> Result<Vec<BlockViolationReport>> {
    sc.all_blocks().map(|b| block_violation(t, sc, b)).collect()
}
