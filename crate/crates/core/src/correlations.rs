//! Correlation tables `T_{x,y}[a][b] = P(a,b|x,y)`: Born-rule evaluation,
//! closed-form reference tables, and verification against them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{Realization, ALICE_SETTINGS, BOB_SETTINGS};
use crate::qlinalg::inner;
use crate::schmidt::{Block, SchmidtCoefficients};

/// The eight setting pairs whose tables are fixed by the reference correlation.
pub const CONSTRAINED_PAIRS: [(usize, usize); 8] =
    [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (0, 3), (2, 2), (2, 3)];

/// Default tolerance for verifying exact tables.
pub const VERIFY_TOL: f64 = 1e-8;

/// Largest imaginary part tolerated in a Born-rule probability.
pub const IMAG_TOL: f64 = 1e-10;

pub fn is_constrained(x: usize, y: usize) -> bool {
    CONSTRAINED_PAIRS.contains(&(x, y))
}

/// Up to twelve `d×d` tables, one per setting pair; absent tables are
/// unmeasured or unconstrained.
///
/// Construction only checks shape and finiteness; probabilistic consistency
/// is reported by [`verify_tables`] and [`no_signaling_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTables {
    d: usize,
    tables: [[Option<Vec<f64>>; BOB_SETTINGS]; ALICE_SETTINGS],
}

impl CorrelationTables {
    pub fn empty(d: usize) -> Self {
        CorrelationTables { d, tables: Default::default() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Stores a row-major `d×d` table for `(x, y)`.
    pub fn set(&mut self, x: usize, y: usize, table: Vec<f64>) -> Result<()> {
        if x >= ALICE_SETTINGS || y >= BOB_SETTINGS {
            return Err(Error::InvalidArgument(format!("setting pair ({x},{y}) out of range")));
        }
        if table.len() != self.d * self.d {
            return Err(Error::InvalidArgument(format!(
                "table ({x},{y}) has {} entries, expected {}",
                table.len(),
                self.d * self.d
            )));
        }
        if table.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("table ({x},{y}) has non-finite entries")));
        }
        self.tables[x][y] = Some(table);
        Ok(())
    }

    pub fn remove(&mut self, x: usize, y: usize) -> Option<Vec<f64>> {
        self.tables[x][y].take()
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&[f64]> {
        self.tables.get(x)?.get(y)?.as_deref()
    }

    pub fn get_mut(&mut self, x: usize, y: usize) -> Option<&mut [f64]> {
        self.tables.get_mut(x)?.get_mut(y)?.as_deref_mut()
    }

    pub fn require(&self, x: usize, y: usize) -> Result<&[f64]> {
        self.get(x, y).ok_or(Error::Coverage { x, y })
    }

    pub fn entry(&self, x: usize, y: usize, a: usize, b: usize) -> Option<f64> {
        self.get(x, y).map(|t| t[a * self.d + b])
    }

    pub fn is_present(&self, x: usize, y: usize) -> bool {
        self.get(x, y).is_some()
    }

    pub fn present_pairs(&self) -> Vec<(usize, usize)> {
        (0..ALICE_SETTINGS)
            .flat_map(|x| (0..BOB_SETTINGS).map(move |y| (x, y)))
            .filter(|&(x, y)| self.is_present(x, y))
            .collect()
    }

    /// `P(a|x)` computed from `T_{x,y}`.
    pub fn alice_marginal(&self, x: usize, y: usize) -> Option<Vec<f64>> {
        let d = self.d;
        self.get(x, y).map(|t| (0..d).map(|a| t[a * d..(a + 1) * d].iter().sum()).collect())
    }

    /// `P(b|y)` computed from `T_{x,y}`.
    pub fn bob_marginal(&self, x: usize, y: usize) -> Option<Vec<f64>> {
        let d = self.d;
        self.get(x, y).map(|t| (0..d).map(|b| (0..d).map(|a| t[a * d + b]).sum()).collect())
    }

    /// Largest `|Σ_ab T[a][b] - 1|` over present tables.
    pub fn sum_residual(&self) -> f64 {
        self.present_pairs()
            .into_iter()
            .map(|(x, y)| (self.get(x, y).unwrap().iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest distance of any entry outside `[0, 1]`.
    pub fn range_violation(&self) -> f64 {
        self.present_pairs()
            .into_iter()
            .flat_map(|(x, y)| self.get(x, y).unwrap().iter().copied())
            .map(|p| (-p).max(p - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Largest entrywise `|self - other|` over pairs present in both.
    pub fn max_difference(&self, other: &CorrelationTables) -> f64 {
        assert_eq!(self.d, other.d, "comparing tables of different d");
        self.present_pairs()
            .into_iter()
            .filter_map(|(x, y)| Some((self.get(x, y)?, other.get(x, y)?)))
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }
}

/// Born-rule tables `<ψ| Π^{A_x}_a ⊗ Π^{B_y}_b |ψ>` for all twelve setting pairs.
pub fn compute_tables(r: &Realization) -> Result<CorrelationTables> {
    let d = r.outcomes();
    let psi = r.state().amplitudes();
    // <ψ|Π_a ⊗ Π_b|ψ> = <(Π_a ⊗ 1)ψ | (1 ⊗ Π_b)ψ> for Hermitian idempotent projectors.
    let alice_vecs: Vec<Vec<Vec<_>>> = r
        .alice_measurements()
        .iter()
        .map(|m| m.projectors().iter().map(|p| r.apply_local(crate::Side::Alice, p, psi)).collect())
        .collect();
    let bob_vecs: Vec<Vec<Vec<_>>> = r
        .bob_measurements()
        .iter()
        .map(|m| m.projectors().iter().map(|p| r.apply_local(crate::Side::Bob, p, psi)).collect())
        .collect();

    let mut out = CorrelationTables::empty(d);
    for (x, av) in alice_vecs.iter().enumerate() {
        for (y, bv) in bob_vecs.iter().enumerate() {
            let mut table = Vec::with_capacity(d * d);
            for u in av {
                for w in bv {
                    let z = inner(u, w);
                    if z.im.abs() > IMAG_TOL {
                        return Err(Error::Hermiticity { deviation: z.im.abs(), tol: IMAG_TOL });
                    }
                    table.push(z.re);
                }
            }
            out.set(x, y, table)?;
        }
    }
    Ok(out)
}

/// 2×2 block `[[p(lo,lo), p(lo,hi)], [p(hi,lo), p(hi,hi)]]` of the ideal
/// correlation, in block roles `(f(x), g(y))`.
pub fn reference_block(c_lo: f64, c_hi: f64, mu: f64, alice_role: usize, bob_role: usize) -> [[f64; 2]; 2] {
    let (cs, sn) = ((mu / 2.0).cos(), (mu / 2.0).sin());
    let plus_lo = 0.5 * (c_lo * cs + c_hi * sn).powi(2);
    let minus_lo = 0.5 * (c_lo * cs - c_hi * sn).powi(2);
    let plus_hi = 0.5 * (c_hi * cs + c_lo * sn).powi(2);
    let minus_hi = 0.5 * (c_hi * cs - c_lo * sn).powi(2);
    match (alice_role, bob_role) {
        (0, _) => [
            [c_lo * c_lo * cs * cs, c_lo * c_lo * sn * sn],
            [c_hi * c_hi * sn * sn, c_hi * c_hi * cs * cs],
        ],
        (1, 0) => [[plus_lo, minus_hi], [minus_lo, plus_hi]],
        (1, 1) => [[minus_lo, plus_hi], [plus_lo, minus_hi]],
        _ => unreachable!("block roles are 0 or 1"),
    }
}

/// Which block family a constrained pair belongs to, with the block roles of
/// its settings.
fn pair_roles(x: usize, y: usize) -> (bool, usize, usize) {
    match (x, y) {
        (0 | 1, 0 | 1) => (false, x, y),
        (0, 2 | 3) => (true, 0, y - 2),
        (2, 2 | 3) => (true, 1, y - 2),
        _ => unreachable!("pair ({x},{y}) is unconstrained"),
    }
}

/// Reference tables for the eight constrained pairs; the other four are absent.
pub fn reference_tables(sc: &SchmidtCoefficients) -> CorrelationTables {
    let d = sc.d();
    let angles = sc.angles();
    let mut out = CorrelationTables::empty(d);
    for &(x, y) in &CONSTRAINED_PAIRS {
        let (primed, ar, br) = pair_roles(x, y);
        let mut t = vec![0.0; d * d];
        for block in sc.blocks(primed) {
            let (lo, hi) = block.outcomes(d);
            let blk = reference_block(sc.get(lo), sc.get(hi), angles.block(block).mu, ar, br);
            for (i, &a) in [lo, hi].iter().enumerate() {
                for (j, &b) in [lo, hi].iter().enumerate() {
                    t[a * d + b] = blk[i][j];
                }
            }
        }
        if d % 2 == 1 {
            let corner = if primed { 0 } else { d - 1 };
            t[corner * d + corner] = sc.get(corner).powi(2);
        }
        out.set(x, y, t).expect("reference table has the right shape");
    }
    out
}

/// In-block positions (including odd-d corners) of a constrained pair's table.
fn in_block_mask(d: usize, primed: bool) -> Vec<bool> {
    let mut mask = vec![false; d * d];
    for index in 0..d / 2 {
        let (lo, hi) = Block { index, primed }.outcomes(d);
        for a in [lo, hi] {
            for b in [lo, hi] {
                mask[a * d + b] = true;
            }
        }
    }
    if d % 2 == 1 {
        let corner = if primed { 0 } else { d - 1 };
        mask[corner * d + corner] = true;
    }
    mask
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Max `|t - reference|` over in-block entries of constrained tables.
    pub block_residual: f64,
    /// Max `|t|` over off-block entries of constrained tables.
    pub offblock_mass: f64,
    pub nosignal_residual: f64,
    pub sum_residual: f64,
    pub range_violation: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_tables(t: &CorrelationTables, sc: &SchmidtCoefficients, tol: f64) -> Result<VerificationReport> {
    if t.d() != sc.d() {
        return Err(Error::InvalidArgument(format!("tables have d = {}, coefficients d = {}", t.d(), sc.d())));
    }
    for &(x, y) in &CONSTRAINED_PAIRS {
        t.require(x, y)?;
    }
    let d = sc.d();
    let reference = reference_tables(sc);
    let (mut block_residual, mut offblock_mass) = (0.0f64, 0.0f64);
    for &(x, y) in &CONSTRAINED_PAIRS {
        let mask = in_block_mask(d, pair_roles(x, y).0);
        let (got, want) = (t.require(x, y)?, reference.require(x, y)?);
        for k in 0..d * d {
            if mask[k] {
                block_residual = block_residual.max((got[k] - want[k]).abs());
            } else {
                offblock_mass = offblock_mass.max(got[k].abs());
            }
        }
    }
    let nosignal_residual = no_signaling_check(t);
    let sum_residual = t.sum_residual();
    let range_violation = t.range_violation();
    let pass = [block_residual, offblock_mass, nosignal_residual, sum_residual, range_violation]
        .iter()
        .all(|&v| v <= tol);
    Ok(VerificationReport { block_residual, offblock_mass, nosignal_residual, sum_residual, range_violation, tol, pass })
}

/// Largest change of one party's marginal under a change of the other
/// party's setting, over all present tables.
pub fn no_signaling_check(t: &CorrelationTables) -> f64 {
    let mut worst = 0.0f64;
    let mut spread = |marginals: Vec<Vec<f64>>| {
        for (i, m1) in marginals.iter().enumerate() {
            for m2 in &marginals[i + 1..] {
                for (p, q) in m1.iter().zip(m2) {
                    worst = worst.max((p - q).abs());
                }
            }
        }
    };
    for x in 0..ALICE_SETTINGS {
        spread((0..BOB_SETTINGS).filter_map(|y| t.alice_marginal(x, y)).collect());
    }
    for y in 0..BOB_SETTINGS {
        spread((0..ALICE_SETTINGS).filter_map(|x| t.bob_marginal(x, y)).collect());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::ideal_realization;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn sc(c: &[f64]) -> SchmidtCoefficients {
        SchmidtCoefficients::new(c.to_vec()).unwrap()
    }

    #[test]
    fn maximal_d2_born_tables() {
        let t = compute_tables(&ideal_realization(&sc(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]))).unwrap();
        let t00 = t.get(0, 0).unwrap();
        // c² cos²(π/8) = (2 + √2)/8, c² sin²(π/8) = (2 - √2)/8
        let (big, small) = ((2.0 + 2f64.sqrt()) / 8.0, (2.0 - 2f64.sqrt()) / 8.0);
        for (got, want) in t00.iter().zip([big, small, small, big]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(big, 0.426_776_695_296_636_9, epsilon = 1e-15);
        for (x, y) in t.present_pairs() {
            assert_abs_diff_eq!(t.get(x, y).unwrap().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(t.present_pairs().len(), 12);
    }

    #[test]
    fn d4_entry_matches_closed_form() {
        let s = sc(&[0.8, 0.4, 0.4, 0.2]);
        let t = compute_tables(&ideal_realization(&s)).unwrap();
        // θ_0 = atan(0.5): sin 2θ_0 = 0.8 = tan μ_0.
        let mu = 0.8f64.atan();
        let expect = 0.64 * (mu / 2.0).cos().powi(2);
        assert_abs_diff_eq!(expect, 0.569_878_019_021_769_6, epsilon = 1e-12);
        assert_abs_diff_eq!(t.entry(0, 0, 0, 0).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn reference_maximal_table_v() {
        let t = reference_tables(&sc(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]));
        let t11 = t.get(1, 1).unwrap();
        let (big, small) = ((2.0 + 2f64.sqrt()) / 8.0, (2.0 - 2f64.sqrt()) / 8.0);
        for (got, want) in t11.iter().zip([small, big, big, small]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert!(!t.is_present(1, 2) && !t.is_present(2, 0));
    }

    #[test]
    fn reference_odd_corners() {
        let s = sc(&[0.6, 0.6, (1.0f64 - 0.72).sqrt()]);
        let t = reference_tables(&s);
        assert_abs_diff_eq!(t.entry(0, 0, 2, 2).unwrap(), s.get(2).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(t.entry(0, 2, 0, 0).unwrap(), s.get(0).powi(2), epsilon = 1e-15);
        assert_eq!(t.entry(0, 0, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn reference_mass_and_marginals() {
        let s = sc(&[0.5, 0.3, 0.6, 0.4, (1.0f64 - 0.25 - 0.09 - 0.36 - 0.16).sqrt()]);
        let t = reference_tables(&s);
        for &(x, y) in &CONSTRAINED_PAIRS {
            assert_abs_diff_eq!(t.get(x, y).unwrap().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        for y in 0..4 {
            let m = t.alice_marginal(0, y).unwrap();
            for (i, p) in m.iter().enumerate() {
                assert_abs_diff_eq!(*p, s.get(i).powi(2), epsilon = 1e-12);
            }
        }
        assert!(no_signaling_check(&t) < 1e-12);
    }

    #[test]
    fn verify_reference_and_ideal() {
        let s = sc(&[0.8, 0.4, 0.4, 0.2]);
        let report = verify_tables(&reference_tables(&s), &s, 1e-14).unwrap();
        assert!(report.pass);
        assert_eq!(report.block_residual, 0.0);
        let born = compute_tables(&ideal_realization(&s)).unwrap();
        let report = verify_tables(&born, &s, 1e-10).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn verify_detects_offblock_perturbation() {
        let s = sc(&[0.8, 0.4, 0.4, 0.2]);
        let mut t = reference_tables(&s);
        t.get_mut(1, 0).unwrap()[3] += 1e-3; // (a,b) = (0,3)
        let report = verify_tables(&t, &s, VERIFY_TOL).unwrap();
        assert!(!report.pass);
        assert_abs_diff_eq!(report.offblock_mass, 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn verify_requires_constrained_pairs() {
        let s = sc(&[0.8, 0.6]);
        let mut t = reference_tables(&s);
        t.remove(2, 3);
        assert_eq!(verify_tables(&t, &s, VERIFY_TOL), Err(Error::Coverage { x: 2, y: 3 }));
    }

    #[test]
    fn signaling_counterexample() {
        let mut t = CorrelationTables::empty(2);
        t.set(0, 0, vec![0.3, 0.3, 0.2, 0.2]).unwrap();
        t.set(0, 1, vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(no_signaling_check(&t), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn maximal_alice_marginal_is_half() {
        let t = compute_tables(&ideal_realization(&sc(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]))).unwrap();
        for y in 0..4 {
            assert_abs_diff_eq!(t.alice_marginal(0, y).unwrap()[0], 0.5, epsilon = 1e-12);
        }
        assert!(no_signaling_check(&t) <= 1e-10);
    }

    #[test]
    fn table_shape_is_checked() {
        let mut t = CorrelationTables::empty(2);
        assert!(t.set(0, 0, vec![1.0; 3]).is_err());
        assert!(t.set(3, 0, vec![0.25; 4]).is_err());
        assert!(t.set(0, 0, vec![f64::NAN, 0.0, 0.0, 1.0]).is_err());
    }
}
