//! Schmidt coefficients of the target state and the per-block angle schedule.
//!
//! Outcomes are grouped into two families of 2×2 blocks. Unprimed block `m`
//! pairs outcomes `(2m, 2m+1)`; primed block `m` pairs `(2m+1, (2m+2) mod d)`.
//! Both families have `⌊d/2⌋` blocks. For even `d` the last primed block wraps
//! around to outcome 0; for odd `d` outcome `d-1` (unprimed) and outcome 0
//! (primed) are left over as single-outcome corners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlinalg::{r, StateVector, C64};

pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtCoefficients {
    c: Vec<f64>,
}

impl SchmidtCoefficients {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        Self::validate(c.len(), c)
    }

    pub fn validate(d: usize, c: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(d));
        }
        if c.len() != d {
            return Err(Error::InvalidArgument(format!("expected {d} coefficients, got {}", c.len())));
        }
        if let Some((index, &value)) = c.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v < 1.0)) {
            return Err(Error::CoefficientRange { index, value });
        }
        let deviation = (c.iter().map(|v| v * v).sum::<f64>() - 1.0).abs();
        if deviation > NORMALIZATION_TOL {
            return Err(Error::Normalization { what: "sum of squared coefficients", deviation });
        }
        Ok(SchmidtCoefficients { c })
    }

    /// All coefficients equal to `1/√d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        Self::validate(d, vec![1.0 / (d as f64).sqrt(); d])
    }

    pub fn d(&self) -> usize {
        self.c.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn get(&self, i: usize) -> f64 {
        self.c[i % self.c.len()]
    }

    pub fn blocks(&self, primed: bool) -> impl Iterator<Item = Block> {
        (0..self.d() / 2).map(move |index| Block { index, primed })
    }

    pub fn all_blocks(&self) -> impl Iterator<Item = Block> {
        self.blocks(false).chain(self.blocks(true))
    }

    /// `c_lo² + c_hi²` for the block's outcome pair.
    pub fn mass(&self, block: Block) -> f64 {
        let (lo, hi) = block.outcomes(self.d());
        self.c[lo].powi(2) + self.c[hi].powi(2)
    }

    pub fn target_state(&self) -> StateVector {
        let d = self.d();
        let mut amps = vec![C64::default(); d * d];
        for (i, &ci) in self.c.iter().enumerate() {
            amps[i * d + i] = r(ci);
        }
        StateVector::new(amps).expect("validated coefficients give a unit vector")
    }

    pub fn angles(&self) -> AngleSchedule {
        AngleSchedule::from_coefficients(self)
    }
}

/// A 2×2 block of outcomes; see the module docs for the pairing rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub index: usize,
    pub primed: bool,
}

impl Block {
    pub fn unprimed(index: usize) -> Self {
        Block { index, primed: false }
    }

    pub fn primed(index: usize) -> Self {
        Block { index, primed: true }
    }

    /// `(lo, hi)` outcome labels. `lo` carries the +1 eigenvalue of the block observables.
    pub fn outcomes(&self, d: usize) -> (usize, usize) {
        let m = self.index;
        if self.primed {
            ((2 * m + 1) % d, (2 * m + 2) % d)
        } else {
            (2 * m, 2 * m + 1)
        }
    }

    /// Alice's settings playing the roles of `A_0`, `A_1` in this block.
    pub fn alice_settings(&self) -> [usize; 2] {
        if self.primed { [0, 2] } else { [0, 1] }
    }

    /// Bob's settings playing the roles of `B_0`, `B_1` in this block.
    pub fn bob_settings(&self) -> [usize; 2] {
        if self.primed { [2, 3] } else { [0, 1] }
    }

    pub fn check_range(&self, d: usize) -> Result<()> {
        if self.index < d / 2 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "block index {} out of range for d = {d} ({} blocks)",
                self.index,
                d / 2
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAngles {
    pub theta: f64,
    pub mu: f64,
    pub alpha: f64,
}

impl BlockAngles {
    /// Angles for a block whose Schmidt pair is `(c_lo, c_hi)`.
    ///
    /// `alpha` carries the sign of `cos 2θ`. Its magnitude is
    /// `2/√(1+2tan²2θ)`; the sign makes `α⟨A_0⟩` positive so the block reaches
    /// `√(8+2α²)` whichever of the two coefficients is larger.
    pub fn from_pair(c_lo: f64, c_hi: f64) -> Self {
        let t = c_hi / c_lo;
        let theta = t.atan();
        let sin2 = 2.0 * t / (1.0 + t * t);
        let cos2 = (1.0 - t * t) / (1.0 + t * t);
        let mu = sin2.atan();
        let alpha = 2.0 * cos2 / (cos2 * cos2 + 2.0 * sin2 * sin2).sqrt();
        BlockAngles { theta, mu, alpha }
    }

    /// Maximal quantum value `√(8+2α²)` of the tilted CHSH expression.
    pub fn max_violation(&self) -> f64 {
        (8.0 + 2.0 * self.alpha * self.alpha).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSchedule {
    pub theta: Vec<f64>,
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub theta_p: Vec<f64>,
    pub mu_p: Vec<f64>,
    pub alpha_p: Vec<f64>,
}

impl AngleSchedule {
    pub fn from_coefficients(sc: &SchmidtCoefficients) -> Self {
        let d = sc.d();
        let family = |primed: bool| -> Vec<BlockAngles> {
            sc.blocks(primed)
                .map(|b| {
                    let (lo, hi) = b.outcomes(d);
                    BlockAngles::from_pair(sc.get(lo), sc.get(hi))
                })
                .collect()
        };
        let (plain, primed) = (family(false), family(true));
        AngleSchedule {
            theta: plain.iter().map(|a| a.theta).collect(),
            mu: plain.iter().map(|a| a.mu).collect(),
            alpha: plain.iter().map(|a| a.alpha).collect(),
            theta_p: primed.iter().map(|a| a.theta).collect(),
            mu_p: primed.iter().map(|a| a.mu).collect(),
            alpha_p: primed.iter().map(|a| a.alpha).collect(),
        }
    }

    pub fn unprimed_count(&self) -> usize {
        self.theta.len()
    }

    pub fn primed_count(&self) -> usize {
        self.theta_p.len()
    }

    pub fn block(&self, b: Block) -> BlockAngles {
        if b.primed {
            BlockAngles { theta: self.theta_p[b.index], mu: self.mu_p[b.index], alpha: self.alpha_p[b.index] }
        } else {
            BlockAngles { theta: self.theta[b.index], mu: self.mu[b.index], alpha: self.alpha[b.index] }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn validation_examples() {
        assert!(SchmidtCoefficients::validate(2, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).is_ok());
        assert!(SchmidtCoefficients::validate(4, vec![0.8, 0.4, 0.4, 0.2]).is_ok());
        assert_eq!(
            SchmidtCoefficients::validate(2, vec![1.0, 0.0]),
            Err(Error::CoefficientRange { index: 0, value: 1.0 })
        );
        assert!(matches!(
            SchmidtCoefficients::validate(2, vec![0.6, 0.6]),
            Err(Error::Normalization { .. })
        ));
        assert_eq!(SchmidtCoefficients::validate(1, vec![1.0]), Err(Error::Dimension(1)));
        assert!(matches!(SchmidtCoefficients::validate(3, vec![0.8, 0.6]), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            SchmidtCoefficients::validate(2, vec![f64::NAN, 0.6]),
            Err(Error::CoefficientRange { index: 0, .. })
        ));
    }

    #[test]
    fn maximal_angles() {
        let a = SchmidtCoefficients::validate(2, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap().angles();
        assert_abs_diff_eq!(a.theta[0], FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(a.mu[0], FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(a.alpha[0], 0.0);
    }

    #[test]
    fn two_qubit_tilted_angles() {
        let a = SchmidtCoefficients::validate(2, vec![0.8, 0.6]).unwrap().angles();
        assert_abs_diff_eq!(a.theta[0], 0.643_501_108_793_284_4, epsilon = 1e-12);
        assert_abs_diff_eq!((2.0 * a.theta[0]).sin(), 0.96, epsilon = 1e-12);
        assert_abs_diff_eq!(a.alpha[0], 0.403_976_899_777_332_87, epsilon = 1e-12);
        let al = a.alpha[0];
        assert_abs_diff_eq!((2.0 * a.theta[0]).sin(), ((4.0 - al * al) / (4.0 + al * al)).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn four_level_angles() {
        let a = SchmidtCoefficients::validate(4, vec![0.8, 0.4, 0.4, 0.2]).unwrap().angles();
        assert_eq!((a.unprimed_count(), a.primed_count()), (2, 2));
        assert_abs_diff_eq!(a.theta_p[0], FRAC_PI_4, epsilon = 1e-15);
        assert_eq!(a.alpha_p[0], 0.0);
        let expect = 6.0 / 41f64.sqrt();
        assert_abs_diff_eq!(a.theta[0], 0.5f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(a.theta[1], 0.5f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(a.alpha[0], expect, epsilon = 1e-12);
        assert_abs_diff_eq!(a.alpha[1], expect, epsilon = 1e-12);
        // Wrapped block pairs (c_3, c_0) = (0.2, 0.8): θ > π/4 so α is negative.
        assert_abs_diff_eq!(a.theta_p[1], 4f64.atan(), epsilon = 1e-15);
        assert!(a.alpha_p[1] < 0.0);
    }

    #[test]
    fn block_counts_and_outcomes() {
        let d3 = SchmidtCoefficients::maximally_entangled(3).unwrap();
        assert_eq!(d3.blocks(false).count(), 1);
        assert_eq!(d3.blocks(true).count(), 1);
        assert_eq!(Block::primed(0).outcomes(3), (1, 2));
        assert_eq!(Block::primed(0).outcomes(2), (1, 0));
        assert_eq!(Block::primed(1).outcomes(4), (3, 0));
        assert!(Block::unprimed(1).check_range(3).is_err());
    }

    #[test]
    fn target_state_layout() {
        let s = SchmidtCoefficients::validate(2, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap().target_state();
        let re: Vec<f64> = s.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);

        let s = SchmidtCoefficients::validate(2, vec![0.8, 0.6]).unwrap().target_state();
        assert_eq!(s.amplitudes()[0].re, 0.8);
        assert_eq!(s.amplitudes()[3].re, 0.6);

        let s = SchmidtCoefficients::validate(4, vec![0.8, 0.4, 0.4, 0.2]).unwrap().target_state();
        let nonzero: Vec<(usize, f64)> =
            s.amplitudes().iter().enumerate().filter(|(_, z)| z.norm() > 0.0).map(|(i, z)| (i, z.re)).collect();
        assert_eq!(nonzero, vec![(0, 0.8), (5, 0.4), (10, 0.4), (15, 0.2)]);
    }

    fn arb_coefficients() -> impl Strategy<Value = SchmidtCoefficients> {
        prop::collection::vec(0.05f64..1.0, 2..10).prop_map(|raw| {
            let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            SchmidtCoefficients::new(raw.iter().map(|v| v / n).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn schedule_invariants(sc in arb_coefficients()) {
            let a = sc.angles();
            let d = sc.d();
            for b in sc.all_blocks() {
                let ang = a.block(b);
                let (lo, hi) = b.outcomes(d);
                prop_assert!(ang.theta > 0.0 && ang.theta < FRAC_PI_2);
                prop_assert!(ang.mu > 0.0 && ang.mu < FRAC_PI_2);
                prop_assert!(ang.alpha.abs() < 2.0);
                prop_assert!((ang.mu.tan() - (2.0 * ang.theta).sin()).abs() < 1e-12);
                prop_assert_eq!(ang.theta, (sc.get(hi) / sc.get(lo)).atan());
                let al = ang.alpha;
                prop_assert!(((2.0 * ang.theta).sin() - ((4.0 - al * al) / (4.0 + al * al)).sqrt()).abs() < 1e-12);
                prop_assert!(al * (sc.get(lo) - sc.get(hi)) >= 0.0);
            }
        }

        #[test]
        fn maximally_entangled_schedule(d in 2usize..12) {
            let a = SchmidtCoefficients::maximally_entangled(d).unwrap().angles();
            for k in 0..a.unprimed_count() {
                prop_assert!((a.theta[k] - FRAC_PI_4).abs() < 1e-15);
                prop_assert_eq!(a.alpha[k], 0.0);
            }
            for k in 0..a.primed_count() {
                prop_assert!((a.theta_p[k] - FRAC_PI_4).abs() < 1e-15);
                prop_assert_eq!(a.alpha_p[k], 0.0);
            }
        }
    }
}
