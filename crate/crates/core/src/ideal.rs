//! Projective measurements, realizations, and the ideal measurements that
//! produce the reference correlations on the target state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{self, hermitian_eig, Operator, StateVector, C64};
use crate::schmidt::{Block, SchmidtCoefficients};

/// Tolerance for the projective-measurement invariants.
pub const MEASUREMENT_TOL: f64 = 1e-10;

pub const ALICE_SETTINGS: usize = 3;
pub const BOB_SETTINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    Bob,
}

/// A complete set of orthogonal projectors indexed by outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    projectors: Vec<Operator>,
}

impl Measurement {
    pub fn new(projectors: Vec<Operator>) -> Result<Self> {
        Self::with_tolerance(projectors, MEASUREMENT_TOL)
    }

    pub fn with_tolerance(projectors: Vec<Operator>, tol: f64) -> Result<Self> {
        let err = |reason: String| Error::Measurement { context: "projector set".into(), reason };
        let first = projectors.first().ok_or_else(|| err("no outcomes".into()))?;
        let dim = first.dim();
        if projectors.iter().any(|p| p.dim() != dim) {
            return Err(err("projectors have different dimensions".into()));
        }
        let mut total = Operator::zeros(dim);
        for (a, p) in projectors.iter().enumerate() {
            let h = p.hermiticity_deviation();
            if h > tol {
                return Err(err(format!("outcome {a} is not Hermitian (deviation {h:e})")));
            }
            let idem = (p * p).dist(p);
            if idem > tol {
                return Err(err(format!("outcome {a} is not idempotent (deviation {idem:e})")));
            }
            for (b, q) in projectors.iter().enumerate().skip(a + 1) {
                let overlap = (p * q).max_abs();
                if overlap > tol {
                    return Err(err(format!("outcomes {a} and {b} overlap (max |PQ| = {overlap:e})")));
                }
            }
            total = &total + p;
        }
        let completeness = total.dist(&Operator::identity(dim));
        if completeness > tol {
            return Err(err(format!("projectors do not sum to identity (deviation {completeness:e})")));
        }
        Ok(Measurement { projectors })
    }

    /// Rank-1 measurement from an orthonormal basis, `basis[a]` being outcome `a`.
    pub fn from_basis(basis: &[Vec<C64>]) -> Result<Self> {
        Self::new(basis.iter().map(|v| Operator::projector(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn projector(&self, outcome: usize) -> &Operator {
        &self.projectors[outcome]
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// Conjugates every projector by `u`: `P -> U P U^dagger`.
    pub fn conjugated(&self, u: &Operator) -> Self {
        let ud = u.adjoint();
        Measurement { projectors: self.projectors.iter().map(|p| &(u * p) * &ud).collect() }
    }

    pub(crate) fn from_parts_unchecked(projectors: Vec<Operator>) -> Self {
        Measurement { projectors }
    }
}

/// A pure joint state together with Alice's three and Bob's four measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    dim_a: usize,
    dim_b: usize,
    state: StateVector,
    alice: Vec<Measurement>,
    bob: Vec<Measurement>,
}

impl Realization {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        state: StateVector,
        alice: Vec<Measurement>,
        bob: Vec<Measurement>,
    ) -> Result<Self> {
        let bad = |reason: String| Err(Error::InvalidArgument(reason));
        if dim_a == 0 || dim_b == 0 {
            return bad("local dimensions must be positive".into());
        }
        if state.dim() != dim_a * dim_b {
            return bad(format!("state dimension {} is not {dim_a}*{dim_b}", state.dim()));
        }
        if alice.len() != ALICE_SETTINGS || bob.len() != BOB_SETTINGS {
            return bad(format!(
                "expected {ALICE_SETTINGS} Alice and {BOB_SETTINGS} Bob settings, got {} and {}",
                alice.len(),
                bob.len()
            ));
        }
        if alice.iter().any(|m| m.dim() != dim_a) || bob.iter().any(|m| m.dim() != dim_b) {
            return bad("measurement dimension does not match its party".into());
        }
        let outcomes = alice[0].outcomes();
        if alice.iter().chain(&bob).any(|m| m.outcomes() != outcomes) {
            return bad("all measurements must have the same number of outcomes".into());
        }
        Ok(Realization { dim_a, dim_b, state, alice, bob })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn outcomes(&self) -> usize {
        self.alice[0].outcomes()
    }

    pub fn alice(&self, x: usize) -> &Measurement {
        &self.alice[x]
    }

    pub fn bob(&self, y: usize) -> &Measurement {
        &self.bob[y]
    }

    pub fn measurement(&self, side: Side, setting: usize) -> &Measurement {
        match side {
            Side::Alice => self.alice(setting),
            Side::Bob => self.bob(setting),
        }
    }

    pub fn alice_measurements(&self) -> &[Measurement] {
        &self.alice
    }

    pub fn bob_measurements(&self) -> &[Measurement] {
        &self.bob
    }

    pub fn local_dim(&self, side: Side) -> usize {
        match side {
            Side::Alice => self.dim_a,
            Side::Bob => self.dim_b,
        }
    }

    /// `(op ⊗ 1) v` or `(1 ⊗ op) v` on the joint space.
    pub fn apply_local(&self, side: Side, op: &Operator, v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        let axis = match side {
            Side::Alice => 0,
            Side::Bob => 1,
        };
        qlinalg::apply_on_axis(&mut out, &[self.dim_a, self.dim_b], axis, op);
        out
    }

    /// Checks that the outcome count matches the claimed coefficients.
    pub fn check_against(&self, sc: &SchmidtCoefficients) -> Result<()> {
        if self.outcomes() != sc.d() {
            return Err(Error::InvalidArgument(format!(
                "realization has {} outcomes, coefficients describe d = {}",
                self.outcomes(),
                sc.d()
            )));
        }
        Ok(())
    }
}

/// `cos φ σ_Z + sin φ σ_X` given `(cos φ, sin φ)`.
fn rotated_z(cos: f64, sin: f64) -> Operator {
    Operator::from_real_rows(&[&[cos, sin], &[sin, -cos]])
}

/// The 2×2 ideal observables `[A_0, A_1, B_0, B_1]` of a block, in the block
/// basis `{|lo>, |hi>}`.
pub fn ideal_block_observables(sc: &SchmidtCoefficients, block: Block) -> [Operator; 4] {
    let mu = sc.angles().block(block).mu;
    [
        rotated_z(1.0, 0.0),
        rotated_z(0.0, 1.0),
        rotated_z(mu.cos(), mu.sin()),
        rotated_z(mu.cos(), -mu.sin()),
    ]
}

/// Places a 2×2 block operator on the block's outcome pair inside `C^d`;
/// zero elsewhere.
pub fn embed_block(op: &Operator, d: usize, block: Block) -> Operator {
    let (lo, hi) = block.outcomes(d);
    let idx = [lo, hi];
    let mut out = Operator::zeros(d);
    for i in 0..2 {
        for j in 0..2 {
            out[(idx[i], idx[j])] = op[(i, j)];
        }
    }
    out
}

/// Ideal block observable for `side`'s role `role ∈ {0, 1}` embedded in `C^d`.
pub fn ideal_observable(sc: &SchmidtCoefficients, block: Block, side: Side, role: usize) -> Operator {
    let obs = ideal_block_observables(sc, block);
    let k = match side {
        Side::Alice => role,
        Side::Bob => 2 + role,
    };
    embed_block(&obs[k], sc.d(), block)
}

/// Outcome basis: within each block the +1 eigenvector of the block observable
/// takes the smaller label `lo`, the -1 eigenvector takes `hi`.
fn block_basis(sc: &SchmidtCoefficients, primed: bool, role_index: usize) -> Result<Measurement> {
    let d = sc.d();
    let mut basis: Vec<Option<Vec<C64>>> = vec![None; d];
    for block in sc.blocks(primed) {
        let obs = &ideal_block_observables(sc, block)[role_index];
        let eig = hermitian_eig(obs, MEASUREMENT_TOL)?;
        let (lo, hi) = block.outcomes(d);
        for (outcome, col) in [(lo, 1), (hi, 0)] {
            let v2 = eig.vector(col);
            let mut v = vec![C64::default(); d];
            v[lo] = v2[0];
            v[hi] = v2[1];
            basis[outcome] = Some(v);
        }
    }
    // Odd d leaves a single corner outcome: d-1 for unprimed, 0 for primed.
    let basis: Vec<Vec<C64>> = basis
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.unwrap_or_else(|| StateVector::basis(d, k).into_amplitudes()))
        .collect();
    Measurement::from_basis(&basis)
}

pub fn ideal_alice(sc: &SchmidtCoefficients, x: usize) -> Result<Measurement> {
    match x {
        0 => Measurement::from_basis(
            &(0..sc.d()).map(|k| StateVector::basis(sc.d(), k).into_amplitudes()).collect::<Vec<_>>(),
        ),
        1 => block_basis(sc, false, 1),
        2 => block_basis(sc, true, 1),
        _ => Err(Error::InvalidArgument(format!("Alice setting {x} is not in {{0,1,2}}"))),
    }
}

pub fn ideal_bob(sc: &SchmidtCoefficients, y: usize) -> Result<Measurement> {
    match y {
        0 => block_basis(sc, false, 2),
        1 => block_basis(sc, false, 3),
        2 => block_basis(sc, true, 2),
        3 => block_basis(sc, true, 3),
        _ => Err(Error::InvalidArgument(format!("Bob setting {y} is not in {{0,1,2,3}}"))),
    }
}

pub fn ideal_realization(sc: &SchmidtCoefficients) -> Realization {
    let alice = (0..ALICE_SETTINGS).map(|x| ideal_alice(sc, x)).collect::<Result<Vec<_>>>();
    let bob = (0..BOB_SETTINGS).map(|y| ideal_bob(sc, y)).collect::<Result<Vec<_>>>();
    Realization::new(
        sc.d(),
        sc.d(),
        sc.target_state(),
        alice.expect("ideal Alice measurements are valid"),
        bob.expect("ideal Bob measurements are valid"),
    )
    .expect("ideal realization is consistent")
}

/// `Π_lo - Π_hi` for the block's outcome pair.
pub fn block_observable(m: &Measurement, d: usize, block: Block) -> Operator {
    let (lo, hi) = block.outcomes(d);
    m.projector(lo) - m.projector(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{direct_sum, pauli, r};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn sc(c: &[f64]) -> SchmidtCoefficients {
        SchmidtCoefficients::new(c.to_vec()).unwrap()
    }

    #[test]
    fn alice_computational_basis() {
        let m = ideal_alice(&sc(&[0.8, 0.6]), 0).unwrap();
        assert_eq!(m.projector(0), &Operator::basis_projector(2, 0));
        assert_eq!(m.projector(1), &Operator::basis_projector(2, 1));
    }

    #[test]
    fn alice_odd_x1_keeps_corner() {
        let s = SchmidtCoefficients::maximally_entangled(3).unwrap();
        let m = ideal_alice(&s, 1).unwrap();
        let h = FRAC_1_SQRT_2;
        let plus = vec![r(h), r(h), r(0.0)];
        assert!(m.projector(0).dist(&Operator::projector(&plus)) < 1e-12);
        assert_eq!(m.projector(2), &Operator::basis_projector(3, 2));
        let obs = m.projector(0) - m.projector(1);
        assert!(obs.dist(&direct_sum(&[pauli::x(), Operator::zeros(1)]).unwrap()) < 1e-12);
    }

    #[test]
    fn alice_x2_wraps_for_even_d() {
        let s = sc(&[0.8, 0.4, 0.4, 0.2]);
        let m = ideal_alice(&s, 2).unwrap();
        let h = FRAC_1_SQRT_2;
        // Block m=0 on {|1>,|2>}; block m=1 on {|3>,|0>}.
        assert!(m.projector(1).dist(&Operator::projector(&[r(0.0), r(h), r(h), r(0.0)])) < 1e-12);
        assert!(m.projector(3).dist(&Operator::projector(&[r(h), r(0.0), r(0.0), r(h)])) < 1e-12);
        assert!(m.projector(0).dist(&Operator::projector(&[r(-h), r(0.0), r(0.0), r(h)])) < 1e-12);
    }

    #[test]
    fn x1_difference_is_block_sigma_x() {
        let s = sc(&[0.8, 0.4, 0.4, 0.2]);
        let m = ideal_alice(&s, 1).unwrap();
        for b in s.blocks(false) {
            let obs = block_observable(&m, 4, b);
            assert!(obs.dist(&embed_block(&pauli::x(), 4, b)) < 1e-12);
        }
    }

    #[test]
    fn bob_maximal_is_standard_chsh_setting() {
        let s = sc(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let m = ideal_bob(&s, 0).unwrap();
        let target = (&pauli::z() + &pauli::x()).scale_real(FRAC_1_SQRT_2);
        assert!((m.projector(0) - m.projector(1)).dist(&target) < 1e-12);
    }

    #[test]
    fn bob_overlap_half_angle() {
        // tan μ = sin 2θ = 0.96 for c = (0.8, 0.6); |<0|b_0>|² = cos²(μ/2).
        let m = ideal_bob(&sc(&[0.8, 0.6]), 0).unwrap();
        let overlap = m.projector(0)[(0, 0)].re;
        assert_abs_diff_eq!(overlap, 0.860_693_660_515_475_8, epsilon = 1e-12);
        let mu = 0.96f64.atan();
        assert_abs_diff_eq!(overlap, (1.0 + mu.cos()) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn bob_odd_primed_has_zero_corner() {
        let s = sc(&[0.7, 0.5, (1.0f64 - 0.49 - 0.25).sqrt()]);
        let m = ideal_bob(&s, 2).unwrap();
        assert_eq!(m.projector(0), &Operator::basis_projector(3, 0));
        let mu = s.angles().mu_p[0];
        let obs = block_observable(&m, 3, Block::primed(0));
        let expect = embed_block(&rotated_z(mu.cos(), mu.sin()), 3, Block::primed(0));
        assert!(obs.dist(&expect) < 1e-12);
    }

    #[test]
    fn settings_out_of_range() {
        let s = sc(&[0.8, 0.6]);
        assert!(matches!(ideal_alice(&s, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(ideal_bob(&s, 4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ideal_realization_structure() {
        let s = sc(&[0.8, 0.4, 0.4, 0.2]);
        let real = ideal_realization(&s);
        assert_eq!((real.dim_a(), real.dim_b(), real.outcomes()), (4, 4, 4));
        for m in real.alice_measurements().iter().chain(real.bob_measurements()) {
            for p in m.projectors() {
                assert_abs_diff_eq!(p.trace().re, 1.0, epsilon = 1e-12);
            }
        }
        assert_eq!(real.state(), &s.target_state());
    }

    #[test]
    fn measurement_validation_rejects_bad_sets() {
        let half = Operator::identity(2).scale_real(0.5);
        assert!(Measurement::new(vec![half.clone(), half]).is_err());
        assert!(Measurement::new(vec![Operator::basis_projector(2, 0)]).is_err());
        assert!(Measurement::new(vec![Operator::identity(2), Operator::basis_projector(2, 0)]).is_err());
    }
}
