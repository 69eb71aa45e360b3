//! Numerical run of the extraction argument on a concrete realization.
//!
//! From the measurements we build block observables, unitarize them, form
//! Bob's regularized `Z`/`X` pairs, assemble projections `P^{(k)}` and flip
//! products `X^{(k)}` for both parties, and push the state through the
//! Fourier/phase/flip isometry. Every intermediate identity is reported as a
//! residual so a failing realization shows where it breaks.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{block_observable, ideal_observable, Realization, Side, MEASUREMENT_TOL};
use crate::qlinalg::{
    self, apply_controlled, apply_on_axis, distance, hermitian_eig, inner, kron_vec, norm, pure_fidelity,
    scale_vec, sign_unitarize, Operator, StateVector, C64, ZERO_TOL,
};
use crate::schmidt::{Block, SchmidtCoefficients};

/// Eigenvalues of Bob's block support operator at or below this are null.
pub const RANK_NULL_TOL: f64 = 1e-8;
/// Eigenvalues above this are in the range; anything between is ambiguous.
pub const RANK_RANGE_TOL: f64 = 1e-4;
/// Default tolerance for extraction residuals and `1 - fidelity`.
pub const EXTRACT_TOL: f64 = 1e-6;
/// Block weights below this cannot be normalized.
pub const DEGENERATE_MASS: f64 = 1e-12;
/// Largest `dim_a * dim_b * d * d` the isometry will simulate.
pub const ISOMETRY_CAP: usize = 1 << 22;

fn vsub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vadd(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn hermitian_part(h: &Operator) -> Operator {
    (h + &h.adjoint()).scale_real(0.5)
}

/// `1 - 𝟙 + Â`: a Hermitian unitary agreeing with `Â` on the block.
pub fn unitarize(obs: &Operator, ident: &Operator) -> Operator {
    &(&Operator::identity(obs.dim()) - ident) + obs
}

/// Raw block data for one party-side pair of settings.
#[derive(Debug, Clone)]
pub struct BlockOperators {
    pub block: Block,
    /// `Π_lo - Π_hi` for the two Alice settings of the block.
    pub alice: [Operator; 2],
    /// `Π_lo + Π_hi` for the same settings.
    pub alice_ident: [Operator; 2],
    pub bob: [Operator; 2],
    pub bob_ident: [Operator; 2],
}

pub fn build_block_operators(r: &Realization, block: Block) -> Result<BlockOperators> {
    let d = r.outcomes();
    block.check_range(d)?;
    let (lo, hi) = block.outcomes(d);
    let pair = |side: Side, setting: usize| {
        let m = r.measurement(side, setting);
        (block_observable(m, d, block), m.projector(lo) + m.projector(hi))
    };
    let [x0, x1] = block.alice_settings();
    let [y0, y1] = block.bob_settings();
    let (a0, ia0) = pair(Side::Alice, x0);
    let (a1, ia1) = pair(Side::Alice, x1);
    let (b0, ib0) = pair(Side::Bob, y0);
    let (b1, ib1) = pair(Side::Bob, y1);
    Ok(BlockOperators { block, alice: [a0, a1], alice_ident: [ia0, ia1], bob: [b0, b1], bob_ident: [ib0, ib1] })
}

/// Projector onto the range of a positive operator, with a gap between the
/// null and range thresholds that must be empty.
pub fn support_projector(h: &Operator) -> Result<Operator> {
    let eig = hermitian_eig(&hermitian_part(h), MEASUREMENT_TOL)?;
    if let Some(&eigenvalue) = eig.values.iter().find(|&&l| l > RANK_NULL_TOL && l <= RANK_RANGE_TOL) {
        return Err(Error::Rank { eigenvalue });
    }
    Ok(eig.map_spectrum(|l| if l > RANK_RANGE_TOL { 1.0 } else { 0.0 }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockIdentityReport {
    pub block: usize,
    pub primed: bool,
    /// `||(𝟙^{A_i} - 𝟙^{B_j}) ψ||` for `(i, j)` in `[00, 01, 10, 11]`.
    pub cross: [f64; 4],
    /// `| ||𝟙^{A_0} ψ|| - √mass |`.
    pub alice_mass_residual: f64,
    /// `||(𝟙_𝓑 - 𝟙^{B_0}) ψ||`.
    pub support_residual: f64,
}

impl BlockIdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.cross.iter().copied().fold(self.alice_mass_residual.max(self.support_residual), f64::max)
    }
}

pub fn block_identity_checks(
    r: &Realization,
    sc: &SchmidtCoefficients,
    block: Block,
) -> Result<BlockIdentityReport> {
    r.check_against(sc)?;
    let ops = build_block_operators(r, block)?;
    let psi = r.state().amplitudes();
    let ia: Vec<_> = ops.alice_ident.iter().map(|p| r.apply_local(Side::Alice, p, psi)).collect();
    let ib: Vec<_> = ops.bob_ident.iter().map(|p| r.apply_local(Side::Bob, p, psi)).collect();
    let cross = [distance(&ia[0], &ib[0]), distance(&ia[0], &ib[1]), distance(&ia[1], &ib[0]), distance(&ia[1], &ib[1])];
    let support = support_projector(&(&ops.bob_ident[0] + &ops.bob_ident[1]))?;
    let sb = r.apply_local(Side::Bob, &support, psi);
    Ok(BlockIdentityReport {
        block: block.index,
        primed: block.primed,
        cross,
        alice_mass_residual: (norm(&ia[0]) - sc.mass(block).sqrt()).abs(),
        support_residual: distance(&sb, &ib[0]),
    })
}

/// Unitary `Z`/`X` pairs for one block on both sides.
#[derive(Debug, Clone)]
pub struct LemmaOneOperators {
    pub block: Block,
    pub theta: f64,
    pub mu: f64,
    pub za: Operator,
    pub xa: Operator,
    pub zb: Operator,
    pub xb: Operator,
    /// `𝟙_𝓑`, the support of `𝟙^{B_0} + 𝟙^{B_1}`.
    pub support: Operator,
    /// `𝟙^{A_0}` for the block.
    pub alice_ident: Operator,
}

pub fn build_lemma1_ops(r: &Realization, sc: &SchmidtCoefficients, block: Block) -> Result<LemmaOneOperators> {
    r.check_against(sc)?;
    let angles = sc.angles().block(block);
    let mu = angles.mu;
    if !(mu > 0.0 && mu < FRAC_PI_2) {
        return Err(Error::Angle { block: block.index, value: mu });
    }
    let ops = build_block_operators(r, block)?;
    let za = unitarize(&ops.alice[0], &ops.alice_ident[0]);
    let xa = unitarize(&ops.alice[1], &ops.alice_ident[1]);
    let b0 = unitarize(&ops.bob[0], &ops.bob_ident[0]);
    let b1 = unitarize(&ops.bob[1], &ops.bob_ident[1]);
    let z_star = (&b0 + &b1).scale_real(0.5 / mu.cos());
    let x_star = (&b0 - &b1).scale_real(0.5 / mu.sin());
    let zb = sign_unitarize(&hermitian_part(&z_star), ZERO_TOL)?;
    let xb = sign_unitarize(&hermitian_part(&x_star), ZERO_TOL)?;
    let support = support_projector(&(&ops.bob_ident[0] + &ops.bob_ident[1]))?;
    let [alice_ident, _] = ops.alice_ident;
    Ok(LemmaOneOperators { block, theta: angles.theta, mu, za, xa, zb, xb, support, alice_ident })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaOneReport {
    pub block: usize,
    pub primed: bool,
    pub mass: f64,
    pub actual_mass: f64,
    /// `||Z_A ψ_m - Z_B ψ_m||`.
    pub z_residual: f64,
    /// `||X_A (1 - Z_A) ψ_m - tan θ X_B (1 + Z_A) ψ_m||`.
    pub x_residual: f64,
}

/// Block identities on `ψ_m = 𝟙^{A_0} ψ / √mass`.
pub fn lemma1_identity_checks(
    r: &Realization,
    sc: &SchmidtCoefficients,
    ops: &LemmaOneOperators,
) -> Result<LemmaOneReport> {
    let block = ops.block;
    let psi = r.state().amplitudes();
    let v = r.apply_local(Side::Alice, &ops.alice_ident, psi);
    let actual_mass = norm(&v).powi(2);
    if actual_mass < DEGENERATE_MASS {
        return Err(Error::DegenerateBlock { block: block.index, primed: block.primed, mass: actual_mass });
    }
    let mass = sc.mass(block);
    let psi_m = scale_vec(&v, C64::from(1.0 / mass.sqrt()));
    let za_psi = r.apply_local(Side::Alice, &ops.za, &psi_m);
    let zb_psi = r.apply_local(Side::Bob, &ops.zb, &psi_m);
    let lhs = r.apply_local(Side::Alice, &ops.xa, &vsub(&psi_m, &za_psi));
    let rhs = r.apply_local(Side::Bob, &ops.xb, &vadd(&psi_m, &za_psi));
    let rhs = scale_vec(&rhs, C64::from(ops.theta.tan()));
    Ok(LemmaOneReport {
        block: block.index,
        primed: block.primed,
        mass,
        actual_mass,
        z_residual: distance(&za_psi, &zb_psi),
        x_residual: distance(&lhs, &rhs),
    })
}

/// Everything the isometry needs: projections and flips for both parties.
#[derive(Debug, Clone)]
pub struct CriterionOperators {
    pub d: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub pa: Vec<Operator>,
    pub pb: Vec<Operator>,
    /// `X_A^{(k)}`, mapping outcome `k` back to outcome `0`.
    pub xa: Vec<Operator>,
    pub xb: Vec<Operator>,
    /// `Σ ω^k P_A^{(k)}`.
    pub za: Operator,
    /// `Σ ω^k P_B^{(k)} + (1 - Σ P_B^{(k)})`.
    pub zb: Operator,
    pub unprimed: Vec<LemmaOneOperators>,
    pub primed: Vec<LemmaOneOperators>,
}

fn omega_pow(d: usize, k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * ((k % d) as f64) / d as f64)
}

/// `X^{(k)} = X^{(k-1)} F_k` with `F_{2m+1} = X_m` (unprimed flip) and
/// `F_{2m+2} = Y_m` (primed flip). The wrapped primed block is never used.
fn flip_products(unprimed: &[&Operator], primed: &[&Operator], d: usize, dim: usize) -> Vec<Operator> {
    let mut out = vec![Operator::identity(dim)];
    for k in 1..d {
        let factor = if k % 2 == 1 { unprimed[(k - 1) / 2] } else { primed[k / 2 - 1] };
        let next = &out[k - 1] * factor;
        out.push(next);
    }
    out
}

pub fn build_criterion_ops(r: &Realization, sc: &SchmidtCoefficients) -> Result<CriterionOperators> {
    r.check_against(sc)?;
    let d = sc.d();
    let (dim_a, dim_b) = (r.dim_a(), r.dim_b());
    let unprimed = sc.blocks(false).map(|b| build_lemma1_ops(r, sc, b)).collect::<Result<Vec<_>>>()?;
    let primed = sc.blocks(true).map(|b| build_lemma1_ops(r, sc, b)).collect::<Result<Vec<_>>>()?;

    let pa: Vec<Operator> = r.alice(0).projectors().to_vec();
    let mut pb = vec![Operator::zeros(dim_b); d];
    let halves = |ops: &LemmaOneOperators| {
        let zt = &(&ops.support * &ops.zb) * &ops.support;
        ((&ops.support + &zt).scale_real(0.5), (&ops.support - &zt).scale_real(0.5))
    };
    for ops in &unprimed {
        let (lo, hi) = ops.block.outcomes(d);
        let (plus, minus) = halves(ops);
        pb[lo] = plus;
        pb[hi] = minus;
    }
    if d % 2 == 1 {
        // The corner outcome d-1 is the `hi` half of the last primed block.
        let last = primed.last().expect("odd d >= 3 has a primed block");
        pb[d - 1] = halves(last).1;
    }

    let xa = flip_products(
        &unprimed.iter().map(|o| &o.xa).collect::<Vec<_>>(),
        &primed.iter().map(|o| &o.xa).collect::<Vec<_>>(),
        d,
        dim_a,
    );
    let xb = flip_products(
        &unprimed.iter().map(|o| &o.xb).collect::<Vec<_>>(),
        &primed.iter().map(|o| &o.xb).collect::<Vec<_>>(),
        d,
        dim_b,
    );

    let phase_sum = |ps: &[Operator], dim: usize| {
        ps.iter().enumerate().fold(Operator::zeros(dim), |acc, (k, p)| &acc + &p.scale(omega_pow(d, k)))
    };
    let za = phase_sum(&pa, dim_a);
    let pb_total = pb.iter().fold(Operator::zeros(dim_b), |acc, p| &acc + p);
    let zb = &phase_sum(&pb, dim_b) + &(&Operator::identity(dim_b) - &pb_total);

    Ok(CriterionOperators { d, dim_a, dim_b, pa, pb, xa, xb, za, zb, unprimed, primed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    /// `||(P_A^{(k)} - P_B^{(k)}) ψ||` per outcome.
    pub projection: Vec<f64>,
    /// `||X_A^{(k)} X_B^{(k)} P_B^{(k)} ψ - (c_k/c_0) P_A^{(0)} ψ||`.
    pub flip: Vec<f64>,
    /// `||X_A^{(k)} P_A^{(k)} ψ - (c_k/c_0) (X_B^{(k)})^† P_A^{(0)} ψ||`.
    pub flip_adjoint: Vec<f64>,
    /// `Σ_{i≠j} ||P_B^{(i)} P_B^{(j)} ψ||²`.
    pub orthogonality: f64,
}

impl CriterionReport {
    pub fn max_residual(&self) -> f64 {
        self.projection
            .iter()
            .chain(&self.flip)
            .chain(&self.flip_adjoint)
            .copied()
            .fold(self.orthogonality, f64::max)
    }
}

pub fn check_criterion(r: &Realization, sc: &SchmidtCoefficients, ops: &CriterionOperators) -> CriterionReport {
    let d = ops.d;
    let psi = r.state().amplitudes();
    let pa_psi: Vec<_> = ops.pa.iter().map(|p| r.apply_local(Side::Alice, p, psi)).collect();
    let pb_psi: Vec<_> = ops.pb.iter().map(|p| r.apply_local(Side::Bob, p, psi)).collect();
    let projection = (0..d).map(|k| distance(&pa_psi[k], &pb_psi[k])).collect();

    let c0 = sc.get(0);
    let mut flip = Vec::with_capacity(d);
    let mut flip_adjoint = Vec::with_capacity(d);
    for k in 0..d {
        let ratio = C64::from(sc.get(k) / c0);
        let target = scale_vec(&pa_psi[0], ratio);
        let lhs = r.apply_local(Side::Bob, &ops.xb[k], &pb_psi[k]);
        let lhs = r.apply_local(Side::Alice, &ops.xa[k], &lhs);
        flip.push(distance(&lhs, &target));
        let lhs = r.apply_local(Side::Alice, &ops.xa[k], &pa_psi[k]);
        let rhs = r.apply_local(Side::Bob, &ops.xb[k].adjoint(), &target);
        flip_adjoint.push(distance(&lhs, &rhs));
    }

    let mut orthogonality = 0.0;
    for (i, p) in ops.pb.iter().enumerate() {
        for (j, v) in pb_psi.iter().enumerate() {
            if i != j {
                orthogonality += norm(&r.apply_local(Side::Bob, p, v)).powi(2);
            }
        }
    }
    CriterionReport { projection, flip, flip_adjoint, orthogonality }
}

/// Stages of the isometry, each applied to both ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Fourier,
    Phase,
    InverseFourier,
    Flip,
}

/// The isometry on `A ⊗ B ⊗ A' ⊗ B'`, ancillas starting in `|0>|0>`.
#[derive(Debug, Clone)]
pub struct Isometry<'a> {
    ops: &'a CriterionOperators,
    fourier: Operator,
    fourier_inv: Operator,
    za_pow: Vec<Operator>,
    zb_pow: Vec<Operator>,
}

impl<'a> Isometry<'a> {
    pub fn new(ops: &'a CriterionOperators) -> Result<Self> {
        let d = ops.d;
        let total = ops.dim_a * ops.dim_b * d * d;
        if total > ISOMETRY_CAP {
            return Err(Error::DimensionLimit { dim: total, cap: ISOMETRY_CAP });
        }
        let scale = 1.0 / (d as f64).sqrt();
        let fourier = Operator::from_fn(d, |j, k| omega_pow(d, j * k) * scale);
        let fourier_inv = fourier.adjoint();
        let powers = |z: &Operator| {
            let mut out = vec![Operator::identity(z.dim())];
            for k in 1..d {
                let next = &out[k - 1] * z;
                out.push(next);
            }
            out
        };
        Ok(Isometry { ops, fourier, fourier_inv, za_pow: powers(&ops.za), zb_pow: powers(&ops.zb) })
    }

    pub fn dims(&self) -> [usize; 4] {
        let o = self.ops;
        [o.dim_a, o.dim_b, o.d, o.d]
    }

    /// `v ⊗ |0>|0>`.
    pub fn embed_input(&self, v: &[C64]) -> Vec<C64> {
        let dd = self.ops.d * self.ops.d;
        let mut out = vec![C64::default(); v.len() * dd];
        for (i, z) in v.iter().enumerate() {
            out[i * dd] = *z;
        }
        out
    }

    pub fn apply_stage(&self, stage: Stage, v: &mut [C64]) {
        let dims = self.dims();
        match stage {
            Stage::Fourier => {
                apply_on_axis(v, &dims, 2, &self.fourier);
                apply_on_axis(v, &dims, 3, &self.fourier);
            }
            Stage::Phase => {
                apply_controlled(v, &dims, 0, Some(2), |k| &self.za_pow[k]);
                apply_controlled(v, &dims, 1, Some(3), |k| &self.zb_pow[k]);
            }
            Stage::InverseFourier => {
                apply_on_axis(v, &dims, 2, &self.fourier_inv);
                apply_on_axis(v, &dims, 3, &self.fourier_inv);
            }
            Stage::Flip => {
                apply_controlled(v, &dims, 0, Some(2), |k| &self.ops.xa[k]);
                apply_controlled(v, &dims, 1, Some(3), |k| &self.ops.xb[k]);
            }
        }
    }

    /// Runs `stages` on `v ⊗ |00>`.
    pub fn run(&self, v: &[C64], stages: &[Stage]) -> Vec<C64> {
        let mut out = self.embed_input(v);
        for &s in stages {
            self.apply_stage(s, &mut out);
        }
        out
    }

    /// The full map `Φ(v)`. Linear, so `v` need not be normalized.
    pub fn map(&self, v: &[C64]) -> Vec<C64> {
        self.run(v, &[Stage::Fourier, Stage::Phase, Stage::InverseFourier, Stage::Flip])
    }
}

/// `Φ(ψ)`, rejecting outputs whose norm drifts more than [`EXTRACT_TOL`].
pub fn apply_isometry(ops: &CriterionOperators, psi: &[C64]) -> Result<Vec<C64>> {
    let out = Isometry::new(ops)?.map(psi);
    let loss = (norm(&out) - norm(psi)).abs();
    if loss > EXTRACT_TOL {
        return Err(Error::IsometryConsistency { loss });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionReport {
    pub d: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    /// `<target| Tr_AB |Φ(ψ)><Φ(ψ)| |target>`.
    pub fidelity: f64,
    /// `|<extra ⊗ target | Φ(ψ)>|²`.
    pub product_overlap: f64,
    pub norm_loss: f64,
    /// `| ||P_A^{(0)} ψ|| - c_0 |`.
    pub extra_norm_residual: f64,
    /// Distance of the Fourier/phase stages from `Σ_j P_A^{(j)} ψ |j>|j>`.
    pub fourier_residual: f64,
    pub criterion: CriterionReport,
    pub lemma: Vec<LemmaOneReport>,
    pub block_identities: Vec<BlockIdentityReport>,
    pub fidelity_threshold: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ExtractionReport {
    /// Largest residual across every reported identity.
    pub fn max_residual(&self) -> f64 {
        let lemma = self.lemma.iter().map(|l| l.z_residual.max(l.x_residual));
        let blocks = self.block_identities.iter().map(BlockIdentityReport::max_residual);
        lemma
            .chain(blocks)
            .fold(self.criterion.max_residual(), f64::max)
            .max(self.fourier_residual)
            .max(self.extra_norm_residual)
            .max(self.norm_loss)
    }

    /// Sets `pass` from explicit thresholds: fidelity and product overlap at
    /// least `fidelity_threshold`, every residual at most `tol`.
    pub fn judge(&mut self, fidelity_threshold: f64, tol: f64) {
        self.fidelity_threshold = fidelity_threshold;
        self.tol = tol;
        self.pass = self.fidelity >= fidelity_threshold
            && self.product_overlap >= fidelity_threshold
            && self.max_residual() <= tol;
    }
}

/// Result of extraction: the operators, the extracted junk state, and the
/// report.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub ops: CriterionOperators,
    /// `P_A^{(0)} ψ / ||P_A^{(0)} ψ||` on `A ⊗ B`.
    pub extra: Vec<C64>,
    pub output: Vec<C64>,
    pub report: ExtractionReport,
}

pub fn extract(r: &Realization, sc: &SchmidtCoefficients, tol: f64) -> Result<Extraction> {
    let ops = build_criterion_ops(r, sc)?;
    let d = ops.d;
    let psi = r.state().amplitudes();
    let iso = Isometry::new(&ops)?;

    let output = apply_isometry(&ops, psi)?;
    let norm_loss = (norm(&output) - 1.0).abs();
    let dims = iso.dims();

    let target = sc.target_state();
    let normalized = scale_vec(&output, C64::from(1.0 / norm(&output)));
    let rho = qlinalg::partial_trace_raw(&normalized, &dims, &[2, 3])?;
    let fidelity = pure_fidelity(&rho, &target)?;

    let p0 = r.apply_local(Side::Alice, &ops.pa[0], psi);
    let p0_norm = norm(&p0);
    if p0_norm < DEGENERATE_MASS {
        return Err(Error::DegenerateBlock { block: 0, primed: false, mass: p0_norm * p0_norm });
    }
    let extra = scale_vec(&p0, C64::from(1.0 / p0_norm));
    let product = kron_vec(&extra, target.amplitudes());
    let product_overlap = inner(&product, &output).norm_sqr();

    let staged = iso.run(psi, &[Stage::Fourier, Stage::Phase, Stage::InverseFourier]);
    let mut expected = vec![C64::default(); staged.len()];
    for (j, p) in ops.pa.iter().enumerate() {
        let v = r.apply_local(Side::Alice, p, psi);
        for (i, z) in v.iter().enumerate() {
            expected[(i * d + j) * d + j] = *z;
        }
    }
    let fourier_residual = distance(&staged, &expected);

    let criterion = check_criterion(r, sc, &ops);
    let lemma = ops
        .unprimed
        .iter()
        .chain(&ops.primed)
        .map(|o| lemma1_identity_checks(r, sc, o))
        .collect::<Result<Vec<_>>>()?;
    let block_identities = sc.all_blocks().map(|b| block_identity_checks(r, sc, b)).collect::<Result<Vec<_>>>()?;

    let mut report = ExtractionReport {
        d,
        dim_a: ops.dim_a,
        dim_b: ops.dim_b,
        fidelity,
        product_overlap,
        norm_loss,
        extra_norm_residual: (p0_norm - sc.get(0)).abs(),
        fourier_residual,
        criterion,
        lemma,
        block_identities,
        fidelity_threshold: 1.0 - tol,
        tol,
        pass: false,
    };
    report.judge(1.0 - tol, tol);
    Ok(Extraction { ops, extra, output, report })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceEntry {
    pub block: usize,
    pub primed: bool,
    pub side: Side,
    pub role: usize,
    /// `||Φ(Ô ψ) - extra ⊗ (O_ideal ψ_target)||`.
    pub residual: f64,
}

/// Checks that each block observable is mapped by the isometry onto the ideal
/// observable acting on the extracted target.
pub fn measurement_equivalence(
    r: &Realization,
    sc: &SchmidtCoefficients,
    extraction: &Extraction,
) -> Result<Vec<EquivalenceEntry>> {
    let d = sc.d();
    let iso = Isometry::new(&extraction.ops)?;
    let psi = r.state().amplitudes();
    let target = sc.target_state();
    let mut out = Vec::new();
    for block in sc.all_blocks() {
        for side in [Side::Alice, Side::Bob] {
            for role in 0..2 {
                let setting = match side {
                    Side::Alice => block.alice_settings()[role],
                    Side::Bob => block.bob_settings()[role],
                };
                let obs = block_observable(r.measurement(side, setting), d, block);
                let mapped = iso.map(&r.apply_local(side, &obs, psi));
                let mut ideal = target.amplitudes().to_vec();
                let axis = if side == Side::Alice { 0 } else { 1 };
                apply_on_axis(&mut ideal, &[d, d], axis, &ideal_observable(sc, block, side, role));
                let expected = kron_vec(&extraction.extra, &ideal);
                out.push(EquivalenceEntry {
                    block: block.index,
                    primed: block.primed,
                    side,
                    role,
                    residual: distance(&mapped, &expected),
                });
            }
        }
    }
    Ok(out)
}

/// Convenience: the extracted target as a normalized state on `A' ⊗ B'`,
/// obtained by projecting `Φ(ψ)` onto `extra`.
pub fn extracted_target(extraction: &Extraction) -> Result<StateVector> {
    let dd = extraction.ops.d * extraction.ops.d;
    let amps: Vec<C64> = (0..dd)
        .map(|t| extraction.extra.iter().enumerate().map(|(i, e)| e.conj() * extraction.output[i * dd + t]).sum())
        .collect();
    StateVector::normalized(amps)
}
