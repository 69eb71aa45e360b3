//! Exact realizations hidden behind extra dimensions and local unitaries.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{Measurement, Realization};
use crate::qlinalg::{apply_on_axis, Operator, StateVector, C64, DIM_CAP};

/// Largest number of dimensions one party may gain.
pub const MAX_EXTRA: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    #[serde(rename = "extraA")]
    pub extra_a: usize,
    #[serde(rename = "extraB")]
    pub extra_b: usize,
    pub seed: u64,
}

impl EmbeddingSpec {
    pub fn new(extra_a: usize, extra_b: usize, seed: u64) -> Result<Self> {
        let spec = EmbeddingSpec { extra_a, extra_b, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for extra in [self.extra_a, self.extra_b] {
            if extra > MAX_EXTRA {
                return Err(Error::InvalidArgument(format!("extra dimension {extra} exceeds {MAX_EXTRA}")));
            }
        }
        Ok(())
    }
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> Operator {
    let g = DMatrix::<C64>::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = Operator::zeros(n);
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] = q[(i, j)] * phase;
        }
    }
    u
}

fn check_dims(dim_a: usize, dim_b: usize) -> Result<()> {
    let joint = dim_a * dim_b;
    if joint > DIM_CAP {
        return Err(Error::DimensionLimit { dim: joint, cap: DIM_CAP });
    }
    Ok(())
}

fn pad_measurement(m: &Measurement, extra: usize) -> Measurement {
    let old = m.dim();
    let projectors = m
        .projectors()
        .iter()
        .enumerate()
        .map(|(a, p)| {
            Operator::from_fn(old + extra, |i, j| {
                if i < old && j < old {
                    p[(i, j)]
                } else if a == 0 && i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::default()
                }
            })
        })
        .collect();
    Measurement::from_parts_unchecked(projectors)
}

/// Zero-padded state; extra dimensions join outcome 0 of every measurement.
pub fn pad_realization(r: &Realization, extra_a: usize, extra_b: usize) -> Result<Realization> {
    let (da, db) = (r.dim_a(), r.dim_b());
    let (na, nb) = (da + extra_a, db + extra_b);
    check_dims(na, nb)?;
    let mut amps = vec![C64::default(); na * nb];
    for (idx, z) in r.state().amplitudes().iter().enumerate() {
        amps[(idx / db) * nb + idx % db] = *z;
    }
    Realization::new(
        na,
        nb,
        StateVector::new(amps)?,
        r.alice_measurements().iter().map(|m| pad_measurement(m, extra_a)).collect(),
        r.bob_measurements().iter().map(|m| pad_measurement(m, extra_b)).collect(),
    )
}

/// Pads, then conjugates both parties by seeded random unitaries `U_A ⊗ U_B`.
pub fn embed_realization(r: &Realization, spec: &EmbeddingSpec) -> Result<Realization> {
    spec.validate()?;
    let padded = pad_realization(r, spec.extra_a, spec.extra_b)?;
    let (na, nb) = (padded.dim_a(), padded.dim_b());
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let ua = random_unitary(na, &mut rng);
    let ub = random_unitary(nb, &mut rng);
    let mut amps = padded.state().amplitudes().to_vec();
    apply_on_axis(&mut amps, &[na, nb], 0, &ua);
    apply_on_axis(&mut amps, &[na, nb], 1, &ub);
    Realization::new(
        na,
        nb,
        StateVector::normalized(amps)?,
        padded.alice_measurements().iter().map(|m| m.conjugated(&ua)).collect(),
        padded.bob_measurements().iter().map(|m| m.conjugated(&ub)).collect(),
    )
}
