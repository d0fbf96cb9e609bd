//! Born probabilities, linear-inversion reconstruction and simulated
//! finite-statistics measurements.
//!
//! A complete experiment measures every basis of a [`BasisFamily`]: one
//! probability vector per setup. Two reconstruction paths invert the Born
//! map:
//!
//! - projector form: ρ = Σ C̃_κ^μ |ψ̃⟩⟨ψ̃| + Σ C_κ^λ |ψ⟩⟨ψ| − I/2^N with
//!   C_κ^λ = p_κ^λ − (2^N−1)/4^N · Σ_{γ∈(2)} p_{κ+γ}^λ,
//! - monomial form: expansion coefficients A_κ^λ = 4^{-N} c_{κ,λ}
//!   Σ_η χ(−T(κη)) p_η^λ on the operational basis Z_κX_{λκ}, with the
//!   repeated zero-divisor monomials counted once.
//!
//! Both are linear in the table and agree identically; on exact Born input
//! they reproduce ρ. Sampled frequencies go straight into the same formulas
//! (no positivity repair), which is the estimator the error analysis in
//! [`crate::bounds`] describes.

use crate::mub::{BasisFamily, SetupLabel};
use crate::ring::RingElem;
use crate::{CMat, CVec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TomoError {
    #[error("dimension mismatch: state is {state}, family dimension is {family}")]
    DimensionMismatch { state: usize, family: usize },
    #[error("matrix is not a density matrix: {0}")]
    NotADensityMatrix(String),
    #[error("probability table does not match the family layout")]
    TableLayout,
    #[error("setup {setup} is not normalized (sum = {sum})")]
    NotNormalized { setup: String, sum: f64 },
}

/// Hermitian unit-trace matrix; PSD only when flagged `physical` (linear
/// inversion of noisy data can and does produce negative eigenvalues).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Wrap a matrix, enforcing Hermiticity and unit trace to 1e−12; with
    /// `physical` also enforce eigenvalues ≥ −1e−10.
    pub fn new(mat: CMat, physical: bool) -> Result<Self, TomoError> {
        if mat.nrows() != mat.ncols() {
            return Err(TomoError::NotADensityMatrix("not square".into()));
        }
        let herm_defect = (&mat - mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_defect > 1e-12 {
            return Err(TomoError::NotADensityMatrix(format!(
                "Hermiticity defect {herm_defect:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(TomoError::NotADensityMatrix(format!("trace is {tr}")));
        }
        let dm = DensityMatrix { mat };
        if physical {
            let min = dm.min_eigenvalue();
            if min < -1e-10 {
                return Err(TomoError::NotADensityMatrix(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(dm)
    }

    /// Wrap without validation (for linear-inversion estimates that are
    /// Hermitian and unit-trace by construction but possibly not PSD).
    pub fn new_unchecked(mat: CMat) -> Self {
        DensityMatrix { mat }
    }

    pub fn from_pure(psi: &CVec) -> Self {
        let norm = psi.norm();
        let psi = psi.map(|z| z / norm);
        DensityMatrix { mat: &psi * psi.adjoint() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { mat: CMat::identity(dim, dim).map(|z| z / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Real spectrum of the (Hermitian) matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        nalgebra::linalg::SymmetricEigen::new(self.mat.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// Squared Hilbert–Schmidt distance Tr[(ρ−σ)²].
    pub fn hs_distance_sq(&self, other: &DensityMatrix) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Born probabilities per (setup, outcome); the vector for each setup is
/// indexed by the Hilbert index of the outcome element.
#[derive(Debug, Clone)]
pub struct ProbabilityTable {
    pub setups: Vec<(SetupLabel, Vec<f64>)>,
}

impl ProbabilityTable {
    pub fn value(&self, setup: usize, outcome: usize) -> f64 {
        self.setups[setup].1[outcome]
    }

    /// Largest deviation of any per-setup sum from one.
    pub fn normalization_defect(&self) -> f64 {
        self.setups
            .iter()
            .map(|(_, p)| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome counts with a fixed number of shots per setup.
#[derive(Debug, Clone)]
pub struct CountTable {
    pub setups: Vec<(SetupLabel, Vec<u64>)>,
    pub shots: u64,
}

impl CountTable {
    /// Frequencies f = m/M in the shape of a probability table.
    pub fn frequencies(&self) -> ProbabilityTable {
        ProbabilityTable {
            setups: self
                .setups
                .iter()
                .map(|(l, counts)| {
                    (l.clone(), counts.iter().map(|&c| c as f64 / self.shots as f64).collect())
                })
                .collect(),
        }
    }
}

/// p_κ^λ = ⟨ψ_κ^λ|ρ|ψ_κ^λ⟩ for every setup and outcome. Exact-Born dust
/// outside [0,1] is clipped.
pub fn born_probabilities(
    rho: &DensityMatrix,
    family: &BasisFamily,
) -> Result<ProbabilityTable, TomoError> {
    let dim = family.space().dim();
    if rho.dim() != dim {
        return Err(TomoError::DimensionMismatch { state: rho.dim(), family: dim });
    }
    let setups = family
        .setups()
        .map(|(label, u)| {
            let ru = rho.matrix() * u;
            let probs = (0..dim)
                .map(|k| {
                    let p = u.column(k).dotc(&ru.column(k)).re;
                    p.clamp(0.0, 1.0)
                })
                .collect();
            (label.clone(), probs)
        })
        .collect();
    Ok(ProbabilityTable { setups })
}

fn check_layout(probs: &ProbabilityTable, family: &BasisFamily) -> Result<(), TomoError> {
    if probs.setups.len() != family.len()
        || probs
            .setups
            .iter()
            .zip(family.setups())
            .any(|((la, p), (lb, _))| la != lb || p.len() != family.space().dim())
    {
        return Err(TomoError::TableLayout);
    }
    Ok(())
}

/// Linear inversion in projector form. Exact on noiseless Born tables;
/// Hermitian and unit-trace always; PSD is not enforced.
pub fn reconstruct_projector(
    probs: &ProbabilityTable,
    family: &BasisFamily,
) -> Result<DensityMatrix, TomoError> {
    check_layout(probs, family)?;
    let ctx = family.ctx();
    let space = family.space();
    let dim = space.dim();
    let ideal = ctx.ideal2();
    let ideal_card = ideal.len() as f64;
    let corr = (ideal_card - 1.0) / dim as f64;
    let mut acc = CMat::zeros(dim, dim);
    for (si, (_, p)) in probs.setups.iter().enumerate() {
        for kappa in ctx.elements() {
            let h = space.hilbert_index(&kappa);
            let class_sum: f64 =
                ideal.iter().map(|g| p[space.hilbert_index(&ctx.add(&kappa, g))]).sum();
            let coeff = p[h] - corr * class_sum;
            let col = family.column(si, &kappa);
            acc.gemm(
                Complex64::new(coeff, 0.0),
                &col,
                &col.adjoint(),
                Complex64::new(1.0, 0.0),
            );
        }
    }
    let offset = 1.0 / ideal_card;
    for k in 0..dim {
        acc[(k, k)] -= Complex64::new(offset, 0.0);
    }
    // symmetrize away float dust so the result is exactly Hermitian
    let acc = (acc.clone() + acc.adjoint()).map(|z| z.scale(0.5));
    Ok(DensityMatrix::new_unchecked(acc))
}

/// Linear inversion in monomial form: assemble ρ from the operational-basis
/// coefficients A_κ^λ, Ã_κ^μ computed out of the probability phase sums,
/// with the double-counted zero-divisor monomials corrected once.
pub fn reconstruct_monomial(
    probs: &ProbabilityTable,
    family: &BasisFamily,
) -> Result<DensityMatrix, TomoError> {
    check_layout(probs, family)?;
    let ctx = family.ctx();
    let space = family.space();
    let phases = family.phases();
    let dim = space.dim();
    let m = ctx.modulus();
    let ideal_card = ctx.ideal2().len() as f64;
    let corr = Complex64::new((ideal_card - 1.0) / ideal_card, 0.0);
    let norm = 1.0 / dim as f64;

    let coeff = |setup: usize, kappa: &RingElem, label_elem: &RingElem| -> Complex64 {
        let p = &probs.setups[setup].1;
        let mut sum = Complex64::new(0.0, 0.0);
        for eta in ctx.elements() {
            let t = ctx.trace_mul(kappa, &eta);
            sum += space.chi((m - t) % m).scale(p[space.hilbert_index(&eta)]);
        }
        phases.phase(kappa, label_elem) * sum.scale(norm)
    };

    let mut acc = CMat::zeros(dim, dim);
    for (si, (label, _)) in probs.setups.iter().enumerate() {
        for kappa in ctx.elements() {
            if ctx.index_of(&kappa) == 0 {
                continue;
            }
            let a = coeff(si, &kappa, label.elem());
            let monomial = match label {
                SetupLabel::Ray(lambda) => crate::pauli::MonomialLabel {
                    delta: ctx.mul(lambda, &kappa),
                    gamma: kappa.clone(),
                },
                SetupLabel::Ideal(mu) => crate::pauli::MonomialLabel {
                    gamma: ctx.mul(mu, &kappa),
                    delta: kappa.clone(),
                },
            };
            let weight =
                if ctx.in_ideal2(&kappa) { a * (Complex64::new(1.0, 0.0) - corr) } else { a };
            acc += space.monomial_matrix(&monomial).map(|z| z * weight);
        }
    }
    for k in 0..dim {
        acc[(k, k)] += Complex64::new(norm, 0.0);
    }
    let acc = (acc.clone() + acc.adjoint()).map(|z| z.scale(0.5));
    Ok(DensityMatrix::new_unchecked(acc))
}

/// Largest violation among per-setup normalizations and the bar-class-sum
/// redundancy relations tying setups of one group together.
pub fn redundancy_check(probs: &ProbabilityTable, family: &BasisFamily) -> f64 {
    let ctx = family.ctx();
    let space = family.space();
    let ideal = ctx.ideal2();
    let reps = ctx.bar_class_reps();
    let mut worst: f64 = 0.0;
    for (_, p) in &probs.setups {
        worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
    }
    let class_sum = |setup: usize, kappa_bar: &RingElem| -> f64 {
        ideal
            .iter()
            .map(|g| probs.setups[setup].1[space.hilbert_index(&ctx.add(kappa_bar, g))])
            .sum()
    };
    for lambda_bar in &reps {
        let base = family
            .position(&SetupLabel::Ray(lambda_bar.clone()))
            .expect("ray setups present");
        for delta in &ideal {
            let shifted = family
                .position(&SetupLabel::Ray(ctx.add(lambda_bar, delta)))
                .expect("ray setups present");
            for kappa_bar in &reps {
                worst =
                    worst.max((class_sum(base, kappa_bar) - class_sum(shifted, kappa_bar)).abs());
            }
        }
    }
    let ideal_base = family.position(&SetupLabel::Ideal(ctx.zero())).expect("ideal setup 0");
    for mu in &ideal {
        let shifted =
            family.position(&SetupLabel::Ideal(mu.clone())).expect("ideal setups present");
        for kappa_bar in &reps {
            worst =
                worst.max((class_sum(ideal_base, kappa_bar) - class_sum(shifted, kappa_bar)).abs());
        }
    }
    worst
}

/// Rank of the linear map from traceless Hermitian matrices to probability
/// tables; informational completeness means dim² − 1.
pub fn independent_parameter_rank(family: &BasisFamily) -> usize {
    let dim = family.space().dim();
    let herm_dim = dim * dim;
    // real basis of Hermitian matrices: diagonal units, (E_ij+E_ji)/√2,
    // i(E_ij−E_ji)/√2
    let mut basis: Vec<CMat> = Vec::with_capacity(herm_dim);
    for i in 0..dim {
        let mut m = CMat::zeros(dim, dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(m);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut m = CMat::zeros(dim, dim);
            m[(i, j)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            m[(j, i)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            basis.push(m.clone());
            let mut m = CMat::zeros(dim, dim);
            m[(i, j)] = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
            m[(j, i)] = Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
            basis.push(m);
        }
    }
    // project out the trace direction to count free parameters
    let traceless: Vec<CMat> = basis
        .into_iter()
        .map(|m| {
            let tr = m.trace() / Complex64::new(dim as f64, 0.0);
            let mut t = m;
            for k in 0..dim {
                t[(k, k)] -= tr;
            }
            t
        })
        .collect();
    let rows = family.len() * dim;
    let mut jac = nalgebra::DMatrix::<f64>::zeros(rows, herm_dim);
    for (col, h) in traceless.iter().enumerate() {
        let mut r = 0;
        for (_, u) in family.setups() {
            let hu = h * u;
            for k in 0..dim {
                jac[(r, col)] = u.column(k).dotc(&hu.column(k)).re;
                r += 1;
            }
        }
    }
    jac.rank(1e-9)
}

pub(crate) fn substream(master: u64, tags: &[u64]) -> ChaCha12Rng {
    // splitmix64 mix of (master, tags...) into a 32-byte seed
    let mut state = master ^ 0x9E37_79B9_7F4A_7C15;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let mut acc = master;
    for &t in tags {
        acc ^= next() ^ t.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        acc = acc.rotate_left(17).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ next();
    }
    let mut seed = [0u8; 32];
    let mut word = acc;
    for chunk in seed.chunks_mut(8) {
        word = word.wrapping_add(next());
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha12Rng::from_seed(seed)
}

/// Multinomial draw of M shots per setup by inverse-CDF sampling, with one
/// deterministic substream per (seed, setup); results do not depend on
/// evaluation order.
pub fn sample_counts(probs: &ProbabilityTable, shots: u64, seed: u64) -> CountTable {
    let setups = probs
        .setups
        .iter()
        .enumerate()
        .map(|(si, (label, p))| {
            let kind_tag = match label {
                SetupLabel::Ray(_) => 1u64,
                SetupLabel::Ideal(_) => 2u64,
            };
            let mut rng = substream(seed, &[kind_tag, si as u64]);
            let total: f64 = p.iter().sum();
            let mut cdf = Vec::with_capacity(p.len());
            let mut acc = 0.0;
            for &v in p {
                acc += v / total;
                cdf.push(acc);
            }
            let mut counts = vec![0u64; p.len()];
            for _ in 0..shots {
                let u: f64 = rng.gen();
                let k = cdf.partition_point(|&c| c < u).min(p.len() - 1);
                counts[k] += 1;
            }
            (label.clone(), counts)
        })
        .collect();
    CountTable { setups, shots }
}

/// Empirical mean square Hilbert–Schmidt error of the plug-in estimator.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MseEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub shots: u64,
    pub repeats: u32,
}

/// Mean of Tr[(ρ − ρ_est)²] over independent sampled experiments with M
/// shots per setup; repeats use derived substreams of the master seed.
pub fn empirical_mse(
    rho: &DensityMatrix,
    family: &BasisFamily,
    shots: u64,
    repeats: u32,
    seed: u64,
) -> Result<MseEstimate, TomoError> {
    let probs = born_probabilities(rho, family)?;
    let mut values = Vec::with_capacity(repeats as usize);
    for rep in 0..repeats {
        let rep_seed = substream(seed, &[0xE0, rep as u64]).gen::<u64>();
        let counts = sample_counts(&probs, shots, rep_seed);
        let est = reconstruct_projector(&counts.frequencies(), family)?;
        values.push(rho.hs_distance_sq(&est));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len().max(2) - 1) as f64;
    Ok(MseEstimate { mean, std_err: (var / values.len() as f64).sqrt(), shots, repeats })
}
