//! N-qubit MUB reference scheme: the s = 1 instance of the ring
//! construction.
//!
//! Over GF(2^n) the ideal (2) collapses to {0}, so the family consists of
//! the 2^n ray bases V_λ (phases c_{γ,λ} = i^{3T₄(λγ²)} through the GR(4,n)
//! lift) plus the single Fourier basis, all pairwise unbiased — the standard
//! complete MUB set in dimension 2^n. Reconstruction reduces to
//! ρ = Σ p_κ^λ P_κ^λ + Σ p̃_κ P̃_κ − I, and the minimum mean square error of
//! that scheme has the closed form
//! ⟨E²⟩ = 2^n + 1 − Σ_κ (Σ_λ (p_κ^λ)² + p̃_κ²),
//! which this module exposes for the comparison columns of the benchmark
//! table. When comparing against N ququarts use n = 2N.

use crate::mub::{BasisFamily, PhaseSolver};
use crate::pauli::PauliSpace;
use crate::ring::{RingContext, RingError, WorkingBasisPolicy};
use crate::tomo::{born_probabilities, reconstruct_projector, DensityMatrix, ProbabilityTable, TomoError};

/// The 2^n + 1 mutually unbiased bases for n qubits.
#[derive(Debug, Clone)]
pub struct QubitMubFamily {
    n: usize,
    family: BasisFamily,
}

impl QubitMubFamily {
    /// Build for n ≤ 4 qubits using a self-dual basis of GF(2^n) and GR(4,n)
    /// phases.
    pub fn build(n: usize) -> Result<Self, RingError> {
        if n == 0 || n > 4 {
            return Err(RingError::BadDegree(n));
        }
        let gf = RingContext::with_policy(1, n, WorkingBasisPolicy::SelfDual)?;
        let phases = PhaseSolver::for_base(gf.clone())?;
        let family = BasisFamily::build(PauliSpace::new(gf), phases)?;
        Ok(QubitMubFamily { n, family })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.family.space().dim()
    }

    /// Number of bases, 2^n + 1.
    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    pub fn born(&self, rho: &DensityMatrix) -> Result<ProbabilityTable, TomoError> {
        born_probabilities(rho, &self.family)
    }

    /// ρ = Σ p_κ^λ P_κ^λ + Σ p̃_κ P̃_κ − I. Requires each setup normalized to
    /// 1e−9; output is Hermitian unit-trace, possibly non-PSD on noisy input.
    pub fn reconstruct(&self, probs: &ProbabilityTable) -> Result<DensityMatrix, TomoError> {
        for (label, p) in &probs.setups {
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(TomoError::NotNormalized { setup: label.to_string(), sum });
            }
        }
        // the generic projector inversion degenerates to the MUB formula at
        // s = 1 (the ideal correction term vanishes and the offset is −I)
        reconstruct_projector(probs, &self.family)
    }

    /// Closed-form minimum MSE of the qubit MUB scheme on exact Born
    /// probabilities: 2^n + 1 − Σ_κ(Σ_bases p²).
    pub fn mse_bound(&self, rho: &DensityMatrix) -> Result<f64, TomoError> {
        let probs = self.born(rho)?;
        let d = self.dim() as f64;
        let sq: f64 = probs.setups.iter().flat_map(|(_, p)| p.iter().map(|v| v * v)).sum();
        Ok(d + 1.0 - sq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CVec;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn family_sizes_and_unbiasedness() {
        for n in [1usize, 2] {
            let fam = QubitMubFamily::build(n).unwrap();
            assert_eq!(fam.len(), (1 << n) + 1);
            let rep = fam.family().overlap_report();
            // at s = 1 all pairs are unbiased: the bar map is the identity,
            // so ray/ray pairs always differ in bar class
            assert!(rep.max() < 1e-10, "{rep:?}");
            let cliques = fam.family().clique_report(1e-10);
            assert_eq!(cliques.max_size, (1 << n) + 1);
        }
    }

    #[test]
    fn three_single_qubit_bases() {
        let fam = QubitMubFamily::build(1).unwrap();
        assert_eq!(fam.len(), 3);
        // eigenbases of Z, ZX (up to phase convention) and X: all pairwise
        // overlaps 1/2
        for (i, (_, ua)) in fam.family().setups().enumerate() {
            for (j, (_, ub)) in fam.family().setups().enumerate() {
                if i >= j {
                    continue;
                }
                let gram = ua.adjoint() * ub;
                for z in gram.iter() {
                    assert_abs_diff_eq!(z.norm_sqr(), 0.5, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let fam = QubitMubFamily::build(2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..100 {
            let psi = CVec::from_fn(4, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let rho = DensityMatrix::from_pure(&psi);
            let probs = fam.born(&rho).unwrap();
            let rec = fam.reconstruct(&probs).unwrap();
            assert!(rho.hs_distance_sq(&rec).sqrt() < 1e-10);
        }
        // |00⟩⟨00| round-trips
        let mut psi = CVec::zeros(4);
        psi[0] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::from_pure(&psi);
        let rec = fam.reconstruct(&fam.born(&rho).unwrap()).unwrap();
        assert!(rho.hs_distance_sq(&rec).sqrt() < 1e-12);
        // non-normalized input rejected
        let mut probs = fam.born(&rho).unwrap();
        probs.setups[0].1[0] += 1e-3;
        assert!(fam.reconstruct(&probs).is_err());
    }

    #[test]
    fn mse_bound_values() {
        // maximally mixed in d = 4: (d²−1)/d = 3.75
        let fam = QubitMubFamily::build(2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(fam.mse_bound(&mixed).unwrap(), 3.75, epsilon = 1e-10);
        // maximally mixed in d = 16: 255/16
        let fam4 = QubitMubFamily::build(4).unwrap();
        let mixed16 = DensityMatrix::maximally_mixed(16);
        assert_abs_diff_eq!(fam4.mse_bound(&mixed16).unwrap(), 255.0 / 16.0, epsilon = 1e-9);
        // complete MUB identity: ⟨E²⟩ = d − Tr(ρ²) for any state
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..10 {
            let g = crate::CMat::from_fn(4, 4, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let m = &g * g.adjoint();
            let tr = m.trace().re;
            let rho = DensityMatrix::new_unchecked(m.map(|z| z / tr));
            let bound = fam.mse_bound(&rho).unwrap();
            assert_abs_diff_eq!(bound, 4.0 - rho.purity(), epsilon = 1e-9);
            assert!(bound >= 0.0);
        }
    }

    #[test]
    fn eigenvalue_relation_up_to_phase() {
        // Z_γX_{λγ}|ψ_κ^λ⟩ = c*(−1)^{tr γκ}|ψ_κ^λ⟩
        let fam = QubitMubFamily::build(2).unwrap();
        assert!(fam.family().spectral_violation() < 1e-10);
    }

    #[test]
    fn unsupported_sizes_rejected() {
        assert!(QubitMubFamily::build(0).is_err());
        assert!(QubitMubFamily::build(5).is_err());
    }
}
