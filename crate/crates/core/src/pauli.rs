//! Generalized Pauli monomials Z_γX_δ over a Galois ring, the finite Fourier
//! operator, and the partition of all monomials into maximal commuting sets.
//!
//! For GR(2^s,N) the operators act on the 2^{sN}-dimensional space whose
//! computational basis |κ⟩ is labelled by ring elements. With
//! χ(t) = exp(2πi t / 2^s),
//!
//! ```text
//! Z_γ = Σ_κ χ(T(γκ)) |κ⟩⟨κ|,   X_δ = Σ_κ |κ+δ⟩⟨κ|,
//! Z_γ X_δ = χ(T(δγ)) X_δ Z_γ,  F = 2^{-sN/2} Σ_{α,β} χ(T(αβ)) |α⟩⟨β|.
//! ```
//!
//! The commutation phase follows from the definitions:
//! Z_γX_δ|κ⟩ = χ(T(γκ+γδ))|κ+δ⟩ while X_δZ_γ|κ⟩ = χ(T(γκ))|κ+δ⟩.
//!
//! s = 2 gives the N-ququart system (χ powers of i), s = 1 the N-qubit one
//! (χ powers of −1). Matrices are indexed by the working-basis coordinates of
//! ring elements, with ququart i the i-th base-2^s digit of the index; that
//! makes the ring-defined operators literally equal to their tensor-product
//! factorizations Z_γ = Z^{g₁} ⊗ … ⊗ Z^{g_N}, g_j = T(γθ_j), and
//! X_δ = X^{d₁} ⊗ … ⊗ X^{d_N}, d_j = T(δθ_j*).

use crate::ring::{RingContext, RingElem};
use crate::CMat;
use num_complex::Complex64;
use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

/// The m-th roots of unity for m ∈ {2, 4, 8}, with the eighth roots written
/// through √2/2 so that powers of i stay exact in f64 arithmetic.
pub(crate) fn exact_roots(m: usize) -> Vec<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match m {
        2 => vec![c(1.0, 0.0), c(-1.0, 0.0)],
        4 => vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)],
        8 => {
            let h = FRAC_1_SQRT_2;
            vec![
                c(1.0, 0.0),
                c(h, h),
                c(0.0, 1.0),
                c(-h, h),
                c(-1.0, 0.0),
                c(-h, -h),
                c(0.0, -1.0),
                c(h, -h),
            ]
        }
        _ => (0..m)
            .map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / m as f64))
            .collect(),
    }
}

/// Index pair (γ, δ) naming the monomial Z_γX_δ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialLabel {
    pub gamma: RingElem,
    pub delta: RingElem,
}

/// Which of the two families a maximal commuting set belongs to: the ray
/// {Z_γX_{λγ}} labelled by λ, or the ideal set {Z_{μδ}X_δ} labelled by a zero
/// divisor μ ∈ (2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetKind {
    Ray { lambda: RingElem },
    Ideal { mu: RingElem },
}

/// A maximal commuting set of 2^{sN} monomials.
#[derive(Debug, Clone)]
pub struct CommutingSet {
    pub kind: SetKind,
    pub members: Vec<MonomialLabel>,
}

/// Operator algebra over one ring context: matrix builders for Z, X,
/// monomials and the Fourier operator, plus the commuting-set enumeration.
///
/// All matrices are value-semantic `DMatrix<Complex64>`; the space itself is
/// immutable and shareable.
#[derive(Debug, Clone)]
pub struct PauliSpace {
    ctx: Arc<RingContext>,
    dim: usize,
    /// canonical ring index -> Hilbert (working-coordinate) index
    hilbert_of_canon: Vec<usize>,
    /// Hilbert index -> canonical ring index
    canon_of_hilbert: Vec<usize>,
    chi_table: Vec<Complex64>,
}

impl PauliSpace {
    pub fn new(ctx: Arc<RingContext>) -> Self {
        let dim = ctx.size();
        let m = ctx.modulus() as usize;
        let mut hilbert_of_canon = vec![0usize; dim];
        let mut canon_of_hilbert = vec![0usize; dim];
        for idx in 0..dim {
            let coords = ctx.coords(&ctx.elem(idx));
            let h = coords.iter().rev().fold(0usize, |acc, &k| acc * m + k as usize);
            hilbert_of_canon[idx] = h;
            canon_of_hilbert[h] = idx;
        }
        PauliSpace { ctx, dim, hilbert_of_canon, canon_of_hilbert, chi_table: exact_roots(m) }
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// χ(t) = exp(2πi t / 2^s); the additive character of Z_{2^s}.
    pub fn chi(&self, t: u16) -> Complex64 {
        self.chi_table[(t as usize) % self.chi_table.len()]
    }

    pub fn hilbert_index(&self, a: &RingElem) -> usize {
        self.hilbert_of_canon[self.ctx.index_of(a)]
    }

    pub fn elem_at(&self, hilbert: usize) -> RingElem {
        self.ctx.elem(self.canon_of_hilbert[hilbert])
    }

    /// Diagonal phase operator Z_γ.
    pub fn z_matrix(&self, gamma: &RingElem) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for h in 0..self.dim {
            let kappa = self.elem_at(h);
            m[(h, h)] = self.chi(self.ctx.trace_mul(gamma, &kappa));
        }
        m
    }

    /// Shift operator X_δ = Σ |κ+δ⟩⟨κ| (a permutation matrix).
    pub fn x_matrix(&self, delta: &RingElem) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for h in 0..self.dim {
            let kappa = self.elem_at(h);
            let to = self.hilbert_index(&self.ctx.add(&kappa, delta));
            m[(to, h)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Z_γ·X_δ with the fixed Z-first ordering convention.
    pub fn monomial_matrix(&self, label: &MonomialLabel) -> CMat {
        self.z_matrix(&label.gamma) * self.x_matrix(&label.delta)
    }

    /// Single-site Z^p over Z_{2^s} (dimension 2^s).
    pub fn site_z(&self, p: u16) -> CMat {
        let d = self.ctx.modulus() as usize;
        CMat::from_fn(d, d, |i, j| {
            if i == j {
                self.chi(((i as u16) * p) % self.ctx.modulus())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Single-site X^p over Z_{2^s}.
    pub fn site_x(&self, p: u16) -> CMat {
        let d = self.ctx.modulus() as usize;
        CMat::from_fn(d, d, |i, j| {
            if (j + p as usize) % d == i {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Tensor product with site 1 on the least-significant index digit.
    pub fn tensor_chain(&self, site_ops: &[CMat]) -> CMat {
        let mut acc = site_ops.last().expect("at least one site").clone();
        for op in site_ops.iter().rev().skip(1) {
            acc = acc.kronecker(op);
        }
        acc
    }

    /// Tensor-product construction of Z_γ: powers g_j = T(γθ_j).
    pub fn z_tensor(&self, gamma: &RingElem) -> CMat {
        let sites: Vec<CMat> = self
            .ctx
            .working_basis()
            .elems
            .iter()
            .map(|th| self.site_z(self.ctx.trace_mul(gamma, th)))
            .collect();
        self.tensor_chain(&sites)
    }

    /// Tensor-product construction of X_δ: powers d_j = T(δθ_j*).
    pub fn x_tensor(&self, delta: &RingElem) -> CMat {
        let sites: Vec<CMat> = self
            .ctx
            .dual_working_basis()
            .elems
            .iter()
            .map(|th| self.site_x(self.ctx.trace_mul(delta, th)))
            .collect();
        self.tensor_chain(&sites)
    }

    /// Finite Fourier operator F = 2^{-sN/2} Σ χ(T(αβ)) |α⟩⟨β|, satisfying
    /// X_δ = F⁻¹ Z_δ F.
    pub fn fourier(&self) -> CMat {
        let norm = 1.0 / (self.dim as f64).sqrt();
        let mut m = CMat::zeros(self.dim, self.dim);
        for row in 0..self.dim {
            let alpha = self.elem_at(row);
            for col in 0..self.dim {
                let beta = self.elem_at(col);
                m[(row, col)] = self.chi(self.ctx.trace_mul(&alpha, &beta)).scale(norm);
            }
        }
        m
    }

    pub fn fourier_inv(&self) -> CMat {
        self.fourier().adjoint()
    }

    /// ‖U†U − I‖_max, the unitarity defect.
    pub fn unitarity_defect(&self, u: &CMat) -> f64 {
        let prod = u.adjoint() * u;
        let mut worst: f64 = 0.0;
        for i in 0..prod.nrows() {
            for j in 0..prod.ncols() {
                let expect = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((prod[(i, j)] - expect).norm());
            }
        }
        worst
    }

    /// All 2^{sN} + |(2)| maximal commuting sets: rays for every λ, ideal
    /// sets for every μ ∈ (2), each containing one monomial per ring element
    /// (the identity included).
    pub fn commuting_sets(&self) -> Vec<CommutingSet> {
        let ctx = &self.ctx;
        let mut out = Vec::new();
        for lambda in ctx.elements() {
            let members = ctx
                .elements()
                .map(|gamma| MonomialLabel {
                    delta: ctx.mul(&lambda, &gamma),
                    gamma,
                })
                .collect();
            out.push(CommutingSet { kind: SetKind::Ray { lambda }, members });
        }
        for mu in ctx.ideal2() {
            let members = ctx
                .elements()
                .map(|delta| MonomialLabel {
                    gamma: ctx.mul(&mu, &delta),
                    delta,
                })
                .collect();
            out.push(CommutingSet { kind: SetKind::Ideal { mu }, members });
        }
        out
    }

    /// Commutation phase exponent of a pair: T(δγ′) − T(δ′γ) mod 2^s.
    /// Zero iff the two monomials commute as operators.
    pub fn commutation_exponent(&self, a: &MonomialLabel, b: &MonomialLabel) -> u16 {
        let m = self.ctx.modulus();
        let t1 = self.ctx.trace_mul(&a.delta, &b.gamma);
        let t2 = self.ctx.trace_mul(&b.delta, &a.gamma);
        (t1 + m - t2) % m
    }

    /// Shared monomials of two distinct commuting sets.
    pub fn set_overlap(&self, a: &CommutingSet, b: &CommutingSet) -> Vec<MonomialLabel> {
        let key = |l: &MonomialLabel| (self.ctx.index_of(&l.gamma), self.ctx.index_of(&l.delta));
        let in_b: BTreeSet<(usize, usize)> = b.members.iter().map(|l| key(l)).collect();
        a.members.iter().filter(|l| in_b.contains(&key(l))).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingContext;
    use approx::assert_abs_diff_eq;

    fn space(s: u32, n: usize) -> PauliSpace {
        PauliSpace::new(RingContext::new(s, n, None).unwrap())
    }

    fn max_diff(a: &CMat, b: &CMat) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_ququart_z_and_x() {
        let sp = space(2, 1);
        let z = sp.z_matrix(&sp.ctx().one());
        for k in 0..4 {
            let expect = Complex64::from_polar(1.0, PI * k as f64 / 2.0);
            assert_abs_diff_eq!(z[(k, k)].re, expect.re, epsilon = 1e-14);
            assert_abs_diff_eq!(z[(k, k)].im, expect.im, epsilon = 1e-14);
        }
        let x = sp.x_matrix(&sp.ctx().one());
        for k in 0..4 {
            assert_eq!(x[((k + 1) % 4, k)], Complex64::new(1.0, 0.0));
        }
        // γ = 0 and δ = 0 are the identity
        assert_eq!(sp.z_matrix(&sp.ctx().zero()), CMat::identity(4, 4));
        assert_eq!(sp.x_matrix(&sp.ctx().zero()), CMat::identity(4, 4));
    }

    #[test]
    fn ring_and_tensor_constructions_agree() {
        for (s, n) in [(2u32, 2usize), (1, 2), (1, 3)] {
            let sp = space(s, n);
            for a in sp.ctx().elements() {
                assert_eq!(max_diff(&sp.z_matrix(&a), &sp.z_tensor(&a)), 0.0);
                assert_eq!(max_diff(&sp.x_matrix(&a), &sp.x_tensor(&a)), 0.0);
            }
        }
    }

    #[test]
    fn x_is_additive() {
        let sp = space(2, 2);
        let ctx = sp.ctx().clone();
        for a in ctx.elements().step_by(3) {
            for b in ctx.elements().step_by(5) {
                let lhs = sp.x_matrix(&a) * sp.x_matrix(&b);
                let rhs = sp.x_matrix(&ctx.add(&a, &b));
                assert!(max_diff(&lhs, &rhs) < 1e-13);
            }
        }
    }

    #[test]
    fn commutation_relation_entrywise() {
        let sp = space(2, 1);
        let one = sp.ctx().one();
        let z = sp.z_matrix(&one);
        let x = sp.x_matrix(&one);
        // Z·X = i·X·Z for γ = δ = 1 (Z^aX^b = i^{ab} X^bZ^a)
        let lhs = &z * &x;
        let rhs = (&x * &z).map(|c| c * Complex64::new(0.0, 1.0));
        assert!(max_diff(&lhs, &rhs) < 1e-14);
        // and in general through the trace exponent
        let sp2 = space(2, 2);
        let ctx = sp2.ctx().clone();
        for g in ctx.elements().step_by(3) {
            for d in ctx.elements().step_by(5) {
                let lhs = sp2.z_matrix(&g) * sp2.x_matrix(&d);
                let phase = sp2.chi(ctx.trace_mul(&d, &g));
                let rhs = (sp2.x_matrix(&d) * sp2.z_matrix(&g)).map(|c| c * phase);
                assert!(max_diff(&lhs, &rhs) < 1e-13);
            }
        }
    }

    #[test]
    fn sixteen_monomials_are_trace_orthogonal() {
        let sp = space(2, 1);
        let ctx = sp.ctx().clone();
        let labels: Vec<MonomialLabel> = ctx
            .elements()
            .flat_map(|g| ctx.elements().map(move |d| MonomialLabel { gamma: g.clone(), delta: d }))
            .collect();
        assert_eq!(labels.len(), 16);
        for (i, a) in labels.iter().enumerate() {
            let ma = sp.monomial_matrix(a);
            for (j, b) in labels.iter().enumerate() {
                let mb = sp.monomial_matrix(b);
                let gram = (ma.adjoint() * mb).trace();
                let expect = if i == j { 4.0 } else { 0.0 };
                assert_abs_diff_eq!(gram.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(gram.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fourier_conjugates_z_to_x() {
        for (s, n) in [(2u32, 1usize), (2, 2), (1, 2)] {
            let sp = space(s, n);
            let f = sp.fourier();
            assert!(sp.unitarity_defect(&f) < 1e-12);
            let finv = sp.fourier_inv();
            for d in sp.ctx().elements() {
                let lhs = sp.x_matrix(&d);
                let rhs = &finv * sp.z_matrix(&d) * &f;
                assert!(max_diff(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn commuting_set_census() {
        // N=1 ququart: 6 sets matching the single-ququart table row by row
        let sp = space(2, 1);
        let ctx = sp.ctx().clone();
        let sets = sp.commuting_sets();
        assert_eq!(sets.len(), 6);
        let as_pairs = |set: &CommutingSet| -> BTreeSet<(usize, usize)> {
            set.members
                .iter()
                .map(|l| (ctx.index_of(&l.gamma), ctx.index_of(&l.delta)))
                .collect()
        };
        #[rustfmt::skip]
        let expected: Vec<BTreeSet<(usize, usize)>> = vec![
            // rays l = 0..3: {Z^a X^{la}}
            [(0,0),(1,0),(2,0),(3,0)].into_iter().collect(),
            [(0,0),(1,1),(2,2),(3,3)].into_iter().collect(),
            [(0,0),(1,2),(2,0),(3,2)].into_iter().collect(),
            [(0,0),(1,3),(2,2),(3,1)].into_iter().collect(),
            // ideal sets m = 0, 2: {Z^{mb} X^b}
            [(0,0),(0,1),(0,2),(0,3)].into_iter().collect(),
            [(0,0),(2,1),(0,2),(2,3)].into_iter().collect(),
        ];
        for want in &expected {
            assert!(
                sets.iter().any(|s| &as_pairs(s) == want),
                "missing commuting set {:?}",
                want
            );
        }
        // every pair inside every set commutes; identity is a member
        for set in &sets {
            for a in &set.members {
                for b in &set.members {
                    assert_eq!(sp.commutation_exponent(a, b), 0);
                }
            }
            assert!(as_pairs(set).contains(&(0, 0)));
        }
        // N=2: 20 sets, and all 256 labels covered
        let sp2 = space(2, 2);
        let sets2 = sp2.commuting_sets();
        assert_eq!(sets2.len(), 20);
        let ctx2 = sp2.ctx().clone();
        let mut covered = std::collections::HashSet::new();
        for set in &sets2 {
            assert_eq!(set.members.len(), 16);
            for l in &set.members {
                covered.insert((ctx2.index_of(&l.gamma), ctx2.index_of(&l.delta)));
            }
        }
        assert_eq!(covered.len(), 256);
    }

    #[test]
    fn overlap_rules_between_sets() {
        let sp = space(2, 2);
        let ctx = sp.ctx().clone();
        let sets = sp.commuting_sets();
        let bar = |e: &RingElem| ctx.bar_index(e);
        for (i, a) in sets.iter().enumerate() {
            for b in sets.iter().skip(i + 1) {
                let shared = sp.set_overlap(a, b);
                match (&a.kind, &b.kind) {
                    (SetKind::Ray { lambda: la }, SetKind::Ray { lambda: lb }) => {
                        if bar(la) != bar(lb) {
                            assert_eq!(shared.len(), 1); // identity only
                        } else {
                            // {Z_γ X_{λ̄γ} : γ ∈ (2)}
                            assert_eq!(shared.len(), 4);
                            for l in &shared {
                                assert!(ctx.in_ideal2(&l.gamma));
                                assert_eq!(
                                    ctx.index_of(&l.delta),
                                    ctx.index_of(&ctx.mul(la, &l.gamma))
                                );
                            }
                        }
                    }
                    (SetKind::Ideal { .. }, SetKind::Ideal { .. }) => {
                        // {X_δ : δ ∈ (2)}
                        assert_eq!(shared.len(), 4);
                        for l in &shared {
                            assert_eq!(ctx.index_of(&l.gamma), 0);
                            assert!(ctx.in_ideal2(&l.delta));
                        }
                    }
                    _ => assert_eq!(shared.len(), 1),
                }
            }
        }
    }

    #[test]
    fn qubit_space_is_the_s1_instance() {
        let sp = space(1, 2);
        assert_eq!(sp.dim(), 4);
        assert_eq!(sp.commuting_sets().len(), 5); // 2^n + 1
        let f = sp.fourier();
        // F_{2^n} = F₂ ⊗ … ⊗ F₂ in a self-dual basis
        let f2 = sp.tensor_chain(&vec![
            CMat::from_fn(2, 2, |i, j| {
                Complex64::new(if i == 1 && j == 1 { -1.0 } else { 1.0 }, 0.0).scale(0.5f64.sqrt())
            });
            2
        ]);
        assert!(max_diff(&f, &f2) < 1e-12);
    }
}
