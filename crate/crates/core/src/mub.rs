//! The MU-like orthonormal basis family diagonalizing the commuting sets.
//!
//! For every ray label λ ∈ GR(2^s,N) the rotation
//!
//! ```text
//! V_λ = |R|⁻¹ Σ_{α,α′,β} c_{β,λ} χ(T(β(α−α′))) |α⟩⟨α′|
//! ```
//!
//! maps the computational basis onto the common eigenbasis |ψ_κ^λ⟩ of
//! {Z_γX_{λγ}}. The unimodular phases solve the functional equation
//! c_{α+γ,λ} c*_{γ,λ} = c_{α,λ} χ(−T(αγλ)) and are produced by lifting the
//! indices into the next Galois ring up: c_{γ,λ} = ω^{−T'(λ̂γ̂²)} with ω the
//! primitive 2^{s+1}-th root of unity and T' the lifted trace. For ququarts
//! (s = 2) this is ω = (1+i)/√2 and the lift lands in GR(8,N); for qubits
//! (s = 1) it degenerates to c = i^{3T₄(λγ²)}.
//!
//! The ideal-set eigenbases are Fourier conjugates: |ψ̃_κ^μ⟩ = Ṽ_μ†|κ̃⟩ with
//! |κ̃⟩ = F⁻¹|κ⟩ and Ṽ_μ = F⁻¹V_μF. Ray bases with different bar classes,
//! and every ray/ideal pair, are mutually unbiased; bases inside one bar
//! class satisfy the 0-or-2^{−N} overlap law and the redundancy projector
//! identities instead.

use crate::pauli::{exact_roots, MonomialLabel, PauliSpace, SetKind};
use crate::ring::{RingContext, RingElem, RingError};
use crate::{CMat, CVec};
use num_complex::Complex64;
use std::sync::Arc;

/// Phase solver c_{γ,λ} built from a base ring and its Hensel lift one step
/// up. Indices are lifted digit-wise on their 2-adic decomposition through
/// the Teichmüller exponent correspondence.
#[derive(Debug, Clone)]
pub struct PhaseSolver {
    base: Arc<RingContext>,
    lifted: Arc<RingContext>,
    roots: Vec<Complex64>,
}

impl PhaseSolver {
    pub fn new(base: Arc<RingContext>, lifted: Arc<RingContext>) -> Result<Self, RingError> {
        if lifted.s() != base.s() + 1 || lifted.degree() != base.degree() {
            return Err(RingError::LiftVerification(
                "phase ring must be one Hensel step above the base ring".into(),
            ));
        }
        let m = base.modulus();
        if lifted.spec().poly.iter().zip(&base.spec().poly).any(|(&hi, &lo)| hi % m != lo) {
            return Err(RingError::LiftVerification(
                "phase ring polynomial does not reduce to the base polynomial".into(),
            ));
        }
        let roots = exact_roots(2 * m as usize);
        Ok(PhaseSolver { base, lifted, roots })
    }

    /// Build the solver for the base ring by constructing the lifted ring
    /// from the same polynomial tower.
    pub fn for_base(base: Arc<RingContext>) -> Result<Self, RingError> {
        let chain = RingContext::tower(
            base.degree(),
            base.s() + 1,
            crate::ring::WorkingBasisPolicy::Default,
        )?;
        let lifted = chain.into_iter().last().unwrap();
        Self::new(base, lifted)
    }

    pub fn base(&self) -> &Arc<RingContext> {
        &self.base
    }

    pub fn lifted(&self) -> &Arc<RingContext> {
        &self.lifted
    }

    /// ω = exp(2πi/2^{s+1}); for s = 2 the eighth root (1+i)/√2.
    pub fn omega(&self) -> Complex64 {
        self.roots[1]
    }

    /// Digit-wise Teichmüller lift of a base-ring element.
    pub fn lift(&self, a: &RingElem) -> RingElem {
        self.base.lift_teichmuller(a, &self.lifted)
    }

    /// The phase c_{γ,λ} = ω^{−T'(λ̂ γ̂²)}; unimodular, with c_{0,λ} = c_{γ,0} = 1.
    pub fn phase(&self, gamma: &RingElem, lambda: &RingElem) -> Complex64 {
        let g = self.lift(gamma);
        let l = self.lift(lambda);
        let prod = self.lifted.mul(&l, &self.lifted.mul(&g, &g));
        let t = self.lifted.trace(&prod) as usize;
        let m2 = self.roots.len();
        self.roots[(m2 - t % m2) % m2]
    }

    /// Max violation of the functional equation
    /// c_{α+γ,λ} c*_{γ,λ} − c_{α,λ} χ(−T(αγλ)) over all (α, γ, λ).
    pub fn functional_equation_violation(&self) -> f64 {
        let ctx = &self.base;
        let m = ctx.modulus();
        let chi = exact_roots(m as usize);
        let mut worst: f64 = 0.0;
        for lambda in ctx.elements() {
            for alpha in ctx.elements() {
                let c_alpha = self.phase(&alpha, &lambda);
                for gamma in ctx.elements() {
                    let c_gamma = self.phase(&gamma, &lambda);
                    let c_sum = self.phase(&ctx.add(&alpha, &gamma), &lambda);
                    let t = ctx.trace(&ctx.mul(&alpha, &ctx.mul(&gamma, &lambda)));
                    let rhs = c_alpha * chi[((m - t) % m) as usize];
                    worst = worst.max((c_sum * c_gamma.conj() - rhs).norm());
                }
            }
        }
        worst
    }
}

/// Which measurement setup a basis belongs to: a ray label λ or an ideal
/// label μ ∈ (2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetupLabel {
    Ray(RingElem),
    Ideal(RingElem),
}

impl SetupLabel {
    pub fn elem(&self) -> &RingElem {
        match self {
            SetupLabel::Ray(e) | SetupLabel::Ideal(e) => e,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            SetupLabel::Ray(_) => "ray",
            SetupLabel::Ideal(_) => "ideal",
        }
    }
}

impl std::fmt::Display for SetupLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.kind_str(), self.elem().coeff_tuple())
    }
}

/// The full family of 2^{sN} ray bases and |(2)| ideal bases, stored as
/// unitary matrices whose column h is the eigenvector labelled by the ring
/// element with Hilbert index h.
#[derive(Debug, Clone)]
pub struct BasisFamily {
    space: PauliSpace,
    phases: PhaseSolver,
    setups: Vec<(SetupLabel, CMat)>,
    fourier: CMat,
}

/// Per-law maxima from a full overlap/redundancy scan.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct OverlapReport {
    /// ray/ray law: unbiased across bar classes, 0-or-2^{−N} inside one
    pub ray_ray: f64,
    /// ray/ideal law: always unbiased
    pub ray_ideal: f64,
    /// ideal/ideal law: δ_{κ̄,η̄}/2^N
    pub ideal_ideal: f64,
    /// projector-sum redundancy identity among ray bases of one bar class
    pub rc_ray: f64,
    /// projector-sum redundancy identity among ideal bases
    pub rc_ideal: f64,
    pub unitarity: f64,
    pub completeness: f64,
}

impl OverlapReport {
    pub fn max(&self) -> f64 {
        [
            self.ray_ray,
            self.ray_ideal,
            self.ideal_ideal,
            self.rc_ray,
            self.rc_ideal,
            self.unitarity,
            self.completeness,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Census of pairwise-unbiased subfamilies (cliques in the unbiasedness
/// graph over the built bases).
#[derive(Debug, Clone, serde::Serialize)]
pub struct CliqueReport {
    pub max_size: usize,
    pub max_clique_count: usize,
}

impl BasisFamily {
    /// Build every ray basis V_λ and every ideal basis F⁻¹V_μ†, checking
    /// unitarity of each to 1e−12.
    pub fn build(space: PauliSpace, phases: PhaseSolver) -> Result<Self, RingError> {
        assert!(
            Arc::ptr_eq(space.ctx(), phases.base()) || space.ctx().spec() == phases.base().spec()
        );
        let ctx = space.ctx().clone();
        let fourier = space.fourier();
        let finv = fourier.adjoint();
        let mut setups = Vec::new();
        for lambda in ctx.elements() {
            let v = rotation_v(&space, &phases, &lambda);
            setups.push((SetupLabel::Ray(lambda), v));
        }
        for mu in ctx.ideal2() {
            let v = rotation_v(&space, &phases, &mu);
            setups.push((SetupLabel::Ideal(mu), &finv * v.adjoint()));
        }
        let family = BasisFamily { space, phases, setups, fourier };
        let worst = family
            .setups
            .iter()
            .map(|(_, u)| family.space.unitarity_defect(u))
            .fold(0.0, f64::max);
        if worst > 1e-12 {
            return Err(RingError::LiftVerification(format!(
                "basis family lost unitarity ({worst:.3e})"
            )));
        }
        Ok(family)
    }

    /// Convenience constructor from the ring tower for GR(2^s,N).
    pub fn for_ring(ctx: Arc<RingContext>) -> Result<Self, RingError> {
        let phases = PhaseSolver::for_base(ctx.clone())?;
        Self::build(PauliSpace::new(ctx), phases)
    }

    pub fn space(&self) -> &PauliSpace {
        &self.space
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        self.space.ctx()
    }

    pub fn phases(&self) -> &PhaseSolver {
        &self.phases
    }

    pub fn fourier(&self) -> &CMat {
        &self.fourier
    }

    pub fn len(&self) -> usize {
        self.setups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.setups.is_empty()
    }

    pub fn setups(&self) -> impl Iterator<Item = &(SetupLabel, CMat)> {
        self.setups.iter()
    }

    pub fn setup_at(&self, i: usize) -> &(SetupLabel, CMat) {
        &self.setups[i]
    }

    pub fn position(&self, label: &SetupLabel) -> Option<usize> {
        self.setups.iter().position(|(l, _)| l == label)
    }

    pub fn basis(&self, label: &SetupLabel) -> Option<&CMat> {
        self.setups.iter().find(|(l, _)| l == label).map(|(_, m)| m)
    }

    /// Column |ψ_κ^setup⟩ for an outcome element κ.
    pub fn column(&self, setup: usize, kappa: &RingElem) -> CVec {
        let (_, u) = &self.setups[setup];
        CVec::from(u.column(self.space.hilbert_index(kappa)).clone_owned())
    }

    /// Max violation of the spectral law over every member of every
    /// commuting set:
    /// Z_γX_{λγ} = c*_{γ,λ} Σ_η χ(T(γη)) P_η^λ and its ideal analogue.
    pub fn spectral_violation(&self) -> f64 {
        let ctx = self.ctx();
        let mut worst: f64 = 0.0;
        for (label, u) in &self.setups {
            for spectral in ctx.elements() {
                let monomial = match label {
                    SetupLabel::Ray(lambda) => MonomialLabel {
                        delta: ctx.mul(lambda, &spectral),
                        gamma: spectral.clone(),
                    },
                    SetupLabel::Ideal(mu) => MonomialLabel {
                        gamma: ctx.mul(mu, &spectral),
                        delta: spectral.clone(),
                    },
                };
                let c = self.phases.phase(&spectral, label.elem()).conj();
                let mut rhs = CMat::zeros(self.space.dim(), self.space.dim());
                for eta in ctx.elements() {
                    let col = u.column(self.space.hilbert_index(&eta)).clone_owned();
                    let phase = c * self.space.chi(ctx.trace_mul(&spectral, &eta));
                    rhs.gemm(phase, &col, &col.adjoint(), Complex64::new(1.0, 0.0));
                }
                let lhs = self.space.monomial_matrix(&monomial);
                worst = worst.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Full scan of the three overlap laws and the two redundancy projector
    /// identities, plus unitarity and completeness defects.
    pub fn overlap_report(&self) -> OverlapReport {
        let ctx = self.ctx();
        let dim = self.space.dim() as f64;
        let ideal_card = ctx.ideal2().len() as f64;
        let unbiased = 1.0 / dim;
        let class_overlap = 1.0 / ideal_card;
        let mut rep = OverlapReport::default();

        for (i, (la, ua)) in self.setups.iter().enumerate() {
            rep.unitarity = rep.unitarity.max(self.space.unitarity_defect(ua));
            let mut completeness = CMat::identity(ua.nrows(), ua.ncols());
            completeness.gemm(
                Complex64::new(-1.0, 0.0),
                ua,
                &ua.adjoint(),
                Complex64::new(1.0, 0.0),
            );
            rep.completeness = rep
                .completeness
                .max(completeness.iter().map(|z| z.norm()).fold(0.0, f64::max));
            for (lb, ub) in self.setups.iter().skip(i + 1) {
                let gram = ua.adjoint() * ub;
                for row in 0..gram.nrows() {
                    let ka = self.space.elem_at(row);
                    for col in 0..gram.ncols() {
                        let kb = self.space.elem_at(col);
                        let o = gram[(row, col)].norm_sqr();
                        let expect = match (la, lb) {
                            (SetupLabel::Ray(l1), SetupLabel::Ray(l2)) => {
                                if ctx.bar_index(l1) != ctx.bar_index(l2) {
                                    unbiased
                                } else if ctx.bar_index(&ka) == ctx.bar_index(&kb) {
                                    class_overlap
                                } else {
                                    0.0
                                }
                            }
                            (SetupLabel::Ideal(_), SetupLabel::Ideal(_)) => {
                                if ctx.bar_index(&ka) == ctx.bar_index(&kb) {
                                    class_overlap
                                } else {
                                    0.0
                                }
                            }
                            _ => unbiased,
                        };
                        let slot = match (la, lb) {
                            (SetupLabel::Ray(_), SetupLabel::Ray(_)) => &mut rep.ray_ray,
                            (SetupLabel::Ideal(_), SetupLabel::Ideal(_)) => &mut rep.ideal_ideal,
                            _ => &mut rep.ray_ideal,
                        };
                        *slot = slot.max((o - expect).abs());
                    }
                }
            }
        }

        // redundancy projector identities: bar-class projector sums agree
        // across the setups of one group
        let reps = ctx.bar_class_reps();
        let ideal = ctx.ideal2();
        let class_proj = |setup: usize, kappa_bar: &RingElem| -> CMat {
            let mut acc = CMat::zeros(self.space.dim(), self.space.dim());
            for gamma in &ideal {
                let col = self.column(setup, &ctx.add(kappa_bar, gamma));
                acc.gemm(
                    Complex64::new(1.0, 0.0),
                    &col,
                    &col.adjoint(),
                    Complex64::new(1.0, 0.0),
                );
            }
            acc
        };
        for lambda_bar in &reps {
            let base = self
                .position(&SetupLabel::Ray(lambda_bar.clone()))
                .expect("bar-class representative is a ray label");
            for delta in &ideal {
                let shifted = self
                    .position(&SetupLabel::Ray(ctx.add(lambda_bar, delta)))
                    .expect("shifted ray setup exists");
                for kappa_bar in &reps {
                    let d = class_proj(base, kappa_bar) - class_proj(shifted, kappa_bar);
                    rep.rc_ray = rep.rc_ray.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
        let ideal_base = self
            .position(&SetupLabel::Ideal(ctx.zero()))
            .expect("ideal setup 0 exists");
        for mu in &ideal {
            let shifted = self
                .position(&SetupLabel::Ideal(mu.clone()))
                .expect("ideal setup exists");
            for kappa_bar in &reps {
                let d = class_proj(ideal_base, kappa_bar) - class_proj(shifted, kappa_bar);
                rep.rc_ideal = rep.rc_ideal.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        rep
    }

    /// Exhaustive census of pairwise-unbiased subfamilies. Two bases count
    /// as unbiased when every squared overlap equals 1/dim within `tol`.
    pub fn clique_report(&self, tol: f64) -> CliqueReport {
        let n = self.setups.len();
        let unbiased = 1.0 / self.space.dim() as f64;
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let gram = self.setups[i].1.adjoint() * &self.setups[j].1;
                let ok = gram.iter().all(|z| (z.norm_sqr() - unbiased).abs() <= tol);
                adj[i][j] = ok;
                adj[j][i] = ok;
            }
        }
        fn extend(adj: &[Vec<bool>], stack: &mut Vec<usize>, start: usize, best: &mut usize) {
            *best = (*best).max(stack.len());
            for v in start..adj.len() {
                if stack.iter().all(|&u| adj[u][v]) {
                    stack.push(v);
                    extend(adj, stack, v + 1, best);
                    stack.pop();
                }
            }
        }
        fn count_of_size(
            adj: &[Vec<bool>],
            stack: &mut Vec<usize>,
            start: usize,
            size: usize,
            count: &mut usize,
        ) {
            if stack.len() == size {
                *count += 1;
                return;
            }
            for v in start..adj.len() {
                if stack.iter().all(|&u| adj[u][v]) {
                    stack.push(v);
                    count_of_size(adj, stack, v + 1, size, count);
                    stack.pop();
                }
            }
        }
        let mut max_size = 0usize;
        extend(&adj, &mut Vec::new(), 0, &mut max_size);
        let mut count = 0usize;
        count_of_size(&adj, &mut Vec::new(), 0, max_size, &mut count);
        CliqueReport { max_size, max_clique_count: count }
    }

    /// Column-wise product test: a basis is a product basis when every
    /// column, reshaped to 2^s × 2^{s(N−1)}, has numerical rank one.
    pub fn factorization_census(&self, tol: f64) -> Vec<(SetupLabel, bool)> {
        let site = self.ctx().modulus() as usize;
        self.setups
            .iter()
            .map(|(label, u)| {
                let product = (0..u.ncols())
                    .all(|c| column_is_product(&CVec::from(u.column(c).clone_owned()), site, tol));
                (label.clone(), product)
            })
            .collect()
    }
}

/// Rank-one test of the 2^s × rest reshaping of a state vector: all 2×2
/// minors must vanish relative to the largest entry.
pub fn column_is_product(v: &CVec, site: usize, tol: f64) -> bool {
    let rest = v.len() / site;
    if rest <= 1 {
        return true;
    }
    // index h = k₁ + site·r with the site digit varying fastest
    let at = |k: usize, r: usize| v[k + site * r];
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for k1 in 0..site {
        for k2 in (k1 + 1)..site {
            for r1 in 0..rest {
                for r2 in (r1 + 1)..rest {
                    let minor = at(k1, r1) * at(k2, r2) - at(k1, r2) * at(k2, r1);
                    if minor.norm() > tol * scale * scale {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The rotation V_λ built from the phase solution; columns are the
/// eigenvectors |ψ_κ^λ⟩ in Hilbert-index order. V₀ is the identity.
pub fn rotation_v(space: &PauliSpace, phases: &PhaseSolver, lambda: &RingElem) -> CMat {
    let ctx = space.ctx();
    let dim = space.dim();
    let norm = 1.0 / dim as f64;
    let mut v = CMat::zeros(dim, dim);
    for beta in ctx.elements() {
        let c = phases.phase(&beta, lambda).scale(norm);
        // u_β[α] = χ(T(βα)); V += c_β · u_β u_β†
        let u = CVec::from_fn(dim, |h, _| space.chi(ctx.trace_mul(&beta, &space.elem_at(h))));
        v.gemm(c, &u, &u.adjoint(), Complex64::new(1.0, 0.0));
    }
    v
}

// ---------------------------------------------------------------------------
// Single-ququart fixture bases (dimension 4), given as explicit column sets.

/// Fixture label: ray l or ideal m, by canonical index in Z₄.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureLabel {
    Ray(usize),
    Ideal(usize),
}

/// The six explicitly tabulated single-ququart bases.
pub fn single_ququart_fixtures() -> Vec<(FixtureLabel, CMat)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let om = Complex64::new(h, h); // (1+i)/√2
    let omc = om.conj();
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let i_ = c(0.0, 1.0);
    let cols = |v: [[Complex64; 4]; 4]| CMat::from_fn(4, 4, |r, cidx| v[cidx][r].scale(0.5));
    vec![
        // i) computational basis
        (FixtureLabel::Ray(0), CMat::identity(4, 4)),
        // ii) tabulated for {Z^kX^k}
        (
            FixtureLabel::Ray(1),
            cols([
                [om, one, -om, one],
                [one, om, one, -om],
                [-om, one, om, one],
                [one, -om, one, om],
            ]),
        ),
        // iii) eigenstates of {Z^kX^{2k}}
        (
            FixtureLabel::Ray(2),
            cols([
                [c(1.0, 1.0), zero, c(1.0, -1.0), zero],
                [zero, c(1.0, 1.0), zero, c(1.0, -1.0)],
                [c(1.0, -1.0), zero, c(1.0, 1.0), zero],
                [zero, c(1.0, -1.0), zero, c(1.0, 1.0)],
            ]),
        ),
        // iv) tabulated for {Z^kX^{3k}}
        (
            FixtureLabel::Ray(3),
            cols([
                [-omc, one, omc, one],
                [one, -omc, one, omc],
                [omc, one, -omc, one],
                [one, omc, one, -omc],
            ]),
        ),
        // v) tabulated as ψ̃^0
        (
            FixtureLabel::Ideal(0),
            cols([
                [one, one, one, one],
                [one, i_, -one, -i_],
                [one, -one, one, -one],
                [one, -i_, -one, i_],
            ]),
        ),
        // vi) tabulated as ψ̃^2
        (
            FixtureLabel::Ideal(2),
            cols([
                [one, i_, one, i_],
                [one, -one, -one, one],
                [one, -i_, one, -i_],
                [one, one, -one, -one],
            ]),
        ),
    ]
}

/// Outcome of validating one fixture basis against the constructed family.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FixtureCheck {
    pub fixture: String,
    /// commuting set whose members (or their conjugates) the fixture
    /// diagonalizes, with the convention that worked
    pub eigen_set: Option<(String, Convention)>,
    /// constructed basis equal to the fixture up to column phase+permutation
    pub matches_basis: Option<String>,
    pub max_eigen_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Convention {
    Direct,
    Conjugate,
}

/// Validate the tabulated single-ququart bases: each must diagonalize one
/// commuting set (directly or under complex conjugation of the monomials)
/// and must match a constructed basis up to per-column phase and column
/// permutation.
pub fn validate_fixtures(family: &BasisFamily) -> Vec<FixtureCheck> {
    assert_eq!(family.space().dim(), 4, "fixtures are single-ququart");
    let space = family.space();
    let sets = space.commuting_sets();
    let mut out = Vec::new();
    for (label, fixture) in single_ququart_fixtures() {
        let name = match label {
            FixtureLabel::Ray(l) => format!("ray:{l}"),
            FixtureLabel::Ideal(m) => format!("ideal:{m}"),
        };
        let mut eigen_set = None;
        let mut best_defect = f64::INFINITY;
        for set in &sets {
            for conv in [Convention::Direct, Convention::Conjugate] {
                let mut defect: f64 = 0.0;
                for member in &set.members {
                    let mut m = space.monomial_matrix(member);
                    if conv == Convention::Conjugate {
                        m = m.map(|z| z.conj());
                    }
                    for cidx in 0..4 {
                        let col = CVec::from(fixture.column(cidx).clone_owned());
                        let image = &m * &col;
                        let lam = col.dotc(&image);
                        defect = defect.max((image - col.map(|z| z * lam)).norm());
                    }
                }
                if defect < 1e-10 && eigen_set.is_none() {
                    let set_name = match &set.kind {
                        SetKind::Ray { lambda } => format!("ray:{}", space.ctx().index_of(lambda)),
                        SetKind::Ideal { mu } => format!("ideal:{}", space.ctx().index_of(mu)),
                    };
                    eigen_set = Some((set_name, conv));
                }
                best_defect = best_defect.min(defect);
            }
        }
        let mut matches_basis = None;
        for (setup_label, u) in family.setups() {
            if basis_match_up_to_phase_perm(&fixture, u, 1e-10) {
                matches_basis = Some(setup_label.to_string());
                break;
            }
        }
        out.push(FixtureCheck {
            fixture: name,
            eigen_set,
            matches_basis,
            max_eigen_defect: best_defect,
        });
    }
    out
}

/// True when the two unitaries have the same columns up to per-column phases
/// and a column permutation.
pub fn basis_match_up_to_phase_perm(a: &CMat, b: &CMat, tol: f64) -> bool {
    let n = a.ncols();
    let mut used = vec![false; n];
    for i in 0..n {
        let ai = a.column(i);
        let mut found = false;
        for (j, used_j) in used.iter_mut().enumerate() {
            if *used_j {
                continue;
            }
            let overlap = b.column(j).dotc(&ai).norm();
            if (overlap - 1.0).abs() <= tol {
                *used_j = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// CNOT for a pair of ququarts.

/// CNOT₄ on two ququarts: control in the single-ququart Fourier basis,
/// target shifted by the control digit,
/// CNOT₄ = Σ_k |k̃⟩⟨k̃| ⊗ X^k with |k̃⟩ = F₄⁻¹|k⟩.
pub fn cnot4(space: &PauliSpace) -> CMat {
    assert_eq!(space.ctx().degree(), 2, "defined for two ququarts");
    assert_eq!(space.ctx().s(), 2);
    let f4 = single_site_fourier();
    let finv = f4.adjoint();
    let mut acc = CMat::zeros(16, 16);
    for k in 0..4usize {
        let col = finv.column(k).clone_owned();
        let proj = &col * col.adjoint();
        // particle 1 (control) on the least-significant digit
        acc += space.tensor_chain(&[proj, space.site_x(k as u16)]);
    }
    acc
}

fn single_site_fourier() -> CMat {
    let roots = exact_roots(4);
    CMat::from_fn(4, 4, |j, k| roots[(j * k) % 4].scale(0.5))
}

/// Witness result for the proportionality of one V_λ to a CNOT₄ power.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CnotCheck {
    pub lambda_coords: (u16, u16),
    pub power: u16,
    /// true when V_λ·(CNOT₄^{l₁+l₂})† maps every tested product state to a
    /// product state
    pub locality_witness: bool,
}

/// For each λ = l₁θ₁ + l₂θ₂ test whether V_λ·(CNOT₄^{l₁+l₂})† preserves
/// product states, on a deterministic battery of product inputs.
pub fn cnot4_report(family: &BasisFamily) -> Vec<CnotCheck> {
    let space = family.space();
    let ctx = family.ctx();
    assert_eq!(ctx.degree(), 2);
    let gate = cnot4(space);
    let mut powers = vec![CMat::identity(16, 16)];
    for _ in 1..4 {
        let last = powers.last().unwrap() * &gate;
        powers.push(last);
    }
    let roots = exact_roots(8);
    let mut site_states: Vec<CVec> = (0..4)
        .map(|k| {
            CVec::from_fn(4, |r, _| {
                if r == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    for a in 0..4usize {
        for b in 0..8usize {
            let v = CVec::from_fn(4, |r, _| roots[(r * (2 * a + 1)) % 8] * roots[(r * r * b) % 8])
                .scale(0.5);
            site_states.push(v);
        }
    }
    let mut out = Vec::new();
    for lambda in ctx.elements() {
        let coords = ctx.coords(&lambda);
        let (l1, l2) = (coords[0], coords[1]);
        let power = ((l1 + l2) % 4) as usize;
        let v = family.basis(&SetupLabel::Ray(lambda.clone())).expect("ray basis").clone();
        let w = &v * powers[power].adjoint();
        let mut ok = true;
        'outer: for s1 in &site_states {
            for s2 in &site_states {
                let prod = kron_state(s1, s2);
                let image = &w * prod;
                if !column_is_product(&image, 4, 1e-8) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        out.push(CnotCheck { lambda_coords: (l1, l2), power: power as u16, locality_witness: ok });
    }
    out
}

/// |s₁⟩ ⊗ |s₂⟩ with particle 1 on the fast index digit.
fn kron_state(s1: &CVec, s2: &CVec) -> CVec {
    CVec::from_fn(s1.len() * s2.len(), |h, _| s1[h % s1.len()] * s2[h / s1.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::WorkingBasisPolicy;
    use approx::assert_abs_diff_eq;

    fn family(n: usize) -> BasisFamily {
        let ctx = RingContext::new(2, n, None).unwrap();
        BasisFamily::for_ring(ctx).unwrap()
    }

    fn max_entry(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn phase_values_single_ququart() {
        let ctx = RingContext::new(2, 1, None).unwrap();
        let ph = PhaseSolver::for_base(ctx.clone()).unwrap();
        let om = ph.omega();
        assert_abs_diff_eq!((om.powu(8) - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        for e in ctx.elements() {
            assert_eq!(ph.phase(&ctx.zero(), &e), Complex64::new(1.0, 0.0));
            assert_eq!(ph.phase(&e, &ctx.zero()), Complex64::new(1.0, 0.0));
        }
        // c_{1,1} = ω⁷, c_{2,1} = −1
        let one = ctx.one();
        assert!((ph.phase(&one, &one) - om.powu(7)).norm() < 1e-14);
        assert!((ph.phase(&ctx.scalar(2), &one) - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn functional_equation_exhaustive() {
        for n in [1usize, 2] {
            let ctx = RingContext::new(2, n, None).unwrap();
            let ph = PhaseSolver::for_base(ctx).unwrap();
            assert!(ph.functional_equation_violation() < 1e-12);
        }
        // qubit instance s = 1
        let gf = RingContext::with_policy(1, 2, WorkingBasisPolicy::SelfDual).unwrap();
        let ph = PhaseSolver::for_base(gf).unwrap();
        assert!(ph.functional_equation_violation() < 1e-12);
    }

    #[test]
    fn rotation_v_basics() {
        let ctx = RingContext::new(2, 1, None).unwrap();
        let ph = PhaseSolver::for_base(ctx.clone()).unwrap();
        let sp = PauliSpace::new(ctx.clone());
        let v0 = rotation_v(&sp, &ph, &ctx.zero());
        assert!(max_entry(&(v0 - CMat::identity(4, 4))) < 1e-13);
        // first column of V₁ ∝ (ω⁷, 1, −ω⁷, 1)/2, a ZX eigenvector with
        // eigenvalue ω
        let v1 = rotation_v(&sp, &ph, &ctx.one());
        let om7 = ph.omega().powu(7);
        let expect = [om7, Complex64::new(1.0, 0.0), -om7, Complex64::new(1.0, 0.0)];
        for (r, e) in expect.iter().enumerate() {
            assert!((v1[(r, 0)] - e.scale(0.5)).norm() < 1e-13);
        }
        let zx = sp.monomial_matrix(&MonomialLabel { gamma: ctx.one(), delta: ctx.one() });
        let col0 = CVec::from(v1.column(0).clone_owned());
        let image = &zx * &col0;
        assert!((image - col0.map(|z| z * ph.omega())).norm() < 1e-12);
        for lam in ctx.elements() {
            assert!(sp.unitarity_defect(&rotation_v(&sp, &ph, &lam)) < 1e-12);
        }
    }

    #[test]
    fn family_counts_and_special_bases() {
        let fam1 = family(1);
        assert_eq!(fam1.len(), 6);
        let fam2 = family(2);
        assert_eq!(fam2.len(), 20);
        let finv = fam2.space().fourier_inv();
        let mu0 = fam2.basis(&SetupLabel::Ideal(fam2.ctx().zero())).unwrap();
        assert!(max_entry(&(mu0 - finv)) < 1e-12);
        let ray0 = fam2.basis(&SetupLabel::Ray(fam2.ctx().zero())).unwrap();
        assert!(max_entry(&(ray0 - CMat::identity(16, 16))) < 1e-12);
    }

    #[test]
    fn spectral_law_n1() {
        assert!(family(1).spectral_violation() < 1e-10);
    }

    #[test]
    fn overlap_laws_n1() {
        let rep = family(1).overlap_report();
        assert!(rep.max() < 1e-10, "{rep:?}");
    }

    #[test]
    fn single_ququart_explicit_laws() {
        let fam = family(1);
        let ctx = fam.ctx().clone();
        let bar = |k: usize| k % 2;
        for l in 0..4usize {
            for m in [0usize, 2] {
                let ua = fam.basis(&SetupLabel::Ray(ctx.elem(l))).unwrap();
                let ub = fam.basis(&SetupLabel::Ideal(ctx.elem(m))).unwrap();
                let gram = ua.adjoint() * ub;
                for z in gram.iter() {
                    assert_abs_diff_eq!(z.norm_sqr(), 0.25, epsilon = 1e-12);
                }
            }
        }
        for l1 in 0..4usize {
            for l2 in 0..4usize {
                if l1 == l2 {
                    continue;
                }
                let ua = fam.basis(&SetupLabel::Ray(ctx.elem(l1))).unwrap();
                let ub = fam.basis(&SetupLabel::Ray(ctx.elem(l2))).unwrap();
                let gram = ua.adjoint() * ub;
                for r in 0..4 {
                    for c in 0..4 {
                        let o = gram[(r, c)].norm_sqr();
                        let expect = if bar(l1) != bar(l2) {
                            0.25
                        } else if bar(r) == bar(c) {
                            0.5
                        } else {
                            0.0
                        };
                        assert_abs_diff_eq!(o, expect, epsilon = 1e-12);
                    }
                }
            }
        }
        let u0 = fam.basis(&SetupLabel::Ideal(ctx.elem(0))).unwrap();
        let u2 = fam.basis(&SetupLabel::Ideal(ctx.elem(2))).unwrap();
        let gram = u0.adjoint() * u2;
        for r in 0..4 {
            for c in 0..4 {
                let expect = if bar(r) == bar(c) { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(gram[(r, c)].norm_sqr(), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fixtures_validate() {
        let fam = family(1);
        let checks = validate_fixtures(&fam);
        assert_eq!(checks.len(), 6);
        for check in &checks {
            assert!(check.eigen_set.is_some(), "fixture {} diagonalizes no set", check.fixture);
            assert!(
                check.matches_basis.is_some(),
                "fixture {} matches no constructed basis",
                check.fixture
            );
        }
        assert_eq!(checks[0].matches_basis.as_deref(), Some("ray:(0)"));
    }

    #[test]
    fn fourier_factorizes_only_with_self_dual_basis() {
        let f4 = single_site_fourier();
        // N = 3: self-dual working basis, F₆₄ = F₄⊗F₄⊗F₄
        let sp3 = PauliSpace::new(RingContext::new(2, 3, None).unwrap());
        let diff = max_entry(&(sp3.fourier() - sp3.tensor_chain(&[f4.clone(), f4.clone(), f4.clone()])));
        assert!(diff < 1e-10, "max deviation {diff}");
        // N = 2: no self-dual basis, product form must fail
        let sp2 = PauliSpace::new(RingContext::new(2, 2, None).unwrap());
        let diff2 = max_entry(&(sp2.fourier() - sp2.tensor_chain(&[f4.clone(), f4])));
        assert!(diff2 > 1e-3);
    }

    #[test]
    fn clique_census_n1() {
        let rep = family(1).clique_report(1e-10);
        assert_eq!(rep.max_size, 3); // 2^N + 1
        // count reported for the acceptance audit
        assert!(rep.max_clique_count > 0);
    }

    #[test]
    fn cnot_gate_shape() {
        let sp = PauliSpace::new(RingContext::new(2, 2, None).unwrap());
        let gate = cnot4(&sp);
        assert!(sp.unitarity_defect(&gate) < 1e-12);
        let mut p = CMat::identity(16, 16);
        for _ in 0..4 {
            p = &p * &gate;
        }
        assert!(max_entry(&(p - CMat::identity(16, 16))) < 1e-12);
    }
}
