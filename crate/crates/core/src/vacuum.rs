//! Gaussian vacuum functionals over a truncated set of box modes.
//!
//! Every Grassmann mode of the functional corresponds to one eigenmode of
//! the single-particle Hamiltonian: a box momentum `k = 2πn/L` together
//! with a spin label and a frequency sign. The field operators are
//! represented on functionals as
//!
//! ```text
//! ψ̂ₙ  = (ηₙ  + ∂/∂η†ₙ) / √2
//! ψ̂†ₙ = (η†ₙ + ∂/∂ηₙ ) / √2
//! ```
//!
//! Particle modes are annihilated by `ψ̂ₙ`, antiparticle modes by `ψ̂†ₙ`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{
    state_norm, Algebra, BerezinConvention, CovarianceMatrix, GeneratorIndex, GrassmannElement,
    NormCheck,
};
use crate::spinor::{
    covariance_k, energy, energy_projectors, hamiltonian_k, rest_spinor, spectrum, DiracSpinor,
    SignConvention,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Frequency {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Branch {
    /// 0 = up, 1 = down
    pub spin: u8,
    pub frequency: Frequency,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch { spin: 0, frequency: Frequency::Positive },
        Branch { spin: 1, frequency: Frequency::Positive },
        Branch { spin: 0, frequency: Frequency::Negative },
        Branch { spin: 1, frequency: Frequency::Negative },
    ];

    pub const fn particle(spin: u8) -> Self {
        Branch { spin, frequency: Frequency::Positive }
    }

    pub const fn antiparticle(spin: u8) -> Self {
        Branch { spin, frequency: Frequency::Negative }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Mode {
    /// Integer box index; `k = 2πn/L`.
    pub n: [i64; 3],
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeBasis {
    side: f64,
    mass: f64,
    modes: Vec<Mode>,
}

impl ModeBasis {
    pub fn new(side: f64, mass: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidParameter(format!("box side {side} must be positive")));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass {mass} must be non-negative")));
        }
        Ok(ModeBasis { side, mass, modes: Vec::new() })
    }

    fn check_omega(&self, n: [i64; 3]) -> Result<()> {
        if n == [0, 0, 0] && self.mass == 0.0 {
            return Err(Error::DegenerateSpectrum);
        }
        Ok(())
    }

    pub fn with_mode(mut self, n: [i64; 3], branch: Branch) -> Result<Self> {
        self.check_omega(n)?;
        self.modes.push(Mode { n, branch });
        Ok(self)
    }

    /// Adds all four spinor branches at box index `n`.
    pub fn with_momentum(mut self, n: [i64; 3]) -> Result<Self> {
        self.check_omega(n)?;
        self.modes.extend(Branch::ALL.iter().map(|&branch| Mode { n, branch }));
        Ok(self)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(3)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn momentum(&self, n: [i64; 3]) -> [f64; 3] {
        let unit = 2.0 * PI / self.side;
        [n[0] as f64 * unit, n[1] as f64 * unit, n[2] as f64 * unit]
    }

    pub fn omega(&self, mode: usize) -> f64 {
        energy(self.momentum(self.modes[mode].n), self.mass)
    }

    /// Signed single-particle energy `±ω` of a mode.
    pub fn energy(&self, mode: usize) -> f64 {
        match self.modes[mode].branch.frequency {
            Frequency::Positive => self.omega(mode),
            Frequency::Negative => -self.omega(mode),
        }
    }

    /// Unit eigenspinor of `h(k)` for the mode: `P₊` applied to `u¹, u²` or
    /// `P₋` applied to `u³, u⁴`. Reduces to the rest basis at `k = 0`.
    pub fn spinor(&self, mode: usize) -> Result<DiracSpinor> {
        let m = self.modes[mode];
        let (pp, pm) = energy_projectors(self.momentum(m.n), self.mass)?;
        let v = match m.branch.frequency {
            Frequency::Positive => pp * rest_spinor(1 + m.branch.spin as usize),
            Frequency::Negative => pm * rest_spinor(3 + m.branch.spin as usize),
        };
        Ok(v / Complex64::new(v.norm(), 0.0))
    }

    /// Diagonal covariance `Ω_nn = ∓sign(Eₙ)` for the chosen convention.
    pub fn covariance(&self, sign: SignConvention) -> CovarianceMatrix {
        let diag: Vec<f64> = (0..self.len()).map(|i| sign.diagonal_entry(self.energy(i))).collect();
        CovarianceMatrix::diagonal(&diag)
    }
}

/// A functional `prefactor · body · e^{−iE₀t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalState {
    pub body: GrassmannElement,
    pub covariance: CovarianceMatrix,
    /// Signed single-particle energies of the modes.
    pub energies: Vec<f64>,
    /// `E₀ = ½ Tr h(1 + Ω)`; the state carries the phase `−E₀t`.
    pub ground_energy: f64,
    pub prefactor: Complex64,
    pub volume: f64,
}

impl FunctionalState {
    pub fn modes(&self) -> usize {
        self.energies.len()
    }

    pub fn algebra(&self) -> Algebra {
        self.body.algebra()
    }

    pub fn phase(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, -self.ground_energy * t).exp()
    }

    /// `⟨Ψ|Ψ⟩` of the Gaussian part, with `N = 1`.
    pub fn norm(&self) -> Result<NormCheck> {
        state_norm(&self.covariance, self.algebra().convention())
    }
}

pub fn build_vacuum(basis: &ModeBasis, omega: &CovarianceMatrix) -> Result<FunctionalState> {
    if omega.dim() != basis.len() || omega.0.ncols() != basis.len() {
        return Err(Error::DimensionMismatch {
            rows: omega.0.nrows(),
            cols: omega.0.ncols(),
            expected: basis.len(),
        });
    }
    let algebra = Algebra::with_convention(basis.len(), BerezinConvention::default())?;
    let body = algebra.quadratic_form(omega)?.exp();
    let energies: Vec<f64> = (0..basis.len()).map(|i| basis.energy(i)).collect();
    let ground_energy = 0.5
        * energies
            .iter()
            .enumerate()
            .map(|(i, e)| e * (1.0 + omega.0[(i, i)].re))
            .sum::<f64>();
    Ok(FunctionalState {
        body,
        covariance: omega.clone(),
        energies,
        ground_energy,
        prefactor: Complex64::new(1.0, 0.0),
        volume: basis.volume(),
    })
}

/// Mode-indexed field operators acting on functionals.
#[derive(Debug, Clone, Copy)]
pub struct FieldOperatorRep {
    algebra: Algebra,
}

impl FieldOperatorRep {
    pub fn new(algebra: Algebra) -> Self {
        FieldOperatorRep { algebra }
    }

    /// `√2 ψ̂ₙ f = ηₙ f + ∂f/∂η†ₙ`
    fn raw_psi(&self, mode: usize, f: &GrassmannElement) -> Result<GrassmannElement> {
        let eta = self.algebra.generator(GeneratorIndex::plain(mode))?;
        Ok(&eta.multiply(f)? + &f.left_derivative(GeneratorIndex::conj(mode))?)
    }

    /// `√2 ψ̂†ₙ f = η†ₙ f + ∂f/∂ηₙ`
    fn raw_psi_dag(&self, mode: usize, f: &GrassmannElement) -> Result<GrassmannElement> {
        let eta_dag = self.algebra.generator(GeneratorIndex::conj(mode))?;
        Ok(&eta_dag.multiply(f)? + &f.left_derivative(GeneratorIndex::plain(mode))?)
    }

    /// `ψ̂ₙ f = (ηₙ f + ∂f/∂η†ₙ)/√2`
    pub fn psi(&self, mode: usize, f: &GrassmannElement) -> Result<GrassmannElement> {
        Ok(self.raw_psi(mode, f)?.scale(Complex64::new(FRAC_1_SQRT_2, 0.0)))
    }

    /// `ψ̂†ₙ f = (η†ₙ f + ∂f/∂ηₙ)/√2`
    pub fn psi_dag(&self, mode: usize, f: &GrassmannElement) -> Result<GrassmannElement> {
        Ok(self.raw_psi_dag(mode, f)?.scale(Complex64::new(FRAC_1_SQRT_2, 0.0)))
    }

    /// `{ψ̂ₙ, ψ̂†ₘ} f`, with the two `1/√2` factors combined into an exact `½`.
    pub fn anticommutator(&self, n: usize, m: usize, f: &GrassmannElement) -> Result<GrassmannElement> {
        let a = self.raw_psi(n, &self.raw_psi_dag(m, f)?)?;
        let b = self.raw_psi_dag(m, &self.raw_psi(n, f)?)?;
        Ok((&a + &b).scale(Complex64::new(0.5, 0.0)))
    }

    /// `aₙ = ψ̂ₙ` for particle modes, `bₙ = ψ̂†ₙ` for antiparticle modes.
    pub fn annihilate(&self, mode: usize, positive: bool, f: &GrassmannElement) -> Result<GrassmannElement> {
        if positive {
            self.psi(mode, f)
        } else {
            self.psi_dag(mode, f)
        }
    }

    /// `a†ₙ = ψ̂†ₙ` for particle modes, `b†ₙ = −ψ̂ₙ` for antiparticle modes.
    pub fn create(&self, mode: usize, positive: bool, f: &GrassmannElement) -> Result<GrassmannElement> {
        if positive {
            self.psi_dag(mode, f)
        } else {
            Ok(-&self.psi(mode, f)?)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnihilationCheck {
    pub mode: usize,
    /// Largest coefficient of the annihilated state.
    pub residual: f64,
    pub annihilated: bool,
}

pub fn annihilation_check(state: &FunctionalState, mode: usize) -> Result<AnnihilationCheck> {
    if mode >= state.modes() {
        return Err(Error::ModeOutOfRange { mode, modes: state.modes() });
    }
    let ops = FieldOperatorRep::new(state.algebra());
    let out = ops.annihilate(mode, state.energies[mode] > 0.0, &state.body)?;
    let residual = out.max_coefficient();
    Ok(AnnihilationCheck { mode, residual, annihilated: residual < 1e-12 })
}

/// Applies the creator of `mode` (projected on spinor component `a ∈ 1..=4`)
/// to `state`. The body picks up `√2 η†ₙ` on the vacuum and the prefactor
/// picks up `uᵃ/√V`.
pub fn create_excitation(
    state: &FunctionalState,
    basis: &ModeBasis,
    mode: usize,
    a: usize,
) -> Result<FunctionalState> {
    if mode >= state.modes() || state.modes() != basis.len() {
        return Err(Error::ModeOutOfRange { mode, modes: state.modes() });
    }
    if !(1..=4).contains(&a) {
        return Err(Error::InvalidParameter(format!("spinor index {a} outside 1..=4")));
    }
    let ops = FieldOperatorRep::new(state.algebra());
    let body = ops.create(mode, state.energies[mode] > 0.0, &state.body)?;
    if body.is_zero() {
        return Err(Error::PauliExclusion { mode });
    }
    let component = basis.spinor(mode)?[a - 1];
    Ok(FunctionalState {
        body,
        prefactor: state.prefactor * component / state.volume.sqrt(),
        ..state.clone()
    })
}

/// `E₀` of the filled Dirac sea over a basis, by three routes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VacuumEnergy {
    /// `−½ Σ √(k² + m²)`
    pub closed_form: f64,
    /// `−½ Σ |λ|` with `λ` from a numerical eigensolve of `h(k)`.
    pub eigen_sum: f64,
    /// `½ Tr(hΩ)` with both matrices projected on the basis spinors.
    pub trace: f64,
}

impl VacuumEnergy {
    pub fn value(&self) -> f64 {
        self.closed_form
    }

    pub fn max_discrepancy(&self) -> f64 {
        (self.closed_form - self.eigen_sum)
            .abs()
            .max((self.closed_form - self.trace).abs())
    }
}

pub fn vacuum_energy(basis: &ModeBasis) -> Result<VacuumEnergy> {
    let m = basis.mass();
    let closed_form = -0.5 * (0..basis.len()).map(|i| basis.omega(i)).sum::<f64>();

    let mut eigen_sum = 0.0;
    let mut groups: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
    for (i, mode) in basis.modes().iter().enumerate() {
        groups.entry(mode.n).or_default().push(i);
        let spec = spectrum(&hamiltonian_k(basis.momentum(mode.n), m));
        let idx = match mode.branch.frequency {
            Frequency::Negative => mode.branch.spin as usize,
            Frequency::Positive => 2 + mode.branch.spin as usize,
        };
        eigen_sum -= 0.5 * spec[idx].abs();
    }

    let mut trace = Complex64::new(0.0, 0.0);
    for (n, members) in &groups {
        let k = basis.momentum(*n);
        let h = hamiltonian_k(k, m);
        let omega = covariance_k(k, m, SignConvention::EnergyConsistent)?;
        let spinors: Vec<DiracSpinor> = members.iter().map(|&i| basis.spinor(i)).collect::<Result<_>>()?;
        for wa in &spinors {
            for wb in &spinors {
                let h_ab = (wa.adjoint() * h * wb)[(0, 0)];
                let o_ba = (wb.adjoint() * omega * wa)[(0, 0)];
                trace += h_ab * o_ba;
            }
        }
    }
    let out = VacuumEnergy { closed_form, eigen_sum, trace: 0.5 * trace.re };
    let scale = closed_form.abs().max(1.0);
    if out.max_discrepancy() > 1e-10 * scale {
        return Err(Error::RouteMismatch {
            what: "vacuum energy",
            formula: closed_form.to_string(),
            brute: format!("eigen {} trace {}", out.eigen_sum, out.trace),
            relative: out.max_discrepancy() / scale,
        });
    }
    Ok(out)
}

/// Polynomial in commuting variables `q†ᵢ, qᵢ`.
///
/// Exponent vectors are indexed in the same canonical order as Grassmann
/// generators (all `q†` first), so square-free monomials correspond 1:1
/// with Grassmann monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingPolynomial {
    modes: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl CommutingPolynomial {
    pub fn zero(modes: usize) -> Self {
        CommutingPolynomial { modes, terms: BTreeMap::new() }
    }

    pub fn one(modes: usize) -> Self {
        Self::constant(modes, Complex64::new(1.0, 0.0))
    }

    pub fn constant(modes: usize, c: Complex64) -> Self {
        let mut p = Self::zero(modes);
        p.add_term(vec![0; 2 * modes], c);
        p
    }

    pub fn variable(modes: usize, g: GeneratorIndex) -> Self {
        let mut exps = vec![0; 2 * modes];
        exps[slot(modes, g)] = 1;
        let mut p = Self::zero(modes);
        p.add_term(exps, Complex64::new(1.0, 0.0));
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Complex64) {
        let e = self.terms.entry(exps.clone()).or_default();
        *e += c;
        if e.norm() < crate::grassmann::PRUNE_TOLERANCE {
            self.terms.remove(&exps);
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> Complex64 {
        self.terms.get(exps).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.modes);
        for (k, &v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.modes);
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let k: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_term(k, ca * cb);
            }
        }
        out
    }

    /// `Σ_{j ≤ max_order} pʲ/j!`
    pub fn exp_truncated(&self, max_order: usize) -> Self {
        let mut sum = Self::one(self.modes);
        let mut term = Self::one(self.modes);
        for j in 1..=max_order {
            term = term.multiply(self).scale(Complex64::new(1.0 / j as f64, 0.0));
            sum = sum.add(&term);
        }
        sum
    }

    /// Drops every monomial with an exponent above one.
    pub fn square_free_part(&self) -> Self {
        let mut out = Self::zero(self.modes);
        for (k, &c) in &self.terms {
            if k.iter().all(|&e| e <= 1) {
                out.add_term(k.clone(), c);
            }
        }
        out
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let keys: Vec<&Vec<u32>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|k| (self.coefficient(k) - other.coefficient(k)).norm())
            .fold(0.0, f64::max)
    }
}

fn slot(modes: usize, g: GeneratorIndex) -> usize {
    match g.kind {
        crate::grassmann::GeneratorKind::Conjugate => g.mode,
        crate::grassmann::GeneratorKind::Plain => modes + g.mode,
    }
}

/// `η → q`, `η† → q†` monomial by monomial. Coefficients carry over
/// unchanged; only the product rule of the target changes.
pub fn bosonize_element(e: &GrassmannElement) -> CommutingPolynomial {
    let modes = e.algebra().modes();
    let mut out = CommutingPolynomial::zero(modes);
    for (&key, &c) in e.raw_terms() {
        let exps = (0..2 * modes).map(|b| ((key >> b) & 1) as u32).collect();
        out.add_term(exps, c);
    }
    out
}

/// Inverse of [`bosonize_element`] on square-free polynomials.
pub fn debosonize(p: &CommutingPolynomial, algebra: Algebra) -> Result<GrassmannElement> {
    let modes = algebra.modes();
    if p.modes() != modes {
        return Err(Error::AlgebraMismatch { left: p.modes(), right: modes });
    }
    let mut out = algebra.zero();
    for (exps, c) in p.terms() {
        if exps.iter().any(|&e| e > 1) {
            return Err(Error::InvalidParameter(
                "monomial with a repeated variable has no Grassmann counterpart".into(),
            ));
        }
        let gens: Vec<GeneratorIndex> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == 1)
            .map(|(b, _)| {
                if b < modes {
                    GeneratorIndex::conj(b)
                } else {
                    GeneratorIndex::plain(b - modes)
                }
            })
            .collect();
        // gens is already canonical, so no reordering sign appears
        out = &out + &algebra.monomial(&gens, c)?;
    }
    Ok(out)
}

/// A functional after the `η → q` replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonizedState {
    pub body: CommutingPolynomial,
    pub energies: Vec<f64>,
    pub ground_energy: f64,
    pub prefactor: Complex64,
}

pub fn bosonize(state: &FunctionalState) -> BosonizedState {
    BosonizedState {
        body: bosonize_element(&state.body),
        energies: state.energies.clone(),
        ground_energy: state.ground_energy,
        prefactor: state.prefactor,
    }
}

/// Single-mode occupation functionals `⟨η|s⟩` for `s = |0,0⟩, |1,0⟩,
/// |0,1⟩, |1,1⟩` on `mode`: `1, η†, η, η†η`.
pub fn occupation_functionals(algebra: &Algebra, mode: usize) -> Result<[GrassmannElement; 4]> {
    let d = algebra.generator(GeneratorIndex::conj(mode))?;
    let p = algebra.generator(GeneratorIndex::plain(mode))?;
    Ok([algebra.one(), d.clone(), p.clone(), d.multiply(&p)?])
}

/// `Σₛ ⟨η|s⟩⟨s|η′⟩` on a two-mode algebra (mode 0 = `η`, mode 1 = `η′`),
/// with `⟨s|η′⟩` the adjoint of `⟨η′|s⟩`.
pub fn grassmann_overlap_kernel() -> Result<GrassmannElement> {
    let alg = Algebra::new(2)?;
    let bras = occupation_functionals(&alg, 0)?;
    let kets = occupation_functionals(&alg, 1)?;
    let mut sum = alg.zero();
    for (b, k) in bras.iter().zip(&kets) {
        sum = &sum + &b.multiply(&k.adjoint())?;
    }
    Ok(sum)
}

/// The same state sum with each factor bosonized before multiplying.
pub fn bosonized_overlap_kernel() -> Result<CommutingPolynomial> {
    let alg = Algebra::new(2)?;
    let bras = occupation_functionals(&alg, 0)?;
    let kets = occupation_functionals(&alg, 1)?;
    let mut sum = CommutingPolynomial::zero(2);
    for (b, k) in bras.iter().zip(&kets) {
        sum = sum.add(&bosonize_element(b).multiply(&bosonize_element(&k.adjoint())));
    }
    Ok(sum)
}
