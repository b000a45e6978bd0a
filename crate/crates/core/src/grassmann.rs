//! Finite complex Grassmann algebras over `n` modes.
//!
//! Each mode contributes a conjugate generator `η†ᵢ` and a plain generator
//! `ηᵢ`, so the algebra has `2n` anti-commuting generators and dimension
//! `4ⁿ`. A monomial is stored as a bitmask over the canonical generator
//! order: every `η†` precedes every `η`, and within a kind generators are
//! ordered by mode. Bit `i < n` is `η†ᵢ`, bit `n + i` is `ηᵢ`.
//!
//! Berezin integration is realised as the left derivative (`∫dθ θ = 1`,
//! `∫dθ 1 = 0`). In a multiple integral `∫dθ₁ dθ₂ … dθₖ f` the rightmost
//! differential acts first. The ordering of the mode measure `D²η` is fixed
//! by [`BerezinConvention`] at algebra construction.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped from every result.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

const MAX_MODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// `η†`
    Conjugate,
    /// `η`
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorIndex {
    pub kind: GeneratorKind,
    pub mode: usize,
}

impl GeneratorIndex {
    pub const fn conj(mode: usize) -> Self {
        GeneratorIndex {
            kind: GeneratorKind::Conjugate,
            mode,
        }
    }

    pub const fn plain(mode: usize) -> Self {
        GeneratorIndex {
            kind: GeneratorKind::Plain,
            mode,
        }
    }

    /// The generator of the opposite kind on the same mode.
    pub const fn partner(self) -> Self {
        match self.kind {
            GeneratorKind::Conjugate => GeneratorIndex::plain(self.mode),
            GeneratorKind::Plain => GeneratorIndex::conj(self.mode),
        }
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::Conjugate => write!(f, "η†{}", self.mode),
            GeneratorKind::Plain => write!(f, "η{}", self.mode),
        }
    }
}

/// Ordering of the per-mode differentials in `D²η = Dη† Dη`.
///
/// Both orderings integrate `exp(η†Aη)` to `±det(−A)`; the sign is reported
/// by [`BerezinConvention::gaussian_sign`] and checked against brute force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BerezinConvention {
    /// `D²η = dη†₀ dη₀ dη†₁ dη₁ …`
    #[default]
    Paired,
    /// `D²η = (dη†₀ dη†₁ …)(dη₀ dη₁ …)`
    Blocked,
}

impl BerezinConvention {
    /// Differentials of `D²η` over `modes`, leftmost first.
    pub fn measure(&self, modes: &[usize]) -> Vec<GeneratorIndex> {
        match self {
            BerezinConvention::Paired => modes
                .iter()
                .flat_map(|&m| [GeneratorIndex::conj(m), GeneratorIndex::plain(m)])
                .collect(),
            BerezinConvention::Blocked => modes
                .iter()
                .map(|&m| GeneratorIndex::conj(m))
                .chain(modes.iter().map(|&m| GeneratorIndex::plain(m)))
                .collect(),
        }
    }

    /// `s` in `∫D²η exp(η†Aη) = s · det(−A)` for `n` modes.
    pub fn gaussian_sign(&self, n: usize) -> f64 {
        match self {
            BerezinConvention::Paired => 1.0,
            BerezinConvention::Blocked => {
                if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Algebra {
    modes: usize,
    convention: BerezinConvention,
}

impl Algebra {
    pub fn new(modes: usize) -> Result<Self> {
        Self::with_convention(modes, BerezinConvention::default())
    }

    pub fn with_convention(modes: usize, convention: BerezinConvention) -> Result<Self> {
        if modes > MAX_MODES {
            return Err(Error::TooManyModes(modes));
        }
        Ok(Algebra { modes, convention })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn convention(&self) -> BerezinConvention {
        self.convention
    }

    pub fn generator_count(&self) -> usize {
        2 * self.modes
    }

    fn bit(&self, g: GeneratorIndex) -> Result<u32> {
        if g.mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                mode: g.mode,
                modes: self.modes,
            });
        }
        Ok(match g.kind {
            GeneratorKind::Conjugate => g.mode as u32,
            GeneratorKind::Plain => (self.modes + g.mode) as u32,
        })
    }

    fn generator_of_bit(&self, bit: u32) -> GeneratorIndex {
        let b = bit as usize;
        if b < self.modes {
            GeneratorIndex::conj(b)
        } else {
            GeneratorIndex::plain(b - self.modes)
        }
    }

    pub fn zero(&self) -> GrassmannElement {
        GrassmannElement {
            algebra: *self,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> GrassmannElement {
        self.scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(&self, c: Complex64) -> GrassmannElement {
        let mut e = self.zero();
        e.insert(0, c);
        e
    }

    pub fn generator(&self, g: GeneratorIndex) -> Result<GrassmannElement> {
        let bit = self.bit(g)?;
        let mut e = self.zero();
        e.insert(1u64 << bit, Complex64::new(1.0, 0.0));
        Ok(e)
    }

    /// `c · g₁ g₂ … gₖ` with the product taken in the given order.
    pub fn monomial(&self, gens: &[GeneratorIndex], c: Complex64) -> Result<GrassmannElement> {
        let mut acc = self.scalar(c);
        for &g in gens {
            acc = acc.multiply(&self.generator(g)?)?;
        }
        Ok(acc)
    }

    /// `Σᵢⱼ η†_{rows[i]} M_ij η_{cols[j]}`.
    pub fn bilinear(
        &self,
        rows: &[usize],
        matrix: &DMatrix<Complex64>,
        cols: &[usize],
    ) -> Result<GrassmannElement> {
        if matrix.nrows() != rows.len() || matrix.ncols() != cols.len() {
            return Err(Error::DimensionMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: rows.len(),
            });
        }
        let mut acc = self.zero();
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                let m = matrix[(i, j)];
                if m.norm() > 0.0 {
                    let term = self.monomial(
                        &[GeneratorIndex::conj(r), GeneratorIndex::plain(c)],
                        m,
                    )?;
                    acc = &acc + &term;
                }
            }
        }
        Ok(acc)
    }

    /// `η†Ωη` over all modes of the algebra.
    pub fn quadratic_form(&self, omega: &CovarianceMatrix) -> Result<GrassmannElement> {
        omega.expect_dim(self.modes)?;
        let modes: Vec<usize> = (0..self.modes).collect();
        self.bilinear(&modes, &omega.0, &modes)
    }

    /// `D²η` over every mode of the algebra.
    pub fn full_measure(&self) -> Vec<GeneratorIndex> {
        let modes: Vec<usize> = (0..self.modes).collect();
        self.convention.measure(&modes)
    }
}

/// An element of a finite Grassmann algebra in canonical normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    algebra: Algebra,
    terms: BTreeMap<u64, Complex64>,
}

/// Parity of the permutation that sorts the concatenation of monomials `a`
/// then `b` into canonical order. Assumes `a & b == 0`.
fn merge_sign(a: u64, b: u64) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl GrassmannElement {
    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    fn insert(&mut self, key: u64, c: Complex64) {
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < PRUNE_TOLERANCE {
            self.terms.remove(&key);
        }
    }

    fn from_terms(algebra: Algebra, raw: BTreeMap<u64, Complex64>) -> Self {
        let terms = raw
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE_TOLERANCE)
            .collect();
        GrassmannElement { algebra, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.terms.get(&0).copied().unwrap_or_default()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient of the monomial written as `gens` in the given order.
    pub fn coefficient(&self, gens: &[GeneratorIndex]) -> Result<Complex64> {
        let probe = self.algebra.monomial(gens, Complex64::new(1.0, 0.0))?;
        // probe is ±(canonical monomial); recover the sign and look it up
        let Some((&key, &sign)) = probe.terms.iter().next() else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let c = self.terms.get(&key).copied().unwrap_or_default();
        Ok(c * sign.re)
    }

    /// Canonical-order monomials with their coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<GeneratorIndex>, Complex64)> + '_ {
        self.terms
            .iter()
            .map(move |(&key, &c)| (self.generators_of(key), c))
    }

    fn generators_of(&self, key: u64) -> Vec<GeneratorIndex> {
        let mut out = Vec::with_capacity(key.count_ones() as usize);
        let mut rest = key;
        while rest != 0 {
            let b = rest.trailing_zeros();
            out.push(self.algebra.generator_of_bit(b));
            rest &= rest - 1;
        }
        out
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<u64, Complex64> {
        &self.terms
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra.modes != other.algebra.modes {
            return Err(Error::AlgebraMismatch {
                left: self.algebra.modes,
                right: other.algebra.modes,
            });
        }
        Ok(())
    }

    /// Graded product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut raw: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&ka, &ca) in &self.terms {
            for (&kb, &cb) in &other.terms {
                if ka & kb != 0 {
                    continue;
                }
                *raw.entry(ka | kb).or_default() += ca * cb * merge_sign(ka, kb);
            }
        }
        Ok(Self::from_terms(self.algebra, raw))
    }

    pub fn add_checked(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.insert(k, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let raw = self.terms.iter().map(|(&k, &v)| (k, v * c)).collect();
        Self::from_terms(self.algebra, raw)
    }

    /// `exp(a)` as a terminating power series. A non-zero scalar part `s`
    /// is split off as `eˢ · exp(a − s)`.
    pub fn exp(&self) -> Self {
        let s = self.scalar_part();
        let mut nil = self.clone();
        nil.terms.remove(&0);

        let mut sum = self.algebra.one();
        let mut term = self.algebra.one();
        for k in 1..=self.algebra.generator_count() {
            term = term
                .multiply(&nil)
                .expect("same algebra")
                .scale(Complex64::new(1.0 / k as f64, 0.0));
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        if s.norm() > 0.0 {
            sum.scale(s.exp())
        } else {
            sum
        }
    }

    /// Left (`∂→`) derivative: the generator is anti-commuted to the front
    /// and removed.
    pub fn left_derivative(&self, g: GeneratorIndex) -> Result<Self> {
        let bit = self.algebra.bit(g)?;
        let mask = 1u64 << bit;
        let before = mask - 1;
        let mut raw = BTreeMap::new();
        for (&k, &c) in &self.terms {
            if k & mask == 0 {
                continue;
            }
            let sign = if (k & before).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            raw.insert(k & !mask, c * sign);
        }
        Ok(Self::from_terms(self.algebra, raw))
    }

    /// Right (`←∂`) derivative: the generator is anti-commuted to the back
    /// and removed.
    pub fn right_derivative(&self, g: GeneratorIndex) -> Result<Self> {
        let bit = self.algebra.bit(g)?;
        let mask = 1u64 << bit;
        let mut raw = BTreeMap::new();
        for (&k, &c) in &self.terms {
            if k & mask == 0 {
                continue;
            }
            let after = (k >> (bit + 1)).count_ones();
            let sign = if after % 2 == 0 { 1.0 } else { -1.0 };
            raw.insert(k & !mask, c * sign);
        }
        Ok(Self::from_terms(self.algebra, raw))
    }

    /// Iterated Berezin integral `∫ dv₁ dv₂ … dvₖ (self)`; `vars[k-1]` acts
    /// first.
    pub fn berezin_integrate(&self, vars: &[GeneratorIndex]) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            self.algebra.bit(*v)?;
            if vars[..i].contains(v) {
                return Err(Error::RepeatedVariable(v.to_string()));
            }
        }
        let mut acc = self.clone();
        for &v in vars.iter().rev() {
            acc = acc.left_derivative(v)?;
        }
        Ok(acc)
    }

    /// `∫D²η (self)` over every mode under the algebra's convention.
    pub fn integrate_all(&self) -> Result<Self> {
        self.berezin_integrate(&self.algebra.full_measure())
    }

    /// Maps mode `i` of this element to mode `mode_map[i]` of `target`,
    /// preserving the written order of every monomial.
    pub fn remap(&self, target: Algebra, mode_map: &[usize]) -> Result<Self> {
        if mode_map.len() != self.algebra.modes {
            return Err(Error::DimensionMismatch {
                rows: mode_map.len(),
                cols: 1,
                expected: self.algebra.modes,
            });
        }
        let mut out = target.zero();
        for (gens, c) in self.terms() {
            let mapped: Vec<GeneratorIndex> = gens
                .iter()
                .map(|g| GeneratorIndex {
                    kind: g.kind,
                    mode: mode_map[g.mode],
                })
                .collect();
            out = &out + &target.monomial(&mapped, c)?;
        }
        Ok(out)
    }

    /// Sorted `generators -> coefficient` lines, one per term.
    pub fn debug_dump(&self) -> String {
        let mut lines: Vec<(usize, Vec<GeneratorIndex>, Complex64)> = self
            .terms()
            .map(|(g, c)| (g.len(), g, c))
            .collect();
        lines.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut out = String::new();
        for (_, gens, c) in lines {
            let name = if gens.is_empty() {
                "1".to_string()
            } else {
                gens.iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            out.push_str(&format!("{name} -> {:+.12e} {:+.12e}i\n", c.re + 0.0, c.im + 0.0));
        }
        out
    }

    /// Hermitian conjugate: coefficients conjugated, `ηᵢ ↔ η†ᵢ`, and the
    /// order of every monomial reversed.
    pub fn adjoint(&self) -> Self {
        let mut out = self.algebra.zero();
        for (gens, c) in self.terms() {
            let flipped: Vec<GeneratorIndex> = gens.iter().rev().map(|g| g.partner()).collect();
            let term = self
                .algebra
                .monomial(&flipped, c.conj())
                .expect("generators of the same algebra");
            out = &out + &term;
        }
        out
    }

    /// Maximum coefficient difference against `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut keys: Vec<u64> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.into_iter()
            .map(|k| {
                let a = self.terms.get(&k).copied().unwrap_or_default();
                let b = other.terms.get(&k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.add_checked(rhs).expect("grassmann add across algebras")
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.add_checked(&-rhs).expect("grassmann sub across algebras")
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.multiply(rhs).expect("grassmann product across algebras")
    }
}

impl Mul<Complex64> for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Complex64) -> GrassmannElement {
        self.scale(rhs)
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{}", self.debug_dump().trim_end())
    }
}

/// Covariance `Ω` of a Gaussian functional `exp(η†Ωη)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(pub DMatrix<Complex64>);

impl CovarianceMatrix {
    pub fn zeros(n: usize) -> Self {
        CovarianceMatrix(DMatrix::zeros(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        CovarianceMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        CovarianceMatrix(DMatrix::from_fn(n, n, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        CovarianceMatrix(self.0.adjoint())
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det.norm() < 1e-12 {
            return Err(Error::SingularCovariance(det.norm()));
        }
        self.0
            .clone()
            .try_inverse()
            .map(CovarianceMatrix)
            .ok_or(Error::SingularCovariance(det.norm()))
    }

    pub(crate) fn expect_dim(&self, n: usize) -> Result<()> {
        if self.0.nrows() != n || self.0.ncols() != n {
            return Err(Error::DimensionMismatch {
                rows: self.0.nrows(),
                cols: self.0.ncols(),
                expected: n,
            });
        }
        Ok(())
    }

    fn expect_square(&self) -> Result<usize> {
        self.expect_dim(self.0.nrows())?;
        Ok(self.0.nrows())
    }
}

/// Dual of `exp(η†Ωη)` under the kernel `exp(η†η′ − η′†η)`, by closed
/// formula and by explicit integration over the primed generators.
#[derive(Debug, Clone)]
pub struct GaussianDual {
    /// `s · det(−Ω†)`, with `s` from the measure convention.
    pub prefactor: Complex64,
    /// `(Ω†)⁻¹`
    pub exponent: CovarianceMatrix,
    pub brute_prefactor: Complex64,
    pub brute_exponent: CovarianceMatrix,
    /// `det(−Ω⁻¹)`, the inverse-matrix form; agrees in magnitude with
    /// `prefactor` only when `|det Ω| = 1`.
    pub inverse_prefactor: Complex64,
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Algebra over `2n` modes: modes `0..n` carry `η`, modes `n..2n` carry `η′`.
fn doubled(n: usize, convention: BerezinConvention) -> Result<(Algebra, Vec<usize>, Vec<usize>)> {
    let alg = Algebra::with_convention(2 * n, convention)?;
    Ok((alg, (0..n).collect(), (n..2 * n).collect()))
}

/// `exp(η†η′ − η′†η)` in the doubled algebra.
fn overlap_kernel(alg: &Algebra, unprimed: &[usize], primed: &[usize]) -> Result<GrassmannElement> {
    let n = unprimed.len();
    let id = DMatrix::<Complex64>::identity(n, n);
    let forward = alg.bilinear(unprimed, &id, primed)?;
    let backward = alg.bilinear(primed, &id, unprimed)?;
    Ok((&forward - &backward).exp())
}

pub fn gaussian_dual(omega: &CovarianceMatrix, convention: BerezinConvention) -> Result<GaussianDual> {
    let n = omega.expect_square()?;
    let det = omega.determinant();
    if det.norm() < 1e-12 {
        return Err(Error::SingularCovariance(det.norm()));
    }
    let omega_dag = omega.adjoint();
    let exponent = omega_dag.inverse()?;
    let sign = convention.gaussian_sign(n);
    let prefactor = CovarianceMatrix(-omega_dag.0.clone()).determinant() * sign;
    let inverse_prefactor = CovarianceMatrix(-exponent.0.adjoint()).determinant();

    let (alg, unprimed, primed) = doubled(n, convention)?;
    let conj_state = alg.bilinear(&primed, &omega_dag.0, &primed)?.exp();
    let integrand = &overlap_kernel(&alg, &unprimed, &primed)? * &conj_state;
    let dual = integrand.berezin_integrate(&convention.measure(&primed))?;

    let brute_prefactor = dual.scalar_part();
    if brute_prefactor.norm() < 1e-300 {
        return Err(Error::SingularCovariance(0.0));
    }
    let brute_exponent = CovarianceMatrix::from_fn(n, |i, j| {
        dual.coefficient(&[GeneratorIndex::conj(unprimed[i]), GeneratorIndex::plain(unprimed[j])])
            .unwrap_or_default()
            / brute_prefactor
    });

    // the integral must be exactly Gaussian, not just agree at low order
    let rebuilt = alg
        .bilinear(&unprimed, &brute_exponent.0, &unprimed)?
        .exp()
        .scale(brute_prefactor);
    let shape_gap = rebuilt.distance(&dual) / brute_prefactor.norm().max(1.0);

    let mut worst = relative_gap(prefactor, brute_prefactor);
    for (a, b) in exponent.0.iter().zip(brute_exponent.0.iter()) {
        worst = worst.max(relative_gap(*a, *b));
    }
    worst = worst.max(shape_gap);
    if worst > 1e-10 {
        return Err(Error::RouteMismatch {
            what: "gaussian dual",
            formula: format!("{prefactor} exp(η† {} η)", exponent.0),
            brute: format!("{brute_prefactor} exp(η† {} η)", brute_exponent.0),
            relative: worst,
        });
    }
    Ok(GaussianDual {
        prefactor,
        exponent,
        brute_prefactor,
        brute_exponent,
        inverse_prefactor,
    })
}

/// `⟨Ψ|Ψ⟩` for `Ψ = exp(η†Ωη)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormCheck {
    /// `det(1 + Ω†Ω)`
    pub formula: f64,
    /// `∫D²η D²η′ exp(η†η′ − η′†η) exp(η′†Ω†η′) exp(η†Ωη)`
    pub brute_force: Complex64,
}

impl NormCheck {
    pub fn value(&self) -> f64 {
        self.formula
    }

    pub fn relative_error(&self) -> f64 {
        (Complex64::new(self.formula, 0.0) - self.brute_force).norm() / self.formula.abs().max(1e-300)
    }
}

pub fn state_norm(omega: &CovarianceMatrix, convention: BerezinConvention) -> Result<NormCheck> {
    let n = omega.expect_square()?;
    let id = DMatrix::<Complex64>::identity(n, n);
    let gram = &id + omega.0.adjoint() * &omega.0;
    let formula = gram.determinant().re;

    let (alg, unprimed, primed) = doubled(n, convention)?;
    let bra = alg.bilinear(&primed, &omega.0.adjoint(), &primed)?.exp();
    let ket = alg.bilinear(&unprimed, &omega.0, &unprimed)?.exp();
    let integrand = &(&overlap_kernel(&alg, &unprimed, &primed)? * &bra) * &ket;
    let mut vars = convention.measure(&unprimed);
    vars.extend(convention.measure(&primed));
    let brute_force = integrand.berezin_integrate(&vars)?.scalar_part();

    let check = NormCheck {
        formula,
        brute_force,
    };
    if check.relative_error() > 1e-10 {
        return Err(Error::RouteMismatch {
            what: "state norm",
            formula: formula.to_string(),
            brute: brute_force.to_string(),
            relative: check.relative_error(),
        });
    }
    Ok(check)
}
