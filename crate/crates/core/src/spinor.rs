//! Dirac-representation matrices and spinors, in units `c = ħ = 1`.
//!
//! `β = diag(I, −I)`, `αᵢ = [[0, σᵢ], [σᵢ, 0]]`. The momentum-space free
//! Hamiltonian is `h(k) = α·k + βm`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type SpinorMatrix = Matrix4<Complex64>;
pub type DiracSpinor = Vector4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrix `σ₁, σ₂, σ₃` for `i = 0, 1, 2`.
pub fn pauli(i: usize) -> Matrix2<Complex64> {
    match i {
        0 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        1 => Matrix2::new(ZERO, -I, I, ZERO),
        2 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {i} out of range"),
    }
}

pub fn beta() -> SpinorMatrix {
    SpinorMatrix::from_diagonal(&Vector4::new(ONE, ONE, -ONE, -ONE))
}

/// `αᵢ` for `i = 0, 1, 2` (x, y, z).
pub fn alpha(i: usize) -> SpinorMatrix {
    let s = pauli(i);
    let mut a = SpinorMatrix::zeros();
    a.fixed_view_mut::<2, 2>(0, 2).copy_from(&s);
    a.fixed_view_mut::<2, 2>(2, 0).copy_from(&s);
    a
}

/// Rest-frame basis spinor `uᵃ`, `a ∈ 1..=4`.
pub fn rest_spinor(a: usize) -> DiracSpinor {
    assert!((1..=4).contains(&a), "spinor index {a} outside 1..=4");
    let mut u = DiracSpinor::zeros();
    u[a - 1] = ONE;
    u
}

pub fn hamiltonian_k(k: [f64; 3], m: f64) -> SpinorMatrix {
    let mut h = beta() * Complex64::new(m, 0.0);
    for (i, &ki) in k.iter().enumerate() {
        h += alpha(i) * Complex64::new(ki, 0.0);
    }
    h
}

pub fn energy(k: [f64; 3], m: f64) -> f64 {
    (k.iter().map(|x| x * x).sum::<f64>() + m * m).sqrt()
}

/// Largest entrywise deviation of `h(k)²` from `(k² + m²) I`.
pub fn square_deviation(k: [f64; 3], m: f64) -> f64 {
    let h = hamiltonian_k(k, m);
    let e2 = energy(k, m).powi(2);
    let target = SpinorMatrix::identity() * Complex64::new(e2, 0.0);
    (h * h - target).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `h(k)² = (k² + m²) I` entrywise, relative to `max(1, k² + m²)`.
pub fn square_check(k: [f64; 3], m: f64) -> bool {
    square_deviation(k, m) <= 1e-12 * energy(k, m).powi(2).max(1.0)
}

/// Ascending eigenvalues of a Hermitian spinor matrix.
pub fn spectrum(h: &SpinorMatrix) -> [f64; 4] {
    let eig = SymmetricEigen::new(*h);
    let mut v = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Eigen-decomposition ordered by ascending eigenvalue: `(E, eigenvector)`.
pub fn eigenmodes(h: &SpinorMatrix) -> Vec<(f64, DiracSpinor)> {
    let eig = SymmetricEigen::new(*h);
    let mut modes: Vec<(f64, DiracSpinor)> = (0..4)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    modes
}

fn checked_energy(k: [f64; 3], m: f64) -> Result<f64> {
    let e = energy(k, m);
    if e == 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(e)
}

/// `P± = (I ± h/|E|)/2`.
pub fn energy_projectors(k: [f64; 3], m: f64) -> Result<(SpinorMatrix, SpinorMatrix)> {
    let e = checked_energy(k, m)?;
    let unit = hamiltonian_k(k, m) / Complex64::new(e, 0.0);
    let id = SpinorMatrix::identity();
    let half = Complex64::new(0.5, 0.0);
    Ok(((id + unit) * half, (id - unit) * half))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// `Ω = +h/ω` for every mode.
    Hamiltonian,
    /// `Ω = P₋ − P₊ = −h/ω`: annihilators kill the vacuum and the vacuum
    /// energy is `−½Σ|E|`.
    #[default]
    EnergyConsistent,
}

impl SignConvention {
    /// `Ω_nn` for an eigenmode of energy `e`.
    pub fn diagonal_entry(self, e: f64) -> f64 {
        let s = if e > 0.0 { 1.0 } else { -1.0 };
        match self {
            SignConvention::Hamiltonian => s,
            SignConvention::EnergyConsistent => -s,
        }
    }
}

/// Momentum-space covariance `±h(k)/√(k² + m²)`.
pub fn covariance_k(k: [f64; 3], m: f64, sign: SignConvention) -> Result<SpinorMatrix> {
    let e = checked_energy(k, m)?;
    let s = match sign {
        SignConvention::Hamiltonian => 1.0,
        SignConvention::EnergyConsistent => -1.0,
    };
    Ok(hamiltonian_k(k, m) * Complex64::new(s / e, 0.0))
}

/// Boost along `z` with signed particle velocity `v ∈ (−1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    velocity: f64,
}

impl BoostParams {
    pub fn new(velocity: f64) -> Result<Self> {
        if !velocity.is_finite() || velocity.abs() >= 1.0 {
            return Err(Error::Superluminal(velocity));
        }
        Ok(BoostParams { velocity })
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    /// `artanh(v)`, signed.
    pub fn rapidity(&self) -> f64 {
        self.velocity.atanh()
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.velocity * self.velocity).sqrt()
    }

    /// `(E, p_z) = (γm, γmv)`.
    pub fn energy_momentum(&self, m: f64) -> (f64, f64) {
        let g = self.gamma();
        (g * m, g * m * self.velocity)
    }
}

/// `exp((ω/2) α_z) = cosh(ω/2) I + sinh(ω/2) α_z`.
///
/// Positive `ω` carries a rest spinor to one moving along `+z`. The frame
/// transformation `exp(−(ω/2) α·v̂)` is the same operator with `ω → −ω`.
pub fn boost_operator(rapidity: f64) -> SpinorMatrix {
    let half = 0.5 * rapidity;
    SpinorMatrix::identity() * Complex64::new(half.cosh(), 0.0)
        + alpha(2) * Complex64::new(half.sinh(), 0.0)
}

pub fn boost_spinor(u: &DiracSpinor, boost: &BoostParams) -> DiracSpinor {
    boost_operator(boost.rapidity()) * u
}

/// Row-major `re im` text, one matrix row per line.
pub fn format_matrix(m: &SpinorMatrix) -> String {
    let mut out = String::new();
    for r in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|c| format!("{:+.6} {:+.6}", m[(r, c)].re + 0.0, m[(r, c)].im + 0.0))
            .collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &SpinorMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn clifford_relations() {
        let id = SpinorMatrix::identity();
        let b = beta();
        assert!(max_abs(&(b * b - id)) < 1e-14);
        for i in 0..3 {
            let ai = alpha(i);
            assert!(max_abs(&(ai - ai.adjoint())) < 1e-14);
            assert!(max_abs(&(ai * b + b * ai)) < 1e-14);
            for j in 0..3 {
                let aj = alpha(j);
                let expected = if i == j { id * Complex64::new(2.0, 0.0) } else { SpinorMatrix::zeros() };
                assert!(max_abs(&(ai * aj + aj * ai - expected)) < 1e-14);
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian_k([0.0; 3], 1.0), beta());
        assert_eq!(hamiltonian_k([0.0, 0.0, 1.0], 0.0), alpha(2));
        let s = spectrum(&alpha(2));
        assert!((s[0] + 1.0).abs() < 1e-12 && (s[3] - 1.0).abs() < 1e-12);
        let s = spectrum(&hamiltonian_k([0.0, 0.0, 1.0], 1.0));
        let r2 = 2f64.sqrt();
        for (got, want) in s.iter().zip([-r2, -r2, r2, r2]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn square_examples() {
        assert!(square_check([0.0; 3], 1.0));
        assert!(square_check([0.0, 0.0, 1.0], 1.0));
        assert!(square_check([3.0, 4.0, 0.0], 0.0));
        assert!(square_deviation([3.0, 4.0, 0.0], 0.0) < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let (pp, pm) = energy_projectors([0.0; 3], 1.0).unwrap();
        let want = SpinorMatrix::from_diagonal(&Vector4::new(ONE, ONE, ZERO, ZERO));
        assert!(max_abs(&(pp - want)) < 1e-15);
        assert!((pp - pm).trace().norm() < 1e-15);

        let (pp, pm) = energy_projectors([0.0, 0.0, 1.0], 1.0).unwrap();
        assert!((pp.trace().re - 2.0).abs() < 1e-12);
        assert!((pm.trace().re - 2.0).abs() < 1e-12);
        assert!(max_abs(&(pp * pm)) < 1e-14);
        assert!(max_abs(&(pp * pp - pp)) < 1e-14);
        assert_eq!(energy_projectors([0.0; 3], 0.0), Err(Error::DegenerateSpectrum));
    }

    #[test]
    fn covariance_examples() {
        let plain = covariance_k([0.0; 3], 1.0, SignConvention::Hamiltonian).unwrap();
        assert_eq!(plain, beta());
        let energy = covariance_k([0.0; 3], 1.0, SignConvention::EnergyConsistent).unwrap();
        assert_eq!(energy, -beta());
        let (pp, pm) = energy_projectors([0.3, -0.2, 0.9], 0.5).unwrap();
        let e = covariance_k([0.3, -0.2, 0.9], 0.5, SignConvention::EnergyConsistent).unwrap();
        assert!(max_abs(&(e - (pm - pp))) < 1e-14);
        assert_eq!(covariance_k([0.0; 3], 0.0, SignConvention::Hamiltonian), Err(Error::DegenerateSpectrum));
    }

    #[test]
    fn boost_examples() {
        let u1 = rest_spinor(1);
        let still = BoostParams::new(0.0).unwrap();
        assert_eq!(boost_operator(still.rapidity()), SpinorMatrix::identity());
        assert_eq!(boost_spinor(&u1, &still), u1);

        let b = BoostParams::new(0.6).unwrap();
        assert!((b.rapidity() - 2f64.ln()).abs() < 1e-15);
        let half = 0.5 * 2f64.ln();
        assert!((half.cosh() - (2f64.sqrt() + 1.0 / 2f64.sqrt()) / 2.0).abs() < 1e-15);
        let ub = boost_spinor(&u1, &b);
        assert!((ub[0].re - 1.125f64.sqrt()).abs() < 1e-12);
        assert!((ub[2].re - 1.125f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(ub[1].norm() < 1e-15 && ub[3].norm() < 1e-15);

        let (e, p) = b.energy_momentum(1.0);
        assert!((e - 1.25).abs() < 1e-15 && (p - 0.75).abs() < 1e-15);
        let hu = hamiltonian_k([0.0, 0.0, p], 1.0) * ub;
        assert!((hu - ub * Complex64::new(e, 0.0)).norm() < 1e-12);

        assert_eq!(BoostParams::new(1.0), Err(Error::Superluminal(1.0)));
        assert_eq!(BoostParams::new(-1.5), Err(Error::Superluminal(-1.5)));
    }

    #[test]
    fn matrix_text_golden() {
        let text = format_matrix(&beta());
        assert_eq!(text.lines().next().unwrap(), "+1.000000 +0.000000  +0.000000 +0.000000  +0.000000 +0.000000  +0.000000 +0.000000");
        assert_eq!(text.lines().count(), 4);
    }
}
