//! Bohmian guidance for bosonized mode amplitudes.
//!
//! After `η → q` the guidance law of a single mode reads
//! `q̇ = ∂S/∂q† = 1/(2i q†)`, with `q†` the complex conjugate of `q`. Its
//! stationary branch is `q(t) = A e^{−iωt}` with `A = 1/√(2ω)`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::GeneratorIndex;
use crate::spinor::DiracSpinor;

/// `ψᵃ = R e^{iS} φᵃ`
#[derive(Debug, Clone, PartialEq)]
pub struct PolarDecomposition {
    /// Euclidean norm of the spinor.
    pub amplitude: f64,
    /// Common phase in `(−π, π]`.
    pub phase: f64,
    /// Unit spinor whose reference component is real and positive.
    pub spinor: DiracSpinor,
}

impl PolarDecomposition {
    pub fn reassemble(&self) -> DiracSpinor {
        self.spinor * Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// The reference component is the one of largest magnitude; ties (within
/// 1e-12 relative) go to the lowest index.
pub fn polar_decompose(psi: &DiracSpinor) -> Result<PolarDecomposition> {
    let amplitude = psi.norm();
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::ZeroSpinor);
    }
    let largest = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let reference = psi
        .iter()
        .position(|z| z.norm() >= largest * (1.0 - 1e-12))
        .expect("non-zero spinor has a largest component");
    let phase = psi[reference].arg();
    let spinor = psi * Complex64::from_polar(1.0 / amplitude, -phase);
    Ok(PolarDecomposition { amplitude, phase, spinor })
}

/// A mode variable before (`η`) or after (`q`) bosonization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModeVariable {
    Grassmann(GeneratorIndex),
    Commuting(GeneratorIndex),
}

impl ModeVariable {
    pub fn conjugate(self) -> Self {
        match self {
            ModeVariable::Grassmann(g) => ModeVariable::Grassmann(g.partner()),
            ModeVariable::Commuting(g) => ModeVariable::Commuting(g.partner()),
        }
    }

    pub fn bosonize(self) -> Self {
        match self {
            ModeVariable::Grassmann(g) | ModeVariable::Commuting(g) => ModeVariable::Commuting(g),
        }
    }
}

/// `d(target)/dt = numerator / (coefficient · divisor)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuidanceOde {
    pub target: ModeVariable,
    pub numerator: Complex64,
    pub coefficient: Complex64,
    pub divisor: ModeVariable,
}

impl GuidanceOde {
    /// Guidance law of a free mode: the phase gradient along the
    /// conjugate variable, `ẋ = 1/(2i x†)`.
    pub fn for_mode(target: ModeVariable) -> Self {
        GuidanceOde {
            target,
            numerator: Complex64::new(1.0, 0.0),
            coefficient: Complex64::new(0.0, 2.0),
            divisor: target.conjugate(),
        }
    }

    pub fn bosonize(&self) -> Self {
        GuidanceOde {
            target: self.target.bosonize(),
            numerator: self.numerator,
            coefficient: self.coefficient,
            divisor: self.divisor.bosonize(),
        }
    }

    /// Evaluates the right-hand side at amplitude `q`. Only commuting laws
    /// can be evaluated; the divisor must be the conjugate of the target.
    pub fn rhs(&self, q: Complex64) -> Complex64 {
        debug_assert!(matches!(self.target, ModeVariable::Commuting(_)));
        debug_assert_eq!(self.divisor, self.target.conjugate());
        self.numerator / (self.coefficient * q.conj())
    }

    pub fn describe(&self) -> String {
        let name = |v: ModeVariable| match v {
            ModeVariable::Grassmann(g) => g.to_string(),
            ModeVariable::Commuting(g) => g.to_string().replace('η', "q"),
        };
        format!(
            "d{}/dt = {} / ({} {})",
            name(self.target),
            self.numerator,
            self.coefficient,
            name(self.divisor)
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeTrajectory {
    pub omega: f64,
    pub step: f64,
    /// `(t, q)` in strictly increasing `t`.
    pub samples: Vec<(f64, Complex64)>,
}

impl ModeTrajectory {
    pub fn last(&self) -> (f64, Complex64) {
        *self.samples.last().expect("trajectory has at least its initial sample")
    }

    /// Columns `t, re, im, abs, arg`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["t", "re", "im", "abs", "arg"])?;
        for (t, q) in &self.samples {
            w.write_record([
                t.to_string(),
                (q.re + 0.0).to_string(),
                (q.im + 0.0).to_string(),
                q.norm().to_string(),
                (q.arg() + 0.0).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

const MIN_INITIAL: f64 = 1e-6;
const SINGULAR: f64 = 1e-8;

/// Classical fixed-step RK4 on `q̇ = 1/(2i q̄)` from `q(0) = q0` to
/// `t = horizon`. The step is `horizon / round(horizon / dt)`.
pub fn integrate_trajectory(q0: Complex64, omega: f64, horizon: f64, dt: f64) -> Result<ModeTrajectory> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
    }
    if !(dt > 0.0 && dt <= horizon / 1000.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "step {dt} must lie in (0, horizon/1000 = {}]",
            horizon / 1000.0
        )));
    }
    if q0.norm() < MIN_INITIAL {
        return Err(Error::InvalidParameter(format!("|q0| = {:e} below {MIN_INITIAL:e}", q0.norm())));
    }
    let law = GuidanceOde::for_mode(ModeVariable::Grassmann(GeneratorIndex::plain(0))).bosonize();
    let steps = (horizon / dt).round() as usize;
    let h = horizon / steps as f64;

    let eval = |t: f64, q: Complex64| -> Result<Complex64> {
        if q.norm() < SINGULAR {
            return Err(Error::Singularity { time: t, modulus: q.norm() });
        }
        Ok(law.rhs(q))
    };

    let mut samples = Vec::with_capacity(steps + 1);
    let mut q = q0;
    samples.push((0.0, q));
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = eval(t, q)?;
        let k2 = eval(t + 0.5 * h, q + k1 * (0.5 * h))?;
        let k3 = eval(t + 0.5 * h, q + k2 * (0.5 * h))?;
        let k4 = eval(t + h, q + k3 * h)?;
        q += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        samples.push(((i + 1) as f64 * h, q));
    }
    Ok(ModeTrajectory { omega, step: h, samples })
}

/// Deviations of a numerical trajectory from `A e^{−iωt}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormCheck {
    pub omega: f64,
    pub step: f64,
    /// `max |q − A e^{−iωt}|`
    pub max_error: f64,
    /// `max ||q| − A|`
    pub modulus_drift: f64,
    /// `max |arg q(t) − arg q(0) + ωt|` wrapped to `(−π, π]`
    pub phase_error: f64,
}

pub fn closed_form_amplitude(omega: f64) -> f64 {
    1.0 / (2.0 * omega).sqrt()
}

pub fn verify_closed_form(omega: f64, horizon: f64, dt: f64) -> Result<ClosedFormCheck> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("ω = {omega} must be positive")));
    }
    let a = closed_form_amplitude(omega);
    let traj = integrate_trajectory(Complex64::new(a, 0.0), omega, horizon, dt)?;
    let mut check = ClosedFormCheck { omega, step: traj.step, max_error: 0.0, modulus_drift: 0.0, phase_error: 0.0 };
    for &(t, q) in &traj.samples {
        let exact = Complex64::from_polar(a, -omega * t);
        check.max_error = check.max_error.max((q - exact).norm());
        check.modulus_drift = check.modulus_drift.max((q.norm() - a).abs());
        // arg(q / exact) is the accumulated phase error, already wrapped
        check.phase_error = check.phase_error.max((q / exact).arg().abs());
    }
    Ok(check)
}

/// Observed order `log₂(e(dt)/e(dt/2))` between successive step halvings.
pub fn convergence_orders(omega: f64, horizon: f64, coarsest: f64, levels: usize) -> Result<Vec<(f64, f64)>> {
    let mut errors = Vec::with_capacity(levels);
    let mut dt = coarsest;
    for _ in 0..levels {
        errors.push((dt, verify_closed_form(omega, horizon, dt)?.max_error));
        dt *= 0.5;
    }
    Ok(errors
        .windows(2)
        .map(|w| (w[1].0, (w[0].1 / w[1].1).log2()))
        .collect())
}
