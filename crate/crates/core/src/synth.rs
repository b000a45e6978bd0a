//! Synthesis of the emergent field profile from the `|k| = μ` mode shell.
//!
//! The angular average of `e^{ik·x}` over the shell is the spherical sinc
//! `sin(μr)/(μr)`; with the continuum replacement of the box sum this turns
//! the mode sum into `sin(μr)/r` times a time factor `θ(t) sin(ω t)`. The
//! frequency `ω` is carried explicitly in [`ShellSpec`] and is only a
//! Klein-Gordon solution when `ω² = μ² + m²`.

use std::f64::consts::PI;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::integrate_trajectory;
use crate::error::{Error, Result};
use crate::spinor::{boost_spinor, rest_spinor, BoostParams, DiracSpinor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpacetimePoint {
    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        SpacetimePoint { x, y, z, t }
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.t]
    }

    fn shifted(&self, axis: usize, d: f64) -> Self {
        let mut p = *self;
        match axis {
            0 => p.x += d,
            1 => p.y += d,
            2 => p.z += d,
            _ => p.t += d,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    /// Shell radius `|k| = μ`.
    pub mu: f64,
    /// Klein-Gordon mass used in residual checks.
    pub mass: f64,
    /// Mode frequency `ω_μ`.
    pub omega: f64,
    /// Gauss-Legendre order of the shell quadrature.
    pub order: usize,
    /// Box side `L`; only the amplitude depends on `V = L³`.
    pub side: f64,
}

impl ShellSpec {
    /// `mass = μ`, `ω = √(μ² + μ²)`, order 32.
    pub fn new(mu: f64, side: f64) -> Result<Self> {
        ShellSpec { mu, mass: mu, omega: (2.0 * mu * mu).sqrt(), order: 32, side }.validated()
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        ShellSpec { omega, ..self }.validated()
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        ShellSpec { mass, omega: (self.mu * self.mu + mass * mass).sqrt(), ..self }.validated()
    }

    pub fn with_order(self, order: usize) -> Result<Self> {
        ShellSpec { order, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("μ = {} must be positive", self.mu)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("ω = {} must be positive", self.omega)));
        }
        if self.mass.is_nan() || self.mass < 0.0 {
            return Err(Error::InvalidParameter(format!("mass {} must be non-negative", self.mass)));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::InvalidParameter(format!("box side {} must be positive", self.side)));
        }
        if self.order < 8 {
            return Err(Error::InvalidParameter(format!("quadrature order {} < 8", self.order)));
        }
        Ok(self)
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(3)
    }

    /// `ω² − μ² − m²`; zero for a Klein-Gordon solution.
    pub fn dispersion_defect(&self) -> f64 {
        self.omega * self.omega - self.mu * self.mu - self.mass * self.mass
    }
}

/// Amplitude bookkeeping of the closed-form profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ProfileVariant {
    /// `μ/(2π²) · sin(ωt)/ω`: the explicit `μ/ω` factor is kept.
    #[serde(rename = "eq35")]
    ExplicitRatio,
    /// `1/(2π²) · sin(ωt)`: the factor `μ/ω` is set to one.
    #[default]
    #[serde(rename = "eq37")]
    UnitRatio,
}

impl FromStr for ProfileVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq35" => Ok(ProfileVariant::ExplicitRatio),
            "eq37" => Ok(ProfileVariant::UnitRatio),
            _ => Err(Error::InvalidParameter(format!("unknown profile variant {s:?}"))),
        }
    }
}

/// How the boosted radius is formed from `z − vt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoostVariant {
    /// `r′² = ρ² + γ²(z − vt)²`, a Lorentz coordinate substitution.
    #[default]
    Substitution,
    /// `r′² = ρ² + γ(z − vt)²`, kept as a comparison; not a KG solution.
    Literal,
}

impl FromStr for BoostVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "substitution" => Ok(BoostVariant::Substitution),
            "literal" => Ok(BoostVariant::Literal),
            _ => Err(Error::InvalidParameter(format!("unknown boost variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostedFrame {
    pub boost: BoostParams,
    pub variant: BoostVariant,
}

impl BoostedFrame {
    pub fn new(velocity: f64, variant: BoostVariant) -> Result<Self> {
        Ok(BoostedFrame { boost: BoostParams::new(velocity)?, variant })
    }

    pub fn gamma(&self) -> f64 {
        self.boost.gamma()
    }

    /// `(x, y, γ(z − vt), γ(t − vz))`
    pub fn to_rest(&self, p: SpacetimePoint) -> SpacetimePoint {
        let g = self.gamma();
        let v = self.boost.velocity();
        SpacetimePoint::new(p.x, p.y, g * (p.z - v * p.t), g * (p.t - v * p.z))
    }
}

/// Gauss-Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `Pₙ` from Chebyshev-like starting points.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }
}

/// `(Pₙ(x), Pₙ′(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on the unit sphere: Gauss-Legendre in `cos θ` times the
/// trapezoid rule in azimuth with `2·order` points.
#[derive(Debug, Clone)]
pub struct ShellQuadrature {
    polar: GaussLegendre,
    azimuths: usize,
}

impl ShellQuadrature {
    pub fn new(order: usize) -> Result<Self> {
        if order < 8 {
            return Err(Error::InvalidParameter(format!("quadrature order {order} < 8")));
        }
        Ok(ShellQuadrature { polar: GaussLegendre::new(order), azimuths: 2 * order })
    }

    /// `(1/4π) ∮ dΩ e^{iμ n̂·x}`
    pub fn average(&self, mu: f64, x: [f64; 3]) -> Complex64 {
        let dphi = 2.0 * PI / self.azimuths as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for (&u, &w) in self.polar.nodes.iter().zip(&self.polar.weights) {
            let s = (1.0 - u * u).sqrt();
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..self.azimuths {
                let phi = j as f64 * dphi;
                let arg = mu * (x[0] * s * phi.cos() + x[1] * s * phi.sin() + x[2] * u);
                ring += Complex64::from_polar(1.0, arg);
            }
            sum += ring * (w * dphi);
        }
        sum / (4.0 * PI)
    }
}

/// Real part of the shell average of `e^{ik·x}`; the imaginary part
/// vanishes by `k → −k` symmetry of the rule.
pub fn shell_average(mu: f64, x: [f64; 3], order: usize) -> Result<f64> {
    Ok(ShellQuadrature::new(order)?.average(mu, x).re)
}

/// `sin(x)/x` with a series near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LatticeShell {
    pub value: Complex64,
    pub modes: usize,
}

/// Mean of `e^{ik·x}` over box modes `k = 2πn/L` with `||k| − μ| ≤ Δ`.
pub fn lattice_shell_sum(mu: f64, delta: f64, side: f64, x: [f64; 3]) -> Result<LatticeShell> {
    if !(delta > 0.0 && side > 0.0 && mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lattice shell needs μ, Δ, L > 0 (got {mu}, {delta}, {side})"
        )));
    }
    let unit = 2.0 * PI / side;
    let reach = ((mu + delta) / unit).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut modes = 0usize;
    for i in -reach..=reach {
        for j in -reach..=reach {
            for l in -reach..=reach {
                let k = [i as f64 * unit, j as f64 * unit, l as f64 * unit];
                let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
                if (kn - mu).abs() <= delta {
                    sum += Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                    modes += 1;
                }
            }
        }
    }
    if modes == 0 {
        return Err(Error::EmptyShell { mu, delta, side });
    }
    Ok(LatticeShell { value: sum / modes as f64, modes })
}

fn heaviside_sin(omega: f64, t: f64) -> f64 {
    if t > 0.0 {
        (omega * t).sin()
    } else {
        0.0
    }
}

/// `sin(μr)/r`, equal to `μ` at the origin.
fn radial(mu: f64, r: f64) -> f64 {
    mu * sinc(mu * r)
}

/// Scalar factor of the rest-frame profile at radius `r`, time `t`.
pub fn rest_scalar(spec: &ShellSpec, variant: ProfileVariant, r: f64, t: f64) -> f64 {
    let norm = 1.0 / (2.0 * spec.volume() * spec.omega).sqrt() / (2.0 * PI * PI);
    let time = heaviside_sin(spec.omega, t);
    match variant {
        ProfileVariant::UnitRatio => norm * radial(spec.mu, r) * time,
        ProfileVariant::ExplicitRatio => norm * spec.mu * radial(spec.mu, r) * time / spec.omega,
    }
}

fn times_column(column: &DiracSpinor, s: f64) -> DiracSpinor {
    column.map(|c| c * s)
}

/// `u¹ · rest_scalar(r, t)`
pub fn closed_form_profile(spec: &ShellSpec, variant: ProfileVariant, p: SpacetimePoint) -> DiracSpinor {
    times_column(&rest_spinor(1), rest_scalar(spec, variant, p.radius(), p.t))
}

/// The rest profile seen from a frame in which the particle moves with
/// velocity `v` along `z`.
pub fn boost_profile(
    spec: &ShellSpec,
    variant: ProfileVariant,
    frame: &BoostedFrame,
    p: SpacetimePoint,
) -> DiracSpinor {
    let rest = frame.to_rest(p);
    let r = match frame.variant {
        BoostVariant::Substitution => rest.radius(),
        BoostVariant::Literal => {
            let dz = p.z - frame.boost.velocity() * p.t;
            (p.x * p.x + p.y * p.y + frame.gamma() * dz * dz).sqrt()
        }
    };
    let column = boost_spinor(&rest_spinor(1), &frame.boost);
    times_column(&column, rest_scalar(spec, variant, r, rest.t))
}

/// Rest profile rebuilt from its ingredients: the shell quadrature of
/// `e^{ik·x}` with the continuum density `μ²/(2π²)`, times the time
/// integral of `Re q` along the numerically integrated trajectory.
pub fn mode_sum_profile(spec: &ShellSpec, p: SpacetimePoint, dt: f64) -> Result<DiracSpinor> {
    let angular = shell_average(spec.mu, [p.x, p.y, p.z], spec.order)?;
    let spatial = spec.mu * spec.mu / (2.0 * PI * PI) * angular / spec.volume().sqrt();
    let time = if p.t > 0.0 {
        let steps = ((p.t / dt).ceil() as usize).max(1000);
        let steps = steps + steps % 2;
        let h = p.t / steps as f64;
        let a = crate::dynamics::closed_form_amplitude(spec.omega);
        let traj = integrate_trajectory(Complex64::new(a, 0.0), spec.omega, p.t, h)?;
        // composite Simpson over the RK4 samples
        let n = traj.samples.len() - 1;
        let mut acc = traj.samples[0].1.re + traj.samples[n].1.re;
        for (i, (_, q)) in traj.samples.iter().enumerate().take(n).skip(1) {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * q.re;
        }
        acc * traj.step / 3.0
    } else {
        0.0
    };
    Ok(times_column(&rest_spinor(1), spatial * time))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSource {
    ModeSum,
    ClosedForm,
    BoostedClosedForm,
}

/// A profile model that can be evaluated pointwise.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileModel {
    pub spec: ShellSpec,
    pub variant: ProfileVariant,
    pub frame: Option<BoostedFrame>,
}

impl ProfileModel {
    pub fn rest(spec: ShellSpec, variant: ProfileVariant) -> Self {
        ProfileModel { spec, variant, frame: None }
    }

    pub fn boosted(spec: ShellSpec, variant: ProfileVariant, frame: BoostedFrame) -> Self {
        ProfileModel { spec, variant, frame: Some(frame) }
    }

    pub fn source(&self) -> ProfileSource {
        match self.frame {
            None => ProfileSource::ClosedForm,
            Some(_) => ProfileSource::BoostedClosedForm,
        }
    }

    pub fn evaluate(&self, p: SpacetimePoint) -> DiracSpinor {
        match &self.frame {
            None => closed_form_profile(&self.spec, self.variant, p),
            Some(f) => boost_profile(&self.spec, self.variant, f, p),
        }
    }

    fn rest_coordinates(&self, p: SpacetimePoint) -> SpacetimePoint {
        match &self.frame {
            None => p,
            Some(f) => f.to_rest(p),
        }
    }
}

/// `start:end:count` per axis in the order `x, y, z, t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn point(v: f64) -> Self {
        Axis { start: v, end: v, count: 1 }
    }

    pub fn span(start: f64, end: f64, count: usize) -> Self {
        Axis { start, end, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("axis {s:?} is not `value` or `start:end:count`"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Axis::point(v.parse().map_err(|_| bad())?)),
            [a, b, n] => {
                let count: usize = n.parse().map_err(|_| bad())?;
                if count == 0 {
                    return Err(bad());
                }
                Ok(Axis::span(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?, count))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: [Axis; 4],
}

impl Grid {
    /// Points with `x` varying fastest and `t` slowest.
    pub fn points(&self) -> Vec<SpacetimePoint> {
        let [xs, ys, zs, ts] = self.axes.map(|a| a.values());
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len() * ts.len());
        for &t in &ts {
            for &z in &zs {
                for &y in &ys {
                    for &x in &xs {
                        out.push(SpacetimePoint::new(x, y, z, t));
                    }
                }
            }
        }
        out
    }
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let axes: Vec<Axis> = s.split(',').map(str::parse).collect::<Result<_>>()?;
        let axes: [Axis; 4] = axes
            .try_into()
            .map_err(|_| Error::InvalidParameter(format!("grid {s:?} needs four axes x,y,z,t")))?;
        Ok(Grid { axes })
    }
}

#[derive(Debug, Clone)]
pub struct FieldProfile {
    pub points: Vec<SpacetimePoint>,
    pub values: Vec<DiracSpinor>,
    pub source: ProfileSource,
    pub model: ProfileModel,
}

impl FieldProfile {
    pub fn sample(model: ProfileModel, points: Vec<SpacetimePoint>) -> Self {
        let values = points.iter().map(|&p| model.evaluate(p)).collect();
        FieldProfile { points, values, source: model.source(), model }
    }

    /// One row per point and spinor component: `x,y,z,t,comp,Re,Im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["x", "y", "z", "t", "comp", "Re", "Im"])?;
        for (p, v) in self.points.iter().zip(&self.values) {
            for (c, z) in v.iter().enumerate() {
                w.write_record([
                    (p.x + 0.0).to_string(),
                    (p.y + 0.0).to_string(),
                    (p.z + 0.0).to_string(),
                    (p.t + 0.0).to_string(),
                    (c + 1).to_string(),
                    (z.re + 0.0).to_string(),
                    (z.im + 0.0).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "source": self.source,
            "shell": self.model.spec,
            "variant": self.model.variant,
            "frame": self.model.frame.map(|f| serde_json::json!({
                "velocity": f.boost.velocity(),
                "gamma": f.gamma(),
                "rapidity": f.boost.rapidity(),
                "variant": f.variant,
            })),
            "points": self.points.len(),
        })
    }
}

/// Fixed sample set on which residuals are measured.
#[derive(Debug, Clone)]
pub struct ResidualRegion {
    pub points: Vec<SpacetimePoint>,
}

impl ResidualRegion {
    pub fn from_grid(grid: &Grid) -> Self {
        ResidualRegion { points: grid.points() }
    }

    /// `x, y ∈ [0.5, 1.5]`, `z ∈ [−1, 1]`, `t ∈ [2, 3]`, 5 samples per axis.
    /// Clear of the origin and of the `t′ = 0` front for `|v| ≤ 0.6` and
    /// `h ≤ 0.1`.
    pub fn standard() -> Self {
        Self::from_grid(&Grid {
            axes: [
                Axis::span(0.5, 1.5, 5),
                Axis::span(0.5, 1.5, 5),
                Axis::span(-1.0, 1.0, 5),
                Axis::span(2.0, 3.0, 5),
            ],
        })
    }
}

/// Largest `|(□ + m²)φ|` over `region` with second-order central
/// differences of spacing `h` in `t, x, y, z`.
pub fn kg_residual(model: &ProfileModel, mass: f64, h: f64, region: &ResidualRegion) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!("spacing {h} must be positive")));
    }
    let mut worst: f64 = 0.0;
    for &p in &region.points {
        let centre = model.rest_coordinates(p);
        if centre.radius() < 3.0 * h {
            return Err(Error::ExcludedZone {
                point: p.as_array(),
                reason: format!("rest-frame radius {} inside 3h = {}", centre.radius(), 3.0 * h),
            });
        }
        let f0 = model.evaluate(p);
        let mut lap = DiracSpinor::zeros();
        let mut dtt = DiracSpinor::zeros();
        for axis in 0..4 {
            let plus = p.shifted(axis, h);
            let minus = p.shifted(axis, -h);
            for q in [plus, minus] {
                if model.rest_coordinates(q).t <= 0.0 {
                    return Err(Error::ExcludedZone {
                        point: p.as_array(),
                        reason: "stencil reaches the θ(t) wavefront".into(),
                    });
                }
            }
            let second = (model.evaluate(plus) - f0 * Complex64::new(2.0, 0.0) + model.evaluate(minus))
                / Complex64::new(h * h, 0.0);
            if axis == 3 {
                dtt = second;
            } else {
                lap += second;
            }
        }
        let residual = dtt - lap + f0 * Complex64::new(mass * mass, 0.0);
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualLevel {
    pub h: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub levels: Vec<ResidualLevel>,
    /// `log₂(r(h)/r(h/2))` for successive levels.
    pub pairwise_slopes: Vec<f64>,
    /// Least-squares slope of `log r` against `log h`.
    pub fitted_slope: f64,
    /// `max |φ|` over the region, for scale.
    pub amplitude: f64,
    pub dispersion_defect: f64,
}

/// Residuals at `h0, h0/2, …` (`levels` values).
pub fn residual_study(
    model: &ProfileModel,
    mass: f64,
    h0: f64,
    levels: usize,
    region: &ResidualRegion,
) -> Result<ResidualReport> {
    if levels < 2 {
        return Err(Error::InvalidParameter("need at least two spacing levels".into()));
    }
    let mut out = Vec::with_capacity(levels);
    let mut h = h0;
    for _ in 0..levels {
        out.push(ResidualLevel { h, max_residual: kg_residual(model, mass, h, region)? });
        h *= 0.5;
    }
    let pairwise_slopes = out
        .windows(2)
        .map(|w| (w[0].max_residual / w[1].max_residual).log2())
        .collect();
    let xs: Vec<f64> = out.iter().map(|l| l.h.ln()).collect();
    let ys: Vec<f64> = out.iter().map(|l| l.max_residual.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let amplitude = region
        .points
        .iter()
        .map(|&p| model.evaluate(p).norm())
        .fold(0.0, f64::max);
    Ok(ResidualReport {
        levels: out,
        pairwise_slopes,
        fitted_slope: sxy / sxx,
        amplitude,
        dispersion_defect: model.spec.dispersion_defect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ShellSpec {
        ShellSpec::new(1.0, 60.0).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = GaussLegendre::new(8);
        let total: f64 = gl.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫ x^14 dx over [−1,1] = 2/15, exact for 8 nodes (degree ≤ 15)
        let m: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn shell_average_examples() {
        assert!((shell_average(1.0, [0.0; 3], 8).unwrap() - 1.0).abs() < 1e-14);
        assert!(shell_average(1.0, [0.0, 0.0, PI], 32).unwrap().abs() < 1e-10);
        assert!((shell_average(1.0, [0.6, 0.0, 0.8], 32).unwrap() - 1f64.sin()).abs() < 1e-10);
        assert!(shell_average(1.0, [1.0, 0.0, 0.0], 7).is_err());
    }

    #[test]
    fn lattice_examples() {
        let origin = lattice_shell_sum(1.0, 0.05, 60.0, [0.0; 3]).unwrap();
        assert_eq!(origin.value, Complex64::new(1.0, 0.0));
        let s = lattice_shell_sum(1.0, 0.05, 60.0, [0.0, 0.0, 1.0]).unwrap();
        assert!(s.modes >= 50);
        assert!((s.value.re - 1f64.sin()).abs() < 2e-2);
        assert!(s.value.im.abs() < 1e-12);
        assert!(matches!(lattice_shell_sum(1.0, 0.001, 2.0, [0.0; 3]), Err(Error::EmptyShell { .. })));
    }

    #[test]
    fn closed_form_examples() {
        let s = spec();
        let before = closed_form_profile(&s, ProfileVariant::UnitRatio, SpacetimePoint::new(0.3, 0.0, 0.1, -0.5));
        assert_eq!(before, DiracSpinor::zeros());
        let at_zero = closed_form_profile(&s, ProfileVariant::UnitRatio, SpacetimePoint::new(0.3, 0.0, 0.1, 0.0));
        assert_eq!(at_zero, DiracSpinor::zeros());

        assert_eq!(radial(1.7, 0.0), 1.7);
        assert!((radial(1.7, 1e-7) - 1.7).abs() < 1e-12);

        let p = closed_form_profile(&s, ProfileVariant::UnitRatio, SpacetimePoint::new(0.4, -1.1, 0.2, 1.3));
        for c in 1..4 {
            assert_eq!(p[c], Complex64::new(0.0, 0.0));
        }
        // explicit-ratio variant differs by exactly μ/ω · 1/ω · ω = μ/ω
        let q = closed_form_profile(&s, ProfileVariant::ExplicitRatio, SpacetimePoint::new(0.4, -1.1, 0.2, 1.3));
        assert!((q[0].re - p[0].re * s.mu / s.omega).abs() < 1e-18);
    }

    #[test]
    fn spherical_symmetry() {
        let s = spec();
        let a = closed_form_profile(&s, ProfileVariant::UnitRatio, SpacetimePoint::new(1.0, 2.0, 2.0, 0.7));
        let b = closed_form_profile(&s, ProfileVariant::UnitRatio, SpacetimePoint::new(0.0, 0.0, 3.0, 0.7));
        assert!((a - b).norm() < 1e-14 * b.norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn mode_sum_matches_closed_form() {
        let s = spec();
        for p in [SpacetimePoint::new(0.3, 0.4, 1.2, 1.5), SpacetimePoint::new(2.0, -1.0, 0.5, 4.0)] {
            let ms = mode_sum_profile(&s, p, 1e-3).unwrap();
            let cf = closed_form_profile(&s, ProfileVariant::ExplicitRatio, p);
            assert!((ms - cf).norm() < 1e-8 * cf.norm(), "{ms} vs {cf}");
        }
    }

    #[test]
    fn boosted_zero_velocity_is_identity() {
        let s = spec();
        let frame = BoostedFrame::new(0.0, BoostVariant::Substitution).unwrap();
        for p in Grid::from_str("-1:1:3,0,-2:2:5,-1:2:4").unwrap().points() {
            assert_eq!(
                boost_profile(&s, ProfileVariant::UnitRatio, &frame, p),
                closed_form_profile(&s, ProfileVariant::UnitRatio, p)
            );
        }
    }

    #[test]
    fn boosted_peak_follows_worldline() {
        let s = spec();
        let frame = BoostedFrame::new(0.6, BoostVariant::Substitution).unwrap();
        // time factor sin(ω γ(t − vz)) is stationary at z = vt for this t
        let t = PI * frame.gamma() / (2.0 * s.omega);
        let dz = 1e-3;
        let (best, _) = (0..6001)
            .map(|i| -3.0 + i as f64 * dz)
            .map(|z| (z, boost_profile(&s, ProfileVariant::UnitRatio, &frame, SpacetimePoint::new(0.0, 0.0, z, t)).norm()))
            .fold((0.0, -1.0), |acc, (z, v)| if v > acc.1 { (z, v) } else { acc });
        assert!((best - 0.6 * t).abs() <= dz);
    }

    #[test]
    fn causality_of_boosted_front() {
        let s = spec();
        let frame = BoostedFrame::new(0.6, BoostVariant::Substitution).unwrap();
        for p in Grid::from_str("0,0.5,-5:5:41,-1:2:13").unwrap().points() {
            if p.t - 0.6 * p.z <= 0.0 {
                assert_eq!(boost_profile(&s, ProfileVariant::UnitRatio, &frame, p), DiracSpinor::zeros());
            }
        }
    }

    #[test]
    fn residual_excludes_origin_and_front() {
        let model = ProfileModel::rest(spec(), ProfileVariant::UnitRatio);
        let near_origin = ResidualRegion { points: vec![SpacetimePoint::new(0.1, 0.0, 0.0, 1.0)] };
        assert!(matches!(kg_residual(&model, 1.0, 0.1, &near_origin), Err(Error::ExcludedZone { .. })));
        let front = ResidualRegion { points: vec![SpacetimePoint::new(1.0, 0.0, 0.0, 0.05)] };
        assert!(matches!(kg_residual(&model, 1.0, 0.1, &front), Err(Error::ExcludedZone { .. })));
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "0,0,-5:5:11,1".parse().unwrap();
        assert_eq!(g.points().len(), 11);
        assert_eq!(g.points()[10].z, 5.0);
        assert!("0,0,1".parse::<Grid>().is_err());
        assert!("0,0,1:2:0,1".parse::<Grid>().is_err());
    }
}
