//! The `verify` command: every module invariant with measured error,
//! allowed tolerance and status, plus an operation coverage manifest.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use anyhow::{anyhow, ensure, Result};
use serde::Serialize;

use emergence_core::dynamics::{closed_form_amplitude, convergence_orders};
use emergence_core::spinor::{energy, spectrum};
use emergence_core::synth::{mode_sum_profile, sinc};
use emergence_core::vacuum::{bosonize_element, bosonized_overlap_kernel, CommutingPolynomial};
use emergence_core::{
    alpha, annihilation_check, beta, boost_profile, boost_spinor, bosonize, build_vacuum,
    closed_form_profile, covariance_k, create_excitation, energy_projectors, gaussian_dual,
    hamiltonian_k, lattice_shell_sum, polar_decompose, rest_spinor, shell_average, square_check,
    state_norm, vacuum_energy, verify_closed_form, Algebra, BerezinConvention, BoostParams,
    BoostVariant, BoostedFrame, Branch, Complex64, CovarianceMatrix, DiracSpinor, Error,
    FieldOperatorRep, GeneratorIndex, GrassmannElement, GuidanceOde, ModeBasis, ModeVariable,
    ProfileModel, ProfileVariant, SignConvention, SpacetimePoint, SpinorMatrix,
};

use crate::commands::{boosted_model, render_profile, residual_output, rest_model, shell_spec, SLOPE_TOLERANCE};
use crate::config::{BoostVariantArg, OmegaSign, RunConfig};

/// Every operation the suite must exercise, as `module::operation`.
pub const OPERATIONS: [&str; 26] = [
    "grassmann_engine::multiply",
    "grassmann_engine::grassmann_exp",
    "grassmann_engine::berezin_integrate",
    "grassmann_engine::functional_derivative",
    "grassmann_engine::gaussian_dual",
    "grassmann_engine::state_norm",
    "spinor_algebra::hamiltonian_k",
    "spinor_algebra::square_check",
    "spinor_algebra::energy_projectors",
    "spinor_algebra::covariance_k",
    "spinor_algebra::boost_spinor",
    "functional_vacuum::build_vacuum",
    "functional_vacuum::annihilation_check",
    "functional_vacuum::create_excitation",
    "functional_vacuum::vacuum_energy",
    "functional_vacuum::bosonize",
    "bohmian_dynamics::polar_decompose",
    "bohmian_dynamics::integrate_trajectory",
    "bohmian_dynamics::verify_closed_form",
    "emergence_synth::shell_average",
    "emergence_synth::lattice_shell_sum",
    "emergence_synth::closed_form_profile",
    "emergence_synth::boost_profile",
    "emergence_synth::kg_residual",
    "cli::run_verify",
    "cli::run_profile",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    /// A known failure of a variant selected on purpose.
    #[serde(rename = "fail (documented discrepancy)")]
    Documented,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub ops: Vec<&'static str>,
    pub measured: f64,
    pub tolerance: f64,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub documented: usize,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub coverage: BTreeMap<&'static str, Vec<String>>,
    pub summary: Summary,
    pub status: Status,
}

impl VerifyReport {
    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect()
    }
}

struct Suite<'a> {
    cfg: &'a RunConfig,
    checks: Vec<Check>,
}

/// Outcome of one measurement: error, free-text detail, and whether a
/// failure is the documented outcome of the configured variant.
struct Measured {
    error: f64,
    detail: String,
    documented: Option<&'static str>,
}

fn measured(error: f64, detail: impl Into<String>) -> Result<Measured> {
    Ok(Measured { error, detail: detail.into(), documented: None })
}

impl Suite<'_> {
    fn run(&mut self, name: &str, ops: &[&'static str], tolerance: f64, f: impl FnOnce(&RunConfig) -> Result<Measured>) {
        let tolerance = self.cfg.tolerance(name, tolerance);
        let check = match f(self.cfg) {
            Ok(m) => {
                let ok = m.error <= tolerance;
                let (status, detail) = match (ok, m.documented) {
                    (true, _) => (Status::Pass, m.detail),
                    (false, Some(why)) => (Status::Documented, format!("{}; {why}", m.detail)),
                    (false, None) => (Status::Fail, m.detail),
                };
                Check { name: name.into(), ops: ops.to_vec(), measured: m.error, tolerance, status, detail }
            }
            Err(e) => Check {
                name: name.into(),
                ops: ops.to_vec(),
                measured: f64::INFINITY,
                tolerance,
                status: Status::Fail,
                detail: format!("error: {e:#}"),
            },
        };
        self.checks.push(check);
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn generators(alg: &Algebra) -> Vec<GeneratorIndex> {
    let n = alg.modes();
    (0..n).map(GeneratorIndex::conj).chain((0..n).map(GeneratorIndex::plain)).collect()
}

/// Element with a deterministic coefficient on every monomial.
fn dense_element(alg: &Algebra, seed: f64) -> Result<GrassmannElement> {
    let gens = generators(alg);
    let mut out = alg.zero();
    for key in 0..1u64 << gens.len() {
        let picked: Vec<GeneratorIndex> =
            gens.iter().enumerate().filter(|(b, _)| (key >> b) & 1 == 1).map(|(_, &g)| g).collect();
        let k = key as f64;
        let coeff = Complex64::new((seed + 1.37 * k).sin(), (0.5 * seed + 0.71 * k).cos() * 0.5);
        out = &out + &alg.monomial(&picked, coeff)?;
    }
    Ok(out)
}

/// A deterministic family of dense complex matrices.
fn sample_matrix(n: usize, seed: usize) -> CovarianceMatrix {
    let s = seed as f64;
    CovarianceMatrix::from_fn(n, |i, j| {
        let t = s * 2.3 + i as f64 * 1.1 + j as f64 * 0.37;
        Complex64::new(t.sin(), (1.7 * t).cos() * 0.8)
    })
}

fn momentum_grid() -> Vec<([f64; 3], f64)> {
    let comps = [-2.0, -0.5, 0.0, 1.5];
    let mut out = Vec::new();
    for &kx in &comps {
        for &ky in &comps {
            for &kz in &comps {
                for m in [0.0, 0.5, 2.0] {
                    if kx != 0.0 || ky != 0.0 || kz != 0.0 || m != 0.0 {
                        out.push(([kx, ky, kz], m));
                    }
                }
            }
        }
    }
    out
}

fn grassmann_checks(s: &mut Suite) {
    s.run("grassmann.anticommutation", &["grassmann_engine::multiply"], 0.0, |_| {
        let alg = Algebra::new(3)?;
        let mut worst: f64 = 0.0;
        for g in generators(&alg) {
            let eg = alg.generator(g)?;
            worst = worst.max(eg.multiply(&eg)?.max_coefficient());
            for h in generators(&alg).into_iter().filter(|&h| h != g) {
                let eh = alg.generator(h)?;
                worst = worst.max((&eg.multiply(&eh)? + &eh.multiply(&eg)?).max_coefficient());
            }
        }
        let n = alg.monomial(&[GeneratorIndex::conj(0), GeneratorIndex::plain(0)], c(1.0))?;
        let square = (&alg.one() + &n).multiply(&(&alg.one() + &n))?;
        worst = worst.max(square.distance(&(&alg.one() + &n.scale(c(2.0)))));
        measured(worst, "gg = 0, gh = −hg on 6 generators; (1 + η̄η)² = 1 + 2η̄η")
    });

    s.run("grassmann.associativity", &["grassmann_engine::multiply"], 1e-12, |_| {
        let alg = Algebra::new(3)?;
        let (a, b, d) = (dense_element(&alg, 0.3)?, dense_element(&alg, 1.9)?, dense_element(&alg, -2.2)?);
        let assoc = a.multiply(&b)?.multiply(&d)?.distance(&a.multiply(&b.multiply(&d)?)?);
        let dist = a.multiply(&(&b + &d))?.distance(&(&a.multiply(&b)? + &a.multiply(&d)?));
        let scale = a.max_coefficient() * b.max_coefficient() * d.max_coefficient() * 64.0;
        measured(assoc.max(dist) / scale.max(1.0), "dense elements of the 3-mode algebra, relative")
    });

    s.run(
        "grassmann.kernel_expansion",
        &["grassmann_engine::multiply", "grassmann_engine::grassmann_exp"],
        0.0,
        |_| {
            let alg = Algebra::new(2)?;
            let (d0, p0, d1, p1) =
                (GeneratorIndex::conj(0), GeneratorIndex::plain(0), GeneratorIndex::conj(1), GeneratorIndex::plain(1));
            let a = alg.monomial(&[d0, p1], c(1.0))?;
            let b = alg.monomial(&[d1, p0], c(1.0))?;
            let lhs = (&a - &b).exp();
            let rhs = &(&(&alg.one() + &a) - &b) + &alg.monomial(&[d0, p0, d1, p1], c(1.0))?;
            measured(lhs.distance(&rhs), "exp(η̄η′ − η̄′η) = 1 + η̄η′ − η̄′η + η̄η η̄′η′")
        },
    );

    s.run("grassmann.exp_inverse", &["grassmann_engine::grassmann_exp"], 1e-12, |_| {
        let alg = Algebra::new(3)?;
        let a = alg.quadratic_form(&sample_matrix(3, 4))?;
        let prod = a.exp().multiply(&(-&a).exp())?;
        measured(prod.distance(&alg.one()), "exp(a) exp(−a) = 1 for a = η†Ωη")
    });

    s.run("grassmann.berezin", &["grassmann_engine::berezin_integrate"], 1e-10, |_| {
        let one = Algebra::new(1)?;
        let eta = one.generator(GeneratorIndex::plain(0))?;
        let mut worst = (eta.berezin_integrate(&[GeneratorIndex::plain(0)])?.scalar_part() - c(1.0)).norm();
        worst = worst.max(one.one().berezin_integrate(&[GeneratorIndex::plain(0)])?.max_coefficient());
        let cval = Complex64::new(0.8, -0.3);
        let g = one.monomial(&[GeneratorIndex::conj(0), GeneratorIndex::plain(0)], cval)?.exp();
        worst = worst.max((g.integrate_all()?.scalar_part() + cval).norm());
        for conv in [BerezinConvention::Paired, BerezinConvention::Blocked] {
            let om = sample_matrix(3, 7);
            let alg = Algebra::with_convention(3, conv)?;
            let got = alg.quadratic_form(&om)?.exp().integrate_all()?.scalar_part();
            let want = (-om.0.clone()).determinant() * conv.gaussian_sign(3);
            worst = worst.max((got - want).norm() / want.norm());
        }
        match one.one().berezin_integrate(&[GeneratorIndex::plain(0), GeneratorIndex::plain(0)]) {
            Err(Error::RepeatedVariable(_)) => {}
            _ => return Err(anyhow!("repeated variable was not rejected")),
        }
        measured(worst, "∫dη η = 1, ∫dη 1 = 0, ∫dη̄dη e^{cη̄η} = −c, 3-mode Gaussian = s·det(−Ω)")
    });

    s.run("grassmann.derivative_anticommutator", &["grassmann_engine::functional_derivative"], 1e-12, |_| {
        let alg = Algebra::new(2)?;
        let f = dense_element(&alg, 0.9)?;
        let mut worst: f64 = 0.0;
        for g in generators(&alg) {
            let eg = alg.generator(g)?;
            let left = &eg.multiply(&f)?.left_derivative(g)? + &eg.multiply(&f.left_derivative(g)?)?;
            let right = &f.multiply(&eg)?.right_derivative(g)? + &f.right_derivative(g)?.multiply(&eg)?;
            worst = worst.max(left.distance(&f)).max(right.distance(&f));
        }
        // ∂/∂η̄ exp(η̄Ωη) = Ωη exp(η̄Ωη) on one mode
        let om = Complex64::new(1.3, 0.4);
        let one = Algebra::new(1)?;
        let e = one.quadratic_form(&CovarianceMatrix::from_fn(1, |_, _| om))?.exp();
        let eta = one.generator(GeneratorIndex::plain(0))?;
        let d = e.left_derivative(GeneratorIndex::conj(0))?;
        worst = worst.max(d.distance(&eta.scale(om).multiply(&e)?));
        measured(worst, "{∂g, g·} = 1 on both sides; ∂η̄ e^{η̄Ωη} = Ωη e^{η̄Ωη}")
    });

    s.run("grassmann.gaussian_dual", &["grassmann_engine::gaussian_dual"], 1e-10, |_| {
        let mut worst: f64 = 0.0;
        let mut cases = vec![CovarianceMatrix::diagonal(&[-1.0]), CovarianceMatrix::diagonal(&[2.0])];
        cases.extend((0..4).map(|i| sample_matrix(2, 11 + i)));
        for om in &cases {
            let d = gaussian_dual(om, BerezinConvention::default())?;
            worst = worst.max((d.prefactor - d.brute_prefactor).norm());
            worst = worst.max((&d.exponent.0 - &d.brute_exponent.0).norm());
        }
        let m1 = gaussian_dual(&cases[0], BerezinConvention::default())?;
        worst = worst.max((m1.exponent.0[(0, 0)] - c(-1.0)).norm()).max((m1.prefactor.norm() - 1.0).abs());
        let m2 = gaussian_dual(&cases[1], BerezinConvention::default())?;
        worst = worst.max((m2.exponent.0[(0, 0)] - c(0.5)).norm());
        measured(worst, "closed form vs Berezin integral; Ω=(−1) → (−1), Ω=(2) → (1/2)")
    });

    s.run("grassmann.state_norm", &["grassmann_engine::state_norm"], 1e-10, |_| {
        let mut worst: f64 = 0.0;
        for n in 1..=3 {
            for seed in 0..20 {
                worst = worst.max(state_norm(&sample_matrix(n, 100 + seed), BerezinConvention::default())?.relative_error());
            }
        }
        measured(worst, "det(1 + Ω†Ω) vs ⟨Ψ|Ψ⟩ for 20 matrices at each n ≤ 3, relative")
    });
}

fn spinor_checks(s: &mut Suite) {
    s.run("spinor.clifford", &[], 1e-14, |_| {
        let id = SpinorMatrix::identity();
        let b = beta();
        let mut worst = (b * b - id).norm().max((b.adjoint() - b).norm());
        for i in 0..3 {
            let a = alpha(i);
            worst = worst.max((a.adjoint() - a).norm()).max((a * b + b * a).norm());
            for j in 0..3 {
                let want = if i == j { id * c(2.0) } else { SpinorMatrix::zeros() };
                worst = worst.max((a * alpha(j) + alpha(j) * a - want).norm());
            }
        }
        measured(worst, "hermiticity, β² = I, {αᵢ, αⱼ} = 2δᵢⱼ, {αᵢ, β} = 0")
    });

    s.run("spinor.spectrum", &["spinor_algebra::hamiltonian_k", "spinor_algebra::square_check"], 1e-10, |_| {
        let mut worst: f64 = 0.0;
        for (k, m) in momentum_grid() {
            let e = energy(k, m);
            let sp = spectrum(&hamiltonian_k(k, m));
            for (got, want) in sp.iter().zip([-e, -e, e, e]) {
                worst = worst.max((got - want).abs());
            }
            ensure!(square_check(k, m), "h² ≠ E² at k = {k:?}, m = {m}");
        }
        measured(worst, "eigenvalues ±E twice each and h² = E² on a momentum grid")
    });

    s.run("spinor.projectors", &["spinor_algebra::energy_projectors"], 1e-12, |_| {
        let id = SpinorMatrix::identity();
        let mut worst: f64 = 0.0;
        for (k, m) in momentum_grid() {
            let (pp, pm) = energy_projectors(k, m)?;
            let h = hamiltonian_k(k, m);
            let e = energy(k, m);
            worst = worst
                .max((pp + pm - id).norm())
                .max((pp * pp - pp).norm())
                .max((pp * pm).norm())
                .max((h * pp - pp * c(e)).norm() / e.max(1.0));
        }
        measured(worst, "P₊ + P₋ = I, P₊² = P₊, P₊P₋ = 0, hP₊ = EP₊")
    });

    s.run("spinor.covariance_involution", &["spinor_algebra::covariance_k"], 1e-12, |_| {
        let mut worst: f64 = 0.0;
        for (k, m) in momentum_grid() {
            for sign in [SignConvention::Hamiltonian, SignConvention::EnergyConsistent] {
                let om = covariance_k(k, m, sign)?;
                worst = worst.max((om * om - SpinorMatrix::identity()).norm());
            }
        }
        measured(worst, "Ω(k)² = I for both sign conventions")
    });

    s.run("spinor.boost_column", &["spinor_algebra::boost_spinor"], 1e-12, |_| {
        let b = BoostParams::new(0.6)?;
        let u = boost_spinor(&rest_spinor(1), &b);
        let r = 1.125f64.sqrt();
        let want = DiracSpinor::new(c(r), c(0.0), c(r / 3.0), c(0.0));
        let (e, p) = b.energy_momentum(1.0);
        let eig = (hamiltonian_k([0.0, 0.0, p], 1.0) * u - u * c(e)).norm();
        measured((u - want).norm().max(eig), "v = 0.6: [√1.125, 0, √1.125/3, 0], eigenvalue +γm")
    });
}

fn eight_mode_basis(cfg: &RunConfig) -> Result<ModeBasis> {
    Ok(ModeBasis::new(cfg.side, cfg.mu)?.with_momentum([0, 0, 0])?.with_momentum([1, 0, 0])?)
}

fn vacuum_checks(s: &mut Suite) {
    s.run(
        "vacuum.annihilation",
        &["functional_vacuum::build_vacuum", "functional_vacuum::annihilation_check"],
        1e-12,
        |cfg| {
            let basis = eight_mode_basis(cfg)?;
            let vac = build_vacuum(&basis, &basis.covariance(cfg.omega_sign.into()))?;
            let mut worst: f64 = 0.0;
            for mode in 0..basis.len() {
                worst = worst.max(annihilation_check(&vac, mode)?.residual);
            }
            let mut m = measured(worst, format!("{} modes, Ω sign {:?}", basis.len(), cfg.omega_sign))?;
            if cfg.omega_sign == OmegaSign::Hamiltonian {
                m.documented = Some("Ω = +h/ω does not annihilate the vacuum");
            }
            Ok(m)
        },
    );

    s.run("vacuum.norm", &["functional_vacuum::build_vacuum", "grassmann_engine::state_norm"], 1e-10, |cfg| {
        let basis = ModeBasis::new(cfg.side, cfg.mu)?
            .with_mode([0, 0, 1], Branch::particle(0))?
            .with_mode([0, 0, 1], Branch::particle(1))?
            .with_mode([0, 0, 1], Branch::antiparticle(0))?;
        let vac = build_vacuum(&basis, &basis.covariance(cfg.omega_sign.into()))?;
        let norm = vac.norm()?;
        measured(norm.relative_error().max((norm.formula - 8.0).abs() / 8.0), "3-mode vacuum, det(1 + Ω†Ω) = 8")
    });

    s.run("vacuum.excitation", &["functional_vacuum::create_excitation"], 1e-14, |cfg| {
        let basis = ModeBasis::new(cfg.side, cfg.mu)?
            .with_mode([0, 0, 0], Branch::particle(0))?
            .with_mode([0, 0, 0], Branch::antiparticle(0))?;
        let vac = build_vacuum(&basis, &basis.covariance(SignConvention::EnergyConsistent))?;
        let one = create_excitation(&vac, &basis, 0, 1)?;
        let alg = vac.algebra();
        let want = alg.generator(GeneratorIndex::conj(0))?.multiply(&vac.body)?.scale(c(SQRT_2));
        let mut worst = one.body.distance(&want);
        // ψ̂†|0⟩ carries √2 in the body; with uᵃ/√V this is √(2/V) uᵃ
        worst = worst.max((one.prefactor * SQRT_2 - c((2.0 / basis.volume()).sqrt())).norm());
        ensure!(
            matches!(create_excitation(&one, &basis, 0, 1), Err(Error::PauliExclusion { mode: 0 })),
            "second excitation of the same mode was not rejected"
        );
        let back = FieldOperatorRep::new(alg).annihilate(0, true, &one.body)?;
        worst = worst.max(back.distance(&vac.body));
        measured(worst, "a†|0⟩ = √2 η†Ψ₀ with prefactor u/√V; (a†)² = 0; a a†|0⟩ = |0⟩")
    });

    s.run("vacuum.energy", &["functional_vacuum::vacuum_energy"], 1e-10, |cfg| {
        let basis = eight_mode_basis(cfg)?;
        let e = vacuum_energy(&basis)?;
        let vac = build_vacuum(&basis, &basis.covariance(SignConvention::EnergyConsistent))?;
        let err = e.max_discrepancy().max((vac.ground_energy - e.value()).abs()) / e.value().abs().max(1.0);
        measured(err, format!("E₀ = {:.12} over {} modes by closed form, eigensolve and trace", e.value(), basis.len()))
    });

    s.run("vacuum.bosonize", &["functional_vacuum::bosonize"], 0.0, |cfg| {
        let basis = ModeBasis::new(cfg.side, cfg.mu)?.with_momentum([0, 0, 0])?;
        let vac = build_vacuum(&basis, &basis.covariance(SignConvention::EnergyConsistent))?;
        let one = create_excitation(&vac, &basis, 0, 1)?;
        let b = bosonize(&one);
        let n = one.modes();
        let mut worst: f64 = 0.0;
        for (gens, coeff) in one.body.terms() {
            let mut exps = vec![0u32; 2 * n];
            for g in &gens {
                exps[if *g == GeneratorIndex::conj(g.mode) { g.mode } else { n + g.mode }] = 1;
            }
            worst = worst.max((b.body.coefficient(&exps) - coeff).norm());
        }
        ensure!(b.body.len() == one.body.len() && b.prefactor == one.prefactor, "term count or prefactor changed");
        let v = |g| CommutingPolynomial::variable(2, g);
        let (qd, q, qpd, qp) = (
            v(GeneratorIndex::conj(0)),
            v(GeneratorIndex::plain(0)),
            v(GeneratorIndex::conj(1)),
            v(GeneratorIndex::plain(1)),
        );
        let kernel = CommutingPolynomial::one(2)
            .add(&qd.multiply(&qp))
            .add(&q.multiply(&qpd))
            .add(&qd.multiply(&qp).multiply(&q).multiply(&qpd));
        worst = worst.max(bosonized_overlap_kernel()?.distance(&kernel));
        // per-mode vacuum body exp(−ω q†q), square-free part
        let omega = 1.7;
        let alg = Algebra::new(1)?;
        let gv = alg.quadratic_form(&CovarianceMatrix::diagonal(&[-omega]))?.exp();
        let qv = qd_single().multiply(&q_single()).scale(c(-omega)).exp_truncated(2).square_free_part();
        worst = worst.max(bosonize_element(&gv).distance(&qv));
        measured(worst, "one-particle coefficients, commuting overlap kernel, exp(−ωq†q) vacuum")
    });
}

fn qd_single() -> CommutingPolynomial {
    CommutingPolynomial::variable(1, GeneratorIndex::conj(0))
}

fn q_single() -> CommutingPolynomial {
    CommutingPolynomial::variable(1, GeneratorIndex::plain(0))
}

fn dynamics_checks(s: &mut Suite) {
    s.run("dynamics.polar", &["bohmian_dynamics::polar_decompose"], 1e-12, |_| {
        let psi = boost_spinor(&rest_spinor(1), &BoostParams::new(0.6)?) * Complex64::from_polar(2.5, 0.7);
        let p = polar_decompose(&psi)?;
        let err = (p.reassemble() - psi).norm() / psi.norm();
        measured(err.max((p.phase - 0.7).abs()), "R e^{iS} φ reassembles the boosted spinor; S recovered")
    });

    s.run(
        "dynamics.trajectory",
        &["bohmian_dynamics::integrate_trajectory", "bohmian_dynamics::verify_closed_form"],
        1e-8,
        |cfg| {
            let omega = shell_spec(cfg)?.omega;
            let check = verify_closed_form(omega, cfg.horizon, cfg.dt)?;
            measured(
                check.max_error,
                format!(
                    "ω = {omega:.6}, T = {:.4}, dt = {}: |q| drift {:.1e}, phase error {:.1e}",
                    cfg.horizon, check.step, check.modulus_drift, check.phase_error
                ),
            )
        },
    );

    s.run("dynamics.order", &["bohmian_dynamics::verify_closed_form"], 0.2, |cfg| {
        let omega = shell_spec(cfg)?.omega;
        let horizon = 20.0 * PI / omega;
        let orders = convergence_orders(omega, horizon, 0.02 / omega, 3)?;
        let worst = orders.iter().map(|(_, p)| (p - 4.0).abs()).fold(0.0, f64::max);
        let shown: Vec<String> = orders.iter().map(|(_, p)| format!("{p:.3}")).collect();
        measured(worst, format!("|order − 4| over step halvings, orders [{}]", shown.join(", ")))
    });

    s.run("dynamics.guidance_structure", &["functional_vacuum::bosonize"], 0.0, |_| {
        let mut mismatches = 0;
        for mode in 0..4 {
            for g in [GeneratorIndex::plain(mode), GeneratorIndex::conj(mode)] {
                let before = GuidanceOde::for_mode(ModeVariable::Grassmann(g));
                let after = before.bosonize();
                if after != GuidanceOde::for_mode(ModeVariable::Commuting(g))
                    || after.describe() != before.describe().replace('η', "q")
                {
                    mismatches += 1;
                }
            }
        }
        let law = GuidanceOde::for_mode(ModeVariable::Commuting(GeneratorIndex::plain(0)));
        let a = closed_form_amplitude(2.0);
        let rhs_err = (law.rhs(c(a)) - Complex64::new(0.0, -2.0 * a)).norm();
        measured(mismatches as f64 + rhs_err, "η̇ = 1/(2iη†) maps to q̇ = 1/(2iq†); A = 1/√(2ω) solves it")
    });
}

fn synth_checks(s: &mut Suite) {
    s.run("synth.shell_quadrature", &["emergence_synth::shell_average"], 1e-10, |cfg| {
        let dirs = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.48, 0.6, 0.64], [-0.36, 0.48, -0.8]];
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let r = 20.0 / cfg.mu * i as f64 / 200.0;
            for d in dirs {
                worst = worst.max((shell_average(cfg.mu, d.map(|x| x * r), cfg.order)? - sinc(cfg.mu * r)).abs());
            }
        }
        measured(worst, format!("order {}, μr ∈ [0, 20]", cfg.order))
    });

    s.run("synth.lattice", &["emergence_synth::lattice_shell_sum"], 2e-2, |cfg| {
        let points = [[0.0, 0.0, 1.0], [0.3, 0.5, 0.9], [1.0, 1.0, 1.0], [0.0, 1.5, 0.0], [0.7, -0.2, 0.4], [1.2, 0.0, -1.1]];
        let delta = 3.0 / cfg.side;
        let mut worst: f64 = 0.0;
        let mut modes = 0;
        for x in points {
            let s = lattice_shell_sum(cfg.mu, delta, cfg.side, x)?;
            modes = s.modes;
            worst = worst.max((s.value - c(shell_average(cfg.mu, x, cfg.order)?)).norm());
        }
        measured(worst, format!("L = {}, Δ = {delta:.4}, {modes} lattice modes", cfg.side))
    });

    s.run("synth.spherical_symmetry", &["emergence_synth::closed_form_profile"], 1e-14, |cfg| {
        let model = rest_model(cfg)?;
        let dirs = [[0.0, 0.0, 1.0], [0.6, 0.8, 0.0], [0.48, -0.6, 0.64], [-0.36, 0.48, -0.8]];
        let mut worst: f64 = 0.0;
        for r in [0.0, 0.3, 1.7, 4.2, 9.9] {
            for t in [-1.0, 0.5, 2.5] {
                let base = model.evaluate(SpacetimePoint::new(r, 0.0, 0.0, t));
                for d in dirs {
                    let p = SpacetimePoint::new(r * d[0], r * d[1], r * d[2], t);
                    worst = worst.max((model.evaluate(p) - base).norm());
                }
            }
        }
        measured(worst, "values at equal radius agree")
    });

    s.run(
        "synth.mode_sum",
        &["emergence_synth::closed_form_profile", "emergence_synth::shell_average", "bohmian_dynamics::integrate_trajectory"],
        1e-8,
        |cfg| {
            let spec = shell_spec(cfg)?;
            let mut worst: f64 = 0.0;
            for p in [SpacetimePoint::new(0.3, 0.4, 0.5, 1.0), SpacetimePoint::new(1.0, -2.0, 0.5, 2.5), SpacetimePoint::new(0.0, 0.0, 0.0, 0.7)] {
                let sum = mode_sum_profile(&spec, p, 1e-3)?;
                let closed = closed_form_profile(&spec, ProfileVariant::ExplicitRatio, p);
                worst = worst.max((sum - closed).norm() / closed.norm());
            }
            measured(worst, "shell quadrature × ∫Re q dt vs closed form with the μ/ω factor, relative")
        },
    );

    s.run("synth.boost_identity", &["emergence_synth::boost_profile"], 0.0, |cfg| {
        let spec = shell_spec(cfg)?;
        let variant = cfg.profile_variant.into();
        let still = BoostedFrame::new(0.0, cfg.boost_variant.into())?;
        let moving = BoostedFrame::new(0.6, BoostVariant::Substitution)?;
        let mut worst: f64 = 0.0;
        for p in crate::config::RunConfig::default().parsed_grid()?.points() {
            worst = worst.max((boost_profile(&spec, variant, &still, p) - closed_form_profile(&spec, variant, p)).norm());
        }
        for z in [-3.0, -1.0, 0.0, 2.0, 4.0] {
            for t in [-2.0, 0.0, 0.5, 1.0] {
                let p = SpacetimePoint::new(0.4, -0.2, z, t);
                if moving.gamma() * (t - 0.6 * z) <= 0.0 {
                    worst = worst.max(boost_profile(&spec, variant, &moving, p).norm());
                }
            }
        }
        measured(worst, "v = 0 equals the rest profile; zero wherever γ(t − vz) ≤ 0")
    });

    s.run("synth.boost_oracle", &["emergence_synth::boost_profile"], 1e-12, |cfg| {
        let spec = shell_spec(cfg)?;
        let v = if cfg.velocity > 0.0 { cfg.velocity } else { 0.6 };
        let frame = BoostedFrame::new(v, BoostVariant::Substitution)?;
        let w = v.atanh();
        let (ch, sh) = ((w / 2.0).cosh(), (w / 2.0).sinh());
        let column = DiracSpinor::new(c(ch), c(0.0), c(sh), c(0.0));
        let g = w.cosh();
        let variant: ProfileVariant = cfg.profile_variant.into();
        // 1/√(2Vω) · 1/(2π²), times μ/ω when that factor is kept
        let mut amp = 1.0 / (2.0 * spec.volume() * spec.omega).sqrt() / (2.0 * PI * PI);
        if variant == ProfileVariant::ExplicitRatio {
            amp *= spec.mu / spec.omega;
        }
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let axis: Vec<f64> = (0..10).map(|i| -2.0 + 4.0 * i as f64 / 9.0).collect();
        for &x in &axis {
            for &y in &axis {
                for &z in &axis {
                    let t = 3.0;
                    let zr = g * (z - v * t);
                    let tr = g * (t - v * z);
                    let r = (x * x + y * y + zr * zr).sqrt();
                    let time = if tr > 0.0 { (spec.omega * tr).sin() } else { 0.0 };
                    let want = column * c(amp * (spec.mu * r).sin() / r * time);
                    let got = boost_profile(&spec, variant, &frame, SpacetimePoint::new(x, y, z, t));
                    worst = worst.max((got - want).norm());
                    scale = scale.max(want.norm());
                }
            }
        }
        measured(worst / scale.max(f64::MIN_POSITIVE), format!("v = {v}: S(ω) · rest(Λ⁻¹x) on a 10³ grid, relative"))
    });

    let slope_error = |r: &crate::commands::ResidualOutput| {
        r.report.pairwise_slopes.iter().map(|s| (s - 2.0).abs()).fold(0.0, f64::max)
    };

    s.run("synth.kg_rest", &["emergence_synth::kg_residual", "emergence_synth::closed_form_profile"], SLOPE_TOLERANCE, |cfg| {
        let out = residual_output(cfg, rest_model(cfg)?)?;
        measured(slope_error(&out), format!("{:?}: slopes {:?}", ProfileVariant::from(cfg.profile_variant), out.report.pairwise_slopes))
    });

    s.run("synth.kg_boosted", &["emergence_synth::kg_residual", "emergence_synth::boost_profile"], SLOPE_TOLERANCE, |cfg| {
        let v = if cfg.velocity > 0.0 { cfg.velocity } else { 0.6 };
        let out = residual_output(cfg, boosted_model(cfg, v)?)?;
        let mut m = measured(
            slope_error(&out),
            format!("v = {v}, {:?}: slopes {:?}", cfg.boost_variant, out.report.pairwise_slopes),
        )?;
        if cfg.boost_variant == BoostVariantArg::Literal {
            m.documented = Some("the literal boost variant is not a Klein-Gordon solution");
        }
        Ok(m)
    });

    s.run("synth.kg_wrong_dispersion", &["emergence_synth::kg_residual"], 0.5, |cfg| {
        let spec = shell_spec(cfg)?;
        let wrong = ProfileModel::rest(spec.with_omega(spec.mu)?, cfg.profile_variant.into());
        let out = residual_output(cfg, wrong)?;
        let finest = out.report.levels.last().map(|l| l.max_residual).unwrap_or(0.0);
        ensure!(
            finest > 0.1 * out.report.amplitude,
            "ω = μ residual {finest:e} fell below a tenth of the amplitude {:e}",
            out.report.amplitude
        );
        measured(
            out.report.fitted_slope.abs(),
            format!("ω = μ control: fitted slope {:.3}, residual/amplitude {:.2}", out.report.fitted_slope, finest / out.report.amplitude),
        )
    });
}

fn cli_checks(s: &mut Suite) {
    s.run("cli.profile_output", &["cli::run_profile"], 0.0, |cfg| {
        let line = RunConfig { grid: None, ..cfg.clone() };
        let render = |c: &RunConfig, boosted: bool| -> Result<Vec<u8>> {
            let mut buf = Vec::new();
            render_profile(c, boosted)?.write_csv(&mut buf)?;
            Ok(buf)
        };
        let mut problems = 0.0;
        if render(&line, false)? != render(&line, false)? {
            problems += 1.0;
        }
        let still = RunConfig { velocity: 0.0, ..line.clone() };
        if render(&still, true)? != render(&line, false)? {
            problems += 1.0;
        }
        let past = RunConfig { grid: Some("0:1:3,0,-2:2:5,-1".into()), ..line.clone() };
        if render_profile(&past, false)?.values.iter().any(|v| v.norm() != 0.0) {
            problems += 1.0;
        }
        let along_z = render_profile(&line, false)?;
        let peak = along_z
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| along_z.points[i].radius())
            .unwrap_or(f64::NAN);
        if peak != 0.0 {
            problems += 1.0;
        }
        measured(problems, "deterministic CSV; v = 0 boost equals rest; t < 0 is zero; peak at r = 0")
    });
}

pub fn run_verify(cfg: &RunConfig) -> VerifyReport {
    let mut suite = Suite { cfg, checks: Vec::new() };
    grassmann_checks(&mut suite);
    spinor_checks(&mut suite);
    vacuum_checks(&mut suite);
    dynamics_checks(&mut suite);
    synth_checks(&mut suite);
    cli_checks(&mut suite);

    let mut coverage: BTreeMap<&'static str, Vec<String>> = OPERATIONS.iter().map(|&op| (op, Vec::new())).collect();
    for check in &suite.checks {
        for op in &check.ops {
            coverage.entry(op).or_default().push(check.name.clone());
        }
    }
    let manifest_name = "cli.coverage";
    coverage.entry("cli::run_verify").or_default().push(manifest_name.into());
    let uncovered: Vec<&str> = coverage.iter().filter(|(_, v)| v.is_empty()).map(|(k, _)| *k).collect();
    suite.run(manifest_name, &["cli::run_verify"], 0.0, |_| {
        measured(
            uncovered.len() as f64,
            if uncovered.is_empty() {
                format!("all {} operations exercised", OPERATIONS.len())
            } else {
                format!("not exercised: {}", uncovered.join(", "))
            },
        )
    });

    let count = |st: Status| suite.checks.iter().filter(|c| c.status == st).count();
    let summary = Summary { passed: count(Status::Pass), failed: count(Status::Fail), documented: count(Status::Documented) };
    let status = if summary.failed == 0 { Status::Pass } else { Status::Fail };
    VerifyReport { config: cfg.clone(), checks: suite.checks, coverage, summary, status }
}
