//! End-to-end acceptance suite. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use emergence_core::dynamics::convergence_orders;
use emergence_core::synth::sinc;
use emergence_core::vacuum::{bosonize_element, FieldOperatorRep};
use emergence_core::{
    annihilation_check, boost_profile, boost_spinor, bosonize, build_vacuum, create_excitation,
    lattice_shell_sum, rest_spinor, shell_average, state_norm, vacuum_energy, verify_closed_form,
    Algebra, BerezinConvention, BoostParams, BoostVariant, BoostedFrame, Complex64,
    CovarianceMatrix, DiracSpinor, GeneratorIndex, GuidanceOde, ModeBasis, ModeVariable,
    ProfileModel, ProfileVariant, ResidualRegion, ShellSpec, SignConvention, SpacetimePoint,
    SpinorMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// name, time budget, check
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn kernel_expansion() -> Outcome {
    // mode 0 carries η, mode 1 carries η′
    let alg = Algebra::new(2).map_err(|e| e.to_string())?;
    let (d0, p0) = (GeneratorIndex::conj(0), GeneratorIndex::plain(0));
    let (d1, p1) = (GeneratorIndex::conj(1), GeneratorIndex::plain(1));
    let m = |g: &[GeneratorIndex], v: f64| alg.monomial(g, c(v)).unwrap();
    let exponent = &m(&[d0, p1], 1.0) - &m(&[d1, p0], 1.0);
    let lhs = exponent.exp();
    let rhs = &(&(&alg.one() + &m(&[d0, p1], 1.0)) - &m(&[d1, p0], 1.0)) + &m(&[d0, p0, d1, p1], 1.0);
    ensure(lhs == rhs, format!("expansion\n{}\nexpected\n{}", lhs.debug_dump(), rhs.debug_dump()))?;
    Ok(format!("{} terms, exact", lhs.len()))
}

fn gaussian_norms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=3 {
        for _ in 0..20 {
            let om = CovarianceMatrix::from_fn(n, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let mut gram = om.0.adjoint() * &om.0;
            for i in 0..n {
                gram[(i, i)] += c(1.0);
            }
            let oracle = gram.determinant();
            let check = state_norm(&om, BerezinConvention::default()).map_err(|e| e.to_string())?;
            let rel = (check.brute_force - oracle).norm() / oracle.norm();
            worst = worst.max(rel);
            count += 1;
        }
    }
    ensure(worst < 1e-10, format!("worst relative error {worst:e}"))?;
    Ok(format!("{count} matrices, worst relative error {worst:.2e} < 1e-10"))
}

fn operator_algebra() -> Outcome {
    let alg = Algebra::new(2).map_err(|e| e.to_string())?;
    let ops = FieldOperatorRep::new(alg);
    let gens = [
        GeneratorIndex::conj(0),
        GeneratorIndex::conj(1),
        GeneratorIndex::plain(0),
        GeneratorIndex::plain(1),
    ];
    let mut checked = 0;
    for key in 0..16u32 {
        let picked: Vec<GeneratorIndex> = (0..4).filter(|b| (key >> b) & 1 == 1).map(|b| gens[b]).collect();
        let f = alg.monomial(&picked, c(1.0)).unwrap();
        for n in 0..2 {
            for m in 0..2 {
                let out = ops.anticommutator(n, m, &f).map_err(|e| e.to_string())?;
                let expected = if n == m { f.clone() } else { alg.zero() };
                ensure(out == expected, format!("monomial {key:04b}, n={n}, m={m}: {}", out.debug_dump()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("16 monomials x 4 index pairs = {checked} identities, exact"))
}

fn vacuum_selection() -> Outcome {
    let basis = ModeBasis::new(60.0, 1.0)
        .and_then(|b| b.with_momentum([0, 0, 0]))
        .and_then(|b| b.with_momentum([1, -1, 2]))
        .map_err(|e| e.to_string())?;
    let vac = build_vacuum(&basis, &basis.covariance(SignConvention::EnergyConsistent))
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for mode in 0..basis.len() {
        let check = annihilation_check(&vac, mode).map_err(|e| e.to_string())?;
        worst = worst.max(check.residual);
    }
    ensure(worst < 1e-12, format!("annihilator residual {worst:e}"))?;
    let sea = -0.5 * (0..basis.len()).map(|i| basis.energy(i).abs()).sum::<f64>();
    let e = vacuum_energy(&basis).map_err(|e| e.to_string())?;
    let gap = (e.trace - sea).abs().max((vac.ground_energy - sea).abs());
    ensure(gap < 1e-10, format!("E0 {sea} vs trace {} / functional {}", e.trace, vac.ground_energy))?;
    Ok(format!(
        "{} modes, annihilator residual {worst:.1e}, E0 = {sea:.12}, trace gap {gap:.1e}",
        basis.len()
    ))
}

fn trajectory_closed_form() -> Outcome {
    let horizon = 20.0 * PI;
    let check = verify_closed_form(1.0, horizon, 1e-3).map_err(|e| e.to_string())?;
    ensure(check.max_error < 1e-8, format!("max error {:e}", check.max_error))?;
    let orders = convergence_orders(1.0, horizon, 0.02, 3).map_err(|e| e.to_string())?;
    for &(dt, p) in &orders {
        ensure((p - 4.0).abs() <= 0.2, format!("order {p} at dt {dt}"))?;
    }
    let shown: Vec<String> = orders.iter().map(|(_, p)| format!("{p:.3}")).collect();
    Ok(format!("max error {:.2e} < 1e-8, orders [{}]", check.max_error, shown.join(", ")))
}

fn shell_to_sinc() -> Outcome {
    let dirs = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.48, 0.6, 0.64], [-0.36, 0.48, -0.8]];
    let mut worst: f64 = 0.0;
    for mu in [0.5, 1.0, 2.0] {
        for i in 0..=400 {
            let r = 20.0 / mu * i as f64 / 400.0;
            for d in dirs {
                let got = shell_average(mu, d.map(|x| x * r), 32).map_err(|e| e.to_string())?;
                worst = worst.max((got - sinc(mu * r)).abs());
            }
        }
    }
    ensure(worst < 1e-10, format!("quadrature error {worst:e}"))?;
    let side = 60.0;
    let points = [[0.0, 0.0, 1.0], [0.3, 0.5, 0.9], [1.0, 1.0, 1.0], [0.0, 1.5, 0.0], [0.7, -0.2, 0.4], [1.2, 0.0, -1.1]];
    let mut lattice_worst: f64 = 0.0;
    for x in points {
        let s = lattice_shell_sum(1.0, 3.0 / side, side, x).map_err(|e| e.to_string())?;
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        lattice_worst = lattice_worst.max((s.value - c(sinc(r))).norm());
    }
    ensure(lattice_worst < 2e-2, format!("lattice error {lattice_worst:e}"))?;
    Ok(format!("quadrature {worst:.1e} < 1e-10, lattice (L=60) {lattice_worst:.1e} < 2e-2"))
}

fn klein_gordon() -> Outcome {
    let spec = ShellSpec::new(1.0, 60.0).map_err(|e| e.to_string())?;
    let region = ResidualRegion::standard();
    let mut slopes = Vec::new();
    for variant in [ProfileVariant::ExplicitRatio, ProfileVariant::UnitRatio] {
        let model = ProfileModel::rest(spec, variant);
        let report = emergence_core::residual_study(&model, spec.mass, 0.1, 3, &region).map_err(|e| e.to_string())?;
        for &s in &report.pairwise_slopes {
            ensure((s - 2.0).abs() <= 0.1, format!("{variant:?} slope {s}"))?;
            slopes.push(s);
        }
    }
    let wrong = spec.with_omega(spec.mu).map_err(|e| e.to_string())?;
    let control = emergence_core::residual_study(&ProfileModel::rest(wrong, ProfileVariant::UnitRatio), wrong.mass, 0.1, 3, &region)
        .map_err(|e| e.to_string())?;
    let finest = control.levels.last().map(|l| l.max_residual).unwrap_or(0.0);
    ensure(
        control.fitted_slope.abs() < 0.5 && finest > 0.1 * control.amplitude,
        format!("control slope {} residual {finest:e}", control.fitted_slope),
    )?;
    let shown: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    Ok(format!(
        "slopes [{}]; control slope {:.3}, residual/amplitude {:.2}",
        shown.join(", "),
        control.fitted_slope,
        finest / control.amplitude
    ))
}

/// `cosh(w/2) I + sinh(w/2) α_z` written out by hand.
fn oracle_boost(w: f64) -> SpinorMatrix {
    let (ch, sh) = ((w / 2.0).cosh(), (w / 2.0).sinh());
    SpinorMatrix::new(
        c(ch), c(0.0), c(sh), c(0.0),
        c(0.0), c(ch), c(0.0), c(-sh),
        c(sh), c(0.0), c(ch), c(0.0),
        c(0.0), c(-sh), c(0.0), c(ch),
    )
}

fn boost_consistency() -> Outcome {
    let v = 0.6;
    let params = BoostParams::new(v).map_err(|e| e.to_string())?;
    let column = boost_spinor(&rest_spinor(1), &params);
    let s = 1.125f64.sqrt();
    let expected = DiracSpinor::new(c(s), c(0.0), c(s / 3.0), c(0.0));
    let col_err = (column - expected).norm();
    ensure(col_err < 1e-12, format!("column error {col_err:e}"))?;

    let spec = ShellSpec::new(1.0, 60.0).map_err(|e| e.to_string())?;
    let frame = BoostedFrame::new(v, BoostVariant::Substitution).map_err(|e| e.to_string())?;
    let w = 0.5 * ((1.0 + v) / (1.0 - v)).ln();
    let op = oracle_boost(w);
    let (g, omega) = (w.cosh(), 2f64.sqrt());
    let amp = 1.0 / (2.0 * spec.volume() * omega).sqrt() / (2.0 * PI * PI);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let axis: Vec<f64> = (0..10).map(|i| -2.0 + 4.0 * i as f64 / 9.0).collect();
    let t = 3.0;
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                let zr = g * (z - v * t);
                let tr = g * (t - v * z);
                let r = (x * x + y * y + zr * zr).sqrt();
                let scalar = if tr > 0.0 { amp * r.sin() / r * (omega * tr).sin() } else { 0.0 };
                let want = op * rest_spinor(1) * c(scalar);
                let got = boost_profile(&spec, ProfileVariant::UnitRatio, &frame, SpacetimePoint::new(x, y, z, t));
                worst = worst.max((got - want).norm());
                scale = scale.max(want.norm());
            }
        }
    }
    ensure(worst <= 1e-12 * scale, format!("profile error {worst:e} at scale {scale:e}"))?;
    Ok(format!("column error {col_err:.1e}, profile relative error {:.1e} on 1000 points", worst / scale))
}

fn bosonization_fidelity() -> Outcome {
    let basis = ModeBasis::new(60.0, 1.0)
        .and_then(|b| b.with_momentum([0, 0, 0]))
        .map_err(|e| e.to_string())?;
    let vac = build_vacuum(&basis, &basis.covariance(SignConvention::EnergyConsistent))
        .map_err(|e| e.to_string())?;
    let one = create_excitation(&vac, &basis, 0, 1).map_err(|e| e.to_string())?;
    let mapped = bosonize(&one);
    ensure(mapped.prefactor == one.prefactor, "prefactor changed".into())?;
    ensure(mapped.body.len() == one.body.len(), "term count changed".into())?;
    let n = one.modes();
    for (gens, coeff) in one.body.terms() {
        let mut exps = vec![0u32; 2 * n];
        for g in &gens {
            let slot = if *g == GeneratorIndex::conj(g.mode) { g.mode } else { n + g.mode };
            exps[slot] = 1;
        }
        ensure(mapped.body.coefficient(&exps) == coeff, format!("coefficient of {gens:?} changed"))?;
    }
    ensure(bosonize_element(&one.body) == mapped.body, "state map differs from element map".into())?;

    let mut laws = 0;
    for mode in 0..n {
        for g in [GeneratorIndex::plain(mode), GeneratorIndex::conj(mode)] {
            let before = GuidanceOde::for_mode(ModeVariable::Grassmann(g));
            let after = before.bosonize();
            ensure(after == GuidanceOde::for_mode(ModeVariable::Commuting(g)), format!("law for {g} differs"))?;
            ensure(after.describe() == before.describe().replace('η', "q"), after.describe())?;
            laws += 1;
        }
    }
    Ok(format!("{} coefficients preserved exactly, {laws} guidance laws identical", mapped.body.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("kernel expansion", Duration::from_secs(1), kernel_expansion),
        ("gaussian norm", Duration::from_secs(5), gaussian_norms),
        ("operator algebra", Duration::from_secs(1), operator_algebra),
        ("vacuum selection", Duration::from_secs(5), vacuum_selection),
        ("trajectory closed form", Duration::from_secs(10), trajectory_closed_form),
        ("shell to sinc", Duration::from_secs(30), shell_to_sinc),
        ("klein-gordon residual", Duration::from_secs(60), klein_gordon),
        ("boost consistency", Duration::from_secs(30), boost_consistency),
        ("bosonization fidelity", Duration::from_secs(1), bosonization_fidelity),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {elapsed:.2?} > {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
