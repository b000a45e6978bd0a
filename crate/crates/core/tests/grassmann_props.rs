use emergence_core::vacuum::FieldOperatorRep;
use emergence_core::{
    state_norm, Algebra, BerezinConvention, Complex64, CovarianceMatrix, GeneratorIndex,
    GrassmannElement,
};
use proptest::prelude::*;

fn generators(alg: &Algebra) -> Vec<GeneratorIndex> {
    let n = alg.modes();
    (0..n)
        .map(GeneratorIndex::conj)
        .chain((0..n).map(GeneratorIndex::plain))
        .collect()
}

/// Builds `Σ c · (monomial with bitmask key)` from raw `(key, re, im)` triples.
fn element(alg: &Algebra, terms: &[(u64, f64, f64)]) -> GrassmannElement {
    let gens = generators(alg);
    let mut out = alg.zero();
    for &(key, re, im) in terms {
        let picked: Vec<GeneratorIndex> = gens
            .iter()
            .enumerate()
            .filter(|(b, _)| (key >> b) & 1 == 1)
            .map(|(_, &g)| g)
            .collect();
        out = &out + &alg.monomial(&picked, Complex64::new(re, im)).unwrap();
    }
    out
}

/// `(monomial key, re, im)` triples
type Terms = Vec<(u64, f64, f64)>;

fn terms_for(n: usize) -> impl Strategy<Value = Terms> {
    let keys = 1u64 << (2 * n);
    prop::collection::vec((0..keys, -1.0..1.0f64, -1.0..1.0f64), 0..8)
}

fn algebra_and_elements(count: usize) -> impl Strategy<Value = (usize, Vec<Terms>)> {
    (1usize..=3).prop_flat_map(move |n| (Just(n), prop::collection::vec(terms_for(n), count)))
}

fn omega(n: usize) -> impl Strategy<Value = CovarianceMatrix> {
    prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64), n * n).prop_map(move |v| {
        CovarianceMatrix::from_fn(n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1))
    })
}

proptest! {
    #[test]
    fn generators_anticommute(n in 1usize..=3) {
        let alg = Algebra::new(n).unwrap();
        let gens = generators(&alg);
        for &g in &gens {
            let eg = alg.generator(g).unwrap();
            prop_assert!(eg.multiply(&eg).unwrap().is_zero());
            for &h in &gens {
                if g != h {
                    let eh = alg.generator(h).unwrap();
                    let gh = eg.multiply(&eh).unwrap();
                    let hg = eh.multiply(&eg).unwrap();
                    prop_assert_eq!(gh, -&hg);
                }
            }
        }
    }

    #[test]
    fn product_is_associative_and_distributive((n, raw) in algebra_and_elements(3)) {
        let alg = Algebra::new(n).unwrap();
        let [a, b, c] = [0, 1, 2].map(|i| element(&alg, &raw[i]));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert!(left.distance(&right) < 1e-12);

        let lhs = a.multiply(&(&b + &c)).unwrap();
        let rhs = &a.multiply(&b).unwrap() + &a.multiply(&c).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12);
        let lhs = (&b + &c).multiply(&a).unwrap();
        let rhs = &b.multiply(&a).unwrap() + &c.multiply(&a).unwrap();
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn exp_of_even_nilpotent_is_invertible((n, raw) in algebra_and_elements(1)) {
        let alg = Algebra::new(n).unwrap();
        // keep the even monomials of degree ≥ 2
        let even: Vec<_> = raw[0]
            .iter()
            .copied()
            .filter(|(k, _, _)| k.count_ones() >= 2 && k.count_ones() % 2 == 0)
            .collect();
        let a = element(&alg, &even);
        let prod = a.exp().multiply(&(-&a).exp()).unwrap();
        prop_assert!(prod.distance(&alg.one()) < 1e-12);
    }

    #[test]
    fn derivative_and_multiplication_anticommute((n, raw) in algebra_and_elements(1)) {
        let alg = Algebra::new(n).unwrap();
        let f = element(&alg, &raw[0]);
        for g in generators(&alg) {
            let eg = alg.generator(g).unwrap();
            let a = eg.multiply(&f).unwrap().left_derivative(g).unwrap();
            let b = eg.multiply(&f.left_derivative(g).unwrap()).unwrap();
            prop_assert!((&a + &b).distance(&f) < 1e-12);
            for h in generators(&alg).into_iter().filter(|&h| h != g) {
                let a = eg.multiply(&f).unwrap().left_derivative(h).unwrap();
                let b = eg.multiply(&f.left_derivative(h).unwrap()).unwrap();
                prop_assert!((&a + &b).max_coefficient() < 1e-12);
            }
        }
    }

    #[test]
    fn field_anticommutator_on_random_states(raw in terms_for(2)) {
        let alg = Algebra::new(2).unwrap();
        let f = element(&alg, &raw);
        let ops = FieldOperatorRep::new(alg);
        for n in 0..2 {
            for m in 0..2 {
                let out = ops.anticommutator(n, m, &f).unwrap();
                let expected = if n == m { f.clone() } else { alg.zero() };
                prop_assert!(out.distance(&expected) < 1e-12);
            }
        }
    }

    #[test]
    fn norm_formula_matches_berezin_integral(
        om in (1usize..=3).prop_flat_map(omega),
        blocked in any::<bool>(),
    ) {
        let conv = if blocked { BerezinConvention::Blocked } else { BerezinConvention::Paired };
        let check = state_norm(&om, conv).unwrap();
        prop_assert!(check.relative_error() < 1e-10);
        prop_assert!(check.brute_force.im.abs() < 1e-10 * check.formula);
    }

    #[test]
    fn gaussian_integral_sign_matches_convention(
        om in (1usize..=3).prop_flat_map(omega),
        blocked in any::<bool>(),
    ) {
        let conv = if blocked { BerezinConvention::Blocked } else { BerezinConvention::Paired };
        let n = om.dim();
        let alg = Algebra::with_convention(n, conv).unwrap();
        let integral = alg.quadratic_form(&om).unwrap().exp().integrate_all().unwrap().scalar_part();
        let expected = (-om.0.clone()).determinant() * conv.gaussian_sign(n);
        prop_assert!((integral - expected).norm() < 1e-10 * expected.norm().max(1.0));
    }
}

#[test]
fn field_anticommutator_on_every_monomial() {
    let alg = Algebra::new(2).unwrap();
    let ops = FieldOperatorRep::new(alg);
    for key in 0..16u64 {
        let f = element(&alg, &[(key, 1.0, 0.0)]);
        for n in 0..2 {
            for m in 0..2 {
                let out = ops.anticommutator(n, m, &f).unwrap();
                let expected = if n == m { f.clone() } else { alg.zero() };
                assert_eq!(out, expected, "monomial {key:04b}, n={n}, m={m}");
            }
        }
    }
}
