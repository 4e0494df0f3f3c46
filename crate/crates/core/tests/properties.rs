use std::f64::consts::FRAC_PI_2;

use extmod::elliptic::{self, EllipticModulusPair};
use extmod::harness::verify::random_convex_quad;
use extmod::modulus::{interior_modulus, GridOptions, MarkedPolygon, Orientation};
use extmod::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn legendre_relation(k in 1e-6f64..0.999999) {
        let m = EllipticModulusPair::new(k).unwrap();
        let r = m.complete_e() * m.complete_k_prime() + m.complete_e_prime() * m.complete_k()
            - m.complete_k() * m.complete_k_prime();
        prop_assert!((r - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn incomplete_integrals_are_monotone(k in 0.01f64..0.99, x in 0.0f64..0.99) {
        let (f0, f1) = (elliptic::incomplete_f(x, k).unwrap(), elliptic::incomplete_f(x + 0.01, k).unwrap());
        let (e0, e1) = (elliptic::incomplete_e(x, k).unwrap(), elliptic::incomplete_e(x + 0.01, k).unwrap());
        prop_assert!(f1 > f0 && e1 > e0 && f0 >= e0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // Mod(a Q + b) = Mod(Q), with the grid spacing scaled along with Q.
    #[test]
    fn similarity_invariance(seed in 0u64..1000, angle in 0.0f64..6.28, scale in 0.3f64..3.0, bx in -5.0f64..5.0, by in -5.0f64..5.0) {
        let v = random_convex_quad(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = MarkedPolygon::new(v.to_vec(), v, Orientation::Interior).unwrap();
        let a = Complex64::from_polar(scale, angle);
        let q = p.map_similarity(a, Complex64::new(bx, by)).unwrap();
        let e = interior_modulus(&p, &GridOptions::with_h(0.05)).unwrap();
        let f = interior_modulus(&q, &GridOptions::with_h(0.05 * scale)).unwrap();
        prop_assert!((e.value - f.value).abs() <= e.error + f.error + 1e-3 * e.value, "{} vs {}", e.value, f.value);
    }
}
