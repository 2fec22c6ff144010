mod common;

use common::{perturb, random_knot};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use vkinv_core::algebra::{GradedPolynomial, Substitution};
use vkinv_core::genus::{genus_bound_from_akh, genus_bound_from_arrow, genus_bound_from_parity, CoefficientRegistry};
use vkinv_core::homology::{self, build_cube, dims_to_poincare, rank_homology, reduce_complex, Flavor, DEFAULT_MAX_CROSSINGS};
use vkinv_core::homology::HomologyError;
use vkinv_core::knotio::{carrier_genus, parse_any, serialize_pd, PlanarDiagram};
use vkinv_core::skein::{normalized_arrow, normalized_bracket, parity_arrow, parity_bracket};

const FLAVORS: [Flavor; 3] = [Flavor::Khovanov, Flavor::ArrowFull, Flavor::ArrowSimple];

fn knot(seed: u64, n: usize) -> PlanarDiagram {
    random_knot(&mut StdRng::seed_from_u64(seed), n)
}

// The mg/vg projection occasionally leaves a lone two-step path, so arrow_full
// homology is only defined on some diagrams.
fn akh_defined(d: &PlanarDiagram) -> bool {
    build_cube(d, Flavor::ArrowFull, DEFAULT_MAX_CROSSINGS).unwrap().check_square_zero().is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn differential_squares_to_zero(seed in any::<u64>(), n in 1usize..=5) {
        let d = knot(seed, n);
        for f in [Flavor::Khovanov, Flavor::ArrowSimple] {
            let c = build_cube(&d, f, DEFAULT_MAX_CROSSINGS).unwrap();
            prop_assert!(c.check_square_zero().is_ok(), "{} {}", f.name(), serialize_pd(&d));
        }
        if !akh_defined(&d) {
            let refused = matches!(homology::akh(&d), Err(HomologyError::NotSquareZero { .. }));
            prop_assert!(refused, "{}", serialize_pd(&d));
        }
    }

    #[test]
    fn reduction_agrees_with_rank(seed in any::<u64>(), n in 1usize..=5) {
        let d = knot(seed, n);
        for f in FLAVORS {
            let c = build_cube(&d, f, DEFAULT_MAX_CROSSINGS).unwrap();
            if c.check_square_zero().is_err() {
                continue;
            }
            let reduced = c.poincare_of(reduce_complex(&c).unwrap().into_iter());
            prop_assert_eq!(reduced, dims_to_poincare(&rank_homology(&c)), "{} {}", f.name(), serialize_pd(&d));
        }
    }

    #[test]
    fn euler_characteristic_is_the_q_bracket(seed in any::<u64>(), n in 1usize..=5) {
        let d = knot(seed, n);
        prop_assert_eq!(homology::euler_characteristic(&homology::kh(&d).unwrap()), homology::q_bracket(&d, false));
        prop_assume!(akh_defined(&d));
        let akh = homology::euler_characteristic(&homology::akh(&d).unwrap()).specialize(&Substitution::VgToOne);
        prop_assert_eq!(akh, homology::q_bracket(&d, true));
    }

    #[test]
    fn pd_text_round_trips(seed in any::<u64>(), n in 1usize..=6) {
        let d = knot(seed, n);
        let back = parse_any(&serialize_pd(&d)).unwrap();
        prop_assert_eq!(normalized_arrow(&back), normalized_arrow(&d));
        prop_assert_eq!(serialize_pd(&back), serialize_pd(&d));
    }

    #[test]
    fn polynomial_text_and_json_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let d = knot(seed, n);
        prop_assume!(akh_defined(&d));
        for poly in [parity_arrow(&d), homology::akh(&d).unwrap()] {
            prop_assert_eq!(&GradedPolynomial::parse(&poly.to_text()).unwrap().with_context(poly.context()), &poly);
            let json = serde_json::to_string(&poly.to_json_terms()).unwrap();
            let terms: Vec<vkinv_core::algebra::JsonTerm> = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&GradedPolynomial::from_json_terms(&terms, poly.context()).unwrap(), &poly);
        }
    }

    #[test]
    fn genus_bounds_never_exceed_the_carrier_surface(seed in any::<u64>(), n in 1usize..=6) {
        let d = knot(seed, n);
        let g = carrier_genus(&d);
        let registry = CoefficientRegistry::builtin();
        prop_assert!(genus_bound_from_arrow(&normalized_arrow(&d)) <= g);
        prop_assert!(genus_bound_from_parity(&parity_bracket(&d), &registry) <= g);
        prop_assert!(genus_bound_from_parity(&parity_arrow(&d), &registry) <= g);
        if n <= 5 {
            if let Ok(akh) = homology::akh(&d) {
                prop_assert!(genus_bound_from_akh(&akh) <= g);
            }
        }
    }

    #[test]
    fn single_moves_preserve_brackets(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_knot(&mut rng, n);
        let (e, what) = perturb(&mut rng, &d);
        prop_assert_eq!(normalized_bracket(&e), normalized_bracket(&d), "{}", what);
        prop_assert_eq!(normalized_arrow(&e), normalized_arrow(&d), "{}", what);
        prop_assert_eq!(parity_arrow(&e), parity_arrow(&d), "{}", what);
    }
}
