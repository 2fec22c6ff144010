#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use vkinv_core::algebra::GradedPolynomial;
use vkinv_core::knotio::{gauss_to_pd, insert_r1, insert_r2, parse_any, GaussCode, GaussEntry, Pass, PlanarDiagram, Sign};

pub const FIXTURES: &str = include_str!("../../../../fixtures/knots.tsv");

pub fn fixtures() -> Vec<(String, PlanarDiagram)> {
    FIXTURES
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, dia) = l.split_once('\t').unwrap();
            (name.to_string(), parse_any(dia).unwrap_or_else(|e| panic!("{name}: {e}")))
        })
        .collect()
}

pub fn fixture(name: &str) -> PlanarDiagram {
    fixtures().into_iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no fixture {name}")).1
}

pub fn p(s: &str) -> GradedPolynomial {
    GradedPolynomial::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// A uniformly shuffled single-component Gauss code.
pub fn random_knot(rng: &mut StdRng, n: usize) -> PlanarDiagram {
    let mut ids: Vec<u32> = (1..=n as u32).flat_map(|i| [i, i]).collect();
    ids.shuffle(rng);
    let over_first: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let signs: Vec<Sign> = (0..n).map(|_| if rng.gen() { Sign::Pos } else { Sign::Neg }).collect();
    let mut seen = vec![false; n + 1];
    let entries = ids
        .iter()
        .map(|&id| {
            let first = !seen[id as usize];
            seen[id as usize] = true;
            let over = over_first[id as usize - 1] == first;
            GaussEntry { pass: if over { Pass::Over } else { Pass::Under }, id, sign: signs[id as usize - 1] }
        })
        .collect();
    gauss_to_pd(&GaussCode { components: vec![entries] }).unwrap()
}

/// One random Reidemeister I or II insertion.
pub fn perturb(rng: &mut StdRng, d: &PlanarDiagram) -> (PlanarDiagram, String) {
    let refs = d.arc_refs();
    let sign = if rng.gen() { Sign::Pos } else { Sign::Neg };
    let flag: bool = rng.gen();
    let a = *refs.choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        (insert_r1(d, a, sign, flag).unwrap(), format!("r1 {a:?} {sign:?} {flag}"))
    } else {
        let b = *refs.choose(rng).unwrap();
        (insert_r2(d, a, b, sign, flag).unwrap(), format!("r2 {a:?} {b:?} {sign:?} {flag}"))
    }
}
