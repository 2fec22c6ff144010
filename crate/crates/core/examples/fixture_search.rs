//! Finds Gauss codes whose invariants match values printed for named table
//! knots, so that fixtures can be pinned without transcribing figures.
//!
//!     cargo run --release -p vkinv-core --example fixture_search -- 4
//!
//! Every single-component Gauss code with the given crossing count is tried
//! (crossings numbered by first appearance) and matches are printed per target.

use std::collections::BTreeMap;

use rayon::prelude::*;
use vkinv_core::algebra::{GradedPolynomial, Monomial};
use vkinv_core::homology::{akh, euler_characteristic, kh, parity_kh, q_bracket};
use vkinv_core::knotio::{gauss_to_pd, GaussCode, GaussEntry, Pass, PlanarDiagram, Sign};
use vkinv_core::skein::{node_count, normalized_arrow, normalized_bracket, parity_arrow, parity_bracket};

fn p(s: &str) -> GradedPolynomial {
    GradedPolynomial::parse(s).unwrap()
}

/// Graphical ids replaced by their node counts, `G2`, `G4`, ...
fn blur(poly: &GradedPolynomial) -> GradedPolynomial {
    poly.map_monomials(|m| {
        let graphical = m
            .graphical
            .iter()
            .map(|g| match g.strip_prefix('D').and_then(|r| r.split('[').next()).and_then(|n| n.parse::<usize>().ok()) {
                Some(n) => format!("G{n}"),
                None => format!("G{}", node_count(g)),
            })
            .collect();
        GradedPolynomial::term(Monomial { graphical, ..m.clone() }, 1)
    })
}

/// Arrow polynomial with every loop worth `d` except one, the other common
/// normalization in the literature.
fn arrow_per_loop(d: &PlanarDiagram) -> Option<GradedPolynomial> {
    let a = normalized_arrow(d);
    let loop_value = GradedPolynomial::loop_value();
    let mut groups: BTreeMap<Vec<u32>, GradedPolynomial> = BTreeMap::new();
    for (m, c) in a.terms() {
        let t = GradedPolynomial::term(Monomial::a_pow(m.a), c.clone());
        let t = &t * &loop_value.pow(m.arrow.len() as u32);
        let g = groups.entry(m.arrow.clone()).or_default();
        *g = &*g + &t;
    }
    let mut out = GradedPolynomial::zero();
    for (arrow, poly) in groups {
        let q = vkinv_core::skein::divide_by_loop(&poly)?;
        out = &out + &q.mul_monomial(&Monomial { arrow, ..Monomial::default() });
    }
    Some(out)
}

fn sequences(n: usize) -> Vec<Vec<u32>> {
    fn go(seq: &mut Vec<u32>, count: &mut Vec<u8>, next: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if seq.len() == 2 * n {
            out.push(seq.clone());
            return;
        }
        for id in 1..next {
            if count[id as usize] == 1 {
                count[id as usize] = 2;
                seq.push(id);
                go(seq, count, next, n, out);
                seq.pop();
                count[id as usize] = 1;
            }
        }
        if (next as usize) <= n {
            count[next as usize] = 1;
            seq.push(next);
            go(seq, count, next + 1, n, out);
            seq.pop();
            count[next as usize] = 0;
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![0; n + 1], 1, n, &mut out);
    out
}

fn codes(n: usize) -> Vec<GaussCode> {
    let mut out = Vec::new();
    for seq in sequences(n) {
        for over in 0..1u32 << n {
            for signs in 0..1u32 << n {
                let mut seen = vec![false; n + 1];
                let entries = seq
                    .iter()
                    .map(|&id| {
                        let b = id - 1;
                        let first = !seen[id as usize];
                        seen[id as usize] = true;
                        let o = (over >> b & 1 == 1) == first;
                        let sign = if signs >> b & 1 == 1 { Sign::Neg } else { Sign::Pos };
                        GaussEntry { pass: if o { Pass::Over } else { Pass::Under }, id, sign }
                    })
                    .collect();
                out.push(GaussCode { components: vec![entries] });
            }
        }
    }
    out
}

struct Target {
    name: &'static str,
    crossings: usize,
    test: Box<dyn Fn(&PlanarDiagram) -> bool + Sync>,
}

fn main() {
    let only: Option<usize> = std::env::args().nth(1).map(|a| a.parse().unwrap());
    let kh21 = p("(q^6 + q^4)t^2 + (q^4 + q^2) t + q^3 + q");
    let br21 = &p("A^4 + A^6 - A^10") * &GradedPolynomial::loop_value();
    let pkh49 = p("1/(q^6 t^2)+1/(q^4 t^2)+1/(q^4 t)+1/q^3+1/(q^2 t)+1/q");
    let kh49 = p("1/(q^9 t^3)+1/(q^8 t^2)+1/(q^7 t^3)+1/(q^7 t^2)+1/(q^6 t^2)+1/(q^6 t)+1/(q^5 t^2)+1/q^5+1/(q^4 t)+1/q^3");
    let pb472 = p("-A^4-A^2+D_2[1]-2-1/A^2-1/A^4");
    let pa470 = p("D_2[3] A^8+2 K_1 A^6-A^6-A^2");
    let ar55 = p("A^10 K1^2-A^10 K1-3 A^6 K1^2+3 A^6 K1+A^6-1/A^6-2 A^4 K2-3 A^2 K1+K1/A^2+2 A^2");
    let pa55 = p("-A^4 D_4[1] -A^6-2 A^2-1/A^2");
    let kh5 = p("1/(q^5 t^2)+1/(q^3 t^2)+1/(q^3 t)+q^2 t+1/q^2+1/(q t)+q+1/q+t+1");
    let ap5 = p("-A^10+A^6-A^4 K2-2 A^2 K1^2-A^2 K1+K1/A^2+2 A^2-K2");
    let akh_common = "vg(2,1) K[2]/(q^3 t)+2 vg(1,2) K[1]/q^3+q^2 t vg(1,-1) K[1]+vg(1,1) K[1]/q^2 \
        +q t vg(2,-1) K[2]+vg(2,-1) K[2]/(q t)+t vg(2,1) K[2]/q+2 q vg(1,-2) K[1]+t vg(1,1) K[1]+vg(1,-1) K[1]+4 K[1]/q \
        +1/(q^5 t^2)+1/(q^3 t^2)+2/(q^3 t)+2/(q t)";
    let akh129 = p(&format!("{akh_common}+q t+t/q+q+1/q"));
    let akh267 = p(akh_common);

    let chi5 = euler_characteristic(&kh5);
    let chi49 = euler_characteristic(&kh49);
    let chi21 = euler_characteristic(&kh21);
    let arrow_matches = |d: &PlanarDiagram, target: &GradedPolynomial| {
        normalized_arrow(d).eq_up_to_mirror(target) || arrow_per_loop(d).is_some_and(|a| a.eq_up_to_mirror(target))
    };
    let targets = [
        Target {
            name: "2.1",
            crossings: 2,
            test: Box::new(move |d| {
                q_bracket(d, false).eq_up_to_mirror(&chi21)
                    && normalized_bracket(d).eq_up_to_mirror(&br21)
                    && kh(d).unwrap().eq_up_to_mirror(&kh21)
            }),
        },
        Target {
            name: "4.9",
            crossings: 4,
            test: Box::new(move |d| {
                q_bracket(d, false).eq_up_to_mirror(&chi49)
                    && kh(d).unwrap().eq_up_to_mirror(&kh49)
                    && parity_kh(d, 1).unwrap().eq_up_to_mirror(&pkh49)
            }),
        },
        Target {
            name: "4.72",
            crossings: 4,
            test: Box::new(move |d| {
                normalized_arrow(d) == normalized_arrow(&PlanarDiagram::unknot())
                    && blur(&parity_bracket(d)).eq_up_to_mirror(&blur(&pb472))
            }),
        },
        Target { name: "4.70", crossings: 4, test: Box::new(move |d| blur(&parity_arrow(d)).eq_up_to_mirror(&blur(&pa470))) },
        Target {
            name: "5.5",
            crossings: 5,
            test: Box::new(move |d| blur(&parity_arrow(d)).eq_up_to_mirror(&blur(&pa55)) && arrow_matches(d, &ar55)),
        },
        Target {
            name: "5.129",
            crossings: 5,
            test: Box::new({
                let (chi5, ap5, kh5) = (chi5.clone(), ap5.clone(), kh5.clone());
                move |d| {
                    q_bracket(d, false).eq_up_to_mirror(&chi5)
                        && arrow_matches(d, &ap5)
                        && kh(d).unwrap().eq_up_to_mirror(&kh5)
                        && akh(d).unwrap().eq_up_to_mirror(&akh129)
                }
            }),
        },
        Target {
            name: "5.267",
            crossings: 5,
            test: Box::new(move |d| {
                q_bracket(d, false).eq_up_to_mirror(&chi5)
                    && arrow_matches(d, &ap5)
                    && kh(d).unwrap().eq_up_to_mirror(&kh5)
                    && akh(d).unwrap().eq_up_to_mirror(&akh267)
            }),
        },
    ];
    for n in [2, 4, 5] {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let all = codes(n);
        eprintln!("{n} crossings: {} codes", all.len());
        for t in targets.iter().filter(|t| t.crossings == n) {
            let hits: Vec<String> = all
                .par_iter()
                .filter_map(|g| {
                    let d = gauss_to_pd(g).ok()?;
                    (t.test)(&d).then(|| g.to_string())
                })
                .collect();
            println!("{}\t{} hits", t.name, hits.len());
            for h in hits.iter().take(8) {
                println!("  {h}");
            }
        }
    }
}
