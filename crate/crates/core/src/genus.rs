//! Lower bounds on the genus of a surface carrying a virtual knot.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::GradedPolynomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("alias {0} is used twice")]
    DuplicateAlias(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistryEntry {
    pub alias: String,
    pub genus: u32,
}

/// Known genera of graphical coefficients, keyed by canonical code.
/// A key may also be a product of codes joined by ` * `, in sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoefficientRegistry {
    entries: BTreeMap<String, RegistryEntry>,
}

impl CoefficientRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `code <TAB> alias <TAB> genus` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut r = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [code, alias, genus] = fields[..] else {
                return Err(RegistryError::Format { line: n + 1, msg: format!("expected 3 tab-separated fields, got {}", fields.len()) });
            };
            let genus = genus.parse().map_err(|_| RegistryError::Format { line: n + 1, msg: format!("bad genus {genus:?}") })?;
            r.insert(code, alias, genus)?;
        }
        Ok(r)
    }

    /// Entries shipped with the library.
    pub fn builtin() -> Self {
        Self::parse(include_str!("../data/registry.tsv")).expect("built-in registry parses")
    }

    /// Add every entry of `other`, which wins on conflicting codes.
    pub fn merge(&mut self, other: CoefficientRegistry) -> Result<(), RegistryError> {
        for (code, e) in other.entries {
            self.entries.remove(&code);
            self.insert(&code, &e.alias, e.genus)?;
        }
        Ok(())
    }

    pub fn insert(&mut self, code: &str, alias: &str, genus: u32) -> Result<(), RegistryError> {
        if self.entries.iter().any(|(c, e)| e.alias == alias && c != code) {
            return Err(RegistryError::DuplicateAlias(alias.to_string()));
        }
        self.entries.insert(code.to_string(), RegistryEntry { alias: alias.to_string(), genus });
        Ok(())
    }

    pub fn get(&self, code: &str) -> Option<&RegistryEntry> {
        self.entries.get(code)
    }

    pub fn code_for_alias(&self, alias: &str) -> Option<&str> {
        self.entries.iter().find(|(_, e)| e.alias == alias).map(|(c, _)| c.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(c, e)| format!("{c}\t{}\t{}\n", e.alias, e.genus)).collect()
    }

    /// Genus of a product of coefficients: the product's own entry if there
    /// is one, else the largest factor. Unknown factors count as 0.
    pub fn product_genus(&self, factors: &[String]) -> u32 {
        if factors.is_empty() {
            return 0;
        }
        let mut sorted = factors.to_vec();
        sorted.sort();
        if let Some(e) = self.get(&sorted.join(" * ")) {
            return e.genus;
        }
        sorted
            .iter()
            .map(|f| match self.get(f) {
                Some(e) => e.genus,
                None => {
                    log::warn!("no registry entry for graphical coefficient D{{{f}}}");
                    0
                }
            })
            .max()
            .unwrap()
    }

    /// Replace every registered `D{code}` by its alias, for display.
    pub fn alias_polynomial(&self, p: &GradedPolynomial) -> GradedPolynomial {
        p.map_monomials(|m| {
            let graphical = m.graphical.iter().map(|g| self.get(g).map_or_else(|| g.clone(), |e| e.alias.clone())).collect();
            GradedPolynomial::term(crate::algebra::Monomial { graphical, ..m.clone() }, 1)
        })
    }
}

/// `0, 1, 2` for `n = 0, 1, 2`, then the least `g >= 2` with `3g - 3 >= n`.
pub fn bound_schedule(n: usize) -> u32 {
    match n {
        0..=2 => n as u32,
        _ => n.div_ceil(3) as u32 + 1,
    }
}

fn max_distinct_arrows(p: &GradedPolynomial) -> usize {
    p.terms().map(|(m, _)| m.distinct_arrows()).max().unwrap_or(0)
}

pub fn genus_bound_from_arrow(p: &GradedPolynomial) -> u32 {
    bound_schedule(max_distinct_arrows(p))
}

pub fn genus_bound_from_akh(p: &GradedPolynomial) -> u32 {
    bound_schedule(max_distinct_arrows(p))
}

pub fn genus_bound_from_parity(p: &GradedPolynomial, r: &CoefficientRegistry) -> u32 {
    p.terms().map(|(m, _)| r.product_genus(&m.graphical)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> GradedPolynomial {
        GradedPolynomial::parse(s).unwrap()
    }

    #[test]
    fn schedule() {
        let got: Vec<u32> = (0..10).map(bound_schedule).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 4, 4, 4]);
        for n in 3..40 {
            let g = bound_schedule(n) as usize;
            assert!(g >= 2 && 3 * g - 3 >= n && (g == 2 || 3 * (g - 1) - 3 < n));
        }
    }

    #[test]
    fn arrow_bounds() {
        assert_eq!(genus_bound_from_arrow(&p("-K[2] A^-4 - K[1]^2 A^-2")), 1);
        assert_eq!(genus_bound_from_arrow(&p("K1 K2 A^2 + 1")), 2);
        assert_eq!(genus_bound_from_arrow(&p("A^2 + A^-2")), 0);
        assert_eq!(genus_bound_from_arrow(&p("K1 K2 K3 K4")), 3);
        assert_eq!(genus_bound_from_akh(&p("K1 K2 K3 q")), 2);
        assert_eq!(genus_bound_from_akh(&p("q + q^-1")), 0);
    }

    #[test]
    fn registry_round_trip_and_products() {
        let text = "# comment\n1.0,1.1,1.2,1.3|0.0,0.1,0.2,0.3\tD2[1]\t1\nx|y\tD4[1]\t2\n";
        let r = CoefficientRegistry::parse(text).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(CoefficientRegistry::parse(&r.to_text()).unwrap(), r);
        assert_eq!(r.code_for_alias("D4[1]"), Some("x|y"));
        let poly = p("A^2 - D{1.0,1.1,1.2,1.3|0.0,0.1,0.2,0.3} A^2");
        assert_eq!(genus_bound_from_parity(&poly, &r), 1);
        assert_eq!(r.product_genus(&["x|y".into(), "1.0,1.1,1.2,1.3|0.0,0.1,0.2,0.3".into()]), 2);
        assert_eq!(r.product_genus(&["unknown".into()]), 0);
        assert_eq!(genus_bound_from_parity(&p("A^2 + 1"), &r), 0);
        assert_eq!(r.alias_polynomial(&poly).to_text(), p("A^2 - D2[1] A^2").to_text());
    }

    #[test]
    fn registry_errors() {
        assert!(matches!(CoefficientRegistry::parse("a\tb"), Err(RegistryError::Format { line: 1, .. })));
        assert!(matches!(CoefficientRegistry::parse("a\tD\t1\nb\tD\t2"), Err(RegistryError::DuplicateAlias(_))));
    }
}
