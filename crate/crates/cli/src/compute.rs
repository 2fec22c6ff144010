use std::collections::BTreeMap;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use vkinv_core::algebra::{Context, GradedPolynomial, JsonTerm};
use vkinv_core::genus::{genus_bound_from_akh, genus_bound_from_arrow, genus_bound_from_parity, CoefficientRegistry};
use vkinv_core::homology::{self, Flavor, HomologyError};
use vkinv_core::knotio::{self, carrier_genus, serialize_pd, PlanarDiagram};
use vkinv_core::skein;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const INVARIANTS: &[&str] = &[
    "bracket",
    "jones",
    "arrow",
    "parity-bracket",
    "parity-arrow",
    "kh",
    "akh",
    "akh-simple",
    "parity-kh",
    "parity-akh",
    "thickness",
    "width",
    "genus-bounds",
    "parity",
    "filtration",
    "carrier-genus",
];

#[derive(Clone, Debug)]
pub struct Options {
    pub parity_level: usize,
    pub max_crossings: usize,
}

impl Options {
    /// The part of the options that can change a result, for cache keys.
    pub fn key(&self, invariant: &str) -> String {
        match invariant {
            "parity-kh" | "parity-akh" => format!("level={};max={}", self.parity_level, self.max_crossings),
            "kh" | "akh" | "akh-simple" | "thickness" | "width" | "genus-bounds" => format!("max={}", self.max_crossings),
            _ => String::new(),
        }
    }
}

/// One computed invariant. Wall time is kept out so that output bytes only
/// depend on input, options and version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub input: String,
    pub invariant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<Context>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<JsonTerm>>,
    pub scalars: BTreeMap<String, Value>,
    pub version: String,
}

impl ResultRecord {
    pub fn polynomial(&self) -> Option<GradedPolynomial> {
        let terms = self.terms.as_ref()?;
        GradedPolynomial::from_json_terms(terms, self.context.unwrap_or(Context::Integer)).ok()
    }

    pub fn to_text(&self, registry: &CoefficientRegistry) -> String {
        let mut out = String::new();
        if let Some(p) = self.polynomial() {
            out.push_str(&registry.alias_polynomial(&p).to_text());
            out.push('\n');
        }
        for (k, v) in &self.scalars {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Array(a) => a.iter().map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string)).collect::<Vec<_>>().join("\n  "),
                other => other.to_string(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
        out
    }
}

fn with_poly(d: &PlanarDiagram, invariant: &str, p: GradedPolynomial) -> ResultRecord {
    ResultRecord {
        input: serialize_pd(d),
        invariant: invariant.to_string(),
        context: Some(p.context()),
        terms: Some(p.to_json_terms()),
        scalars: BTreeMap::new(),
        version: ENGINE_VERSION.to_string(),
    }
}

fn with_scalars(d: &PlanarDiagram, invariant: &str, scalars: BTreeMap<String, Value>) -> ResultRecord {
    ResultRecord {
        input: serialize_pd(d),
        invariant: invariant.to_string(),
        context: None,
        terms: None,
        scalars,
        version: ENGINE_VERSION.to_string(),
    }
}

fn opt_json<T: Into<Value>>(v: Option<T>) -> Value {
    v.map_or(Value::Null, Into::into)
}

pub fn compute(
    d: &PlanarDiagram,
    invariant: &str,
    opts: &Options,
    registry: &CoefficientRegistry,
) -> Result<ResultRecord, HomologyError> {
    let max = opts.max_crossings;
    let level = opts.parity_level;
    let rec = match invariant {
        "bracket" => with_poly(d, invariant, skein::normalized_bracket(d)),
        "jones" => with_poly(d, invariant, skein::jones(d)),
        "arrow" => with_poly(d, invariant, skein::normalized_arrow(d)),
        "parity-bracket" => with_poly(d, invariant, skein::parity_bracket(d)),
        "parity-arrow" => with_poly(d, invariant, skein::parity_arrow(d)),
        "kh" => with_poly(d, invariant, homology::poincare(d, Flavor::Khovanov, max)?),
        "akh" => with_poly(d, invariant, homology::poincare(d, Flavor::ArrowFull, max)?),
        "akh-simple" => with_poly(d, invariant, homology::poincare(d, Flavor::ArrowSimple, max)?),
        "parity-kh" => with_poly(d, invariant, homology::parity_poincare(d, Flavor::Khovanov, level, max)?),
        "parity-akh" => with_poly(d, invariant, homology::parity_poincare(d, Flavor::ArrowFull, level, max)?),
        "thickness" | "width" => {
            let kh = homology::poincare(d, Flavor::Khovanov, max)?;
            let akh = homology::poincare(d, Flavor::ArrowFull, max)?;
            let s = if invariant == "thickness" {
                BTreeMap::from([
                    ("kh".to_string(), opt_json(homology::thickness(&kh).map(|v| v as u64))),
                    ("akh".to_string(), opt_json(homology::thickness(&akh).map(|v| v as u64))),
                ])
            } else {
                BTreeMap::from([
                    ("kh".to_string(), opt_json(homology::width(&kh))),
                    ("akh".to_string(), opt_json(homology::width(&akh))),
                ])
            };
            with_scalars(d, invariant, s)
        }
        "genus-bounds" => {
            let akh = homology::poincare(d, Flavor::ArrowFull, max)?;
            let s = BTreeMap::from([
                ("arrow".to_string(), json!(genus_bound_from_arrow(&skein::normalized_arrow(d)))),
                ("akh".to_string(), json!(genus_bound_from_akh(&akh))),
                ("parity-bracket".to_string(), json!(genus_bound_from_parity(&skein::parity_bracket(d), registry))),
                ("parity-arrow".to_string(), json!(genus_bound_from_parity(&skein::parity_arrow(d), registry))),
                ("carrier-genus".to_string(), json!(carrier_genus(d))),
            ]);
            with_scalars(d, invariant, s)
        }
        "parity" => {
            let s = d.parity().into_iter().enumerate().map(|(n, p)| ((n + 1).to_string(), json!(p.name()))).collect();
            with_scalars(d, invariant, s)
        }
        "filtration" => {
            let levels: Vec<Value> = knotio::filtration(d).iter().map(|e| json!(serialize_pd(e))).collect();
            with_scalars(d, invariant, BTreeMap::from([("levels".to_string(), Value::Array(levels))]))
        }
        "carrier-genus" => with_scalars(d, invariant, BTreeMap::from([("genus".to_string(), json!(carrier_genus(d)))])),
        other => unreachable!("unchecked invariant {other}"),
    };
    Ok(rec)
}
