//! JSON shape of a model specification.
//!
//! ```text
//! {"kind":"catalog","name":"log1p","alpha":null,"domain":[0,10]}
//! {"kind":"blocks","quad":[c0,c1,c2],"knots":[{"a":0.5,"c":1.2}],"domain":[0,2]}
//! {"kind":"power","base":{...},"exponent":0.5}
//! {"kind":"combo","terms":[{"coef":-1.0,"model":{...}}]}
//! ```
//!
//! An infinite domain end is written as `null`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{BlockModel, CatalogEntry, FunctionModel, Interval, Knot, ModelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotSpec {
    pub a: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboTermSpec {
    pub coef: f64,
    pub model: ModelSpec,
}

type DomainSpec = [Option<f64>; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Catalog {
        name: String,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeffs: Option<Vec<f64>>,
        #[serde(default)]
        domain: Option<DomainSpec>,
    },
    Blocks {
        quad: [f64; 3],
        #[serde(default)]
        knots: Vec<KnotSpec>,
        domain: DomainSpec,
    },
    Power {
        base: Box<ModelSpec>,
        exponent: f64,
        #[serde(default)]
        domain: Option<DomainSpec>,
    },
    Combo {
        terms: Vec<ComboTermSpec>,
        #[serde(default)]
        domain: Option<DomainSpec>,
    },
}

fn to_interval(d: DomainSpec) -> Interval {
    Interval::new(d[0].unwrap_or(f64::NEG_INFINITY), d[1].unwrap_or(f64::INFINITY))
}

fn from_interval(i: Interval) -> DomainSpec {
    let end = |v: f64| if v.is_finite() { Some(v) } else { None };
    [end(i.lo), end(i.hi)]
}

fn restrict(model: FunctionModel, domain: Option<DomainSpec>) -> Result<FunctionModel, String> {
    match domain {
        Some(d) => model.restrict(to_interval(d)).map_err(|e| alloc::format!("{e}")),
        None => Ok(model),
    }
}

impl TryFrom<ModelSpec> for FunctionModel {
    type Error = String;

    fn try_from(spec: ModelSpec) -> Result<Self, Self::Error> {
        match spec {
            ModelSpec::Catalog {
                name,
                alpha,
                coeffs,
                domain,
            } => {
                let entry = CatalogEntry::from_name(&name, alpha, coeffs)?;
                restrict(FunctionModel::catalog(entry), domain)
            }
            ModelSpec::Blocks { quad, knots, domain } => {
                let knots = knots
                    .into_iter()
                    .map(|k| Knot {
                        at: k.a,
                        weight: k.c,
                    })
                    .collect();
                let domain = to_interval(domain);
                if !(domain.lo < domain.hi) {
                    return Err(alloc::format!("empty domain [{}, {}]", domain.lo, domain.hi));
                }
                let blocks = BlockModel::new(quad, knots).map_err(|e| alloc::format!("{e}"))?;
                Ok(FunctionModel::blocks(blocks, domain))
            }
            ModelSpec::Power {
                base,
                exponent,
                domain,
            } => {
                let base = FunctionModel::try_from(*base)?;
                restrict(FunctionModel::power(base, exponent), domain)
            }
            ModelSpec::Combo { terms, domain } => {
                let terms = terms
                    .into_iter()
                    .map(|t| Ok((t.coef, FunctionModel::try_from(t.model)?)))
                    .collect::<Result<Vec<_>, String>>()?;
                restrict(FunctionModel::combination(terms), domain)
            }
        }
    }
}

impl From<FunctionModel> for ModelSpec {
    fn from(m: FunctionModel) -> Self {
        let domain = from_interval(m.domain);
        match m.kind {
            ModelKind::Catalog(entry) => ModelSpec::Catalog {
                name: entry.name(),
                alpha: entry.alpha(),
                coeffs: match entry {
                    CatalogEntry::Polynomial(c) => Some(c),
                    _ => None,
                },
                domain: Some(domain),
            },
            ModelKind::Blocks(b) => ModelSpec::Blocks {
                quad: b.quad,
                knots: b
                    .knots
                    .iter()
                    .map(|k| KnotSpec {
                        a: k.at,
                        c: k.weight,
                    })
                    .collect(),
                domain,
            },
            ModelKind::Power { base, exponent } => ModelSpec::Power {
                base: Box::new((*base).into()),
                exponent,
                domain: Some(domain),
            },
            ModelKind::Combination(terms) => ModelSpec::Combo {
                terms: terms
                    .into_iter()
                    .map(|(coef, model)| ComboTermSpec {
                        coef,
                        model: model.into(),
                    })
                    .collect(),
                domain: Some(domain),
            },
        }
    }
}
