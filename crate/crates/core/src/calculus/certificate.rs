//! JSON proof certificates.
//!
//! ```json
//! { "m": 1, "n": 1, "mode": "refined",
//!   "proof": { "sequent": {"rel": [...], "forms": [...]},
//!              "rule": "or",
//!              "principal": {"label": 0, "formula": "p | ~p"},
//!              "premises": [ ... ] } }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CalculusConfig, Derivation, Mode, Principal, RuleTag};
use crate::formula::{self, AgentCount, Formula, ParseError};
use crate::sequent::{Label, SequentDecodeError, SequentDoc};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fresh: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub sequent: SequentDoc,
    pub rule: String,
    pub principal: PrincipalDoc,
    #[serde(default)]
    pub premises: Vec<NodeDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub m: u32,
    pub n: u32,
    pub mode: String,
    pub proof: NodeDoc,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("agent count must be at least 1")]
    AgentCount,
    #[error("{0}")]
    Mode(String),
    #[error("node {path}: {msg}")]
    Node { path: String, msg: String },
}

fn principal_doc(p: &Principal) -> PrincipalDoc {
    let fmt = |f: &Formula| Some(formula::print(f));
    match p {
        Principal::Id { label, atom } => {
            PrincipalDoc { label: Some(label.0), atom: Some(atom.clone()), ..Default::default() }
        }
        Principal::Connective { label, formula } => {
            PrincipalDoc { label: Some(label.0), formula: fmt(formula), ..Default::default() }
        }
        Principal::Fresh { label, formula, fresh } => PrincipalDoc {
            label: Some(label.0),
            formula: fmt(formula),
            fresh: Some(fresh.0),
            ..Default::default()
        },
        Principal::Target { label, formula, target } => PrincipalDoc {
            label: Some(label.0),
            formula: fmt(formula),
            target: Some(target.0),
            ..Default::default()
        },
        Principal::Refl { label } => PrincipalDoc { label: Some(label.0), ..Default::default() },
        Principal::Eucl { w, u, v } => {
            PrincipalDoc { w: Some(w.0), u: Some(u.0), v: Some(v.0), ..Default::default() }
        }
        Principal::Ioa { sources, fresh } => PrincipalDoc {
            sources: Some(sources.iter().map(|l| l.0).collect()),
            fresh: Some(fresh.0),
            ..Default::default()
        },
        Principal::Apc { labels } => {
            PrincipalDoc { labels: Some(labels.iter().map(|l| l.0).collect()), ..Default::default() }
        }
    }
}

impl NodeDoc {
    pub fn from_derivation(d: &Derivation) -> Self {
        NodeDoc {
            sequent: SequentDoc::from_sequent(&d.conclusion),
            rule: d.rule.to_string(),
            principal: principal_doc(&d.principal),
            premises: d.premises.iter().map(NodeDoc::from_derivation).collect(),
        }
    }

    fn decode(&self, m: AgentCount, path: &mut Vec<usize>) -> Result<Derivation, CertificateError> {
        let err = |path: &[usize], msg: String| CertificateError::Node {
            path: if path.is_empty() {
                "root".into()
            } else {
                path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
            },
            msg,
        };
        let conclusion =
            self.sequent.to_sequent(m).map_err(|e: SequentDecodeError| err(path, e.to_string()))?;
        let rule: RuleTag = self.rule.parse().map_err(|e: String| err(path, e))?;
        let pd = &self.principal;
        let need = |v: Option<u32>, name: &str| {
            v.map(Label).ok_or_else(|| err(path, format!("principal field `{name}` missing")))
        };
        let need_formula = || -> Result<Formula, CertificateError> {
            let text = pd.formula.as_ref().ok_or_else(|| err(path, "principal field `formula` missing".into()))?;
            formula::parse(text, m).map_err(|e: ParseError| err(path, e.to_string()))
        };
        let principal = match rule {
            RuleTag::Id => Principal::Id {
                label: need(pd.label, "label")?,
                atom: pd.atom.clone().ok_or_else(|| err(path, "principal field `atom` missing".into()))?,
            },
            RuleTag::And | RuleTag::Or => {
                Principal::Connective { label: need(pd.label, "label")?, formula: need_formula()? }
            }
            RuleTag::Box | RuleTag::AgBox(_) => Principal::Fresh {
                label: need(pd.label, "label")?,
                formula: need_formula()?,
                fresh: need(pd.fresh, "fresh")?,
            },
            RuleTag::Dia | RuleTag::AgDia(_) | RuleTag::Prop(_) => Principal::Target {
                label: need(pd.label, "label")?,
                formula: need_formula()?,
                target: need(pd.target, "target")?,
            },
            RuleTag::Refl(_) => Principal::Refl { label: need(pd.label, "label")? },
            RuleTag::Eucl(_) => Principal::Eucl {
                w: need(pd.w, "w")?,
                u: need(pd.u, "u")?,
                v: need(pd.v, "v")?,
            },
            RuleTag::Ioa => Principal::Ioa {
                sources: pd
                    .sources
                    .as_ref()
                    .ok_or_else(|| err(path, "principal field `sources` missing".into()))?
                    .iter()
                    .map(|&l| Label(l))
                    .collect(),
                fresh: need(pd.fresh, "fresh")?,
            },
            RuleTag::Apc(_) => Principal::Apc {
                labels: pd
                    .labels
                    .as_ref()
                    .ok_or_else(|| err(path, "principal field `labels` missing".into()))?
                    .iter()
                    .map(|&l| Label(l))
                    .collect(),
            },
        };
        let mut premises = Vec::with_capacity(self.premises.len());
        for (i, p) in self.premises.iter().enumerate() {
            path.push(i);
            premises.push(p.decode(m, path)?);
            path.pop();
        }
        Ok(Derivation { conclusion, rule, principal, premises })
    }
}

impl Certificate {
    pub fn new(cfg: &CalculusConfig, d: &Derivation) -> Self {
        Certificate {
            m: cfg.m.get(),
            n: cfg.n,
            mode: cfg.mode.to_string(),
            proof: NodeDoc::from_derivation(d),
        }
    }

    pub fn config(&self) -> Result<CalculusConfig, CertificateError> {
        Ok(CalculusConfig {
            m: AgentCount::new(self.m).ok_or(CertificateError::AgentCount)?,
            n: self.n,
            mode: self.mode.parse::<Mode>().map_err(CertificateError::Mode)?,
        })
    }

    /// Decode the proof tree, parsing formulas against the header's agent count.
    pub fn derivation(&self) -> Result<Derivation, CertificateError> {
        let m = AgentCount::new(self.m).ok_or(CertificateError::AgentCount)?;
        self.proof.decode(m, &mut Vec::new())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization is infallible")
    }

    /// Parse a certificate; proof trees may be nested arbitrarily deep.
    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let cert = Certificate::deserialize(&mut de)?;
        de.end()?;
        Ok(cert)
    }
}
