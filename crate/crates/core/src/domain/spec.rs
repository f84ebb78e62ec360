//! Declarative JSON description of a domain.
//!
//! ```json
//! {
//!   "usets": [{"name": "n", "size": 3}],
//!   "domain": {"subsets": {"product": [{"uset": "n"}, {"uset": "n"}]}}
//! }
//! ```
//!
//! Usets are declared once and referenced by name, so two references to the
//! same name share atoms.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};
use crate::value::{value_from_json, Uset, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsetDecl {
    pub name: String,
    pub size: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub usets: Vec<UsetDecl>,
    pub domain: DomainSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Range(u64),
    Values(Vec<serde_json::Value>),
    Boolean,
    None,
    Uset(String),
    CnfValues(Vec<serde_json::Value>),
    Product(Vec<DomainSpec>),
    Sequences {
        of: Box<DomainSpec>,
        length: usize,
    },
    Subsets(Box<DomainSpec>),
    SubsetsOfSize {
        of: Box<DomainSpec>,
        size: usize,
    },
    Mappings {
        key: Box<DomainSpec>,
        value: Box<DomainSpec>,
    },
    Join(Vec<DomainSpec>),
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<SpecFile> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    /// Registers the declared usets and builds the domain.
    pub fn build(&self) -> Result<Domain> {
        let mut usets = HashMap::new();
        for decl in &self.usets {
            if decl.size == 0 {
                return Err(Error::Spec(format!("uset `{}` has size 0", decl.name)));
            }
            if usets
                .insert(decl.name.clone(), Uset::new(decl.size, &decl.name))
                .is_some()
            {
                return Err(Error::Spec(format!("uset `{}` declared twice", decl.name)));
            }
        }
        self.domain.build(&usets)
    }
}

impl DomainSpec {
    fn build(&self, usets: &HashMap<String, Uset>) -> Result<Domain> {
        let resolve = |name: &str| usets.get(name).copied();
        let values = |items: &[serde_json::Value]| -> Result<Vec<Value>> {
            items.iter().map(|j| value_from_json(j, &resolve)).collect()
        };
        let all = |specs: &[DomainSpec]| -> Result<Vec<Domain>> { specs.iter().map(|s| s.build(usets)).collect() };
        Ok(match self {
            DomainSpec::Range(n) => Domain::range(*n),
            DomainSpec::Values(items) => Domain::values(values(items)?),
            DomainSpec::Boolean => Domain::boolean(),
            DomainSpec::None => Domain::none(),
            DomainSpec::Uset(name) => {
                Domain::of_uset(resolve(name).ok_or_else(|| Error::Spec(format!("undeclared uset `{name}`")))?)
            }
            DomainSpec::CnfValues(items) => Domain::cnf_values(values(items)?)?,
            DomainSpec::Product(parts) => Domain::product(all(parts)?),
            DomainSpec::Sequences { of, length } => Domain::sequences(&of.build(usets)?, *length)?,
            DomainSpec::Subsets(of) => Domain::subsets(&of.build(usets)?)?,
            DomainSpec::SubsetsOfSize { of, size } => Domain::subsets_of_size(&of.build(usets)?, *size)?,
            DomainSpec::Mappings { key, value } => Domain::mappings(&key.build(usets)?, &value.build(usets)?)?,
            DomainSpec::Join(parts) => Domain::join(all(parts)?),
        })
    }
}
