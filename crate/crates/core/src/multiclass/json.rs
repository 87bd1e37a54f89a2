//! JSON documents describing exact systems.
//!
//! ```json
//! {
//!   "classes": [
//!     {"name": "A", "size": 2, "alphabet": ["a", "b"]},
//!     {"name": "B", "size": "infinite", "truncation": 2, "alphabet": ["a", "b"]}
//!   ],
//!   "components": [
//!     {"weight": "1/2", "finite_law": {"arity": 2, "entries": [...]},
//!      "directing": {"B": {"a": "1/1"}}},
//!     ...
//!   ],
//!   "mixtures": {"C": [{"weight": "1/2", "probs": {"a": "1/1"}}, ...]}
//! }
//! ```
//!
//! `components` is the coupling table: a latent index shared by all classes.
//! It defaults to a single component of weight one. `finite_law` may be given
//! once at top level instead of per component. Each infinite class takes its
//! directing measure either from the components or from an independent entry
//! of `mixtures`, never both.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{cross, ClassSize, ClassSpec, LatentComponent, MulticlassError, SystemSpec};
use crate::measures::{Atom, DiscreteMeasure};
use crate::rational;
use crate::sampling::{probs_from_map, probs_to_map, MixtureModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeRepr {
    Finite(usize),
    Infinite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRepr {
    pub name: String,
    pub size: SizeRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    pub alphabet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRepr {
    pub weight: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_law: Option<DiscreteMeasure>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub directing: BTreeMap<String, BTreeMap<String, String>>,
}

/// Serialized form of an exact [`SystemSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpecDocument {
    pub classes: Vec<ClassRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_law: Option<DiscreteMeasure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentRepr>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub mixtures: BTreeMap<String, MixtureModel>,
}

fn invalid(msg: impl Into<String>) -> MulticlassError {
    MulticlassError::InvalidLaw(msg.into())
}

impl SystemSpecDocument {
    pub fn from_json(text: &str) -> Result<Self, MulticlassError> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn into_spec(self) -> Result<SystemSpec, MulticlassError> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let size = match (&c.size, c.truncation) {
                    (SizeRepr::Finite(n), None) => ClassSize::Finite(*n),
                    (SizeRepr::Finite(_), Some(_)) => {
                        return Err(invalid(format!("class {}: truncation given for a finite class", c.name)))
                    }
                    (SizeRepr::Infinite(s), Some(m)) if is_infinite(s) => ClassSize::Infinite { truncation: m },
                    (SizeRepr::Infinite(s), None) if is_infinite(s) => {
                        return Err(invalid(format!("class {}: infinite class needs a truncation", c.name)))
                    }
                    (SizeRepr::Infinite(s), _) => {
                        return Err(invalid(format!(
                            "class {}: size {s:?} is neither an integer nor \"infinite\"",
                            c.name
                        )))
                    }
                };
                Ok(ClassSpec {
                    name: c.name.clone(),
                    size,
                    alphabet: c.alphabet.iter().map(|s| Atom::new(s)).collect(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut names: Vec<&str> = classes.iter().map(|c| c.name.as_str()).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("class names must be unique"));
        }
        for name in self.mixtures.keys() {
            match classes.iter().find(|c| &c.name == name) {
                Some(c) if !c.is_finite() => {}
                Some(_) => return Err(invalid(format!("mixture given for finite class {name}"))),
                None => return Err(invalid(format!("mixture given for unknown class {name}"))),
            }
        }

        let raw = if self.components.is_empty() {
            vec![ComponentRepr { weight: "1".into(), finite_law: None, directing: BTreeMap::new() }]
        } else {
            self.components.clone()
        };

        // Each latent row carries a partial directing map; independent
        // mixtures are crossed in afterwards, class by class.
        let mut rows: Vec<(LatentComponent, BTreeMap<String, DiscreteMeasure>)> = Vec::new();
        for (i, c) in raw.iter().enumerate() {
            let weight = rational::parse(&c.weight)
                .ok_or_else(|| invalid(format!("component {i}: invalid weight {:?}", c.weight)))?;
            let finite_law = match (&c.finite_law, &self.finite_law) {
                (Some(_), Some(_)) => {
                    return Err(invalid(format!("component {i}: finite_law given both per component and at top level")))
                }
                (Some(l), None) | (None, Some(l)) => Some(l.clone()),
                (None, None) => None,
            };
            let mut directing = BTreeMap::new();
            for (name, probs) in &c.directing {
                match classes.iter().find(|k| &k.name == name) {
                    Some(k) if !k.is_finite() => {}
                    _ => return Err(invalid(format!("component {i}: {name} is not an infinite class"))),
                }
                if self.mixtures.contains_key(name) {
                    return Err(invalid(format!("class {name} has both a coupled and an independent directing law")));
                }
                directing.insert(name.clone(), probs_from_map(probs).map_err(invalid)?);
            }
            rows.push((LatentComponent { weight, finite_law, directing: vec![] }, directing));
        }

        let mut table: Vec<LatentComponent> = Vec::new();
        for (base, coupled) in rows {
            let mut partial = vec![base];
            for class in classes.iter().filter(|c| !c.is_finite()) {
                if let Some(d) = coupled.get(&class.name) {
                    for p in &mut partial {
                        p.directing.push(d.clone());
                    }
                } else if let Some(m) = self.mixtures.get(&class.name) {
                    partial = cross(&partial, m);
                } else {
                    return Err(invalid(format!("no directing law for infinite class {}", class.name)));
                }
            }
            table.extend(partial);
        }
        SystemSpec::exact(classes, table)
    }

    /// Canonical document of an exact spec: the full latent table, no
    /// top-level shortcuts.
    pub fn from_spec(spec: &SystemSpec) -> Result<Self, MulticlassError> {
        let comps = spec.components()?;
        let classes = spec
            .classes()
            .iter()
            .map(|c| ClassRepr {
                name: c.name.clone(),
                size: match c.size {
                    ClassSize::Finite(n) => SizeRepr::Finite(n),
                    ClassSize::Infinite { .. } => SizeRepr::Infinite("infinite".into()),
                },
                truncation: match c.size {
                    ClassSize::Finite(_) => None,
                    ClassSize::Infinite { truncation } => Some(truncation),
                },
                alphabet: c.alphabet.iter().map(|a| a.as_str().to_owned()).collect(),
            })
            .collect();
        let infinite_names: Vec<&str> =
            spec.classes().iter().filter(|c| !c.is_finite()).map(|c| c.name.as_str()).collect();
        let components = comps
            .iter()
            .map(|c| ComponentRepr {
                weight: rational::to_string(&c.weight),
                finite_law: c.finite_law.clone(),
                directing: infinite_names
                    .iter()
                    .zip(&c.directing)
                    .map(|(n, d)| (n.to_string(), probs_to_map(d)))
                    .collect(),
            })
            .collect();
        Ok(SystemSpecDocument { classes, finite_law: None, components, mixtures: BTreeMap::new() })
    }
}

fn is_infinite(s: &str) -> bool {
    matches!(s, "infinite" | "inf" | "∞")
}
