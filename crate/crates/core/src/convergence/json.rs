//! JSON documents describing system families.
//!
//! ```json
//! {
//!   "members": [{"r": "1", "system": {...}}, {"r": "2", "system": {...}}],
//!   "limit": {...}
//! }
//! ```
//!
//! Each `system` is a system document as read by
//! [`SystemSpecDocument`](crate::multiclass::SystemSpecDocument).

use serde::{Deserialize, Serialize};

use super::{ConvergenceError, SystemFamily};
use crate::multiclass::SystemSpecDocument;
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyMemberDocument {
    pub r: String,
    pub system: SystemSpecDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub members: Vec<FamilyMemberDocument>,
    pub limit: SystemSpecDocument,
}

impl FamilyDocument {
    pub fn from_json(text: &str) -> Result<Self, ConvergenceError> {
        serde_json::from_str(text).map_err(|e| ConvergenceError::InvalidParameter(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn into_family(self) -> Result<SystemFamily, ConvergenceError> {
        let members = self
            .members
            .into_iter()
            .map(|m| {
                let r = rational::parse_decimal(&m.r).ok_or_else(|| {
                    ConvergenceError::InconsistentFamily(format!("grid value {:?} is not a number", m.r))
                })?;
                Ok((r, m.system.into_spec()?))
            })
            .collect::<Result<Vec<_>, ConvergenceError>>()?;
        SystemFamily::new(members, self.limit.into_spec()?)
    }

    pub fn from_family(family: &SystemFamily) -> Result<Self, ConvergenceError> {
        let members = family
            .members()
            .iter()
            .map(|(r, s)| {
                Ok(FamilyMemberDocument { r: rational::to_string(r), system: SystemSpecDocument::from_spec(s)? })
            })
            .collect::<Result<_, ConvergenceError>>()?;
        Ok(FamilyDocument { members, limit: SystemSpecDocument::from_spec(family.limit())? })
    }
}
