//! JSON instance files.
//!
//! ```json
//! { "points": [[0.0], [1.0], [0.4], [0.6]], "subset": [0, 1], "a": 0, "b": 1,
//!   "p": [[0.0, 1.0], [1.0, 0.0]] }
//! ```
//!
//! Exactly one of `points` (coordinate lists) and `distances` (row-major
//! matrix) must be given. `group` lists every group element as a permutation
//! of the point ids. `p` is indexed by position in the sorted subset list.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{validate_group, GroupAction, GroupWarning};
use crate::pair::{Domain, PairFunction};
use crate::space::{load_space, Instance, SpaceSource};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    pub subset: Vec<usize>,
    pub a: usize,
    pub b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<f64>>>,
}

/// A validated instance with its optional group and input function.
#[derive(Debug, Clone)]
pub struct LoadedInstance<S> {
    pub instance: Instance<S>,
    pub group: Option<GroupAction>,
    pub group_warnings: Vec<GroupWarning>,
    pub p: Option<PairFunction<S>>,
}

fn convert<S: Scalar>(rows: &[Vec<f64>]) -> Result<Vec<Vec<S>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|&v| S::from_f64(v).ok_or_else(|| Error::InstanceFormat(format!("value {v} not representable"))))
                .collect()
        })
        .collect()
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InstanceFormat(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InstanceFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Validates geometry, subset, group and `p`.
    pub fn load<S: Scalar>(&self) -> Result<LoadedInstance<S>> {
        let source = match (&self.points, &self.distances) {
            (Some(p), None) => SpaceSource::Points(convert(p)?),
            (None, Some(d)) => SpaceSource::Distances(convert(d)?),
            (Some(_), Some(_)) => {
                return Err(Error::InstanceFormat("give either `points` or `distances`, not both".into()))
            }
            (None, None) => return Err(Error::InstanceFormat("one of `points` or `distances` is required".into())),
        };
        let instance = load_space(&source, self.subset.clone(), self.a, self.b)?;
        let (group, group_warnings) = match &self.group {
            Some(perms) => {
                let (g, w) = validate_group(perms.clone(), &instance)?;
                (Some(g), w)
            }
            None => (None, Vec::new()),
        };
        let p = match &self.p {
            Some(rows) => {
                let p = PairFunction::from_rows(Domain::OverX, &convert(rows)?)?;
                p.expect_shape(Domain::OverX, instance.subset().len())?;
                Some(p)
            }
            None => None,
        };
        Ok(LoadedInstance {
            instance,
            group,
            group_warnings,
            p,
        })
    }
}
