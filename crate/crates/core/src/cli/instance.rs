//! Instance files: JSON objects tagged by `kind`.
//!
//! ```json
//! {"kind": "finite", "labels": ["a", "b"], "transforms": [["b", "a"]], "f": ["0", "1/2"]}
//! {"kind": "cyclic-group", "modulus": 6, "shifts": [2, 3], "f": [0, 1, 0, 0, 1, 0]}
//! {"kind": "z-window", "length": 10, "shifts": [1, 1], "f": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]}
//! {"kind": "lattice-window", "dims": [2, 2], "values": ["0", "1", "1", "2"]}
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::result::CommutationWitness;
use crate::error::Error;
use crate::function::RationalFunction;
use crate::lattice::LatticeWindow;
use crate::star::abelian::translation_system;
use crate::system::CommutingSystem;

/// An image entry: a 0-based index or a label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub transforms: Vec<Vec<Element>>,
    pub f: RationalFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicFile {
    pub modulus: usize,
    pub shifts: Vec<i64>,
    pub f: RationalFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZWindowFile {
    pub length: usize,
    pub shifts: Vec<i64>,
    pub f: RationalFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFile {
    Finite(FiniteFile),
    CyclicGroup(CyclicFile),
    ZWindow(ZWindowFile),
    LatticeWindow(LatticeWindow),
}

#[derive(Deserialize)]
struct KindProbe {
    kind: String,
}

/// Deserializes `T` from the whole document, naming the failing field and
/// its position.
fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            InputError::new(format!("instance file: {inner}"))
        } else {
            InputError::new(format!("{path}: {inner}"))
        }
    })
}

impl InstanceFile {
    /// Parses the JSON text of an instance file.
    pub fn from_json(text: &str) -> Result<InstanceFile, InputError> {
        let probe: KindProbe = from_json(text)?;
        Ok(match probe.kind.as_str() {
            "finite" => InstanceFile::Finite(from_json(text)?),
            "cyclic-group" => InstanceFile::CyclicGroup(from_json(text)?),
            "z-window" => InstanceFile::ZWindow(from_json(text)?),
            "lattice-window" => InstanceFile::LatticeWindow(from_json(text)?),
            other => {
                return Err(InputError::new(format!(
                    "kind: unknown kind {other:?}, expected finite, cyclic-group, z-window or lattice-window"
                )))
            }
        })
    }
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Finite {
        system: CommutingSystem,
        f: RationalFunction,
        labels: Option<Vec<String>>,
    },
    Cyclic {
        modulus: usize,
        shifts: Vec<i64>,
        system: CommutingSystem,
        f: RationalFunction,
    },
    ZWindow {
        shifts: Vec<i64>,
        f: RationalFunction,
    },
    Lattice(LatticeWindow),
}

/// A failure to read an instance, with the offending field named.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub message: String,
    pub witness: Option<CommutationWitness>,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError {
            message: message.into(),
            witness: None,
        }
    }

    fn from_error(context: &str, e: Error) -> Self {
        InputError::new(format!("{context}: {e}"))
    }

    /// Reports `T_i T_j x ≠ T_j T_i x` with 1-based transformation indices.
    fn not_commuting(i: usize, j: usize, x: usize, labels: Option<&[String]>) -> Self {
        let label = labels.and_then(|l| l.get(x)).cloned();
        let at = label.as_ref().map_or(x.to_string(), |l| format!("{x} ({l})"));
        InputError {
            message: format!("transforms: T_{} and T_{} do not commute at x = {at}", i + 1, j + 1),
            witness: Some(CommutationWitness {
                i: i + 1,
                j: j + 1,
                x,
                label,
            }),
        }
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance, InputError> {
        InstanceFile::from_json(text)?.into_instance()
    }

    pub fn size(&self) -> usize {
        match self {
            Instance::Finite { f, .. } | Instance::Cyclic { f, .. } | Instance::ZWindow { f, .. } => f.len(),
            Instance::Lattice(w) => w.len(),
        }
    }

    /// The explicit system, for kinds that have one.
    pub fn system(&self) -> Option<(&CommutingSystem, &RationalFunction)> {
        match self {
            Instance::Finite { system, f, .. } | Instance::Cyclic { system, f, .. } => Some((system, f)),
            _ => None,
        }
    }

    pub fn label(&self, x: usize) -> Option<&str> {
        match self {
            Instance::Finite { labels: Some(l), .. } => l.get(x).map(String::as_str),
            _ => None,
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, InputError> {
        match self {
            InstanceFile::Finite(FiniteFile { labels, transforms, f }) => {
                let index: Option<HashMap<&str, usize>> = labels
                    .as_ref()
                    .map(|ls| ls.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect());
                if let (Some(ls), Some(map)) = (&labels, &index) {
                    if map.len() != ls.len() {
                        return Err(InputError::new("labels: duplicate label"));
                    }
                    if ls.len() != f.len() {
                        return Err(InputError::new(format!(
                            "labels: {} labels for {} values of f",
                            ls.len(),
                            f.len()
                        )));
                    }
                }
                if transforms.is_empty() {
                    return Err(InputError::new("transforms: at least one transformation is required"));
                }
                let mut images = Vec::with_capacity(transforms.len());
                for (j, t) in transforms.into_iter().enumerate() {
                    let mut image = Vec::with_capacity(t.len());
                    for (x, e) in t.into_iter().enumerate() {
                        image.push(match (e, &index) {
                            (Element::Index(i), _) => i,
                            (Element::Label(l), Some(map)) => *map
                                .get(l.as_str())
                                .ok_or_else(|| InputError::new(format!("transforms[{j}][{x}]: unknown label {l:?}")))?,
                            (Element::Label(l), None) => {
                                return Err(InputError::new(format!(
                                    "transforms[{j}][{x}]: label {l:?} used without labels"
                                )))
                            }
                        });
                    }
                    images.push(image);
                }
                let system = CommutingSystem::from_images(images).map_err(|e| match e {
                    Error::NotCommuting { i, j, x } => InputError::not_commuting(i, j, x, labels.as_deref()),
                    e => InputError::from_error("transforms", e),
                })?;
                system
                    .domain()
                    .check_function(&f)
                    .map_err(|e| InputError::from_error("f", e))?;
                Ok(Instance::Finite { system, f, labels })
            }
            InstanceFile::CyclicGroup(CyclicFile { modulus, shifts, f }) => {
                if shifts.is_empty() {
                    return Err(InputError::new("shifts: at least one shift is required"));
                }
                let system = translation_system(modulus, &shifts).map_err(|e| InputError::from_error("shifts", e))?;
                system
                    .domain()
                    .check_function(&f)
                    .map_err(|e| InputError::from_error("f", e))?;
                Ok(Instance::Cyclic {
                    modulus,
                    shifts,
                    system,
                    f,
                })
            }
            InstanceFile::ZWindow(ZWindowFile { length, shifts, f }) => {
                if length == 0 {
                    return Err(InputError::new("length: must be positive"));
                }
                if f.len() != length {
                    return Err(InputError::new(format!(
                        "f: {} values for a window of length {length}",
                        f.len()
                    )));
                }
                if shifts.is_empty() || shifts.contains(&0) {
                    return Err(InputError::new("shifts: need at least one shift, all nonzero"));
                }
                Ok(Instance::ZWindow { shifts, f })
            }
            InstanceFile::LatticeWindow(window) => Ok(Instance::Lattice(window)),
        }
    }
}
