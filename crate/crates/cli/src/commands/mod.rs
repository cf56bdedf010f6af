mod analysis;
mod runtime;

pub use analysis::{check, sweep, symbolic, validate, Order, Quantity, SweepSpec, SymbolicFormat};
pub use runtime::{monitor, simulate, Learning, MonitorArgs, SimulateArgs};

use std::fmt;
use std::fs;
use std::path::Path;

use radcheck_core::engine::EngineError;
use radcheck_core::lang::{parse_model_bytes, parse_property, parse_property_file, PctlQuery};
use radcheck_core::model::{unfold, Bindings, ModelError, Pdtmc};

use crate::args::{Assign, Range};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::EliminationBlowup { .. } | EngineError::NonConvergence { .. } | EngineError::Singular => {
                Self::numeric(e.to_string())
            }
            _ => Self::usage(e.to_string()),
        }
    }
}

pub type Outcome = Result<i32, Failure>;

/// Model file plus bindings shared by every command.
pub struct ModelArgs<'a> {
    pub path: &'a Path,
    pub consts: &'a [Assign],
    pub params: &'a [Range],
}

impl ModelArgs<'_> {
    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new();
        for c in self.consts {
            b = b.fix(&c.name, c.value.clone());
        }
        for r in self.params {
            b = b.bound(&r.name, r.lo.clone(), r.hi.clone());
        }
        b
    }

    pub fn load(&self) -> Result<Pdtmc, Failure> {
        let bytes = fs::read(self.path).map_err(|e| Failure::usage(format!("{}: {e}", self.path.display())))?;
        let model =
            parse_model_bytes(&bytes).map_err(|e| Failure::usage(format!("{}:{e}", self.path.display())))?;
        for w in &model.warnings {
            eprintln!("{}:{w}", self.path.display());
        }
        Ok(unfold(&model, &self.bindings())?)
    }
}

/// Queries from a property file, or a single `P=? [ F target ]`.
pub fn queries(property: Option<&Path>, target: Option<&str>) -> Result<Vec<PctlQuery>, Failure> {
    match (property, target) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let qs = parse_property_file(&text).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))?;
            if qs.is_empty() {
                return Err(Failure::usage(format!("{}: no properties", path.display())));
            }
            Ok(qs.into_iter().map(|(_, q)| q).collect())
        }
        (None, Some(t)) => Ok(vec![target_query(t)?]),
        (None, None) => Err(Failure::usage("give --property or --target")),
        (Some(_), Some(_)) => Err(Failure::usage("--property and --target are exclusive")),
    }
}

pub fn target_query(t: &str) -> Result<PctlQuery, Failure> {
    parse_property(&format!("P=? [ F {t} ]")).map_err(|e| Failure::usage(format!("--target: {e}")))
}
