use std::fmt;

use crate::lang::ast::{Command, ConstDecl, ConstType, Diagnostic, RewardDecl, VarDecl, VarDomain};
use crate::ratfunc::ParamSpace;

/// Parsed high-level model: constants, one module of bounded variables and
/// guarded commands, and state reward structures.
#[derive(Clone, Debug)]
pub struct GuardedModel {
    pub constants: Vec<ConstDecl>,
    pub module_name: String,
    pub variables: Vec<VarDecl>,
    pub commands: Vec<Command>,
    pub rewards: Vec<RewardDecl>,
    /// Lint findings (e.g. unused parameters).
    pub warnings: Vec<Diagnostic>,
    pub(crate) source: String,
}

impl GuardedModel {
    pub fn constant(&self, name: &str) -> Option<&ConstDecl> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&VarDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Constants declared without a value, in declaration order.
    pub fn parameters(&self) -> impl Iterator<Item = &ConstDecl> {
        self.constants.iter().filter(|c| c.value.is_none())
    }

    /// Parameter space over every `double` constant, fixed or not, in
    /// declaration order. Indices are stable for a given model text.
    pub fn param_space(&self) -> ParamSpace {
        ParamSpace::from_names(
            self.constants
                .iter()
                .filter(|c| c.ty == ConstType::Double)
                .map(|c| c.name.clone()),
        )
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Compares declarations only; source text and lint output are ignored.
impl PartialEq for GuardedModel {
    fn eq(&self, other: &Self) -> bool {
        self.constants == other.constants
            && self.module_name == other.module_name
            && self.variables == other.variables
            && self.commands == other.commands
            && self.rewards == other.rewards
    }
}

/// Prints the model in the input syntax; reparsing yields an equal model.
impl fmt::Display for GuardedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dtmc\n")?;
        for c in &self.constants {
            let ty = match c.ty {
                ConstType::Int => "int",
                ConstType::Double => "double",
                ConstType::Bool => "bool",
            };
            match &c.value {
                Some(v) => writeln!(f, "const {ty} {} = {v};", c.name)?,
                None => writeln!(f, "const {ty} {};", c.name)?,
            }
        }
        writeln!(f, "\nmodule {}", self.module_name)?;
        for v in &self.variables {
            match &v.domain {
                VarDomain::Range(lo, hi) => writeln!(f, "    {} : [{lo}..{hi}] init {};", v.name, v.init)?,
                VarDomain::Bool => writeln!(f, "    {} : bool init {};", v.name, v.init)?,
            }
        }
        for c in &self.commands {
            write!(f, "    [] {} ->", c.guard)?;
            for (i, b) in c.branches.iter().enumerate() {
                if i > 0 {
                    f.write_str(" +")?;
                }
                write!(f, " ({}): ", b.prob)?;
                if b.updates.is_empty() {
                    f.write_str("true")?;
                }
                for (j, u) in b.updates.iter().enumerate() {
                    if j > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "({}'={})", u.var, u.value)?;
                }
            }
            writeln!(f, ";")?;
        }
        writeln!(f, "endmodule")?;
        for r in &self.rewards {
            writeln!(f, "\nrewards \"{}\"", r.label)?;
            for item in &r.items {
                writeln!(f, "    {} : {};", item.guard, item.value)?;
            }
            writeln!(f, "endrewards")?;
        }
        Ok(())
    }
}
