use serde::Serialize;

use crate::parser::{Directive, UserInputAst};

use super::instantiate::literal_value;
use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WarningKind {
    UnknownVariable,
    NotAnAttribute,
    ValueOutOfDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub kind: WarningKind,
    /// The directive as written, e.g. `set root.color[0] = Yellow`.
    pub directive: String,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning: {}: {}", self.directive, self.message)
    }
}

/// Directives from a user-input file that survived validation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UserAssumptions {
    pub includes: Vec<VarIdx>,
    pub values: Vec<(VarIdx, Value)>,
    pub warnings: Vec<Warning>,
}

/// Checks each directive against the space; invalid ones become warnings
/// and are otherwise ignored.
pub fn apply_user_input(space: &ConfigurationSpace, input: &UserInputAst) -> UserAssumptions {
    let mut out = UserAssumptions::default();
    for d in &input.directives {
        let target = d.target().variable_id();
        let warn = |kind, message: String| Warning {
            kind,
            directive: d.to_string(),
            message,
        };
        let Some(v) = space.var(&target) else {
            out.warnings.push(warn(
                WarningKind::UnknownVariable,
                format!("the variable `{target}` is not part of the configuration model"),
            ));
            continue;
        };
        match d {
            Directive::Add { .. } => out.includes.push(v),
            Directive::Set { value, .. } => {
                let Some(domain) = space.domain(v) else {
                    out.warnings.push(warn(
                        WarningKind::NotAnAttribute,
                        format!("`{target}` is a part and cannot take a value"),
                    ));
                    continue;
                };
                let value = literal_value(value);
                if !domain.contains(&value) {
                    out.warnings.push(warn(
                        WarningKind::ValueOutOfDomain,
                        format!("`{value}` is not in the domain of `{target}`"),
                    ));
                    continue;
                }
                out.values.push((v, value));
            }
        }
    }
    out
}
