//! COOM product-configuration models: parsing, instantiation into a
//! configuration tree, a native finite-domain solver, and interactive
//! reasoning (inferred values, conflict explanations, incremental bounds).

pub mod interactive;
pub mod parser;
pub mod solver;
pub mod space;

pub use parser::{parse_model, parse_user_input, validate_ast, CoomAst, UserInputAst};
pub use solver::{check_model, enumerate, solve, Assumption, Model, SolveResult};
pub use space::{apply_user_input, instantiate, serialize_facts, ConfigurationSpace, Value};
