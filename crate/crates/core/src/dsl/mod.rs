//! Arithmetic expressions for user-defined structures.

pub mod ast;
pub mod config;
pub mod eval;
pub mod parser;

pub use ast::{BinOp, Expr, Func};
pub use config::{load_structure, load_structure_str, LoadedStructure, StructureConfig};
pub use eval::{evaluate, Compiled, EvalError};
pub use parser::{parse_expression, ParseError};
