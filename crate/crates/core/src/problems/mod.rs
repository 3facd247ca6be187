//! Problem files, builtin examples, orchestration and output formats.

pub mod builtins;
pub mod csv;
pub mod expr;
pub mod file;
pub mod run;
pub mod svg;

pub use builtins::{builtin, BUILTINS};
pub use csv::{emit_csv, render_csv};
pub use expr::{parse_expression, Expr, ExprError};
pub use file::{parse_problem, FileError, ProblemFile, SpecError, Triple};
pub use run::{check, load_problem, run, OutputFormat, RunError, RunOptions, RunOutcome};
pub use svg::emit_svg;
