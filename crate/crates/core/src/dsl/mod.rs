//! Front end for the probabilistic imperative language.
//!
//! ```text
//! high p in {A, B, C};
//! low g in {A, B, C};
//! output a in {0, 1};
//! if p == g then a := 1 else a := 0 end
//! ```
//!
//! Statements are `skip`, `x := v`, `s1; s2`, `if c then s else s end` (the
//! `else` arm is optional), `pchoice r { s } { s }` and `{ s }` for grouping.
//! Conditions combine `x == v`, `x == y` and `x != v` with `and`, `or`,
//! `not`. Probabilities are exact decimals or fractions. `#` starts a line
//! comment.

mod ast;
mod lexer;
mod lint;
mod parser;

use thiserror::Error;

pub use ast::{Class, Cond, Program, Stmt, VarDecl};
pub use lexer::Pos;
pub use lint::lint;
pub use parser::{parse_program, validate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: undeclared variable `{name}`")]
    Undeclared { name: String, pos: Pos },
    #[error("{pos}: value `{value}` is not in the domain of `{var}`")]
    OutOfDomain { var: String, value: String, pos: Pos },
    #[error("{pos}: pchoice probability {prob} must lie strictly between 0 and 1")]
    BadProbability { prob: String, pos: Pos },
    #[error("{pos}: variable `{name}` is declared more than once")]
    DuplicateDecl { name: String, pos: Pos },
    #[error("{pos}: value `{value}` appears twice in the domain of `{var}`")]
    DuplicateValue { var: String, value: String, pos: Pos },
    #[error("program declares no high variables")]
    NoHighVariables,
}

/// Size of the secret input in bits: log2 of the number of joint high states.
pub fn eta(program: &Program) -> Result<f64, DslError> {
    let mut highs = program.vars_of(Class::High).peekable();
    if highs.peek().is_none() {
        return Err(DslError::NoHighVariables);
    }
    Ok(highs.map(|d| (d.domain.len() as f64).log2()).sum())
}
