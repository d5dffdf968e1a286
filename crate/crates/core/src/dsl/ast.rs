use std::fmt;

use num_rational::BigRational;

use crate::rational::format_ratio;

/// Security classification of a declared variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    High,
    Low,
    Output,
}

impl Class {
    pub fn keyword(self) -> &'static str {
        match self {
            Class::High => "high",
            Class::Low => "low",
            Class::Output => "output",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    /// Ordered, duplicate-free, non-empty.
    pub domain: Vec<String>,
    pub class: Class,
}

impl VarDecl {
    pub fn contains(&self, value: &str) -> bool {
        self.domain.iter().any(|v| v == value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    /// `var == value`
    EqValue(String, String),
    /// `var == var`
    EqVar(String, String),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Skip,
    Assign(String, String),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Cond, Box<Stmt>, Box<Stmt>),
    /// Runs the first branch with probability `prob`, the second otherwise.
    PChoice(BigRational, Box<Stmt>, Box<Stmt>),
}

impl Stmt {
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    pub fn if_then_else(cond: Cond, then: Stmt, els: Stmt) -> Stmt {
        Stmt::If(cond, Box::new(then), Box::new(els))
    }

    pub fn pchoice(prob: BigRational, left: Stmt, right: Stmt) -> Stmt {
        Stmt::PChoice(prob, Box::new(left), Box::new(right))
    }

    /// Number of `pchoice` nodes appearing syntactically in the statement.
    pub fn pchoice_count(&self) -> usize {
        match self {
            Stmt::Skip | Stmt::Assign(..) => 0,
            Stmt::Seq(a, b) | Stmt::If(_, a, b) => a.pchoice_count() + b.pchoice_count(),
            Stmt::PChoice(_, a, b) => 1 + a.pchoice_count() + b.pchoice_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<VarDecl>,
    pub body: Stmt,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn vars_of(&self, class: Class) -> impl Iterator<Item = &VarDecl> {
        self.decls.iter().filter(move |d| d.class == class)
    }

    pub fn is_deterministic(&self) -> bool {
        self.body.pchoice_count() == 0
    }
}

// Pretty printing. The output re-parses to a structurally identical AST:
// left-nested sequences are wrapped in a `{ }` block and every `if` carries an
// explicit `else` arm.

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{} {} in {{{}}};", d.class, d.name, d.domain.join(", "))?;
        }
        write_stmt(f, &self.body, 0)?;
        writeln!(f)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stmt(f, self, 0)
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cond(f, self, 0)
    }
}

fn indent(f: &mut fmt::Formatter<'_>, level: usize) -> fmt::Result {
    for _ in 0..level {
        f.write_str("  ")?;
    }
    Ok(())
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, level: usize) -> fmt::Result {
    match s {
        Stmt::Skip => {
            indent(f, level)?;
            f.write_str("skip")
        }
        Stmt::Assign(var, value) => {
            indent(f, level)?;
            write!(f, "{var} := {value}")
        }
        Stmt::Seq(a, b) => {
            if matches!(**a, Stmt::Seq(..)) {
                indent(f, level)?;
                f.write_str("{\n")?;
                write_stmt(f, a, level + 1)?;
                f.write_str("\n")?;
                indent(f, level)?;
                f.write_str("}")?;
            } else {
                write_stmt(f, a, level)?;
            }
            f.write_str(";\n")?;
            write_stmt(f, b, level)
        }
        Stmt::If(c, t, e) => {
            indent(f, level)?;
            writeln!(f, "if {c} then")?;
            write_stmt(f, t, level + 1)?;
            f.write_str("\n")?;
            indent(f, level)?;
            f.write_str("else\n")?;
            write_stmt(f, e, level + 1)?;
            f.write_str("\n")?;
            indent(f, level)?;
            f.write_str("end")
        }
        Stmt::PChoice(p, a, b) => {
            indent(f, level)?;
            writeln!(f, "pchoice {} {{", format_ratio(p))?;
            write_stmt(f, a, level + 1)?;
            f.write_str("\n")?;
            indent(f, level)?;
            f.write_str("} {\n")?;
            write_stmt(f, b, level + 1)?;
            f.write_str("\n")?;
            indent(f, level)?;
            f.write_str("}")
        }
    }
}

// precedence: 0 = or, 1 = and, 2 = unary/atom
fn write_cond(f: &mut fmt::Formatter<'_>, c: &Cond, prec: u8) -> fmt::Result {
    match c {
        Cond::EqValue(v, x) | Cond::EqVar(v, x) => write!(f, "{v} == {x}"),
        Cond::Not(inner) => {
            f.write_str("not ")?;
            write_cond(f, inner, 2)
        }
        Cond::And(a, b) => {
            if prec > 1 {
                f.write_str("(")?;
            }
            write_cond(f, a, 1)?;
            f.write_str(" and ")?;
            write_cond(f, b, 2)?;
            if prec > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Cond::Or(a, b) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            write_cond(f, a, 0)?;
            f.write_str(" or ")?;
            write_cond(f, b, 1)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}
