use std::collections::BTreeSet;

use super::ast::{Class, Cond, Program, Stmt};

/// Reports output variables that a condition may read before any assignment.
/// Such reads observe the fixed first-element initialization used when
/// computing likelihoods, which is rarely what the author meant.
pub fn lint(program: &Program) -> Vec<String> {
    let outputs: BTreeSet<&str> = program.vars_of(Class::Output).map(|d| d.name.as_str()).collect();
    let mut warnings = Vec::new();
    let mut written = BTreeSet::new();
    walk(&program.body, &outputs, &mut written, &mut warnings);
    warnings.sort();
    warnings.dedup();
    warnings
}

fn cond_vars<'a>(c: &'a Cond, out: &mut Vec<&'a str>) {
    match c {
        Cond::EqValue(v, _) => out.push(v),
        Cond::EqVar(a, b) => {
            out.push(a);
            out.push(b);
        }
        Cond::Not(a) => cond_vars(a, out),
        Cond::And(a, b) | Cond::Or(a, b) => {
            cond_vars(a, out);
            cond_vars(b, out);
        }
    }
}

// `written` holds the variables definitely assigned on every path so far.
fn walk<'a>(s: &'a Stmt, outputs: &BTreeSet<&str>, written: &mut BTreeSet<&'a str>, warnings: &mut Vec<String>) {
    match s {
        Stmt::Skip => {}
        Stmt::Assign(v, _) => {
            written.insert(v);
        }
        Stmt::Seq(a, b) => {
            walk(a, outputs, written, warnings);
            walk(b, outputs, written, warnings);
        }
        Stmt::If(c, a, b) => {
            let mut read = Vec::new();
            cond_vars(c, &mut read);
            for v in read {
                if outputs.contains(v) && !written.contains(v) {
                    warnings.push(format!("output variable `{v}` is read before it is written"));
                }
            }
            branch(a, b, outputs, written, warnings);
        }
        Stmt::PChoice(_, a, b) => branch(a, b, outputs, written, warnings),
    }
}

fn branch<'a>(
    a: &'a Stmt,
    b: &'a Stmt,
    outputs: &BTreeSet<&str>,
    written: &mut BTreeSet<&'a str>,
    warnings: &mut Vec<String>,
) {
    let mut left = written.clone();
    walk(a, outputs, &mut left, warnings);
    let mut right = written.clone();
    walk(b, outputs, &mut right, warnings);
    *written = left.intersection(&right).copied().collect();
}
