use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ast::{Class, Cond, Program, Stmt, VarDecl};
use super::lexer::{tokenize, Pos, Tok, Token};
use super::DslError;
use crate::rational::parse_ratio;

const KEYWORDS: &[&str] =
    &["high", "low", "output", "in", "skip", "if", "then", "else", "end", "pchoice", "and", "or", "not"];

pub fn parse_program(source: &str) -> Result<Program, DslError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, at: 0, decls: Vec::new() };
    p.declarations()?;
    let body = p.sequence()?;
    p.expect(&Tok::Eof, "end of program")?;
    Ok(Program { decls: p.decls, body })
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    decls: Vec<VarDecl>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn syntax<T>(&self, pos: Pos, message: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax { pos, message: message.into() })
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<Pos, DslError> {
        let t = self.next();
        if &t.tok == tok {
            Ok(t.pos)
        } else {
            self.syntax(t.pos, format!("expected {what}, found {}", t.tok))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, DslError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t.pos),
            other => self.syntax(t.pos, format!("expected `{kw}`, found {other}")),
        }
    }

    fn identifier(&mut self, what: &str) -> Result<(String, Pos), DslError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s, t.pos)),
            other => self.syntax(t.pos, format!("expected {what}, found {other}")),
        }
    }

    /// A domain symbol: identifier or bare number token.
    fn value(&mut self) -> Result<(String, Pos), DslError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s, t.pos)),
            Tok::Number(s) => Ok((s, t.pos)),
            other => self.syntax(t.pos, format!("expected a value, found {other}")),
        }
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<&VarDecl, DslError> {
        self.decls.iter().find(|d| d.name == name).ok_or_else(|| DslError::Undeclared { name: name.to_string(), pos })
    }

    fn check_value(&self, var: &str, value: &str, pos: Pos) -> Result<(), DslError> {
        if self.lookup(var, pos)?.contains(value) {
            Ok(())
        } else {
            Err(DslError::OutOfDomain { var: var.to_string(), value: value.to_string(), pos })
        }
    }

    fn declarations(&mut self) -> Result<(), DslError> {
        loop {
            let class = match &self.peek().tok {
                Tok::Ident(s) if s == "high" => Class::High,
                Tok::Ident(s) if s == "low" => Class::Low,
                Tok::Ident(s) if s == "output" => Class::Output,
                _ => return Ok(()),
            };
            self.next();
            let (name, pos) = self.identifier("variable name")?;
            if self.decls.iter().any(|d| d.name == name) {
                return Err(DslError::DuplicateDecl { name, pos });
            }
            self.keyword("in")?;
            self.expect(&Tok::LBrace, "`{`")?;
            let mut domain: Vec<String> = Vec::new();
            loop {
                let (v, vpos) = self.value()?;
                if domain.contains(&v) {
                    return Err(DslError::DuplicateValue { var: name, value: v, pos: vpos });
                }
                domain.push(v);
                let t = self.next();
                match t.tok {
                    Tok::Comma => continue,
                    Tok::RBrace => break,
                    other => return self.syntax(t.pos, format!("expected `,` or `}}`, found {other}")),
                }
            }
            self.expect(&Tok::Semi, "`;` after declaration")?;
            self.decls.push(VarDecl { name, domain, class });
        }
    }

    fn at_sequence_end(&self) -> bool {
        matches!(self.peek().tok, Tok::Eof | Tok::RBrace) || self.peek_keyword("else") || self.peek_keyword("end")
    }

    /// `stmt (; stmt)* [;]`, folded right: `a; b; c` is `Seq(a, Seq(b, c))`.
    fn sequence(&mut self) -> Result<Stmt, DslError> {
        let mut items = vec![self.statement()?];
        while self.peek().tok == Tok::Semi {
            self.next();
            if self.at_sequence_end() {
                break;
            }
            items.push(self.statement()?);
        }
        let mut acc = items.pop().expect("at least one statement");
        while let Some(prev) = items.pop() {
            acc = Stmt::seq(prev, acc);
        }
        Ok(acc)
    }

    fn statement(&mut self) -> Result<Stmt, DslError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::LBrace => {
                self.next();
                let s = self.sequence()?;
                self.expect(&Tok::RBrace, "`}`")?;
                Ok(s)
            }
            Tok::Ident(kw) if kw == "skip" => {
                self.next();
                Ok(Stmt::Skip)
            }
            Tok::Ident(kw) if kw == "if" => {
                self.next();
                let cond = self.condition()?;
                self.keyword("then")?;
                let then = self.sequence()?;
                let els = if self.peek_keyword("else") {
                    self.next();
                    self.sequence()?
                } else {
                    Stmt::Skip
                };
                self.keyword("end")?;
                Ok(Stmt::if_then_else(cond, then, els))
            }
            Tok::Ident(kw) if kw == "pchoice" => {
                self.next();
                let pt = self.next();
                let Tok::Number(text) = &pt.tok else {
                    return self.syntax(pt.pos, format!("expected a probability, found {}", pt.tok));
                };
                let prob = parse_ratio(text).ok_or_else(|| DslError::Syntax {
                    pos: pt.pos,
                    message: format!("malformed probability `{text}`"),
                })?;
                if prob <= BigRational::zero() || prob >= BigRational::one() {
                    return Err(DslError::BadProbability { prob: text.clone(), pos: pt.pos });
                }
                self.expect(&Tok::LBrace, "`{`")?;
                let left = self.sequence()?;
                self.expect(&Tok::RBrace, "`}`")?;
                self.expect(&Tok::LBrace, "`{`")?;
                let right = self.sequence()?;
                self.expect(&Tok::RBrace, "`}`")?;
                Ok(Stmt::pchoice(prob, left, right))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.next();
                self.lookup(name, t.pos)?;
                self.expect(&Tok::Assign, "`:=`")?;
                let (value, vpos) = self.value()?;
                self.check_value(name, &value, vpos)?;
                Ok(Stmt::Assign(name.clone(), value))
            }
            other => self.syntax(t.pos, format!("expected a statement, found {other}")),
        }
    }

    fn condition(&mut self) -> Result<Cond, DslError> {
        let mut lhs = self.conjunction()?;
        while self.peek_keyword("or") {
            self.next();
            let rhs = self.conjunction()?;
            lhs = Cond::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Cond, DslError> {
        let mut lhs = self.unary()?;
        while self.peek_keyword("and") {
            self.next();
            let rhs = self.unary()?;
            lhs = Cond::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Cond, DslError> {
        if self.peek_keyword("not") {
            self.next();
            return Ok(Cond::Not(Box::new(self.unary()?)));
        }
        if self.peek().tok == Tok::LParen {
            self.next();
            let c = self.condition()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(c);
        }
        let (var, pos) = self.identifier("variable in condition")?;
        self.lookup(&var, pos)?;
        let op = self.next();
        let negate = match op.tok {
            Tok::Eq => false,
            Tok::Ne => true,
            other => return self.syntax(op.pos, format!("expected `==` or `!=`, found {other}")),
        };
        let (rhs, rpos) = self.value()?;
        // A right-hand identifier that names a declared variable is a variable.
        let atom = if self.decls.iter().any(|d| d.name == rhs) {
            Cond::EqVar(var, rhs)
        } else {
            self.check_value(&var, &rhs, rpos)?;
            Cond::EqValue(var, rhs)
        };
        Ok(if negate { Cond::Not(Box::new(atom)) } else { atom })
    }
}

/// Checks the invariants of a programmatically built [`Program`]. Parsed
/// programs already satisfy them.
pub fn validate(program: &Program) -> Result<(), DslError> {
    let pos = Pos::default();
    let mut seen = HashSet::new();
    for d in &program.decls {
        if !seen.insert(d.name.as_str()) {
            return Err(DslError::DuplicateDecl { name: d.name.clone(), pos });
        }
        if d.domain.is_empty() {
            return Err(DslError::Syntax { pos, message: format!("`{}` has an empty domain", d.name) });
        }
        let mut vals = HashSet::new();
        for v in &d.domain {
            if !vals.insert(v.as_str()) {
                return Err(DslError::DuplicateValue { var: d.name.clone(), value: v.clone(), pos });
            }
        }
    }
    let decl = |name: &str| program.decl(name).ok_or_else(|| DslError::Undeclared { name: name.to_string(), pos });
    let in_domain = |var: &str, value: &str| -> Result<(), DslError> {
        if decl(var)?.contains(value) {
            Ok(())
        } else {
            Err(DslError::OutOfDomain { var: var.to_string(), value: value.to_string(), pos })
        }
    };
    fn walk_cond(
        c: &Cond,
        in_domain: &dyn Fn(&str, &str) -> Result<(), DslError>,
        decl: &dyn Fn(&str) -> Result<(), DslError>,
    ) -> Result<(), DslError> {
        match c {
            Cond::EqValue(v, x) => in_domain(v, x),
            Cond::EqVar(a, b) => decl(a).and(decl(b)),
            Cond::Not(a) => walk_cond(a, in_domain, decl),
            Cond::And(a, b) | Cond::Or(a, b) => {
                walk_cond(a, in_domain, decl)?;
                walk_cond(b, in_domain, decl)
            }
        }
    }
    fn walk(
        s: &Stmt,
        in_domain: &dyn Fn(&str, &str) -> Result<(), DslError>,
        decl: &dyn Fn(&str) -> Result<(), DslError>,
    ) -> Result<(), DslError> {
        match s {
            Stmt::Skip => Ok(()),
            Stmt::Assign(v, x) => in_domain(v, x),
            Stmt::Seq(a, b) => {
                walk(a, in_domain, decl)?;
                walk(b, in_domain, decl)
            }
            Stmt::If(c, a, b) => {
                walk_cond(c, in_domain, decl)?;
                walk(a, in_domain, decl)?;
                walk(b, in_domain, decl)
            }
            Stmt::PChoice(p, a, b) => {
                if *p <= BigRational::zero() || *p >= BigRational::one() {
                    return Err(DslError::BadProbability {
                        prob: crate::rational::format_ratio(p),
                        pos: Pos::default(),
                    });
                }
                walk(a, in_domain, decl)?;
                walk(b, in_domain, decl)
            }
        }
    }
    let decl_unit = |name: &str| decl(name).map(|_| ());
    walk(&program.body, &in_domain, &decl_unit)
}
