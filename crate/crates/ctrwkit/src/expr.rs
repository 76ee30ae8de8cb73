//! Coefficient expressions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?          right-associative, binds tighter than unary minus
//! atom  := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func  := abs | exp | tanh | sin | cos | min | max
//! ```
//!
//! `−`, `×`, `÷` and `**` are accepted as spellings of `-`, `*`, `/` and `^`.
//! Which variables may appear depends on where the expression is used.

use std::fmt;
use std::sync::Arc;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Fun {
    Abs,
    Exp,
    Tanh,
    Sin,
    Cos,
    Min,
    Max,
}

impl Fun {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "abs" => Fun::Abs,
            "exp" => Fun::Exp,
            "tanh" => Fun::Tanh,
            "sin" => Fun::Sin,
            "cos" => Fun::Cos,
            "min" => Fun::Min,
            "max" => Fun::Max,
            _ => return None,
        })
    }

    fn unary(self) -> bool {
        !matches!(self, Fun::Min | Fun::Max)
    }
}

#[derive(Clone, Debug)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Fun, Vec<Node>),
}

impl Node {
    fn eval(&self, env: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(i) => env[*i],
            Node::Neg(a) => -a.eval(env),
            Node::Bin(op, a, b) => {
                let (x, y) = (a.eval(env), b.eval(env));
                match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    '/' => x / y,
                    _ => x.powf(y),
                }
            }
            Node::Call(f, args) => {
                let x = args[0].eval(env);
                match f {
                    Fun::Abs => x.abs(),
                    Fun::Exp => x.exp(),
                    Fun::Tanh => x.tanh(),
                    Fun::Sin => x.sin(),
                    Fun::Cos => x.cos(),
                    Fun::Min => args[1..].iter().fold(x, |m, a| m.min(a.eval(env))),
                    Fun::Max => args[1..].iter().fold(x, |m, a| m.max(a.eval(env))),
                }
            }
        }
    }
}

/// A parsed expression over a fixed list of variables.
#[derive(Clone)]
pub struct Expr {
    src: String,
    vars: Vec<String>,
    node: Arc<Node>,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?} in {:?})", self.src, self.vars)
    }
}

impl Expr {
    /// Values in `env` follow the order of `vars` given to [`parse`].
    pub fn eval(&self, env: &[f64]) -> f64 {
        self.node.eval(env)
    }

    pub fn source(&self) -> &str {
        &self.src
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> std::result::Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Tok::Num(s.parse().map_err(|_| format!("bad number `{s}`"))?));
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            '*' if chars.get(i + 1) == Some(&'*') => {
                out.push(Tok::Op('^'));
                i += 2;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '−' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '×' => {
                out.push(Tok::Op('*'));
                i += 1;
            }
            '÷' => {
                out.push(Tok::Op('/'));
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            _ => return Err(format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Tok::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, t: Tok) -> std::result::Result<(), String> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected {t:?}, found {:?}", self.peek()))
        }
    }

    fn expr(&mut self) -> std::result::Result<Node, String> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> std::result::Result<Node, String> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> std::result::Result<Node, String> {
        match self.eat_op(&['-', '+']) {
            Some('-') => Ok(Node::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> std::result::Result<Node, String> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            return Ok(Node::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> std::result::Result<Node, String> {
        let tok = self.peek().cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Fun::from_name(&name) {
                    self.expect(Tok::LParen)?;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    if f.unary() && args.len() != 1 {
                        return Err(format!("{name} takes one argument, got {}", args.len()));
                    }
                    if !f.unary() && args.len() < 2 {
                        return Err(format!("{name} takes at least two arguments"));
                    }
                    return Ok(Node::Call(f, args));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(format!("unknown variable `{name}` (allowed: {})", self.vars.join(", "))),
                }
            }
            other => Err(format!("unexpected {other:?}")),
        }
    }
}

/// Parse `src` with the given variables in scope.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
    let err = |msg: String| CliError::Expr { expr: src.to_string(), msg };
    let toks = lex(src).map_err(err)?;
    let mut p = Parser { toks, pos: 0, vars };
    let node = p.expr().map_err(err)?;
    if p.pos != p.toks.len() {
        return Err(err(format!("trailing input at {:?}", p.peek().unwrap())));
    }
    Ok(Expr { src: src.to_string(), vars: vars.iter().map(|s| s.to_string()).collect(), node: Arc::new(node) })
}
