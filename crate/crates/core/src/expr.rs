//! Small arithmetic expression language for user-supplied volatilities,
//! drifts and payoffs.
//!
//! Grammar: numbers, the variables `x`, `t` and `s`, the constants `e` and
//! `pi`, the binary operators `+ - * / ^` (`^` is right associative and binds
//! tighter than unary minus), parentheses and the functions `exp`, `log`,
//! `sqrt`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    X,
    T,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Bindings for the expression variables.
#[derive(Debug, Clone, Copy, Default)]
pub struct Vars<T> {
    pub x: T,
    pub t: T,
    pub s: T,
}

/// A parsed expression. Cheap to clone.
#[derive(Clone)]
pub struct Expression {
    source: String,
    root: Arc<Node>,
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({:?})", self.source)
    }
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let chars: Vec<char> = source.chars().collect();
        let mut p = Parser { chars, pos: 0 };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.err(format!("unexpected '{}'", p.chars[p.pos])));
        }
        Ok(Self {
            source: source.to_string(),
            root: Arc::new(root),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the expression references the time variable `t`.
    pub fn uses_time(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Var(Var::T) => true,
                Node::Num(_) | Node::Var(_) => false,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Bin(_, a, b) => walk(a) || walk(b),
            }
        }
        walk(&self.root)
    }

    pub fn eval<T: Real>(&self, vars: Vars<T>) -> T {
        eval(&self.root, &vars)
    }

    /// Evaluates with `x` bound and `t = s = 0`.
    pub fn eval_x<T: Real>(&self, x: T) -> T {
        self.eval(Vars {
            x,
            t: T::zero(),
            s: T::zero(),
        })
    }
}

fn eval<T: Real>(n: &Node, v: &Vars<T>) -> T {
    match n {
        Node::Num(c) => T::lit(*c),
        Node::Var(Var::X) => v.x,
        Node::Var(Var::T) => v.t,
        Node::Var(Var::S) => v.s,
        Node::Neg(a) => -eval(a, v),
        Node::Call(f, a) => {
            let a = eval(a, v);
            match f {
                Func::Exp => a.exp(),
                Func::Log => a.ln(),
                Func::Sqrt => a.sqrt(),
            }
        }
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, v), eval(b, v));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, message: String) -> Error {
        Error::Expression {
            column: self.pos + 1,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn is_minus(ch: char) -> bool {
        ch == '-' || ch == '−'
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Node::Bin(BinOp::Add, Box::new(lhs), Box::new(self.term()?));
                }
                Some(ch) if Self::is_minus(ch) => {
                    self.pos += 1;
                    lhs = Node::Bin(BinOp::Sub, Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some('*') | Some('·') => {
                    self.pos += 1;
                    lhs = Node::Bin(BinOp::Mul, Box::new(lhs), Box::new(self.unary()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Node::Bin(BinOp::Div, Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(ch) if Self::is_minus(ch) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression".into())),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(ch) if ch.is_ascii_digit() || ch == '.' => self.number(),
            Some(ch) if ch.is_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_alphanumeric() {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                let func = match word.as_str() {
                    "x" => return Ok(Node::Var(Var::X)),
                    "t" => return Ok(Node::Var(Var::T)),
                    "s" | "S" => return Ok(Node::Var(Var::S)),
                    "e" => return Ok(Node::Num(std::f64::consts::E)),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "exp" => Func::Exp,
                    "log" | "ln" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        self.pos = start;
                        return Err(self.err(format!("unknown identifier '{word}'")));
                    }
                };
                if self.peek() != Some('(') {
                    return Err(self.err(format!("expected '(' after {word}")));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'".into()));
                }
                self.pos += 1;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Some(ch) => Err(self.err(format!("unexpected '{ch}'"))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let n = self.chars.len();
        while self.pos < n && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.') {
            self.pos += 1;
        }
        // Exponent part, e.g. 1e-5. A bare `e` after a number is not an exponent
        // unless digits follow.
        if self.pos < n && (self.chars[self.pos] == 'e' || self.chars[self.pos] == 'E') {
            let mut k = self.pos + 1;
            if k < n && (self.chars[k] == '+' || self.chars[k] == '-') {
                k += 1;
            }
            if k < n && self.chars[k].is_ascii_digit() {
                while k < n && self.chars[k].is_ascii_digit() {
                    k += 1;
                }
                self.pos = k;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map(Node::Num).map_err(|_| {
            self.pos = start;
            self.err(format!("malformed number '{text}'"))
        })
    }
}
