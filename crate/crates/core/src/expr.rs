//! Scalar expressions over named variables: parsing, printing, and
//! evaluation at real points or over interval boxes.
//!
//! Grammar (see README for the full EBNF): `^` binds tighter than unary
//! minus, which binds tighter than `*` `/`, which bind tighter than `+` `-`;
//! `^` is right-associative. The function set is fixed to
//! `exp`, `log`, `sin`, `cos`, `sqrt` plus the arithmetic operators.
//!
//! Powers follow the even/odd rule when the exponent is a literal integer
//! and are otherwise rewritten as `exp(y*log(x))`, in both the point and the
//! interval evaluator, so the natural extension and point values agree on
//! their common domain.

use std::fmt;

use thiserror::Error;

use crate::interval::{DomainError, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// One node of the expression tree. Variables are indices into the declared
/// variable list held by [`ExprAst`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
}

/// A parsed expression together with its declared variable order.
///
/// Immutable after parsing; evaluation is pure and thread-safe.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    vars: Vec<String>,
    root: Node,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("empty expression")]
    Empty,
    #[error("variable list contains duplicate or reserved name `{name}`")]
    BadVariableList { name: String },
}

const FUNCTIONS: &[(&str, UnaryOp)] = &[
    ("exp", UnaryOp::Exp),
    ("log", UnaryOp::Log),
    ("sin", UnaryOp::Sin),
    ("cos", UnaryOp::Cos),
    ("sqrt", UnaryOp::Sqrt),
];

fn function_op(name: &str) -> Option<UnaryOp> {
    FUNCTIONS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, op)| op)
}

impl ExprAst {
    /// Parses `text` against the declared variable list.
    pub fn parse(text: &str, variables: &[impl AsRef<str>]) -> Result<Self, ParseError> {
        let vars: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        for (k, v) in vars.iter().enumerate() {
            if function_op(v).is_some() || vars[..k].contains(v) {
                return Err(ParseError::BadVariableList { name: v.clone() });
            }
        }
        if text.trim().is_empty() {
            return Err(ParseError::Empty);
        }
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            vars: &vars,
        };
        let root = parser.parse_expr()?;
        parser.expect_end()?;
        Ok(Self { vars, root })
    }

    /// Builds an AST directly from a tree; variable indices must point into
    /// the declared list and constants must be finite.
    pub fn from_root(variables: Vec<String>, root: Node) -> Result<Self, ParseError> {
        for (k, v) in variables.iter().enumerate() {
            if function_op(v).is_some() || variables[..k].contains(v) {
                return Err(ParseError::BadVariableList { name: v.clone() });
            }
        }
        fn check(node: &Node, n_vars: usize) -> Result<(), ParseError> {
            match node {
                Node::Const(c) if c.is_finite() => Ok(()),
                Node::Const(c) => Err(ParseError::Syntax {
                    pos: 0,
                    msg: format!("non-finite constant {c}"),
                }),
                Node::Var(i) if *i < n_vars => Ok(()),
                Node::Var(i) => Err(ParseError::Syntax {
                    pos: 0,
                    msg: format!("variable index {i} out of range"),
                }),
                Node::Unary(_, a) => check(a, n_vars),
                Node::Binary(_, a, b) => {
                    check(a, n_vars)?;
                    check(b, n_vars)
                }
            }
        }
        check(&root, variables.len())?;
        Ok(Self {
            vars: variables,
            root,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates at a real point given positionally in declared-variable order.
    pub fn eval_point(&self, values: &[f64]) -> Result<f64, DomainError> {
        assert_eq!(
            values.len(),
            self.vars.len(),
            "value count must match the declared variable list"
        );
        eval_point_node(&self.root, values)
    }

    /// Natural interval extension over a box given positionally in
    /// declared-variable order.
    pub fn eval_interval(&self, boxes: &[Interval]) -> Result<Interval, DomainError> {
        assert_eq!(
            boxes.len(),
            self.vars.len(),
            "box count must match the declared variable list"
        );
        eval_interval_node(&self.root, boxes)
    }

    /// Fixes the variables with `Some` value to constants and re-indexes the
    /// remaining ones, preserving their relative order.
    pub fn bind(&self, bindings: &[Option<f64>]) -> ExprAst {
        assert_eq!(bindings.len(), self.vars.len());
        let mut remap = vec![usize::MAX; self.vars.len()];
        let mut kept = Vec::new();
        for (i, b) in bindings.iter().enumerate() {
            if b.is_none() {
                remap[i] = kept.len();
                kept.push(self.vars[i].clone());
            }
        }
        fn rewrite(node: &Node, bindings: &[Option<f64>], remap: &[usize]) -> Node {
            match node {
                Node::Const(c) => Node::Const(*c),
                Node::Var(i) => match bindings[*i] {
                    Some(c) => Node::Const(c),
                    None => Node::Var(remap[*i]),
                },
                Node::Unary(op, a) => Node::Unary(*op, Box::new(rewrite(a, bindings, remap))),
                Node::Binary(op, a, b) => Node::Binary(
                    *op,
                    Box::new(rewrite(a, bindings, remap)),
                    Box::new(rewrite(b, bindings, remap)),
                ),
            }
        }
        ExprAst {
            root: rewrite(&self.root, bindings, &remap),
            vars: kept,
        }
    }
}

/// Exponents that are literal integers use the tight power rule.
fn const_integer_exponent(node: &Node) -> Option<i32> {
    if let Node::Const(c) = node {
        if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
            return Some(*c as i32);
        }
    }
    None
}

fn check_finite(x: f64, op: &'static str) -> Result<f64, DomainError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(DomainError::NonFinite { op })
    }
}

fn check_finite_interval(x: Interval, op: &'static str) -> Result<Interval, DomainError> {
    if x.lo().is_finite() && x.hi().is_finite() {
        Ok(x)
    } else {
        Err(DomainError::NonFinite { op })
    }
}

fn eval_point_node(node: &Node, values: &[f64]) -> Result<f64, DomainError> {
    match node {
        Node::Const(c) => Ok(*c),
        Node::Var(i) => Ok(values[*i]),
        Node::Unary(op, a) => {
            let x = eval_point_node(a, values)?;
            let y = match op {
                UnaryOp::Neg => -x,
                UnaryOp::Exp => x.exp(),
                UnaryOp::Log => {
                    if x <= 0.0 {
                        return Err(DomainError::LogNonPositive { arg: x.to_string() });
                    }
                    x.ln()
                }
                UnaryOp::Sin => x.sin(),
                UnaryOp::Cos => x.cos(),
                UnaryOp::Sqrt => {
                    if x < 0.0 {
                        return Err(DomainError::SqrtNegative { arg: x.to_string() });
                    }
                    x.sqrt()
                }
            };
            check_finite(y, op_name(*op))
        }
        Node::Binary(op, a, b) => {
            let x = eval_point_node(a, values)?;
            match op {
                BinOp::Add => check_finite(x + eval_point_node(b, values)?, "+"),
                BinOp::Sub => check_finite(x - eval_point_node(b, values)?, "-"),
                BinOp::Mul => check_finite(x * eval_point_node(b, values)?, "*"),
                BinOp::Div => {
                    let y = eval_point_node(b, values)?;
                    if y == 0.0 {
                        return Err(DomainError::DivisionByZero {
                            denom: y.to_string(),
                        });
                    }
                    check_finite(x / y, "/")
                }
                BinOp::Pow => {
                    if let Some(k) = const_integer_exponent(b) {
                        if x == 0.0 && k < 0 {
                            return Err(DomainError::ZeroToNegativePower);
                        }
                        check_finite(x.powi(k), "^")
                    } else {
                        let y = eval_point_node(b, values)?;
                        if x <= 0.0 {
                            return Err(DomainError::PowBaseNonPositive {
                                base: x.to_string(),
                            });
                        }
                        check_finite((y * x.ln()).exp(), "^")
                    }
                }
            }
        }
    }
}

fn eval_interval_node(node: &Node, boxes: &[Interval]) -> Result<Interval, DomainError> {
    match node {
        Node::Const(c) => Ok(Interval::point(*c)),
        Node::Var(i) => Ok(boxes[*i]),
        Node::Unary(op, a) => {
            let x = eval_interval_node(a, boxes)?;
            let y = match op {
                UnaryOp::Neg => -x,
                UnaryOp::Exp => x.exp(),
                UnaryOp::Log => x.ln()?,
                UnaryOp::Sin => x.sin(),
                UnaryOp::Cos => x.cos(),
                UnaryOp::Sqrt => x.sqrt()?,
            };
            check_finite_interval(y, op_name(*op))
        }
        Node::Binary(op, a, b) => {
            let x = eval_interval_node(a, boxes)?;
            match op {
                BinOp::Add => check_finite_interval(x + eval_interval_node(b, boxes)?, "+"),
                BinOp::Sub => check_finite_interval(x - eval_interval_node(b, boxes)?, "-"),
                BinOp::Mul => check_finite_interval(x * eval_interval_node(b, boxes)?, "*"),
                BinOp::Div => check_finite_interval(x.div(eval_interval_node(b, boxes)?)?, "/"),
                BinOp::Pow => {
                    if let Some(k) = const_integer_exponent(b) {
                        check_finite_interval(x.powi(k)?, "^")
                    } else {
                        let y = eval_interval_node(b, boxes)?;
                        check_finite_interval((y * x.ln()?).exp(), "^")
                    }
                }
            }
        }
    }
}

fn op_name(op: UnaryOp) -> &'static str {
    match op {
        UnaryOp::Neg => "neg",
        UnaryOp::Exp => "exp",
        UnaryOp::Log => "log",
        UnaryOp::Sin => "sin",
        UnaryOp::Cos => "cos",
        UnaryOp::Sqrt => "sqrt",
    }
}

// ---------------------------------------------------------------------------
// Tokenizer and recursive-descent parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => tokens.push(Token { kind: TokenKind::Plus, pos }),
            '-' => tokens.push(Token { kind: TokenKind::Minus, pos }),
            '*' => tokens.push(Token { kind: TokenKind::Star, pos }),
            '/' => tokens.push(Token { kind: TokenKind::Slash, pos }),
            '^' => tokens.push(Token { kind: TokenKind::Caret, pos }),
            '(' => tokens.push(Token { kind: TokenKind::LParen, pos }),
            ')' => tokens.push(Token { kind: TokenKind::RParen, pos }),
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        j = k;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let lit = &text[i..j];
                let value = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: format!("invalid number literal `{}`", lit),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    pos,
                });
                i = j;
                continue;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[i..j].to_string()),
                    pos,
                });
                i = j;
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character `{}`", c),
                })
            }
        }
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> usize {
        self.tokens.last().map(|t| t.pos + 1).unwrap_or(0)
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::Syntax {
                pos: t.pos,
                msg: "unexpected trailing input".to_string(),
            }),
        }
    }

    // expr := term (('+'|'-') term)*
    fn parse_expr(&mut self) -> Result<Node, ParseError> {
        let mut node = self.parse_term()?;
        while let Some(t) = self.peek() {
            let op = match t.kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_term()?;
            node = Node::Binary(op, Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    // term := unary (('*'|'/') unary)*
    fn parse_term(&mut self) -> Result<Node, ParseError> {
        let mut node = self.parse_unary()?;
        while let Some(t) = self.peek() {
            let op = match t.kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.parse_unary()?;
            node = Node::Binary(op, Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    // unary := '-' unary | power
    // A minus directly on a number literal folds into the literal (so that
    // printing a negative constant round-trips), except when the literal is
    // a power base: `-2^2` stays -(2^2) per the precedence rules.
    fn parse_unary(&mut self) -> Result<Node, ParseError> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.advance();
            if let Some(TokenKind::Number(v)) = self.peek().map(|t| t.kind.clone()) {
                let next = self.tokens.get(self.pos + 1).map(|t| &t.kind);
                if !matches!(next, Some(TokenKind::Caret)) {
                    self.advance();
                    return Ok(Node::Const(-v));
                }
            }
            let child = self.parse_unary()?;
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(child)));
        }
        self.parse_power()
    }

    // power := atom ('^' unary)?   (right-associative; exponent may be signed)
    fn parse_power(&mut self) -> Result<Node, ParseError> {
        let base = self.parse_atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.advance();
            let exponent = self.parse_unary()?;
            return Ok(Node::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Node, ParseError> {
        let end = self.end_pos();
        let token = match self.advance() {
            Some(t) => t.clone(),
            None => {
                return Err(ParseError::Syntax {
                    pos: end,
                    msg: "unexpected end of input".to_string(),
                })
            }
        };
        match token.kind {
            TokenKind::Number(v) => Ok(Node::Const(v)),
            TokenKind::Ident(name) => {
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    let op = function_op(&name).ok_or_else(|| ParseError::UnknownIdentifier {
                        name: name.clone(),
                        pos: token.pos,
                    })?;
                    self.advance(); // consume '('
                    let arg = self.parse_expr()?;
                    self.expect_rparen()?;
                    Ok(Node::Unary(op, Box::new(arg)))
                } else {
                    match self.vars.iter().position(|v| *v == name) {
                        Some(i) => Ok(Node::Var(i)),
                        None => Err(ParseError::UnknownIdentifier {
                            name,
                            pos: token.pos,
                        }),
                    }
                }
            }
            TokenKind::LParen => {
                let inner = self.parse_expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            other => Err(ParseError::Syntax {
                pos: token.pos,
                msg: format!("unexpected token `{:?}`", other),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let end = self.end_pos();
        match self.advance() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => Ok(()),
            Some(t) => Err(ParseError::Syntax {
                pos: t.pos,
                msg: "expected `)`".to_string(),
            }),
            None => Err(ParseError::Syntax {
                pos: end,
                msg: "expected `)` before end of input".to_string(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Printer. parse(print(ast)) is structurally identical to ast.
// ---------------------------------------------------------------------------

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Const(_) | Node::Var(_) => 5,
        Node::Unary(UnaryOp::Neg, _) => 3,
        Node::Unary(_, _) => 5, // function application is self-delimiting
        Node::Binary(BinOp::Add | BinOp::Sub, _, _) => 1,
        Node::Binary(BinOp::Mul | BinOp::Div, _, _) => 2,
        Node::Binary(BinOp::Pow, _, _) => 4,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, vars: &[String]) -> fmt::Result {
    let paren = |f: &mut fmt::Formatter<'_>, child: &Node, needed: bool| -> fmt::Result {
        if needed {
            write!(f, "(")?;
            write_node(f, child, vars)?;
            write!(f, ")")
        } else {
            write_node(f, child, vars)
        }
    };
    match node {
        Node::Const(c) => write!(f, "{}", c),
        Node::Var(i) => write!(f, "{}", vars[*i]),
        Node::Unary(UnaryOp::Neg, a) => {
            write!(f, "-")?;
            // a literal directly after `-` would re-parse as a negative
            // constant, so it always gets parentheses
            paren(f, a, precedence(a) < 3 || matches!(**a, Node::Const(_)))
        }
        Node::Unary(op, a) => {
            write!(f, "{}(", op_name(*op))?;
            write_node(f, a, vars)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => {
            let (sym, level) = match op {
                BinOp::Add => ("+", 1),
                BinOp::Sub => ("-", 1),
                BinOp::Mul => ("*", 2),
                BinOp::Div => ("/", 2),
                BinOp::Pow => ("^", 4),
            };
            if *op == BinOp::Pow {
                // right-associative; left operand at equal precedence needs
                // parens, as does a negative literal base (`(-2)^x`), which
                // would otherwise re-parse as -(2^x)
                let neg_const_base =
                    matches!(**a, Node::Const(c) if c.is_sign_negative());
                paren(f, a, precedence(a) <= 4 || neg_const_base)?;
                write!(f, "{}", sym)?;
                paren(f, b, precedence(b) < 3)
            } else {
                // left-associative; right operand at equal precedence needs parens
                paren(f, a, precedence(a) < level)?;
                write!(f, "{}", sym)?;
                paren(f, b, precedence(b) <= level)
            }
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, &self.vars)
    }
}
