//! Expression trees over chart coordinates: recursive-descent parser,
//! evaluator generic over [`Real`], and a printer whose output re-parses to
//! the same tree.
//!
//! Grammar:
//!
//! ```text
//! expr  := term (("+"|"-") term)*
//! term  := unary (("*"|"/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" integer)?
//! atom  := number | ident | func "(" expr ")" | "(" expr ")"
//! func  := "sin" | "cos" | "exp" | "log" | "sqrt"
//! ```

use std::fmt;

use thiserror::Error;

use super::dual::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate by index into the chart's coordinate list.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("coordinate name `{0}` declared more than once")]
    DuplicateCoordinate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} of non-positive argument {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("expression evaluated to a non-finite value")]
    NonFinite,
    #[error("point has {found} coordinates, chart has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

impl Expr {
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> Result<T, EvalError> {
        let v = match self {
            Expr::Num(c) => T::from_f64(*c),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => a.eval(x)? / b.eval(x)?,
            Expr::Pow(a, n) => a.eval(x)?.powi(*n),
            Expr::Call(f, a) => {
                let arg = a.eval(x)?;
                match f {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Exp => arg.exp(),
                    Func::Log | Func::Sqrt => {
                        if arg.primal() <= 0.0 {
                            return Err(EvalError::Domain {
                                func: f.name(),
                                arg: arg.primal(),
                            });
                        }
                        if *f == Func::Log {
                            arg.ln()
                        } else {
                            arg.sqrt()
                        }
                    }
                }
            }
        };
        if v.all_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Printer bound to a coordinate list.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl ExprDisplay<'_> {
    fn child(&self, e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = e.display(self.names);
        if e.precedence() < min_prec {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            // `{:?}` is the shortest representation that round-trips exactly
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(i) => write!(f, "{}", self.names[*i]),
            Expr::Neg(a) => {
                write!(f, "-")?;
                self.child(a, 3, f)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self.expr {
                    Expr::Add(..) => ("+", 1),
                    Expr::Sub(..) => ("-", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                self.child(a, prec, f)?;
                write!(f, " {op} ")?;
                self.child(b, prec + 1, f)
            }
            Expr::Pow(a, n) => {
                self.child(a, 5, f)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a.display(self.names)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v, _) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let mut integral = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    integral = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        integral = false;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let v: f64 = lexeme.parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: "a decimal number".into(),
                })?;
                out.push((Tok::Num(v, integral), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "an operator, number, identifier or parenthesis".into(),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            expected: format!("{expected}, found {}", describe(self.peek())),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(v, true) if v <= u32::MAX as f64 => {
                self.bump();
                Ok(Expr::Pow(Box::new(base), v as u32))
            }
            _ => Err(self.error("a non-negative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    if let Some(func) = Func::from_name(&name) {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        return Ok(Expr::Call(func, Box::new(arg)));
                    }
                }
                match self.names.iter().position(|n| *n == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(ParseError::UnknownIdentifier { name, position: at }),
                }
            }
            _ => Err(self.error("a number, identifier, function call or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.error("`)`"))
        }
    }
}

/// Parses `text` against the declared coordinate names.
pub fn parse(text: &str, names: &[String]) -> Result<Expr, ParseError> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(ParseError::DuplicateCoordinate(n.clone()));
        }
    }
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        names,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn eval(text: &str, at: &[f64]) -> f64 {
        let n = names(&["x", "y", "z"][..at.len()]);
        parse(text, &n).unwrap().eval(at).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("1 + 2 * 3", &[0.0]), 7.0);
        assert_eq!(eval("-x^2", &[3.0]), -9.0);
        assert_eq!(eval("2 * -x", &[3.0]), -6.0);
        assert_eq!(eval("8 / 4 / 2", &[0.0]), 1.0);
        assert_eq!(eval("5 - 3 - 1", &[0.0]), 1.0);
        assert_eq!(eval("(x + 1)^2", &[2.0]), 9.0);
        assert_eq!(eval("--x", &[2.0]), 2.0);
    }

    #[test]
    fn numbers() {
        assert_eq!(eval("1.5e2", &[0.0]), 150.0);
        assert_eq!(eval("2.", &[0.0]), 2.0);
        assert_eq!(eval(".25", &[0.0]), 0.25);
        assert_eq!(eval("1E-2", &[0.0]), 0.01);
    }

    #[test]
    fn incomplete_expression_position() {
        let err = parse("x +", &names(&["x"])).unwrap_err();
        match err {
            ParseError::Syntax { position, .. } => assert_eq!(position, 3),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn errors() {
        let n = names(&["x", "y"]);
        assert!(matches!(
            parse("x + w", &n),
            Err(ParseError::UnknownIdentifier { ref name, position: 4 }) if name == "w"
        ));
        assert!(matches!(
            parse("X", &n),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse("", &n),
            Err(ParseError::Syntax { position: 0, .. })
        ));
        assert!(matches!(
            parse("x^1.5", &n),
            Err(ParseError::Syntax { position: 2, .. })
        ));
        assert!(matches!(parse("x^y", &n), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("sin x", &n),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse("(x", &n),
            Err(ParseError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse("x y", &n),
            Err(ParseError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse("x # y", &n),
            Err(ParseError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse("x", &names(&["x", "x"])),
            Err(ParseError::DuplicateCoordinate(_))
        ));
    }

    #[test]
    fn domain_errors() {
        let n = names(&["x"]);
        let e = parse("log(x)", &n).unwrap();
        assert!(matches!(
            e.eval(&[0.0]),
            Err(EvalError::Domain { func: "log", .. })
        ));
        let e = parse("sqrt(x)", &n).unwrap();
        assert!(matches!(
            e.eval(&[-1.0]),
            Err(EvalError::Domain { func: "sqrt", .. })
        ));
        let e = parse("1 / x", &n).unwrap();
        assert_eq!(e.eval(&[0.0]), Err(EvalError::NonFinite));
    }

    #[test]
    fn printer_parenthesizes_where_needed() {
        let n = names(&["x", "y"]);
        for text in [
            "x - (y - 1)",
            "(x + y) * 2",
            "x / (y * 2)",
            "-(x + y)",
            "(-x)^2",
            "sin(x)^3",
            "x * (-2.5)",
        ] {
            let e = parse(text, &n).unwrap();
            let printed = e.display(&n).to_string();
            assert_eq!(parse(&printed, &n).unwrap(), e, "{text} -> {printed}");
        }
        let e = Expr::Pow(Box::new(Expr::Num(-2.0)), 2);
        assert_eq!(e.display(&n).to_string(), "(-2.0)^2");
    }
}
