use crate::error::{ParseError, Result};
use crate::syntax::formula::{fresh_atom, Atom, Formula, TensorSig};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Bot,
    Top,
    Not,
    And,
    Or,
    Tensor2,
    Imp,
    Iff,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Comma,
    Dot,
    Eq,
    K,
    Kh,
    Forall,
    Exists,
    BoxKw,
    TensorKw,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Bot => "`bot`".into(),
            Tok::Top => "`top`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Tensor2 => "`(+)`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::K => "`K`".into(),
            Tok::Kh => "`Kh`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::BoxKw => "`box`".into(),
            Tok::TensorKw => "`tensor`".into(),
        }
    }
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let starts = |i: usize, s: &str| {
        s.chars()
            .enumerate()
            .all(|(j, c)| chars.get(i + j) == Some(&c))
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if starts(i, "(+)") {
            (Tok::Tensor2, 3)
        } else if starts(i, "<->") {
            (Tok::Iff, 3)
        } else if starts(i, "->") {
            (Tok::Imp, 2)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let tok = match word.as_str() {
                "bot" => Tok::Bot,
                "top" => Tok::Top,
                "K" => Tok::K,
                "Kh" => Tok::Kh,
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "box" => Tok::BoxKw,
                "tensor" => Tok::TensorKw,
                _ => Tok::Ident(word),
            };
            (tok, j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            match digits.parse() {
                Ok(n) => (Tok::Num(n), j - i),
                Err(_) => return err(i, "number too large"),
            }
        } else {
            let tok = match c {
                '~' | '¬' => Tok::Not,
                '&' | '∧' => Tok::And,
                '|' | '∨' => Tok::Or,
                '⊗' => Tok::Tensor2,
                '→' => Tok::Imp,
                '↔' => Tok::Iff,
                '⊥' => Tok::Bot,
                '⊤' => Tok::Top,
                '∀' => Tok::Forall,
                '∃' => Tok::Exists,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '=' => Tok::Eq,
                _ => return err(i, format!("unexpected character `{c}`")),
            };
            (tok, 1)
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            return Ok(());
        }
        let found = self
            .peek()
            .map(Tok::describe)
            .unwrap_or_else(|| "end of input".into());
        err(self.offset(), format!("expected {}, found {found}", t.describe()))
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let left = self.imp()?;
        if self.eat(&Tok::Iff) {
            let right = self.iff()?;
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.disj()?;
        if self.eat(&Tok::Imp) {
            let right = self.imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let first = self.conj()?;
        let op = match self.peek() {
            Some(Tok::Or) => Tok::Or,
            Some(Tok::Tensor2) => Tok::Tensor2,
            _ => return Ok(first),
        };
        let mut items = vec![first];
        loop {
            match self.peek() {
                Some(t) if *t == op => {
                    self.pos += 1;
                    items.push(self.conj()?);
                }
                Some(Tok::Or | Tok::Tensor2) => {
                    return err(
                        self.offset(),
                        "`|` and `(+)` cannot be mixed without parentheses",
                    )
                }
                _ => break,
            }
        }
        let mut acc = items.pop().expect("at least two operands");
        while let Some(next) = items.pop() {
            acc = match op {
                Tok::Or => Formula::or(next, acc),
                _ => Formula::tensor2(next, acc),
            };
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        if self.eat(&Tok::And) {
            let right = self.conj()?;
            return Ok(Formula::and(left, right));
        }
        Ok(left)
    }

    fn binder_atom(&mut self) -> Result<Atom, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(name)) => {
                let atom = Atom::new(&name).or_else(|e| err(at, e.to_string()))?;
                self.expect(Tok::Dot)?;
                Ok(atom)
            }
            other => err(
                at,
                format!(
                    "expected a bound atom, found {}",
                    other.map(|t| t.describe()).unwrap_or_else(|| "end of input".into())
                ),
            ),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::K) => {
                self.pos += 1;
                Ok(Formula::k(self.unary()?))
            }
            Some(Tok::Kh) => {
                self.pos += 1;
                let body = self.unary()?;
                Formula::kh(body).or_else(|e| err(at, e.to_string()))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let announced = self.iff()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::announce(announced, self.unary()?))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let announced = self.iff()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(announced, self.unary()?))
            }
            Some(Tok::BoxKw) => {
                self.pos += 1;
                let body = self.unary()?;
                let r = fresh_atom(&body.atoms());
                Ok(Formula::forall(
                    r.clone(),
                    Formula::announce(Formula::Atom(r), body),
                ))
            }
            Some(Tok::Forall) => {
                self.pos += 1;
                let p = self.binder_atom()?;
                Ok(Formula::forall(p, self.iff()?))
            }
            Some(Tok::Exists) => {
                self.pos += 1;
                let p = self.binder_atom()?;
                Ok(Formula::exists(p, self.iff()?))
            }
            _ => self.atomic(),
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(n),
            _ => err(at, "expected a number"),
        }
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(name)) => Formula::atom(&name).or_else(|e| err(at, e.to_string())),
            Some(Tok::Bot) => Ok(Formula::Bottom),
            Some(Tok::Top) => Ok(Formula::top()),
            Some(Tok::LParen) => {
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::TensorKw) => {
                self.expect(Tok::LBrack)?;
                let k = self.number()?;
                self.expect(Tok::Comma)?;
                let n = self.number()?;
                self.expect(Tok::RBrack)?;
                let sig = TensorSig::new(k, n).or_else(|e| err(at, e.to_string()))?;
                self.expect(Tok::LParen)?;
                let mut args = vec![self.iff()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.iff()?);
                }
                self.expect(Tok::RParen)?;
                Formula::tensor(sig, args).or_else(|e| err(at, e.to_string()))
            }
            Some(Tok::Eq) => {
                self.expect(Tok::LParen)?;
                let a = self.iff()?;
                self.expect(Tok::Comma)?;
                let b = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(dependence(a, b))
            }
            Some(t) => err(at, format!("unexpected {}", t.describe())),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// `=(a,b)`, expanded to `(a | ~a) -> (b | ~b)`.
pub fn dependence(a: Formula, b: Formula) -> Formula {
    let decide = |x: Formula| Formula::or(x.clone(), Formula::not(x));
    Formula::implies(decide(a), decide(b))
}

/// Parses a formula, expanding every abbreviation to primitive connectives.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let f = p.iff()?;
    if let Some(t) = p.peek() {
        let t = t.describe();
        return Err(ParseError {
            position: p.offset(),
            message: format!("unexpected {t} after complete formula"),
        }
        .into());
    }
    Ok(f)
}
