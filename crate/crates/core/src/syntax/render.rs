use std::fmt;

use crate::syntax::formula::{Atom, Formula, TensorSig};

const IFF: u8 = 1;
const IMP: u8 = 2;
const DISJ: u8 = 3;
const CONJ: u8 = 4;
const PREFIX: u8 = 5;
const ATOMIC: u8 = 6;

/// A node as it is printed: either a primitive or a recognized abbreviation.
enum View<'a> {
    Atom(&'a Atom),
    Bottom,
    Top,
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Iff(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Tensor2(&'a Formula, &'a Formula),
    Tensor(TensorSig, &'a [Formula]),
    Implies(&'a Formula, &'a Formula),
    K(&'a Formula),
    Kh(&'a Formula),
    Forall(&'a Atom, &'a Formula),
    Exists(&'a Atom, &'a Formula),
    Announce(&'a Formula, &'a Formula),
    Diamond(&'a Formula, &'a Formula),
}

struct Printer {
    sugar: bool,
    out: String,
}

impl Printer {
    fn view<'a>(&self, f: &'a Formula) -> View<'a> {
        if self.sugar {
            if f.is_top() {
                return View::Top;
            }
            if let Some((a, b)) = f.as_iff() {
                return View::Iff(a, b);
            }
            if let Some(inner) = f.as_negation() {
                match inner {
                    Formula::Forall(p, body) => {
                        if let Some(body) = body.as_negation() {
                            return View::Exists(p, body);
                        }
                    }
                    Formula::Announce(a, body) => {
                        if let Some(body) = body.as_negation() {
                            return View::Diamond(a, body);
                        }
                    }
                    _ => {}
                }
                return View::Not(inner);
            }
        }
        match f {
            Formula::Atom(p) => View::Atom(p),
            Formula::Bottom => View::Bottom,
            Formula::And(a, b) => View::And(a, b),
            Formula::Or(a, b) => View::Or(a, b),
            Formula::Tensor(sig, args) if sig.is_binary() => View::Tensor2(&args[0], &args[1]),
            Formula::Tensor(sig, args) => View::Tensor(*sig, args),
            Formula::Implies(a, b) => View::Implies(a, b),
            Formula::K(a) => View::K(a),
            Formula::Kh(a) => View::Kh(a),
            Formula::Forall(p, a) => View::Forall(p, a),
            Formula::Announce(a, b) => View::Announce(a, b),
        }
    }

    /// Precedence of the printed node and whether it is a binder that extends to the right.
    fn class(&self, f: &Formula) -> (u8, bool) {
        match self.view(f) {
            View::Atom(_) | View::Bottom | View::Top | View::Tensor(..) => (ATOMIC, false),
            View::Not(_) | View::K(_) | View::Kh(_) | View::Announce(..) | View::Diamond(..) => {
                (PREFIX, false)
            }
            View::Forall(..) | View::Exists(..) => (PREFIX, true),
            View::And(..) => (CONJ, false),
            View::Or(..) | View::Tensor2(..) => (DISJ, false),
            View::Implies(..) => (IMP, false),
            View::Iff(..) => (IFF, false),
        }
    }

    fn write(&mut self, f: &Formula, min: u8, tail: bool) {
        let (prec, binder) = self.class(f);
        if prec < min || (binder && !tail) {
            self.out.push('(');
            self.inner(f, true);
            self.out.push(')');
        } else {
            self.inner(f, tail);
        }
    }

    fn infix(&mut self, a: &Formula, op: &str, b: &Formula, left_min: u8, right_min: u8, tail: bool) {
        self.write(a, left_min, false);
        self.out.push_str(op);
        self.write(b, right_min, tail);
    }

    fn inner(&mut self, f: &Formula, tail: bool) {
        match self.view(f) {
            View::Atom(p) => self.out.push_str(p.name()),
            View::Bottom => self.out.push_str("bot"),
            View::Top => self.out.push_str("top"),
            View::Not(a) => {
                self.out.push('~');
                self.write(a, PREFIX, tail);
            }
            View::And(a, b) => self.infix(a, " & ", b, PREFIX, CONJ, tail),
            View::Iff(a, b) => self.infix(a, " <-> ", b, IMP, IFF, tail),
            View::Or(a, b) => {
                let chain = matches!(b, Formula::Or(..));
                self.infix(a, " | ", b, CONJ, if chain { DISJ } else { CONJ }, tail)
            }
            View::Tensor2(a, b) => {
                let chain = matches!(b, Formula::Tensor(sig, _) if sig.is_binary());
                self.infix(a, " (+) ", b, CONJ, if chain { DISJ } else { CONJ }, tail)
            }
            View::Tensor(sig, args) => {
                self.out.push_str(&format!("tensor[{},{}](", sig.k(), sig.n()));
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.write(a, IFF, true);
                }
                self.out.push(')');
            }
            View::Implies(a, b) => self.infix(a, " -> ", b, DISJ, IMP, tail),
            View::K(a) => {
                self.out.push_str("K ");
                self.write(a, PREFIX, tail);
            }
            View::Kh(a) => {
                self.out.push_str("Kh ");
                self.write(a, PREFIX, tail);
            }
            View::Forall(p, a) => {
                self.out.push_str(&format!("forall {p}. "));
                self.write(a, IFF, tail);
            }
            View::Exists(p, a) => {
                self.out.push_str(&format!("exists {p}. "));
                self.write(a, IFF, tail);
            }
            View::Announce(a, b) => {
                self.out.push('[');
                self.write(a, IFF, true);
                self.out.push_str("] ");
                self.write(b, PREFIX, tail);
            }
            View::Diamond(a, b) => {
                self.out.push('<');
                self.write(a, IFF, true);
                self.out.push_str("> ");
                self.write(b, PREFIX, tail);
            }
        }
    }
}

/// Prints primitives only, with minimal parentheses.
pub fn render(f: &Formula) -> String {
    render_with(f, false)
}

/// Prints `~`, `top`, `<->`, `exists`, and `<a> b` wherever the tree has their shape.
pub fn render_sugared(f: &Formula) -> String {
    render_with(f, true)
}

fn render_with(f: &Formula, sugar: bool) -> String {
    let mut p = Printer {
        sugar,
        out: String::new(),
    };
    p.write(f, IFF, true);
    p.out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
