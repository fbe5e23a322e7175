//! Text syntax for class expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := atom ('^' uint)?
//! atom    := rational | call | '(' expr ')' | '-' atom
//! rational:= int ('/' uint)?
//! call    := Hypersurface(uint | [uint, ...]) | Contact() | R1(int)
//!          | Incidency(uint) | O1() | O1_i(uint) | Psi([uint, ...])
//!          | Jet(uint, uint)
//! ```
//!
//! Whitespace is ignored. `a - b` is stored as `a + (-1)*b`. Positions in
//! errors are 1-based character columns.

use std::str::FromStr;

use num_bigint::BigInt;

use super::{Atom, ClassError, ClassExpression};
use crate::arith::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ClassError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let v = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Int(v), pos });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
        } else if "()[],+-*/^".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        } else {
            return Err(syntax(pos, format!("unexpected character '{c}'")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len() + 1,
    });
    Ok(out)
}

fn syntax(pos: usize, msg: impl Into<String>) -> ClassError {
    ClassError::Syntax {
        pos,
        msg: msg.into(),
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ClassError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected '{c}', found {}", describe(self.peek()))))
        }
    }

    fn uint(&mut self) -> Result<u64, ClassError> {
        let pos = self.pos();
        match self.bump().tok {
            Tok::Int(v) => u64::try_from(&v).map_err(|_| syntax(pos, "integer too large")),
            other => Err(syntax(pos, format!("expected an unsigned integer, found {}", describe(&other)))),
        }
    }

    fn u32(&mut self) -> Result<u32, ClassError> {
        let pos = self.pos();
        u32::try_from(self.uint()?).map_err(|_| syntax(pos, "integer too large"))
    }

    fn int(&mut self) -> Result<i64, ClassError> {
        let pos = self.pos();
        let neg = self.eat('-');
        let v = self.uint()?;
        let v = i64::try_from(v).map_err(|_| syntax(pos, "integer too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn uint_list(&mut self) -> Result<Vec<u32>, ClassError> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(self.u32()?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn expr(&mut self) -> Result<ClassExpression, ClassError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                let t = self.term()?;
                terms.push(ClassExpression::Product(vec![ClassExpression::scalar(-1), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            ClassExpression::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<ClassExpression, ClassError> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            ClassExpression::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<ClassExpression, ClassError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.u32()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ClassExpression, ClassError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('-') => {
                self.bump();
                if let Tok::Int(_) = self.peek() {
                    let r = self.rational()?;
                    Ok(ClassExpression::Scalar(-r))
                } else {
                    let inner = self.atom()?;
                    Ok(ClassExpression::Product(vec![ClassExpression::scalar(-1), inner]))
                }
            }
            Tok::Int(_) => Ok(ClassExpression::Scalar(self.rational()?)),
            Tok::Ident(name) => {
                self.bump();
                self.call(&name, pos).map(ClassExpression::Atom)
            }
            other => Err(syntax(pos, format!("expected a class, number or '(', found {}", describe(&other)))),
        }
    }

    fn rational(&mut self) -> Result<Rat, ClassError> {
        let num = match self.bump().tok {
            Tok::Int(v) => v,
            _ => unreachable!("caller checked for an integer"),
        };
        if self.eat('/') {
            let pos = self.pos();
            let den = match self.bump().tok {
                Tok::Int(v) => v,
                other => {
                    return Err(syntax(pos, format!("expected a denominator, found {}", describe(&other))))
                }
            };
            Rat::new(num, den).map_err(|_| syntax(pos, "zero denominator"))
        } else {
            Ok(Rat::from_bigint(num))
        }
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Atom, ClassError> {
        self.expect('(')?;
        let atom = match name {
            "Hypersurface" => {
                if *self.peek() == Tok::Sym('[') {
                    Atom::Hypersurface(self.uint_list()?)
                } else {
                    Atom::Hypersurface(vec![self.u32()?])
                }
            }
            "Contact" => Atom::Contact,
            "R1" => {
                let arg = self.pos();
                let k = self.int()?;
                if k >= 0 {
                    return Err(syntax(arg, format!("R1 needs a negative integer, got {k}")));
                }
                Atom::R1(k)
            }
            "Incidency" => {
                let arg = self.pos();
                let r = self.u32()?;
                if r < 2 {
                    return Err(syntax(arg, format!("Incidency needs an exponent of at least 2, got {r}")));
                }
                Atom::Incidency(r)
            }
            "O1" => Atom::O1,
            "O1_i" => {
                let arg = self.pos();
                let j = self.uint()?;
                if j == 0 {
                    return Err(syntax(arg, "marks are numbered from 1"));
                }
                Atom::O1i(j as usize)
            }
            "Psi" => Atom::Psi(self.uint_list()?),
            "Jet" => {
                let p = self.u32()?;
                self.expect(',')?;
                let z = self.u32()?;
                Atom::Jet { p, z }
            }
            _ => return Err(syntax(pos, format!("unknown class '{name}'"))),
        };
        self.expect(')')?;
        Ok(atom)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("'{v}'"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".to_string(),
    }
}

impl FromStr for ClassExpression {
    type Err = ClassError;

    /// Syntax only; use [`parse_expression`] to also validate.
    fn from_str(text: &str) -> Result<Self, ClassError> {
        let mut p = Parser {
            toks: tokenize(text)?,
            at: 0,
        };
        let e = p.expr()?;
        if *p.peek() != Tok::End {
            return Err(syntax(p.pos(), format!("unexpected {}", describe(p.peek()))));
        }
        Ok(e)
    }
}

/// Parses and validates an expression for `M̄_{0,m}(P^n, d)`.
pub fn parse_expression(text: &str, n: u32, d: u32, m: usize) -> Result<ClassExpression, ClassError> {
    let e: ClassExpression = text.parse()?;
    e.validate(n, d, m)?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::moduli_dimension;
    use proptest::prelude::*;

    fn atom(a: Atom) -> ClassExpression {
        ClassExpression::Atom(a)
    }

    #[test]
    fn basic_atoms() {
        assert_eq!(
            parse_expression("Hypersurface(5)", 4, 2, 0).unwrap(),
            atom(Atom::Hypersurface(vec![5]))
        );
        assert_eq!(
            parse_expression(" Hypersurface( [3, 3] ) ", 5, 1, 0).unwrap(),
            atom(Atom::Hypersurface(vec![3, 3]))
        );
        assert_eq!(parse_expression("R1(-1)^2", 1, 3, 0).unwrap(), atom(Atom::R1(-1)).pow(2));
    }

    #[test]
    fn contact_listing_codim() {
        let e = parse_expression("Incidency(3)^2*Incidency(2)^1*Contact()", 3, 2, 0).unwrap();
        assert_eq!(e.codim(3, 2, 0).unwrap(), 8);
        assert_eq!(moduli_dimension(3, 2, 0), 8);
    }

    #[test]
    fn scaled_cubic_parses() {
        let e = parse_expression("1/9 * Incidency(2)^5 * Hypersurface(3)", 3, 3, 0).unwrap();
        assert_eq!(
            e,
            ClassExpression::Product(vec![
                ClassExpression::Scalar(Rat::from_frac(1, 9).unwrap()),
                atom(Atom::Incidency(2)).pow(5),
                atom(Atom::Hypersurface(vec![3])),
            ])
        );
    }

    #[test]
    fn rejections() {
        assert_eq!(parse_expression("Psi([1])*Psi([1])", 2, 1, 1), Err(ClassError::MultiplePsi));
        assert!(matches!(
            parse_expression("Contact() + 1", 3, 1, 0),
            Err(ClassError::Inhomogeneous(..))
        ));
        assert!(matches!(
            parse_expression("Psi([1,0])", 2, 1, 1),
            Err(ClassError::PsiLength { .. })
        ));
        assert!(matches!(
            parse_expression("R1(2)", 1, 1, 0),
            Err(ClassError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            parse_expression("Incidency(1)", 1, 1, 0),
            Err(ClassError::Syntax { pos: 11, .. })
        ));
        assert!(matches!(
            parse_expression("Contact(", 3, 1, 0),
            Err(ClassError::Syntax { pos: 9, .. })
        ));
        assert!(matches!(
            parse_expression("Foo()", 3, 1, 0),
            Err(ClassError::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_expression("Contact() $", 3, 1, 0),
            Err(ClassError::Syntax { pos: 11, .. })
        ));
        assert!(matches!(
            parse_expression("Contact() Contact()", 3, 1, 0),
            Err(ClassError::Syntax { pos: 11, .. })
        ));
        assert!(matches!(parse_expression("1/0", 3, 1, 0), Err(ClassError::Syntax { .. })));
        assert!(matches!(
            parse_expression("O1_i(3)", 2, 1, 2),
            Err(ClassError::MarkOutOfRange { mark: 3, m: 2 })
        ));
    }

    #[test]
    fn subtraction_and_negation() {
        let e: ClassExpression = "O1_i(1) - Psi([1])".parse().unwrap();
        assert_eq!(
            e,
            ClassExpression::Sum(vec![
                atom(Atom::O1i(1)),
                ClassExpression::Product(vec![ClassExpression::scalar(-1), atom(Atom::Psi(vec![1]))]),
            ])
        );
        let e: ClassExpression = "-2/3*Contact()".parse().unwrap();
        assert_eq!(
            e,
            ClassExpression::Product(vec![
                ClassExpression::Scalar(Rat::from_frac(-2, 3).unwrap()),
                atom(Atom::Contact),
            ])
        );
    }

    /// Every computation listing from the examples, written in this syntax,
    /// for the moduli spaces it is meant for.
    #[test]
    fn listings_parse_and_match_dimension() {
        let mut cases: Vec<(String, u32, u32, usize)> = Vec::new();
        for d in 1..=3u32 {
            cases.push(("O1()^2".into(), 2, d, 3 * d as usize - 1));
        }
        for d in 1..=8u32 {
            for a in 0..=d {
                cases.push((
                    format!("Incidency(3)^{a}*Incidency(2)^{}*Contact()", 2 * (d - a) + 1),
                    3,
                    d,
                    0,
                ));
            }
        }
        for z in 1..=5 {
            cases.push((format!("{z}*O1_i(1)*({z}*O1_i(1)+Psi([1,0]))*O1_i(2)^2"), 2, 1, 2));
            cases.push((format!("Jet(2,{z})"), 2, 1, 1));
        }
        for (n, d) in [(2u32, 1u32), (3, 1), (3, 2), (4, 1)] {
            cases.push((format!("O1()^{}*Jet({},1)", n - 1, (n + 1) * d - 2), n, d, 1));
        }
        for d in 1..=9u32 {
            cases.push(("Hypersurface(5)".into(), 4, d, 0));
            cases.push(("R1(-1)^2".into(), 1, d, 0));
        }
        for d in 1..=4u32 {
            cases.push(("Hypersurface([3,3])".into(), 5, d, 0));
            cases.push(("Hypersurface([4,2])".into(), 5, d, 0));
            cases.push(("Hypersurface([3,2,2])".into(), 6, d, 0));
            cases.push(("Hypersurface([2,2,2,2])".into(), 7, d, 0));
        }
        for d in 1..=8u32 {
            let scale = 3i64.pow(d - 1);
            cases.push((format!("1/{scale}*Incidency(2)^{}*Hypersurface(3)", d - 1), 3, d, 0));
        }
        for d in 1..=2u32 {
            for a in 0..=4 * d + 1 {
                for b in 0..=4 * d + 1 {
                    if 3 * a + 2 * b <= 4 * d + 1 {
                        let c = 4 * d + 1 - 3 * a - 2 * b;
                        cases.push((
                            format!("Incidency(4)^{a}*Incidency(3)^{b}*Incidency(2)^{c}*Hypersurface(2)"),
                            5,
                            d,
                            0,
                        ));
                    }
                }
            }
        }
        for (text, n, d, m) in cases {
            let e = parse_expression(&text, n, d, m).unwrap_or_else(|err| panic!("{text}: {err}"));
            e.check_dimension(n, d, m)
                .unwrap_or_else(|err| panic!("{text} on ({n},{d},{m}): {err}"));
        }
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| Rat::from_frac(p, q).unwrap())
    }

    fn arb_atom() -> impl Strategy<Value = Atom> {
        prop_oneof![
            proptest::collection::vec(1u32..6, 1..4).prop_map(Atom::Hypersurface),
            Just(Atom::Contact),
            (-5i64..0).prop_map(Atom::R1),
            (2u32..6).prop_map(Atom::Incidency),
            Just(Atom::O1),
            (1usize..4).prop_map(Atom::O1i),
            proptest::collection::vec(0u32..4, 0..4).prop_map(Atom::Psi),
            (0u32..4, 1u32..6).prop_map(|(p, z)| Atom::Jet { p, z }),
        ]
    }

    fn arb_expr() -> impl Strategy<Value = ClassExpression> {
        let leaf = prop_oneof![
            arb_rat().prop_map(ClassExpression::Scalar),
            arb_atom().prop_map(ClassExpression::Atom),
        ];
        leaf.prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..4).prop_map(ClassExpression::Sum),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(ClassExpression::Product),
                (inner, 0u32..5).prop_map(|(b, e)| b.pow(e)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let text = e.to_string();
            let back: ClassExpression = text.parse().map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
            prop_assert_eq!(back, e, "{}", text);
        }
    }
}
