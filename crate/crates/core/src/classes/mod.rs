//! Equivariant-class expressions: the atoms that have explicit localization
//! formulas, their algebra, codimension bookkeeping and validation.

mod eval;
mod parse;

pub use eval::{
    euler_inv, eval_atom, eval_contact, eval_hypersurface, eval_incidency, eval_o1,
    eval_o1_all, eval_r1, evaluate, psi_factor, psi_factor_with_sums, EulerParts,
};

pub use parse::parse_expression;

use std::fmt;

use thiserror::Error;

use crate::arith::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("Psi exponent list has length {got}, expected m = {expected}")]
    PsiLength { expected: usize, got: usize },
    #[error("mark {mark} out of range 1..={m}")]
    MarkOutOfRange { mark: usize, m: usize },
    #[error("Jet requires a marked point")]
    JetWithoutMark,
    #[error("multiple Psi atoms in one product term")]
    MultiplePsi,
    #[error("inhomogeneous sum: terms of codimension {0} and {1}")]
    Inhomogeneous(i64, i64),
    #[error("class has codimension {got}, but dim M_0,{m}(P^{n},{d}) = {expected}")]
    CodimMismatch {
        n: u32,
        d: u32,
        m: usize,
        expected: i64,
        got: i64,
    },
}

/// The equivariant classes with built-in localization formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `c_top(δ_* ev^* ⊕ O(b_i))`; one entry per degree of a complete
    /// intersection.
    Hypersurface(Vec<u32>),
    /// `c_top(E_{d,m})` of the contact bundle.
    Contact,
    /// `c_top(R¹δ_* ev^* O(k))`, `k < 0`.
    R1(i64),
    /// `δ_*(ev^* h^r)`; the parameter is the exponent of `h`.
    Incidency(u32),
    /// `∏_j ev_j^* O(1)` over all marks.
    O1,
    /// `ev_j^* O(1)` for the 1-based mark `j`.
    O1i(usize),
    /// `ψ_1^{a_1} ⋯ ψ_m^{a_m}`.
    Psi(Vec<u32>),
    /// `c_top(J^p(ev_1^* O(z)))`, expanded before evaluation.
    Jet { p: u32, z: u32 },
}

impl Atom {
    /// True for atoms whose value depends on the marking.
    pub fn uses_marks(&self) -> bool {
        matches!(self, Atom::O1 | Atom::O1i(_) | Atom::Psi(_) | Atom::Jet { .. })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Hypersurface(b) if b.len() == 1 => write!(f, "Hypersurface({})", b[0]),
            Atom::Hypersurface(b) => write!(f, "Hypersurface({})", int_list(b)),
            Atom::Contact => write!(f, "Contact()"),
            Atom::R1(k) => write!(f, "R1({k})"),
            Atom::Incidency(r) => write!(f, "Incidency({r})"),
            Atom::O1 => write!(f, "O1()"),
            Atom::O1i(j) => write!(f, "O1_i({j})"),
            Atom::Psi(a) => write!(f, "Psi({})", int_list(a)),
            Atom::Jet { p, z } => write!(f, "Jet({p},{z})"),
        }
    }
}

fn int_list(v: &[u32]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// A polynomial expression in equivariant classes with rational scalars.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClassExpression {
    Scalar(Rat),
    Atom(Atom),
    Sum(Vec<ClassExpression>),
    Product(Vec<ClassExpression>),
    Power(Box<ClassExpression>, u32),
}

impl From<Atom> for ClassExpression {
    fn from(a: Atom) -> Self {
        ClassExpression::Atom(a)
    }
}

impl ClassExpression {
    pub fn scalar(v: i64) -> Self {
        ClassExpression::Scalar(Rat::from_int(v))
    }

    pub fn pow(self, exp: u32) -> Self {
        ClassExpression::Power(Box::new(self), exp)
    }

    /// Codimension of the class on `M̄_{0,m}(P^n, d)`.
    pub fn codim(&self, n: u32, d: u32, m: usize) -> Result<i64, ClassError> {
        let d = d as i64;
        Ok(match self {
            ClassExpression::Scalar(_) => 0,
            ClassExpression::Atom(a) => match a {
                Atom::Hypersurface(bs) => bs.iter().map(|&b| b as i64 * d + 1).sum(),
                Atom::Contact => 2 * d - 1,
                Atom::R1(k) => -k * d - 1,
                Atom::Incidency(r) => *r as i64 - 1,
                Atom::O1 => m as i64,
                Atom::O1i(_) => 1,
                Atom::Psi(a) => a.iter().map(|&x| x as i64).sum(),
                Atom::Jet { p, .. } => *p as i64 + 1,
            },
            ClassExpression::Sum(terms) => {
                let mut common: Option<i64> = None;
                for t in terms {
                    let c = t.codim(n, d as u32, m)?;
                    match common {
                        Some(prev) if prev != c => return Err(ClassError::Inhomogeneous(prev, c)),
                        _ => common = Some(c),
                    }
                }
                common.unwrap_or(0)
            }
            ClassExpression::Product(fs) => {
                let mut total = 0;
                for f in fs {
                    total += f.codim(n, d as u32, m)?;
                }
                total
            }
            ClassExpression::Power(b, e) => b.codim(n, d as u32, m)? * *e as i64,
        })
    }

    /// Largest number of Psi factors in any monomial after distributing
    /// products and powers over sums.
    pub fn psi_count(&self) -> u32 {
        match self {
            ClassExpression::Scalar(_) => 0,
            ClassExpression::Atom(Atom::Psi(_)) => 1,
            ClassExpression::Atom(Atom::Jet { p, .. }) => u32::from(*p > 0),
            ClassExpression::Atom(_) => 0,
            ClassExpression::Sum(ts) => ts.iter().map(|t| t.psi_count()).max().unwrap_or(0),
            ClassExpression::Product(fs) => fs.iter().map(|f| f.psi_count()).sum(),
            ClassExpression::Power(b, e) => b.psi_count().saturating_mul(*e),
        }
    }

    /// Checks atom parameters against `(n, d, m)`, the one-Psi-per-term
    /// rule and homogeneity. Does not compare against the dimension; see
    /// [`ClassExpression::check_dimension`].
    pub fn validate(&self, n: u32, d: u32, m: usize) -> Result<(), ClassError> {
        self.validate_atoms(m)?;
        if self.psi_count() > 1 {
            return Err(ClassError::MultiplePsi);
        }
        self.codim(n, d, m)?;
        Ok(())
    }

    /// Validates and requires codimension `n + (n+1)d + m - 3`.
    pub fn check_dimension(&self, n: u32, d: u32, m: usize) -> Result<(), ClassError> {
        self.validate(n, d, m)?;
        let expected = moduli_dimension(n, d, m);
        let got = self.codim(n, d, m)?;
        if got != expected {
            return Err(ClassError::CodimMismatch {
                n,
                d,
                m,
                expected,
                got,
            });
        }
        Ok(())
    }

    fn validate_atoms(&self, m: usize) -> Result<(), ClassError> {
        match self {
            ClassExpression::Scalar(_) => Ok(()),
            ClassExpression::Atom(a) => match a {
                Atom::Hypersurface(bs) => {
                    if bs.is_empty() || bs.contains(&0) {
                        Err(ClassError::Parameter("Hypersurface degrees must be positive".into()))
                    } else {
                        Ok(())
                    }
                }
                Atom::Contact | Atom::O1 => Ok(()),
                Atom::R1(k) if *k >= 0 => {
                    Err(ClassError::Parameter(format!("R1 needs a negative twist, got {k}")))
                }
                Atom::R1(_) => Ok(()),
                Atom::Incidency(r) if *r < 2 => Err(ClassError::Parameter(format!(
                    "Incidency exponent must be at least 2, got {r}"
                ))),
                Atom::Incidency(_) => Ok(()),
                Atom::O1i(j) if *j == 0 || *j > m => Err(ClassError::MarkOutOfRange { mark: *j, m }),
                Atom::O1i(_) => Ok(()),
                Atom::Psi(a) if a.len() != m => Err(ClassError::PsiLength {
                    expected: m,
                    got: a.len(),
                }),
                Atom::Psi(_) => Ok(()),
                Atom::Jet { .. } if m == 0 => Err(ClassError::JetWithoutMark),
                Atom::Jet { z, .. } if *z == 0 => {
                    Err(ClassError::Parameter("Jet twist z must be positive".into()))
                }
                Atom::Jet { .. } => Ok(()),
            },
            ClassExpression::Sum(xs) | ClassExpression::Product(xs) => {
                xs.iter().try_for_each(|x| x.validate_atoms(m))
            }
            ClassExpression::Power(b, _) => b.validate_atoms(m),
        }
    }

    /// Replaces every `Jet` atom by its expansion.
    pub fn expand_jets(&self, m: usize) -> Result<ClassExpression, ClassError> {
        Ok(match self {
            ClassExpression::Atom(Atom::Jet { p, z }) => expand_jet(*p, *z, m)?,
            ClassExpression::Sum(xs) => ClassExpression::Sum(
                xs.iter().map(|x| x.expand_jets(m)).collect::<Result<_, _>>()?,
            ),
            ClassExpression::Product(xs) => ClassExpression::Product(
                xs.iter().map(|x| x.expand_jets(m)).collect::<Result<_, _>>()?,
            ),
            ClassExpression::Power(b, e) => ClassExpression::Power(Box::new(b.expand_jets(m)?), *e),
            other => other.clone(),
        })
    }

    /// Visits every atom.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            ClassExpression::Atom(a) => out.push(a),
            ClassExpression::Sum(xs) | ClassExpression::Product(xs) => {
                xs.iter().for_each(|x| x.collect_atoms(out))
            }
            ClassExpression::Power(b, _) => b.collect_atoms(out),
            ClassExpression::Scalar(_) => {}
        }
    }
}

/// `dim M̄_{0,m}(P^n, d) = n + (n+1)d + m - 3`.
pub fn moduli_dimension(n: u32, d: u32, m: usize) -> i64 {
    n as i64 + (n as i64 + 1) * d as i64 + m as i64 - 3
}

/// Elementary symmetric polynomials `e_0..e_p` of `{1, …, p}`.
fn elementary_symmetric(p: u32) -> Vec<Rat> {
    let mut coeffs = vec![Rat::one()];
    for k in 1..=p as i64 {
        let mut next = coeffs.clone();
        next.push(Rat::zero());
        for i in 0..coeffs.len() {
            next[i + 1] += &coeffs[i] * Rat::from_int(k);
        }
        coeffs = next;
    }
    coeffs
}

/// The top Chern class of the jet bundle `J^p(ev_1^* O(z))` as an explicit
/// sum of single-Psi terms:
/// `Σ_{j=0}^{p} e_{p-j}(1,…,p) · (z·ev_1^*h)^{j+1} · ψ_1^{p-j}`,
/// which is `∏_{k=0}^{p} (z·ev_1^*h + k·ψ_1)` expanded.
pub fn expand_jet(p: u32, z: u32, m: usize) -> Result<ClassExpression, ClassError> {
    if m == 0 {
        return Err(ClassError::JetWithoutMark);
    }
    if z == 0 {
        return Err(ClassError::Parameter("Jet twist z must be positive".into()));
    }
    let e = elementary_symmetric(p);
    let zr = Rat::from_int(z as i64);
    let mut terms = Vec::new();
    for j in 0..=p {
        let psi_exp = p - j;
        let coeff = &e[psi_exp as usize] * zr.pow(j as i64 + 1).expect("positive power");
        let mut factors = Vec::new();
        if !coeff.is_one() {
            factors.push(ClassExpression::Scalar(coeff));
        }
        let h = ClassExpression::Atom(Atom::O1i(1));
        factors.push(if j == 0 { h } else { h.pow(j + 1) });
        if psi_exp > 0 {
            let mut a = vec![0; m];
            a[0] = psi_exp;
            factors.push(ClassExpression::Atom(Atom::Psi(a)));
        }
        terms.push(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            ClassExpression::Product(factors)
        });
    }
    Ok(if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        ClassExpression::Sum(terms)
    })
}

impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpression::Scalar(r) => write!(f, "{r}"),
            ClassExpression::Atom(a) => write!(f, "{a}"),
            ClassExpression::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if matches!(t, ClassExpression::Sum(_)) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
            ClassExpression::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if matches!(x, ClassExpression::Sum(_) | ClassExpression::Product(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            ClassExpression::Power(b, e) => {
                let bare = match b.as_ref() {
                    ClassExpression::Atom(_) => true,
                    ClassExpression::Scalar(r) => r.is_integer() && !r.is_negative(),
                    _ => false,
                };
                if bare {
                    write!(f, "{b}^{e}")
                } else {
                    write!(f, "({b})^{e}")
                }
            }
        }
    }
}
