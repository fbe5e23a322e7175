//! Exact rational arithmetic and the combinatorial coefficients used by the
//! localization formulas.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// A denominator vanished under the current torus-weight sample.
    #[error("singular sample: division by zero")]
    SingularSample,
    #[error("degenerate vertex with multiple ψ-exponents (n(v) = {nv}, exponents {exps:?})")]
    DegenerateVertex { nv: i64, exps: Vec<u32> },
    #[error("invalid rational literal `{0}`")]
    Parse(String),
}

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rat(BigRational::from_integer(v))
    }

    /// `num / den`, reduced. Fails with [`ArithError::SingularSample`] when
    /// `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::SingularSample);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn from_frac(num: i64, den: i64) -> Result<Self, ArithError> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::SingularSample);
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::SingularSample);
        }
        Ok(Rat(&self.0 / &rhs.0))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, exp: i64) -> Result<Self, ArithError> {
        if exp >= 0 {
            Ok(Rat(num_traits::pow(self.0.clone(), exp as usize)))
        } else {
            let inv = self.inv()?;
            Ok(Rat(num_traits::pow(inv.0, exp.unsigned_abs() as usize)))
        }
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` significant digits. Display only.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let num = self.numer().abs();
        let den = self.denom().clone();
        // Find exponent e with 10^e <= |x| < 10^(e+1).
        let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
        let ten = BigInt::from(10);
        let ge = |e: i64| -> bool {
            if e >= 0 {
                num >= &den * num_traits::pow(ten.clone(), e as usize)
            } else {
                &num * num_traits::pow(ten.clone(), (-e) as usize) >= den
            }
        };
        while !ge(e) {
            e -= 1;
        }
        while ge(e + 1) {
            e += 1;
        }
        // Scale to an integer with `digits` digits, round half up.
        let shift = digits as i64 - 1 - e;
        let (sn, sd) = if shift >= 0 {
            (&num * num_traits::pow(ten.clone(), shift as usize), den.clone())
        } else {
            (num.clone(), &den * num_traits::pow(ten.clone(), (-shift) as usize))
        };
        let (q, r) = sn.div_rem(&sd);
        let mut mant = if &r * 2 >= sd { q + 1 } else { q };
        if mant.to_string().len() > digits {
            mant /= 10;
            e += 1;
        }
        let mant = mant.to_string();
        let body = if (-5..21).contains(&e) {
            if e >= 0 {
                let int_len = (e + 1) as usize;
                if mant.len() <= int_len {
                    format!("{}{}", mant, "0".repeat(int_len - mant.len()))
                } else {
                    let frac = mant[int_len..].trim_end_matches('0');
                    if frac.is_empty() {
                        mant[..int_len].to_string()
                    } else {
                        format!("{}.{}", &mant[..int_len], frac)
                    }
                }
            } else {
                let zeros = "0".repeat((-e - 1) as usize);
                format!("0.{}{}", zeros, mant.trim_end_matches('0'))
            }
        } else {
            let frac = mant[1..].trim_end_matches('0');
            if frac.is_empty() {
                format!("{}e{}", &mant[..1], e)
            } else {
                format!("{}.{}e{}", &mant[..1], frac, e)
            }
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_bigint(v)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({self})")
    }
}

impl FromStr for Rat {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ArithError::Parse(s.to_string());
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), Some(q.trim())),
            None => (t, None),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        match q {
            None => Ok(Rat::from_bigint(p)),
            Some(q) => {
                let q: BigInt = q.parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Rat::new(p, q)
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0 $op rhs.0)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0 $op &rhs.0)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Rat> for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl MulAssign<Rat> for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        self.0 *= rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

/// Accumulates a long product of integer and rational factors without
/// reducing after every step. Machine-word factors are batched in `i128`
/// before touching the big integers; the result is reduced once in
/// [`FactorProduct::finish`].
#[derive(Clone, Debug)]
pub struct FactorProduct {
    num: BigInt,
    den: BigInt,
    small_num: i128,
    small_den: i128,
}

impl Default for FactorProduct {
    fn default() -> Self {
        Self::new()
    }
}

impl FactorProduct {
    pub fn new() -> Self {
        FactorProduct {
            num: BigInt::one(),
            den: BigInt::one(),
            small_num: 1,
            small_den: 1,
        }
    }

    pub fn mul_int(&mut self, v: i64) {
        match self.small_num.checked_mul(v as i128) {
            Some(x) => self.small_num = x,
            None => {
                self.num *= self.small_num;
                self.small_num = v as i128;
            }
        }
    }

    pub fn div_int(&mut self, v: i64) -> Result<(), ArithError> {
        if v == 0 {
            return Err(ArithError::SingularSample);
        }
        match self.small_den.checked_mul(v as i128) {
            Some(x) => self.small_den = x,
            None => {
                self.den *= self.small_den;
                self.small_den = v as i128;
            }
        }
        Ok(())
    }

    pub fn mul_int_pow(&mut self, v: i64, exp: u32) {
        for _ in 0..exp {
            self.mul_int(v);
        }
    }

    pub fn div_int_pow(&mut self, v: i64, exp: u32) -> Result<(), ArithError> {
        for _ in 0..exp {
            self.div_int(v)?;
        }
        Ok(())
    }

    pub fn mul_big(&mut self, v: &BigInt) {
        self.num *= v;
    }

    pub fn div_big(&mut self, v: &BigInt) -> Result<(), ArithError> {
        if v.is_zero() {
            return Err(ArithError::SingularSample);
        }
        self.den *= v;
        Ok(())
    }

    pub fn mul_rat(&mut self, v: &Rat) {
        self.num *= v.numer();
        self.den *= v.denom();
    }

    /// Multiplies by `v^exp`; a negative exponent requires `v != 0`.
    pub fn mul_rat_pow(&mut self, v: &Rat, exp: i64) -> Result<(), ArithError> {
        if exp < 0 && v.is_zero() {
            return Err(ArithError::SingularSample);
        }
        let e = exp.unsigned_abs() as usize;
        let (top, bottom) = if exp >= 0 {
            (v.numer(), v.denom())
        } else {
            (v.denom(), v.numer())
        };
        self.num *= num_traits::pow(top.clone(), e);
        self.den *= num_traits::pow(bottom.clone(), e);
        Ok(())
    }

    pub fn finish(mut self) -> Rat {
        self.num *= self.small_num;
        self.den *= self.small_den;
        Rat(BigRational::new(self.num, self.den))
    }
}

/// Exact sum of many rationals, added pairwise like a binary counter so
/// that operands of a reduction have similar size.
#[derive(Clone, Debug, Default)]
pub struct RatSum {
    levels: Vec<Option<Rat>>,
}

impl RatSum {
    pub fn new() -> Self {
        RatSum { levels: Vec::new() }
    }

    pub fn add(&mut self, x: Rat) {
        if x.is_zero() {
            return;
        }
        let mut carry = x;
        for slot in self.levels.iter_mut() {
            match slot.take() {
                None => {
                    *slot = Some(carry);
                    return;
                }
                Some(y) => carry += y,
            }
        }
        self.levels.push(Some(carry));
    }

    pub fn merge(&mut self, other: RatSum) {
        for x in other.levels.into_iter().flatten() {
            self.add(x);
        }
    }

    pub fn total(self) -> Rat {
        self.levels.into_iter().flatten().sum()
    }
}

static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());

/// `k!`, memoized up to the largest argument requested so far.
pub fn factorial(k: u32) -> BigUint {
    let k = k as usize;
    if let Some(v) = FACTORIALS.read().expect("factorial table poisoned").get(k) {
        return v.clone();
    }
    let mut table = FACTORIALS.write().expect("factorial table poisoned");
    if table.is_empty() {
        table.push(BigUint::one());
    }
    while table.len() <= k {
        let i = table.len();
        let next = &table[i - 1] * BigUint::from(i);
        table.push(next);
    }
    table[k].clone()
}

/// The multinomial coefficient `(nv-3)! / (N! · ∏ a_i!)` with
/// `N = nv - 3 - Σ a_i`, extended to the unstable and overfull cases:
///
/// * no exponents, or all zero: `1`
/// * `nv = 2` with a single exponent `a`: `(-1)^a`
/// * `Σ a_i > nv - 3 >= 0`: `0`
pub fn multinomial_ext(nv: i64, exps: &[u32]) -> Result<Rat, ArithError> {
    let total: i64 = exps.iter().map(|&a| a as i64).sum();
    if total == 0 {
        return Ok(Rat::one());
    }
    if nv == 2 && exps.len() == 1 {
        return Ok(if exps[0] % 2 == 0 {
            Rat::one()
        } else {
            Rat::from_int(-1)
        });
    }
    if nv < 3 {
        return Err(ArithError::DegenerateVertex {
            nv,
            exps: exps.to_vec(),
        });
    }
    let top = nv - 3;
    if total > top {
        return Ok(Rat::zero());
    }
    let mut den = factorial((top - total) as u32);
    for &a in exps {
        den *= factorial(a);
    }
    let num = factorial(top as u32);
    Ok(Rat::new(
        BigInt::from_biguint(Sign::Plus, num),
        BigInt::from_biguint(Sign::Plus, den),
    )
    .expect("factorials are nonzero"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slow_factorial(k: u32) -> BigUint {
        let mut acc = BigUint::one();
        let mut i = 1u32;
        while i <= k {
            acc *= BigUint::from(i);
            i += 1;
        }
        acc
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(5), slow_factorial(5));
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(factorial(10), BigUint::from(3_628_800u32));
        assert_eq!(factorial(30), slow_factorial(30));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial_ext(5, &[1, 1]).unwrap(), Rat::from_int(2));
        assert_eq!(multinomial_ext(3, &[1]).unwrap(), Rat::zero());
        assert_eq!(multinomial_ext(2, &[3]).unwrap(), Rat::from_int(-1));
        assert_eq!(multinomial_ext(2, &[2]).unwrap(), Rat::one());
        assert_eq!(multinomial_ext(4, &[]).unwrap(), Rat::one());
        assert_eq!(multinomial_ext(1, &[0]).unwrap(), Rat::one());
    }

    #[test]
    fn multinomial_degenerate_is_error() {
        assert!(matches!(
            multinomial_ext(2, &[1, 1]),
            Err(ArithError::DegenerateVertex { .. })
        ));
        assert!(matches!(
            multinomial_ext(1, &[2]),
            Err(ArithError::DegenerateVertex { .. })
        ));
    }

    #[test]
    fn division_by_zero_is_singular() {
        let x = Rat::from_int(3);
        assert_eq!(x.checked_div(&Rat::zero()), Err(ArithError::SingularSample));
        assert_eq!(Rat::zero().inv(), Err(ArithError::SingularSample));
        assert_eq!(Rat::zero().pow(-2), Err(ArithError::SingularSample));
        let mut p = FactorProduct::new();
        assert_eq!(p.div_int(0), Err(ArithError::SingularSample));
    }

    #[test]
    fn display_and_parse() {
        let x = Rat::from_frac(-10, 4).unwrap();
        assert_eq!(x.to_string(), "-5/2");
        assert_eq!(Rat::from_frac(6, 3).unwrap().to_string(), "2");
        assert_eq!("4876875/8".parse::<Rat>().unwrap().to_string(), "4876875/8");
        assert_eq!("12/-8".parse::<Rat>().unwrap().to_string(), "-3/2");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("abc".parse::<Rat>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        let q: Rat = "4876875/8".parse().unwrap();
        assert_eq!(q.to_decimal(15), "609609.375");
        assert_eq!(Rat::from_frac(1, 3).unwrap().to_decimal(5), "0.33333");
        assert_eq!(Rat::from_frac(-2, 3).unwrap().to_decimal(3), "-0.667");
        assert_eq!(Rat::from_int(2875).to_decimal(15), "2875");
        let big: Rat = "367299732093982242625847031250/729".parse().unwrap();
        assert_eq!(big.to_decimal(15), "5.03840510416985e26");
        assert_eq!(Rat::from_frac(1, 64000000).unwrap().to_decimal(4), "1.563e-8");
    }

    #[test]
    fn factor_product_matches_naive() {
        let mut p = FactorProduct::new();
        let mut naive = Rat::one();
        for v in [3i64, -7, 1 << 40, 99991, -(1 << 50), 12345678901] {
            p.mul_int(v);
            naive *= Rat::from_int(v);
            p.div_int(v + 1).unwrap();
            naive = naive.checked_div(&Rat::from_int(v + 1)).unwrap();
        }
        let r = Rat::from_frac(-5, 9).unwrap();
        p.mul_rat_pow(&r, -3).unwrap();
        naive *= r.pow(-3).unwrap();
        assert_eq!(p.finish(), naive);
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-1000i64..1000, 1i64..1000).prop_map(|(p, q)| Rat::from_frac(p, q).unwrap())
    }

    proptest! {
        #[test]
        fn add_sub_round_trip(x in small_rat(), y in small_rat()) {
            prop_assert_eq!(&(&x + &y) - &y, x);
        }

        #[test]
        fn mul_div_round_trip(x in small_rat(), y in small_rat()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!((&x * &y).checked_div(&y).unwrap(), x);
        }

        #[test]
        fn always_reduced(x in small_rat(), y in small_rat()) {
            let z = &x * &y + &x;
            prop_assert!(z.denom() > &BigInt::zero());
            prop_assert!(z.numer().gcd(z.denom()).is_one() || z.is_zero());
        }

        #[test]
        fn multinomial_identity(nv in 3i64..12, exps in proptest::collection::vec(0u32..4, 0..4)) {
            let total: i64 = exps.iter().map(|&a| a as i64).sum();
            let n = nv - 3 - total;
            prop_assume!(n >= 0);
            let v = multinomial_ext(nv, &exps).unwrap();
            let mut lhs = v * Rat::from_bigint(BigInt::from(factorial(n as u32)));
            for &a in &exps {
                lhs *= Rat::from_bigint(BigInt::from(factorial(a)));
            }
            prop_assert_eq!(lhs, Rat::from_bigint(BigInt::from(factorial((nv - 3) as u32))));
        }

        #[test]
        fn multinomial_permutation_invariant(nv in 1i64..10, mut exps in proptest::collection::vec(0u32..4, 0..4)) {
            let a = multinomial_ext(nv, &exps).ok();
            exps.reverse();
            prop_assert_eq!(a, multinomial_ext(nv, &exps).ok());
        }
    }
}
