use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::poly::{Point, Polynomial};
use super::space::{ParamId, ParamSpace};
use super::RatFuncError;

/// Quotient of two polynomials in normalized form.
///
/// Normalization divides out the joint integer content of numerator and
/// denominator, cancels shared monomial factors and makes the leading
/// coefficient of the denominator positive. A constant denominator is folded
/// into the numerator so that polynomials are stored as `num / 1`. No
/// polynomial gcd is computed; use [`RationalFunction::equiv`] to compare.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
        }
    }
}

impl From<BigRational> for RationalFunction {
    fn from(c: BigRational) -> Self {
        Polynomial::constant(c).into()
    }
}

impl RationalFunction {
    pub fn zero() -> Self {
        Polynomial::zero().into()
    }

    pub fn one() -> Self {
        Polynomial::one().into()
    }

    pub fn var(id: ParamId) -> Self {
        Polynomial::var(id).into()
    }

    pub fn constant(c: BigRational) -> Self {
        c.into()
    }

    pub fn integer(n: i64) -> Self {
        BigRational::from_integer(n.into()).into()
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, RatFuncError> {
        if den.is_zero() {
            return Err(RatFuncError::DivisionByZeroFunction);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.as_constant() {
            return Self {
                num: num.scale(&c.recip()),
                den: Polynomial::one(),
            };
        }
        // shared monomial factors
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.cancel_monomial(&g), den.cancel_monomial(&g))
        };
        if let Some(c) = den.as_constant() {
            return Self {
                num: num.scale(&c.recip()),
                den: Polynomial::one(),
            };
        }
        if let Some(c) = proportional(&num, &den) {
            return Self::constant(c);
        }
        if let Some(g) = super::gcd::gcd(&num, &den).filter(|g| !g.is_one()) {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
            if let Some(c) = den.as_constant() {
                return Self {
                    num: num.scale(&c.recip()),
                    den: Polynomial::one(),
                };
            }
        }
        // joint integer content: clear denominators, then divide by the gcd
        let (gn, ln) = num.integer_content();
        let (gd, ld) = den.integer_content();
        let l = num_integer::Integer::lcm(&ln, &ld);
        let g = num_integer::Integer::gcd(&gn, &gd);
        let mut factor = BigRational::new(l, BigInt::one()) / BigRational::from_integer(g);
        if den.leading().is_some_and(|(_, c)| c.is_negative()) {
            factor = -factor;
        }
        if !factor.is_one() {
            num = num.scale(&factor);
            den = den.scale(&factor);
        }
        Self { num, den }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        let mut s = self.num.params();
        s.extend(self.den.params());
        s
    }

    /// Number of stored terms in numerator and denominator together.
    pub fn term_count(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::normalized(&self.num + &other.num, self.den.clone());
        }
        if let Some(q) = self.den.div_exact(&other.den) {
            return Self::normalized(&self.num + &(&other.num * &q), self.den.clone());
        }
        if let Some(q) = other.den.div_exact(&self.den) {
            return Self::normalized(&(&self.num * &q) + &other.num, other.den.clone());
        }
        Self::normalized(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // cheap cross cancellation of identical factors
        let (an, bd) = cancel_equal(&self.num, &other.den);
        let (bn, ad) = cancel_equal(&other.num, &self.den);
        Self::normalized(&an * &bn, &ad * &bd)
    }

    pub fn recip(&self) -> Result<Self, RatFuncError> {
        if self.is_zero() {
            return Err(RatFuncError::DivisionByZeroFunction);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, RatFuncError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self::normalized(self.num.pow(exp), self.den.pow(exp))
    }

    /// Exact value at `point`.
    pub fn eval(&self, point: &Point) -> Result<BigRational, RatFuncError> {
        let d = self.den.eval(point).map_err(RatFuncError::UnboundParameter)?;
        let n = self.num.eval(point).map_err(RatFuncError::UnboundParameter)?;
        if d.is_zero() {
            return Err(RatFuncError::PoleAtPoint);
        }
        Ok(n / d)
    }

    /// Partial evaluation: parameters bound in `point` are replaced by their
    /// values. Fails if the resulting denominator is identically zero.
    pub fn substitute(&self, point: &Point) -> Result<Self, RatFuncError> {
        Self::new(self.num.substitute(point), self.den.substitute(point))
    }

    /// Exact equivalence by cross multiplication.
    pub fn equiv(&self, other: &Self) -> bool {
        if self == other {
            return true;
        }
        (&self.num * &other.den) == (&other.num * &self.den)
    }

    pub fn display<'a>(&'a self, space: &'a ParamSpace) -> RationalDisplay<'a> {
        RationalDisplay { rf: self, space }
    }

    pub fn format(&self, space: &ParamSpace) -> String {
        self.display(space).to_string()
    }
}

fn cancel_equal(n: &Polynomial, d: &Polynomial) -> (Polynomial, Polynomial) {
    if !d.is_one() && n == d {
        (Polynomial::one(), Polynomial::one())
    } else {
        (n.clone(), d.clone())
    }
}

/// `Some(c)` when `num == c * den`.
fn proportional(num: &Polynomial, den: &Polynomial) -> Option<BigRational> {
    if num.len() != den.len() {
        return None;
    }
    let mut ratio: Option<BigRational> = None;
    for ((mn, cn), (md, cd)) in num.terms().zip(den.terms()) {
        if mn != md {
            return None;
        }
        let r = cn / cd;
        match &ratio {
            None => ratio = Some(r),
            Some(x) if *x == r => {}
            Some(_) => return None,
        }
    }
    ratio
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::add(self, rhs)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::sub(self, rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::mul(self, rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

pub struct RationalDisplay<'a> {
    rf: &'a RationalFunction,
    space: &'a ParamSpace,
}

impl fmt::Display for RationalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rf.den.is_one() {
            write!(f, "{}", self.rf.num.display(self.space))
        } else {
            write!(
                f,
                "({})/({})",
                self.rf.num.display(self.space),
                self.rf.den.display(self.space)
            )
        }
    }
}

/// Builds `c * m` with an integer coefficient; handy in tests and oracles.
pub fn int_term(c: i64, factors: &[(ParamId, u32)]) -> Polynomial {
    Polynomial::term(
        BigRational::from_integer(c.into()),
        Monomial::from_pairs(factors.iter().copied()),
    )
}
