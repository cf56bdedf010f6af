use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::space::{ParamId, ParamSpace};

/// Assignment of exact values to parameters.
pub type Point = BTreeMap<ParamId, BigRational>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by [`Monomial`], so iteration is in
/// ascending graded-lex order and the leading term is the last entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(id: ParamId) -> Self {
        Self::term(BigRational::one(), Monomial::var(id))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// The value of a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u64 {
        self.leading().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn params(&self) -> BTreeSet<ParamId> {
        self.terms.keys().flat_map(|m| m.params()).collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(t, k)| (t.mul(m), k.clone())).collect(),
        }
    }

    fn div_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(t, k)| (t.div(m).expect("monomial divides every term"), k.clone()))
                .collect(),
        }
    }

    /// Greatest common monomial divisor of all terms (one for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. With a single divisor the multivariate division algorithm
    /// has zero remainder exactly when the divisor divides the dividend.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading()?;
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(lm)?;
            let qc = c / lc;
            let step = Polynomial::term(qc.clone(), qm.clone());
            rem = &rem - &(divisor * &step);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact evaluation. Fails with the first parameter missing from `point`.
    ///
    /// Terms are summed as integers over the common denominator
    /// `lcm(coefficient denominators) * prod(b_i^d_i)` where `a_i/b_i` is the
    /// value of parameter `i` and `d_i` its highest exponent, so only the
    /// final quotient is reduced.
    pub fn eval(&self, point: &Point) -> Result<BigRational, ParamId> {
        let mut max_exp: BTreeMap<ParamId, u32> = BTreeMap::new();
        for m in self.terms.keys() {
            for &(id, e) in m.factors() {
                if !point.contains_key(&id) {
                    return Err(id);
                }
                let d = max_exp.entry(id).or_insert(0);
                *d = (*d).max(e);
            }
        }
        let (_, lcm) = self.integer_content();
        let mut powers: HashMap<(ParamId, u32), BigInt> = HashMap::new();
        let mut power = |base: &BigInt, id: ParamId, tag: u32, e: u32| -> BigInt {
            powers
                .entry((id, tag * 65_536 + e))
                .or_insert_with(|| num_traits::pow(base.clone(), e as usize))
                .clone()
        };
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.numer() * (&lcm / c.denom());
            for (&id, &d) in &max_exp {
                let v = &point[&id];
                let e = m.exponent(id);
                if e > 0 {
                    t *= power(v.numer(), id, 0, e);
                }
                if d > e {
                    t *= power(v.denom(), id, 1, d - e);
                }
            }
            acc += t;
        }
        let mut den = lcm;
        for (&id, &d) in &max_exp {
            den *= power(point[&id].denom(), id, 1, d);
        }
        Ok(BigRational::new(acc, den))
    }

    /// Substitutes exact values for some parameters, leaving the rest symbolic.
    pub fn substitute(&self, point: &Point) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(id, e) in m.factors() {
                match point.get(&id) {
                    Some(v) => coeff *= num_traits::pow(v.clone(), e as usize),
                    None => rest.push((id, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), coeff);
        }
        out
    }

    /// Least common multiple of coefficient denominators and gcd of the
    /// numerators, i.e. `self = (g / l) * primitive`.
    pub(crate) fn integer_content(&self) -> (BigInt, BigInt) {
        let mut l = BigInt::one();
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
            g = g.gcd(c.numer());
        }
        (g, l)
    }

    pub fn display<'a>(&'a self, space: &'a ParamSpace) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, space }
    }

    pub(crate) fn cancel_monomial(&self, m: &Monomial) -> Polynomial {
        self.div_monomial(m)
    }

    pub fn to_f64_terms(&self) -> Vec<(f64, Vec<(ParamId, u32)>)> {
        self.terms
            .iter()
            .map(|(m, c)| (rational_to_f64(c), m.factors().to_vec()))
            .collect()
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator may individually overflow f64
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n - d - 60).max(0) as usize;
        let scaled = BigRational::new(r.numer().clone(), r.denom() << shift);
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity(self.len() * rhs.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                }
            }
        }
        Polynomial {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    space: &'a ParamSpace,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", m.display(self.space))?;
            } else {
                write!(f, "{abs}*{}", m.display(self.space))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn cancellation_to_constant() {
        let p2 = Polynomial::var(ParamId(0));
        let a = &p2 + &Polynomial::one();
        let b = -&p2;
        assert_eq!(&a + &b, Polynomial::one());
    }

    #[test]
    fn single_term_product() {
        let p2 = Polynomial::var(ParamId(0));
        let p3 = Polynomial::var(ParamId(1));
        let prod = &p2 * &p3;
        assert_eq!(prod.len(), 1);
        let (m, c) = prod.leading().unwrap();
        assert!(c.is_one());
        assert_eq!(m.exponent(ParamId(0)), 1);
        assert_eq!(m.exponent(ParamId(1)), 1);
    }

    #[test]
    fn sub_leaves_constant() {
        // (88*p2 - 100) - 88*p2 = -100
        let p2 = Polynomial::var(ParamId(0));
        let a = &p2.scale(&q(88)) - &Polynomial::constant(q(100));
        let b = p2.scale(&q(88));
        assert_eq!(&a - &b, Polynomial::constant(q(-100)));
    }

    #[test]
    fn exact_division() {
        let x = Polynomial::var(ParamId(0));
        let y = Polynomial::var(ParamId(1));
        let a = &x + &y;
        let b = &x - &Polynomial::one();
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!((&prod + &Polynomial::one()).div_exact(&a), None);
        assert_eq!(a.div_exact(&Polynomial::zero()), None);
    }

    #[test]
    fn display_format() {
        let space = ParamSpace::from_names(["p2", "p3"]);
        let p2 = Polynomial::var(ParamId(0));
        let p3 = Polynomial::var(ParamId(1));
        let p = &(&(&p2 * &p3).scale(&q(100)) + &p2.scale(&q(98))) - &Polynomial::constant(q(99));
        assert_eq!(p.display(&space).to_string(), "100*p2*p3 + 98*p2 - 99");
        let r = Polynomial::term(BigRational::new(2.into(), 5.into()), Monomial::power(ParamId(1), 3));
        assert_eq!((-&r).display(&space).to_string(), "-2/5*p3^3");
        assert_eq!(Polynomial::zero().display(&space).to_string(), "0");
    }
}
