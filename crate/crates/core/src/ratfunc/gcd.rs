//! Multivariate polynomial gcd by evaluation and interpolation.
//!
//! Polynomials are evaluated at a large integer in one variable, the gcd of
//! the images is found recursively, and the result is lifted back by
//! reading the integer coefficients as balanced base-`x` expansions. Every
//! candidate is confirmed by exact division, so a returned gcd is always a
//! true common divisor.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::monomial::Monomial;
use super::poly::{Point, Polynomial};
use super::space::ParamId;

const ATTEMPTS: usize = 6;

/// Gcd of two nonzero polynomials up to a rational constant, normalized to
/// integer coefficients with positive leading coefficient. `None` if the
/// heuristic gave up.
pub(crate) fn gcd(f: &Polynomial, g: &Polynomial) -> Option<Polynomial> {
    if f.is_zero() || g.is_zero() {
        return None;
    }
    if f.as_constant().is_some() || g.as_constant().is_some() {
        return Some(Polynomial::one());
    }
    let vars: Vec<ParamId> = f.params().union(&g.params()).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let h = heuristic(&primitive(f), &primitive(g), &vars)?;
    Some(primitive(&h))
}

/// Integer-coefficient primitive part with positive leading coefficient.
pub(crate) fn primitive(p: &Polynomial) -> Polynomial {
    let (g, l) = p.integer_content();
    if g.is_zero() {
        return p.clone();
    }
    let mut factor = BigRational::new(l, g);
    if p.leading().is_some_and(|(_, c)| c.is_negative()) {
        factor = -factor;
    }
    p.scale(&factor)
}

fn max_norm(p: &Polynomial) -> BigInt {
    p.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

fn heuristic(f: &Polynomial, g: &Polynomial, vars: &[ParamId]) -> Option<Polynomial> {
    let Some((&last, rest)) = vars.split_last() else {
        let a = f.as_constant()?;
        let b = g.as_constant()?;
        return Some(Polynomial::constant(BigRational::from_integer(a.numer().gcd(b.numer()))));
    };
    let (cf, _) = f.integer_content();
    let (cg, _) = g.integer_content();
    let common = BigRational::from_integer(cf.gcd(&cg));
    let f = f.scale(&common.recip());
    let g = g.scale(&common.recip());

    let fnorm = max_norm(&f);
    let gnorm = max_norm(&g);
    let small = fnorm.clone().min(gnorm);
    let b: BigInt = &small * 2 + 29;
    let mut x = std::cmp::max(std::cmp::min(b.clone(), b.sqrt() * 99), small * 2 + 2);

    for _ in 0..ATTEMPTS {
        let point: Point = [(last, BigRational::from_integer(x.clone()))].into_iter().collect();
        let ff = f.substitute(&point);
        let gg = g.substitute(&point);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some(h) = heuristic(&ff, &gg, rest) {
                let candidates = [
                    Some(h.clone()),
                    ff.div_exact(&h),
                    gg.div_exact(&h),
                ];
                for (i, c) in candidates.into_iter().enumerate() {
                    let Some(c) = c else { continue };
                    let lifted = primitive(&interpolate(&c, &x, last));
                    if lifted.is_zero() {
                        continue;
                    }
                    let found = match i {
                        0 => f.div_exact(&lifted).and(g.div_exact(&lifted)).map(|_| lifted),
                        1 => f.div_exact(&lifted).filter(|q| g.div_exact(q).is_some()),
                        _ => g.div_exact(&lifted).filter(|q| f.div_exact(q).is_some()),
                    };
                    if let Some(h) = found {
                        return Some(primitive(&h).scale(&common));
                    }
                }
            }
        }
        x = (x.clone() * 73794 * x.sqrt().sqrt()) / 27011;
    }
    None
}

/// Reads each integer coefficient as a balanced base-`x` number whose
/// digits become the coefficients of successive powers of `var`.
fn interpolate(h: &Polynomial, x: &BigInt, var: ParamId) -> Polynomial {
    let half = x / 2;
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let mut c = c.numer().clone();
        let mut power = 0u32;
        while !c.is_zero() {
            let mut d = c.mod_floor(x);
            if d > half {
                d -= x;
            }
            if !d.is_zero() {
                terms.push((m.mul(&Monomial::power(var, power)), BigRational::from_integer(d.clone())));
            }
            c = (c - d) / x;
            power += 1;
        }
    }
    Polynomial::from_terms(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::{ParamSpace, RationalFunction};

    fn poly(text: &str, space: &mut ParamSpace) -> Polynomial {
        RationalFunction::parse(text, space).unwrap().numerator().clone()
    }

    #[test]
    fn shared_linear_factor() {
        let mut s = ParamSpace::new();
        let f = poly("(x + y - 1) * (2*x - 3*y)", &mut s);
        let g = poly("(x + y - 1) * (x^2 + 5)", &mut s);
        assert_eq!(gcd(&f, &g).unwrap(), poly("x + y - 1", &mut s));
    }

    #[test]
    fn coprime() {
        let mut s = ParamSpace::new();
        let f = poly("x^2 + y^2 + 1", &mut s);
        let g = poly("x - y", &mut s);
        assert!(gcd(&f, &g).unwrap().is_one());
    }

    #[test]
    fn rational_coefficients() {
        let mut s = ParamSpace::new();
        let f = poly("(x/2 - 1/3) * (y + 7)", &mut s);
        let g = poly("(3*x - 2) * y^2", &mut s);
        assert_eq!(gcd(&f, &g).unwrap(), poly("3*x - 2", &mut s));
    }

    #[test]
    fn repeated_factor() {
        let mut s = ParamSpace::new();
        let f = poly("(a*b - 2*c)^3 * (a + 1)", &mut s);
        let g = poly("(a*b - 2*c)^2 * (a - 1)", &mut s);
        assert_eq!(gcd(&f, &g).unwrap(), poly("(a*b - 2*c)^2", &mut s));
    }
}
