use std::cmp::Ordering;
use std::fmt;

use super::space::{ParamId, ParamSpace};

/// Power product of parameters, stored sparsely as `(parameter, exponent)`
/// pairs sorted by parameter index. Zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(ParamId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(id: ParamId) -> Self {
        Self::power(id, 1)
    }

    pub fn power(id: ParamId, exp: u32) -> Self {
        if exp == 0 {
            Self::one()
        } else {
            Self {
                factors: vec![(id, exp)],
            }
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping
    /// zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (ParamId, u32)>) -> Self {
        let mut factors: Vec<(ParamId, u32)> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        factors.sort_by_key(|(id, _)| *id);
        let mut merged: Vec<(ParamId, u32)> = Vec::with_capacity(factors.len());
        for (id, e) in factors {
            match merged.last_mut() {
                Some((last, acc)) if *last == id => *acc += e,
                _ => merged.push((id, e)),
            }
        }
        Self { factors: merged }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn exponent(&self, id: ParamId) -> u32 {
        self.factors
            .binary_search_by_key(&id, |(v, _)| *v)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(ParamId, u32)] {
        &self.factors
    }

    pub fn params(&self) -> impl Iterator<Item = ParamId> + '_ {
        self.factors.iter().map(|(id, _)| *id)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for &(id, e) in &self.factors {
            let mut rem = e;
            if j < other.factors.len() && other.factors[j].0 == id {
                let d = other.factors[j].1;
                if d > e {
                    return None;
                }
                rem = e - d;
                j += 1;
            } else if j < other.factors.len() && other.factors[j].0 < id {
                return None;
            }
            if rem > 0 {
                out.push((id, rem));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        Some(Monomial { factors: out })
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.min(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial { factors: out }
    }

    pub fn display<'a>(&'a self, space: &'a ParamSpace) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, space }
    }
}

/// Graded lexicographic order: higher total degree is greater; ties are broken
/// by comparing exponents of parameters in ascending index order, where a
/// larger exponent on a lower-index parameter wins.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        return Ordering::Greater;
                    }
                    if vb < va {
                        return Ordering::Less;
                    }
                    match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    space: &'a ParamSpace,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (id, e)) in self.mono.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            f.write_str(self.space.name(*id))?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
