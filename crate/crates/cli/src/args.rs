use num_rational::BigRational;
use radcheck_core::ratfunc::parse_decimal;

fn split_pair(s: &str) -> Result<(&str, &str), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format!("missing name in '{s}'"));
    }
    Ok((name, value.trim()))
}

/// Decimal or `n/d` literal.
pub fn number(s: &str) -> Result<BigRational, String> {
    if let Some(v) = parse_decimal(s) {
        return Ok(v);
    }
    s.parse::<BigRational>().map_err(|_| format!("'{s}' is not a number"))
}

/// `name=value`
#[derive(Clone, Debug)]
pub struct Assign {
    pub name: String,
    pub value: BigRational,
}

pub fn assign(s: &str) -> Result<Assign, String> {
    let (name, value) = split_pair(s)?;
    Ok(Assign {
        name: name.to_string(),
        value: number(value)?,
    })
}

/// `name=lo:hi`
#[derive(Clone, Debug)]
pub struct Range {
    pub name: String,
    pub lo: BigRational,
    pub hi: BigRational,
}

pub fn range(s: &str) -> Result<Range, String> {
    let (name, value) = split_pair(s)?;
    let (lo, hi) = value.split_once(':').ok_or_else(|| format!("expected name=lo:hi, got '{s}'"))?;
    let (lo, hi) = (number(lo.trim())?, number(hi.trim())?);
    if lo > hi {
        return Err(format!("empty range in '{s}'"));
    }
    Ok(Range {
        name: name.to_string(),
        lo,
        hi,
    })
}
