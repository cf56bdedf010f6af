use super::poly::Polynomial;
use super::rational::RationalFunction;
use super::space::ParamId;

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn new(p: &Polynomial) -> Self {
        Self {
            terms: p
                .to_f64_terms()
                .into_iter()
                .map(|(c, fs)| (c, fs.into_iter().map(|(id, e)| (id.index(), e as i32)).collect()))
                .collect(),
        }
    }

    fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| fs.iter().fold(*c, |acc, &(i, e)| acc * values[i].powi(e)))
            .sum()
    }
}

/// Double-precision evaluator for a fixed rational function. Used on hot
/// paths (monitoring, sweeps) where exact arithmetic is not required.
#[derive(Clone, Debug)]
pub struct CompiledRf {
    num: CompiledPoly,
    den: CompiledPoly,
    params: Vec<ParamId>,
}

/// Result of a floating-point evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Eval {
    pub value: f64,
    pub denominator: f64,
}

impl CompiledRf {
    pub fn new(f: &RationalFunction) -> Self {
        Self {
            num: CompiledPoly::new(f.numerator()),
            den: CompiledPoly::new(f.denominator()),
            params: f.params().into_iter().collect(),
        }
    }

    pub fn params(&self) -> &[ParamId] {
        &self.params
    }

    /// Evaluates at a dense vector indexed by [`ParamId`]. A zero denominator
    /// yields a non-finite value; callers inspect `denominator`.
    pub fn eval(&self, values: &[f64]) -> F64Eval {
        let denominator = self.den.eval(values);
        let value = self.num.eval(values) / denominator;
        F64Eval { value, denominator }
    }
}
