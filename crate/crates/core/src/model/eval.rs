use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ModelError;
use crate::lang::ast::{BinaryOp, Expr, ExprKind, UnaryOp};
use crate::ratfunc::{ParamId, RationalFunction};

/// Concrete value of a guard or update expression.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Val {
    Num(BigRational),
    Bool(bool),
}

impl Val {
    pub(crate) fn as_int(&self, e: &Expr) -> Result<i64, ModelError> {
        match self {
            Val::Num(n) if n.is_integer() => n.to_integer().to_i64().ok_or_else(|| type_err(e, "integer overflow")),
            Val::Num(n) => Err(type_err(e, &format!("expected an integer, got {n}"))),
            Val::Bool(b) => Ok(*b as i64),
        }
    }

    pub(crate) fn as_bool(&self, e: &Expr) -> Result<bool, ModelError> {
        match self {
            Val::Bool(b) => Ok(*b),
            Val::Num(_) => Err(type_err(e, &format!("'{e}' is not a boolean"))),
        }
    }
}

pub(crate) fn type_err(e: &Expr, message: &str) -> ModelError {
    ModelError::Type {
        span: e.span,
        message: message.to_string(),
    }
}

/// What a name refers to during evaluation.
#[derive(Clone, Debug)]
pub(crate) enum Binding {
    Value(Val),
    /// Symbolic parameter.
    Param(ParamId),
    /// Declared constant without a value and not usable symbolically.
    Unbound,
    /// Index into the state vector; `true` for booleans.
    Var(usize, bool),
}

pub(crate) struct Env<'a> {
    pub names: &'a HashMap<String, Binding>,
    pub state: &'a [i64],
    pub labels: Option<&'a dyn Fn(&str) -> Option<bool>>,
}

impl Env<'_> {
    fn lookup(&self, name: &str, e: &Expr) -> Result<&Binding, ModelError> {
        self.names.get(name).ok_or_else(|| type_err(e, &format!("unknown identifier '{name}'")))
    }
}

pub(crate) fn eval_concrete(e: &Expr, env: &Env) -> Result<Val, ModelError> {
    Ok(match &e.kind {
        ExprKind::Num { value, .. } => Val::Num(value.clone()),
        ExprKind::Bool(b) => Val::Bool(*b),
        ExprKind::Ident(n) => match env.lookup(n, e)? {
            Binding::Value(v) => v.clone(),
            Binding::Var(i, is_bool) => {
                let raw = env.state[*i];
                if *is_bool {
                    Val::Bool(raw != 0)
                } else {
                    Val::Num(BigRational::from_integer(raw.into()))
                }
            }
            Binding::Param(_) | Binding::Unbound => {
                return Err(ModelError::UnboundConstant {
                    name: n.clone(),
                    span: e.span,
                })
            }
        },
        ExprKind::Label(l) => match env.labels.and_then(|f| f(l)) {
            Some(b) => Val::Bool(b),
            None => return Err(ModelError::UnknownLabel(l.clone())),
        },
        ExprKind::Unary(UnaryOp::Neg, a) => match eval_concrete(a, env)? {
            Val::Num(n) => Val::Num(-n),
            Val::Bool(_) => return Err(type_err(e, "cannot negate a boolean")),
        },
        ExprKind::Unary(UnaryOp::Not, a) => Val::Bool(!eval_concrete(a, env)?.as_bool(a)?),
        ExprKind::Binary(op, a, b) => {
            let op = *op;
            if op == BinaryOp::And || op == BinaryOp::Or {
                let l = eval_concrete(a, env)?.as_bool(a)?;
                // short circuit
                if (op == BinaryOp::And && !l) || (op == BinaryOp::Or && l) {
                    return Ok(Val::Bool(l));
                }
                return Ok(Val::Bool(eval_concrete(b, env)?.as_bool(b)?));
            }
            let l = eval_concrete(a, env)?;
            let r = eval_concrete(b, env)?;
            match (op, l, r) {
                (BinaryOp::Eq, l, r) => Val::Bool(l == r),
                (BinaryOp::Ne, l, r) => Val::Bool(l != r),
                (op, Val::Num(x), Val::Num(y)) => match op {
                    BinaryOp::Add => Val::Num(x + y),
                    BinaryOp::Sub => Val::Num(x - y),
                    BinaryOp::Mul => Val::Num(x * y),
                    BinaryOp::Div => {
                        if y.is_zero() {
                            return Err(type_err(e, "division by zero"));
                        }
                        Val::Num(x / y)
                    }
                    BinaryOp::Lt => Val::Bool(x < y),
                    BinaryOp::Le => Val::Bool(x <= y),
                    BinaryOp::Gt => Val::Bool(x > y),
                    BinaryOp::Ge => Val::Bool(x >= y),
                    _ => unreachable!(),
                },
                _ => return Err(type_err(e, &format!("operands of '{}' must be numbers", op.symbol()))),
            }
        }
    })
}

/// Evaluates an arithmetic expression to a rational function over the
/// symbolic parameters.
pub(crate) fn eval_rf(e: &Expr, env: &Env) -> Result<RationalFunction, ModelError> {
    Ok(match &e.kind {
        ExprKind::Num { value, .. } => RationalFunction::constant(value.clone()),
        ExprKind::Ident(n) => match env.lookup(n, e)? {
            Binding::Param(id) => RationalFunction::var(*id),
            Binding::Value(Val::Num(v)) => RationalFunction::constant(v.clone()),
            Binding::Var(i, false) => RationalFunction::integer(env.state[*i]),
            Binding::Value(Val::Bool(_)) | Binding::Var(_, true) => {
                return Err(type_err(e, &format!("'{n}' is boolean, expected a number")))
            }
            Binding::Unbound => {
                return Err(ModelError::UnboundConstant {
                    name: n.clone(),
                    span: e.span,
                })
            }
        },
        ExprKind::Unary(UnaryOp::Neg, a) => eval_rf(a, env)?.neg(),
        ExprKind::Binary(op, a, b) => {
            let l = eval_rf(a, env)?;
            let r = eval_rf(b, env)?;
            match op {
                BinaryOp::Add => l.add(&r),
                BinaryOp::Sub => l.sub(&r),
                BinaryOp::Mul => l.mul(&r),
                BinaryOp::Div => l.div(&r).map_err(|_| type_err(e, "division by the zero function"))?,
                _ => return Err(type_err(e, &format!("'{e}' is not an arithmetic expression"))),
            }
        }
        _ => return Err(type_err(e, &format!("'{e}' is not an arithmetic expression"))),
    })
}
