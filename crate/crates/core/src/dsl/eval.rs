use std::collections::HashMap;

use thiserror::Error;

use super::ast::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{op} is undefined at {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("non-finite result from {0}")]
    NonFinite(&'static str),
}

/// Expression with variables resolved to slot indices and named parameters
/// folded to constants. Evaluation walks the tree without allocating.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    root: Node,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Compiled {
    /// `slots` names the positional inputs; `params` are substituted as constants.
    pub fn new(e: &Expr, slots: &[String], params: &HashMap<String, f64>) -> Result<Self, EvalError> {
        Ok(Compiled {
            root: lower(e, slots, params)?,
        })
    }

    pub fn eval(&self, inputs: &[f64]) -> Result<f64, EvalError> {
        eval_node(&self.root, inputs)
    }

    /// Evaluation for use inside field closures: errors become NaN, which
    /// every downstream residual treats as a failure.
    pub fn eval_or_nan(&self, inputs: &[f64]) -> f64 {
        self.eval(inputs).unwrap_or(f64::NAN)
    }
}

fn lower(e: &Expr, slots: &[String], params: &HashMap<String, f64>) -> Result<Node, EvalError> {
    Ok(match e {
        Expr::Num(v) => Node::Const(*v),
        Expr::Var(name) => match slots.iter().position(|s| s == name) {
            Some(i) => Node::Slot(i),
            None => Node::Const(*params.get(name).ok_or_else(|| EvalError::Unbound(name.clone()))?),
        },
        Expr::Neg(inner) => Node::Neg(Box::new(lower(inner, slots, params)?)),
        Expr::Bin(op, l, r) => Node::Bin(
            *op,
            Box::new(lower(l, slots, params)?),
            Box::new(lower(r, slots, params)?),
        ),
        Expr::Call(f, arg) => Node::Call(*f, Box::new(lower(arg, slots, params)?)),
    })
}

fn finite(v: f64, what: &'static str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite(what))
    }
}

fn eval_node(n: &Node, inputs: &[f64]) -> Result<f64, EvalError> {
    match n {
        Node::Const(v) => Ok(*v),
        Node::Slot(i) => Ok(inputs[*i]),
        Node::Neg(e) => Ok(-eval_node(e, inputs)?),
        Node::Bin(op, l, r) => {
            let a = eval_node(l, inputs)?;
            let b = eval_node(r, inputs)?;
            match op {
                BinOp::Add => finite(a + b, "+"),
                BinOp::Sub => finite(a - b, "-"),
                BinOp::Mul => finite(a * b, "*"),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(EvalError::Domain { op: "division", arg: b })
                    } else {
                        finite(a / b, "/")
                    }
                }
                BinOp::Pow => {
                    let v = a.powf(b);
                    if v.is_nan() {
                        Err(EvalError::Domain { op: "^", arg: a })
                    } else {
                        finite(v, "^")
                    }
                }
            }
        }
        Node::Call(f, arg) => {
            let x = eval_node(arg, inputs)?;
            let v = match f {
                Func::Log if x <= 0.0 => return Err(EvalError::Domain { op: "log", arg: x }),
                Func::Sqrt if x < 0.0 => return Err(EvalError::Domain { op: "sqrt", arg: x }),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log => x.ln(),
                Func::Sqrt => x.sqrt(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
            };
            finite(v, f.name())
        }
    }
}

/// One-off evaluation against named bindings.
pub fn evaluate(e: &Expr, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
    let names: Vec<String> = bindings.keys().cloned().collect();
    let values: Vec<f64> = names.iter().map(|n| bindings[n]).collect();
    Compiled::new(e, &names, &HashMap::new())?.eval(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_expression;

    fn at(src: &str, vars: &[(&str, f64)]) -> Result<f64, EvalError> {
        let b = vars.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        evaluate(&parse_expression(src).unwrap(), &b)
    }

    #[test]
    fn basics() {
        assert_eq!(at("x^2", &[("x", 3.0)]).unwrap(), 9.0);
        assert_eq!(at("exp(t)", &[("t", 0.0)]).unwrap(), 1.0);
        assert!((at("sin(x)^2+cos(x)^2", &[("x", 0.7)]).unwrap() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(at("1/x1", &[("x1", 0.0)]), Err(EvalError::Domain { .. })));
        assert!(matches!(at("log(x)", &[("x", -1.0)]), Err(EvalError::Domain { .. })));
        assert!(matches!(at("sqrt(x)", &[("x", -1.0)]), Err(EvalError::Domain { .. })));
        assert!(matches!(at("(-1)^0.5", &[]), Err(EvalError::Domain { .. })));
        assert!(matches!(at("exp(x)", &[("x", 1e4)]), Err(EvalError::NonFinite(_))));
        assert_eq!(at("y + 1", &[]), Err(EvalError::Unbound("y".into())));
    }

    #[test]
    fn parameters_fold_to_constants() {
        let e = parse_expression("c*x").unwrap();
        let params = HashMap::from([("c".to_string(), 4.0)]);
        let c = Compiled::new(&e, &["x".to_string()], &params).unwrap();
        assert_eq!(c.eval(&[0.5]).unwrap(), 2.0);
    }
}
