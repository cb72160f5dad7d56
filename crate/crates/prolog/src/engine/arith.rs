//! Arithmetic evaluation over exact rationals.

use thiserror::Error;

use crate::engine::bindings::Bindings;
use crate::rational::Rat;
use crate::term::Term;

// Keeps evaluation recursion well inside default thread stacks; expression
// trees this deep only arise from adversarial structure-building loops.
const MAX_EVAL_DEPTH: usize = 2_500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("unbound variable in arithmetic expression")]
    UnboundVariable,
    #[error("non-numeric operand {0}")]
    NonNumeric(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} requires integer operands")]
    IntegerExpected(&'static str),
    #[error("unknown arithmetic function {name}/{arity}")]
    UnknownFunction { name: String, arity: usize },
    #[error("arithmetic expression too deep")]
    TooDeep,
}

/// Evaluate a dereferenced arithmetic expression bottom-up.
///
/// Supported: `+ - * /` on rationals, `//` truncating integer division,
/// `mod` floor modulo, unary minus, `min/2`, `max/2`, `abs/1`.
pub fn eval_arith(term: &Term, bindings: &Bindings) -> Result<Rat, ArithError> {
    eval(term, bindings, MAX_EVAL_DEPTH)
}

fn eval(term: &Term, bindings: &Bindings, depth: usize) -> Result<Rat, ArithError> {
    if depth == 0 {
        return Err(ArithError::TooDeep);
    }
    match bindings.deref_owned(term) {
        Term::Num(n) => Ok(n),
        Term::Var { .. } => Err(ArithError::UnboundVariable),
        Term::Atom(a) => Err(ArithError::NonNumeric(a)),
        Term::Compound(f, args) => {
            let eval_arg = |i: usize| eval(&args[i], bindings, depth - 1);
            match (f.as_str(), args.len()) {
                ("+", 2) => Ok(eval_arg(0)?.checked_add(&eval_arg(1)?)),
                ("-", 2) => Ok(eval_arg(0)?.checked_sub(&eval_arg(1)?)),
                ("*", 2) => Ok(eval_arg(0)?.checked_mul(&eval_arg(1)?)),
                ("/", 2) => eval_arg(0)?
                    .checked_div(&eval_arg(1)?)
                    .ok_or(ArithError::DivisionByZero),
                ("//", 2) => {
                    let (a, b) = (eval_arg(0)?, eval_arg(1)?);
                    if !a.is_integer() || !b.is_integer() {
                        return Err(ArithError::IntegerExpected("//"));
                    }
                    a.int_div_trunc(&b).ok_or(ArithError::DivisionByZero)
                }
                ("mod", 2) => {
                    let (a, b) = (eval_arg(0)?, eval_arg(1)?);
                    if !a.is_integer() || !b.is_integer() {
                        return Err(ArithError::IntegerExpected("mod"));
                    }
                    a.int_mod_floor(&b).ok_or(ArithError::DivisionByZero)
                }
                ("-", 1) => Ok(eval_arg(0)?.neg()),
                ("min", 2) => {
                    let (a, b) = (eval_arg(0)?, eval_arg(1)?);
                    Ok(if a <= b { a } else { b })
                }
                ("max", 2) => {
                    let (a, b) = (eval_arg(0)?, eval_arg(1)?);
                    Ok(if a >= b { a } else { b })
                }
                ("abs", 1) => Ok(eval_arg(0)?.abs()),
                (name, arity) => {
                    Err(ArithError::UnknownFunction { name: name.to_string(), arity })
                }
            }
        }
    }
}

/// Convenience for callers that do not track a binding store.
pub fn eval_ground(term: &Term) -> Result<Rat, ArithError> {
    eval_arith(term, &Bindings::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;

    fn eval_src(src: &str) -> Result<Rat, ArithError> {
        eval_ground(&parse_term(src).unwrap())
    }

    #[test]
    fn standard_precedence_evaluation() {
        assert_eq!(eval_src("2*3+1").unwrap(), Rat::from_int(7));
        assert_eq!(eval_src("2+3*4").unwrap(), Rat::from_int(14));
        assert_eq!(eval_src("10-2-3").unwrap(), Rat::from_int(5));
    }

    #[test]
    fn division_stays_exact() {
        assert_eq!(eval_src("7/2").unwrap().to_text(), "3.5");
        assert_eq!(eval_src("1/3 + 1/3 + 1/3").unwrap(), Rat::from_int(1));
        assert_eq!(eval_src("7//2").unwrap(), Rat::from_int(3));
        assert_eq!(eval_src("-7//2").unwrap(), Rat::from_int(-3));
        assert_eq!(eval_src("7 mod 2").unwrap(), Rat::from_int(1));
        assert_eq!(eval_src("-7 mod 2").unwrap(), Rat::from_int(1));
    }

    #[test]
    fn error_cases() {
        assert_eq!(eval_src("X").unwrap_err(), ArithError::UnboundVariable);
        assert_eq!(eval_src("1/0").unwrap_err(), ArithError::DivisionByZero);
        assert_eq!(eval_src("1//0").unwrap_err(), ArithError::DivisionByZero);
        assert_eq!(eval_src("foo").unwrap_err(), ArithError::NonNumeric("foo".into()));
        assert_eq!(
            eval_src("2.5 // 2").unwrap_err(),
            ArithError::IntegerExpected("//")
        );
        assert_eq!(
            eval_src("foo(1)").unwrap_err(),
            ArithError::UnknownFunction { name: "foo".into(), arity: 1 }
        );
    }

    #[test]
    fn unary_and_extrema() {
        assert_eq!(eval_src("-(3+4)").unwrap(), Rat::from_int(-7));
        assert_eq!(eval_src("min(3, 5)").unwrap(), Rat::from_int(3));
        assert_eq!(eval_src("max(3, 5)").unwrap(), Rat::from_int(5));
        assert_eq!(eval_src("abs(-2.5)").unwrap().to_text(), "2.5");
    }
}
