//! SLD resolution with backtracking, arithmetic and hard execution budgets.
//!
//! Execution is depth-first and left-to-right, clauses tried in source
//! order, built-ins dispatched before user clauses. Every run terminates:
//! either with solutions, with exhaustion, or with a typed abort reason.

mod arith;
mod bindings;
mod solve;

pub use arith::{eval_arith, eval_ground, ArithError};
pub use bindings::{unify, Bindings, ResolveDepthExceeded};
pub use solve::{Engine, Solution, Solutions};

use std::fmt;
use std::time::Duration;

use crate::term::Term;

/// Hard limits on a single query. All fields must be strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: u64,
    pub max_depth: usize,
    pub wall_timeout: Duration,
}

impl Budget {
    pub fn new(max_steps: u64, max_depth: usize, wall_timeout: Duration) -> Option<Budget> {
        if max_steps == 0 || max_depth == 0 || wall_timeout.is_zero() {
            return None;
        }
        Some(Budget { max_steps, max_depth, wall_timeout })
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_steps: 1_000_000,
            max_depth: 10_000,
            wall_timeout: Duration::from_secs(5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetLimit {
    Steps,
    Depth,
    WallClock,
}

impl fmt::Display for BudgetLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BudgetLimit::Steps => "steps",
            BudgetLimit::Depth => "depth",
            BudgetLimit::WallClock => "wall-clock",
        };
        f.write_str(s)
    }
}

/// Why execution stopped without an answer. The first failure encountered
/// wins; the solution stream ends with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbortReason {
    UnknownPredicate { name: String, arity: usize },
    UnsupportedBuiltin { name: String, arity: usize },
    Arithmetic(ArithError),
    BudgetExhausted(BudgetLimit),
    NonCallableGoal,
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbortReason::UnknownPredicate { name, arity } => {
                write!(f, "unknown-predicate {name}/{arity}")
            }
            AbortReason::UnsupportedBuiltin { name, arity } => {
                write!(f, "unsupported-builtin {name}/{arity}")
            }
            AbortReason::Arithmetic(e) => write!(f, "arithmetic-error: {e}"),
            AbortReason::BudgetExhausted(limit) => write!(f, "budget-exhausted: {limit}"),
            AbortReason::NonCallableGoal => f.write_str("non-callable goal"),
        }
    }
}

impl AbortReason {
    /// True for the revisable subclass: operations the engine recognizes
    /// but deliberately does not execute.
    pub fn is_unsupported_builtin(&self) -> bool {
        matches!(self, AbortReason::UnsupportedBuiltin { .. })
    }

    /// Stable token naming the reason class, for logs and outcome files.
    pub fn code(&self) -> &'static str {
        match self {
            AbortReason::UnknownPredicate { .. } => "unknown-predicate",
            AbortReason::UnsupportedBuiltin { .. } => "unsupported-builtin",
            AbortReason::Arithmetic(_) => "arithmetic-error",
            AbortReason::BudgetExhausted(_) => "budget-exhausted",
            AbortReason::NonCallableGoal => "non-callable-goal",
        }
    }
}

/// Result of running a program's entry predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecutionOutcome {
    Solved(Term),
    NoSolution,
    Aborted(AbortReason),
}

impl fmt::Display for ExecutionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecutionOutcome::Solved(t) => write!(f, "Solved {}", crate::printer::print_term(t)),
            ExecutionOutcome::NoSolution => f.write_str("NoSolution"),
            ExecutionOutcome::Aborted(r) => write!(f, "Aborted {r}"),
        }
    }
}
