//! The resolution machine: explicit goal stack, choice points and trail.

use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use num::BigInt;

use crate::engine::arith::{eval_arith, ArithError};
use crate::engine::bindings::{unify, Bindings};
use crate::engine::{AbortReason, Budget, BudgetLimit, ExecutionOutcome};
use crate::printer::print_term;
use crate::rational::Rat;
use crate::term::{Clause, Program, Term};

/// Entry point runner configuration. Queries run one at a time per
/// machine; machines share nothing and may run on any thread.
#[derive(Debug, Clone, Default)]
pub struct Engine {
    pub occurs_check: bool,
}

impl Engine {
    pub fn new() -> Engine {
        Engine::default()
    }

    pub fn with_occurs_check(mut self, on: bool) -> Engine {
        self.occurs_check = on;
        self
    }

    /// Lazily enumerate solutions of `goal` against `program`, depth-first
    /// and left-to-right, charging one budget step per resolution attempt.
    pub fn solve<'p>(&self, program: &'p Program, goal: Term, budget: Budget) -> Solutions<'p> {
        Solutions::new(program, goal, budget, self.occurs_check)
    }

    /// Query `entry/1` with a fresh variable and return the first solution,
    /// fully dereferenced.
    pub fn run_entry(&self, program: &Program, entry: &str, budget: Budget) -> ExecutionOutcome {
        let answer = Term::var("Answer", program.next_var_id());
        let goal = Term::compound(entry, vec![answer]);
        let mut solutions = self.solve(program, goal, budget);
        match solutions.next() {
            None => ExecutionOutcome::NoSolution,
            Some(Ok(solution)) => {
                let (_, term) = solution.values()[0].clone();
                ExecutionOutcome::Solved(term)
            }
            Some(Err(reason)) => ExecutionOutcome::Aborted(reason),
        }
    }
}

/// One answer: the query's variables with the substitution applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    values: Vec<(String, Term)>,
}

impl Solution {
    pub fn get(&self, name: &str) -> Option<&Term> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn values(&self) -> &[(String, Term)] {
        &self.values
    }
}

type GoalList = Option<Rc<GoalNode>>;

struct GoalNode {
    entry: GoalEntry,
    rest: GoalList,
    len: usize,
}

#[derive(Clone)]
enum GoalEntry {
    Call(Term),
    /// Reached when an if-then condition has succeeded: drop the choice
    /// points above the barrier (committing the condition and discarding
    /// any else-branch), then run the then-branch.
    Commit { barrier: usize, then: Term },
}

fn push_goal(list: &GoalList, entry: GoalEntry) -> GoalList {
    let len = list.as_ref().map_or(0, |n| n.len) + 1;
    Some(Rc::new(GoalNode { entry, rest: list.clone(), len }))
}

struct ChoicePoint<'p> {
    goals: GoalList,
    trail_mark: usize,
    store_mark: usize,
    var_mark: usize,
    alt: Alt<'p>,
}

enum Alt<'p> {
    /// The stored goal list already is the alternative continuation.
    Continuation,
    /// Remaining clauses for a user predicate call.
    Clauses { goal: Term, positions: &'p [usize], next: usize },
    /// Remaining integers for between/3.
    Range { var_id: usize, next: BigInt, hi: BigInt },
}

enum MachineState {
    Running,
    AwaitBacktrack,
    Done,
}

/// Lazy stream of solutions. Ends with at most one `Err`: the first abort
/// encountered. After normal exhaustion all bindings are undone.
pub struct Solutions<'p> {
    program: &'p Program,
    bindings: Bindings,
    goals: GoalList,
    choicepoints: Vec<ChoicePoint<'p>>,
    steps: u64,
    budget: Budget,
    started: Instant,
    next_var: usize,
    query_vars: Vec<(String, usize)>,
    occurs_check: bool,
    state: MachineState,
}

impl<'p> Solutions<'p> {
    fn new(program: &'p Program, goal: Term, budget: Budget, occurs_check: bool) -> Solutions<'p> {
        let next_var = program
            .next_var_id()
            .max(goal.max_var_id().map_or(0, |m| m + 1));
        let mut query_vars = Vec::new();
        collect_vars(&goal, &mut query_vars);
        Solutions {
            program,
            bindings: Bindings::new(),
            goals: push_goal(&None, GoalEntry::Call(goal)),
            choicepoints: Vec::new(),
            steps: 0,
            budget,
            started: Instant::now(),
            next_var,
            query_vars,
            occurs_check,
            state: MachineState::Running,
        }
    }

    /// Resolution steps consumed so far. Deterministic for identical
    /// (program, goal, budget, flags).
    pub fn steps_used(&self) -> u64 {
        self.steps
    }

    /// True once the machine has undone every binding (after exhaustion).
    pub fn is_restored(&self) -> bool {
        self.bindings.is_fully_undone()
    }

    fn advance(&mut self) -> Option<Result<Solution, AbortReason>> {
        match self.state {
            MachineState::Done => return None,
            MachineState::AwaitBacktrack => {
                self.state = MachineState::Running;
                match self.backtrack() {
                    Ok(true) => {}
                    Ok(false) => {
                        self.finish();
                        return None;
                    }
                    Err(reason) => {
                        self.state = MachineState::Done;
                        return Some(Err(reason));
                    }
                }
            }
            MachineState::Running => {}
        }
        loop {
            let Some(node) = self.goals.clone() else {
                let snapshot = match self.snapshot() {
                    Ok(s) => s,
                    Err(reason) => {
                        self.state = MachineState::Done;
                        return Some(Err(reason));
                    }
                };
                self.state = MachineState::AwaitBacktrack;
                return Some(Ok(snapshot));
            };
            self.goals = node.rest.clone();
            let step = match &node.entry {
                GoalEntry::Commit { barrier, then } => {
                    self.choicepoints.truncate(*barrier);
                    self.goals = push_goal(&self.goals, GoalEntry::Call(then.clone()));
                    Ok(true)
                }
                GoalEntry::Call(goal) => self.dispatch(goal.clone(), node.len),
            };
            match step {
                Ok(true) => {}
                Ok(false) => match self.backtrack() {
                    Ok(true) => {}
                    Ok(false) => {
                        self.finish();
                        return None;
                    }
                    Err(reason) => {
                        self.state = MachineState::Done;
                        return Some(Err(reason));
                    }
                },
                Err(reason) => {
                    self.state = MachineState::Done;
                    return Some(Err(reason));
                }
            }
        }
    }

    fn finish(&mut self) {
        // Restore the binding store to its entry state.
        self.bindings.undo_to(0);
        self.bindings.truncate_store(0);
        self.state = MachineState::Done;
    }

    fn snapshot(&self) -> Result<Solution, AbortReason> {
        let mut values = Vec::with_capacity(self.query_vars.len());
        for (name, id) in &self.query_vars {
            let var = Term::var(name.clone(), *id);
            match self.bindings.resolve(&var, self.budget.max_depth) {
                Ok(t) => values.push((name.clone(), t)),
                Err(_) => return Err(AbortReason::BudgetExhausted(BudgetLimit::Depth)),
            }
        }
        Ok(Solution { values })
    }

    fn charge_step(&mut self) -> Result<(), AbortReason> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return Err(AbortReason::BudgetExhausted(BudgetLimit::Steps));
        }
        if self.steps % 256 == 0 && self.started.elapsed() > self.budget.wall_timeout {
            return Err(AbortReason::BudgetExhausted(BudgetLimit::WallClock));
        }
        Ok(())
    }

    /// Run one goal. `Ok(true)`: proceed. `Ok(false)`: goal failed,
    /// backtrack. `Err`: abort the whole query.
    fn dispatch(&mut self, goal: Term, depth: usize) -> Result<bool, AbortReason> {
        self.charge_step()?;
        if depth > self.budget.max_depth {
            return Err(AbortReason::BudgetExhausted(BudgetLimit::Depth));
        }
        let goal = self.bindings.deref_owned(&goal);
        let (name, arity) = match goal.functor_arity() {
            Some((n, a)) => (n.to_string(), a),
            None => return Err(AbortReason::NonCallableGoal),
        };
        match (name.as_str(), arity) {
            ("true", 0) => Ok(true),
            ("fail", 0) | ("false", 0) => Ok(false),
            (",", 2) => {
                let [left, right] = two_args(goal);
                self.goals = push_goal(&self.goals, GoalEntry::Call(right));
                self.goals = push_goal(&self.goals, GoalEntry::Call(left));
                Ok(true)
            }
            (";", 2) => {
                let [left, right] = two_args(goal);
                match left {
                    Term::Compound(f, args) if f == "->" && args.len() == 2 => {
                        let [cond, then] = two_args(Term::Compound(f, args));
                        let barrier = self.choicepoints.len();
                        self.push_choicepoint(
                            push_goal(&self.goals, GoalEntry::Call(right)),
                            Alt::Continuation,
                        );
                        self.goals =
                            push_goal(&self.goals, GoalEntry::Commit { barrier, then });
                        self.goals = push_goal(&self.goals, GoalEntry::Call(cond));
                        Ok(true)
                    }
                    left => {
                        self.push_choicepoint(
                            push_goal(&self.goals, GoalEntry::Call(right)),
                            Alt::Continuation,
                        );
                        self.goals = push_goal(&self.goals, GoalEntry::Call(left));
                        Ok(true)
                    }
                }
            }
            ("->", 2) => {
                let [cond, then] = two_args(goal);
                let barrier = self.choicepoints.len();
                self.goals = push_goal(&self.goals, GoalEntry::Commit { barrier, then });
                self.goals = push_goal(&self.goals, GoalEntry::Call(cond));
                Ok(true)
            }
            ("=", 2) => {
                let [left, right] = two_args(goal);
                Ok(unify(&left, &right, &mut self.bindings, self.occurs_check))
            }
            ("\\=", 2) => {
                let [left, right] = two_args(goal);
                let mark = self.bindings.mark();
                if unify(&left, &right, &mut self.bindings, self.occurs_check) {
                    self.bindings.undo_to(mark);
                    Ok(false)
                } else {
                    Ok(true)
                }
            }
            ("is", 2) => {
                let [result, expr] = two_args(goal);
                let value = eval_arith(&expr, &self.bindings).map_err(arith_abort)?;
                Ok(unify(&result, &Term::Num(value), &mut self.bindings, self.occurs_check))
            }
            ("=:=", 2) | ("=\\=", 2) | ("<", 2) | (">", 2) | ("=<", 2) | (">=", 2) => {
                let [left, right] = two_args(goal);
                let a = eval_arith(&left, &self.bindings).map_err(arith_abort)?;
                let b = eval_arith(&right, &self.bindings).map_err(arith_abort)?;
                let holds = match name.as_str() {
                    "=:=" => a == b,
                    "=\\=" => a != b,
                    "<" => a < b,
                    ">" => a > b,
                    "=<" => a <= b,
                    _ => a >= b,
                };
                Ok(holds)
            }
            ("between", 3) => self.between(goal),
            ("succ", 2) => self.succ(goal),
            // Parse-accepted stubs: recognized, never executed.
            ("!", 0) | ("\\+", 1) | ("{}", 1) => {
                Err(AbortReason::UnsupportedBuiltin { name, arity })
            }
            _ => {
                let positions = self.program.clauses_for(&name, arity);
                if positions.is_empty() {
                    if is_recognized_builtin(&name, arity) {
                        Err(AbortReason::UnsupportedBuiltin { name, arity })
                    } else {
                        Err(AbortReason::UnknownPredicate { name, arity })
                    }
                } else {
                    self.try_clauses(goal, positions, 0)
                }
            }
        }
    }

    fn push_choicepoint(&mut self, goals: GoalList, alt: Alt<'p>) {
        self.choicepoints.push(ChoicePoint {
            goals,
            trail_mark: self.bindings.mark(),
            store_mark: self.bindings.store_len(),
            var_mark: self.next_var,
            alt,
        });
    }

    /// Try the clauses at `positions[start..]` against `goal`. Charges one
    /// step per head-unification attempt.
    fn try_clauses(
        &mut self,
        goal: Term,
        positions: &'p [usize],
        start: usize,
    ) -> Result<bool, AbortReason> {
        let trail_mark = self.bindings.mark();
        let store_mark = self.bindings.store_len();
        let var_mark = self.next_var;
        let mut i = start;
        while i < positions.len() {
            self.charge_step()?;
            let clause = &self.program.clauses()[positions[i]];
            let renamed = self.rename(clause);
            if unify(&goal, &renamed.head, &mut self.bindings, self.occurs_check) {
                if i + 1 < positions.len() {
                    self.choicepoints.push(ChoicePoint {
                        goals: self.goals.clone(),
                        trail_mark,
                        store_mark,
                        var_mark,
                        alt: Alt::Clauses { goal, positions, next: i + 1 },
                    });
                }
                for body_goal in renamed.body.into_iter().rev() {
                    self.goals = push_goal(&self.goals, GoalEntry::Call(body_goal));
                }
                return Ok(true);
            }
            // Head unification failed; reclaim the renamed variables.
            self.bindings.truncate_store(store_mark);
            self.next_var = var_mark;
            i += 1;
        }
        Ok(false)
    }

    fn rename(&mut self, clause: &Clause) -> Clause {
        let mut map = HashMap::new();
        let head = self.rename_term(&clause.head, &mut map);
        let body = clause
            .body
            .iter()
            .map(|g| self.rename_term(g, &mut map))
            .collect();
        Clause { head, body }
    }

    fn rename_term(&mut self, term: &Term, map: &mut HashMap<usize, usize>) -> Term {
        match term {
            Term::Var { name, id } => {
                let id = *map.entry(*id).or_insert_with(|| {
                    let fresh = self.next_var;
                    self.next_var += 1;
                    fresh
                });
                Term::Var { name: name.clone(), id }
            }
            Term::Compound(f, args) => Term::Compound(
                f.clone(),
                args.iter().map(|a| self.rename_term(a, map)).collect(),
            ),
            leaf => leaf.clone(),
        }
    }

    fn backtrack(&mut self) -> Result<bool, AbortReason> {
        loop {
            let Some(cp) = self.choicepoints.pop() else {
                return Ok(false);
            };
            self.bindings.undo_to(cp.trail_mark);
            self.bindings.truncate_store(cp.store_mark);
            self.next_var = cp.var_mark;
            match cp.alt {
                Alt::Continuation => {
                    self.goals = cp.goals;
                    return Ok(true);
                }
                Alt::Clauses { goal, positions, next } => {
                    self.goals = cp.goals;
                    if self.try_clauses(goal, positions, next)? {
                        return Ok(true);
                    }
                }
                Alt::Range { var_id, next, hi } => {
                    self.charge_step()?;
                    self.goals = cp.goals.clone();
                    if next < hi {
                        self.choicepoints.push(ChoicePoint {
                            goals: cp.goals,
                            trail_mark: cp.trail_mark,
                            store_mark: cp.store_mark,
                            var_mark: cp.var_mark,
                            alt: Alt::Range { var_id, next: &next + 1, hi },
                        });
                    }
                    self.bindings.bind(var_id, Term::Num(Rat::from_bigint(next)));
                    return Ok(true);
                }
            }
        }
    }

    fn between(&mut self, goal: Term) -> Result<bool, AbortReason> {
        let [lo, hi, x] = three_args(goal);
        let lo = self.require_int(&lo, "between/3")?;
        let hi = self.require_int(&hi, "between/3")?;
        match self.bindings.deref_owned(&x) {
            Term::Num(n) => match n.as_integer() {
                Some(v) => Ok(lo <= v && v <= hi),
                None => Err(AbortReason::Arithmetic(ArithError::IntegerExpected("between/3"))),
            },
            Term::Var { id, .. } => {
                if lo > hi {
                    return Ok(false);
                }
                if lo < hi {
                    self.push_choicepoint(
                        self.goals.clone(),
                        Alt::Range { var_id: id, next: &lo + 1, hi },
                    );
                }
                self.bindings.bind(id, Term::Num(Rat::from_bigint(lo)));
                Ok(true)
            }
            other => Err(AbortReason::Arithmetic(ArithError::NonNumeric(print_term(&other)))),
        }
    }

    fn succ(&mut self, goal: Term) -> Result<bool, AbortReason> {
        let [a, b] = two_args(goal);
        let a = self.bindings.deref_owned(&a);
        let b = self.bindings.deref_owned(&b);
        match (&a, &b) {
            (Term::Num(x), _) => {
                let x = x
                    .as_integer()
                    .filter(|v| v.sign() != num::bigint::Sign::Minus)
                    .ok_or(AbortReason::Arithmetic(ArithError::IntegerExpected("succ/2")))?;
                match &b {
                    Term::Var { .. } | Term::Num(_) => {
                        if let Term::Num(y) = &b {
                            if !y.is_integer() {
                                return Err(AbortReason::Arithmetic(ArithError::IntegerExpected(
                                    "succ/2",
                                )));
                            }
                        }
                        let next = Term::Num(Rat::from_bigint(x + 1));
                        Ok(unify(&b, &next, &mut self.bindings, self.occurs_check))
                    }
                    other => Err(AbortReason::Arithmetic(ArithError::NonNumeric(print_term(
                        other,
                    )))),
                }
            }
            (Term::Var { .. }, Term::Num(y)) => {
                let y = y
                    .as_integer()
                    .filter(|v| v.sign() != num::bigint::Sign::Minus)
                    .ok_or(AbortReason::Arithmetic(ArithError::IntegerExpected("succ/2")))?;
                if y == BigInt::from(0) {
                    return Ok(false);
                }
                let prev = Term::Num(Rat::from_bigint(y - 1));
                Ok(unify(&a, &prev, &mut self.bindings, self.occurs_check))
            }
            (Term::Var { .. }, Term::Var { .. }) => {
                Err(AbortReason::Arithmetic(ArithError::UnboundVariable))
            }
            (other, _) => Err(AbortReason::Arithmetic(ArithError::NonNumeric(print_term(other)))),
        }
    }

    fn require_int(&self, term: &Term, who: &'static str) -> Result<BigInt, AbortReason> {
        match self.bindings.deref_owned(term) {
            Term::Num(n) => n
                .as_integer()
                .ok_or(AbortReason::Arithmetic(ArithError::IntegerExpected(who))),
            Term::Var { .. } => Err(AbortReason::Arithmetic(ArithError::UnboundVariable)),
            other => Err(AbortReason::Arithmetic(ArithError::NonNumeric(print_term(&other)))),
        }
    }
}

impl<'p> Iterator for Solutions<'p> {
    type Item = Result<Solution, AbortReason>;

    fn next(&mut self) -> Option<Self::Item> {
        self.advance()
    }
}

/// An unknown arithmetic function is a recognized-but-unsupported
/// operation (the revisable class), not a plain arithmetic error.
fn arith_abort(e: ArithError) -> AbortReason {
    match e {
        ArithError::UnknownFunction { name, arity } => {
            AbortReason::UnsupportedBuiltin { name, arity }
        }
        other => AbortReason::Arithmetic(other),
    }
}

fn two_args(goal: Term) -> [Term; 2] {
    match goal {
        Term::Compound(_, args) if args.len() == 2 => {
            let mut it = args.into_iter();
            [it.next().expect("arity 2"), it.next().expect("arity 2")]
        }
        _ => unreachable!("dispatch checked arity"),
    }
}

fn three_args(goal: Term) -> [Term; 3] {
    match goal {
        Term::Compound(_, args) if args.len() == 3 => {
            let mut it = args.into_iter();
            [
                it.next().expect("arity 3"),
                it.next().expect("arity 3"),
                it.next().expect("arity 3"),
            ]
        }
        _ => unreachable!("dispatch checked arity"),
    }
}

fn collect_vars(term: &Term, acc: &mut Vec<(String, usize)>) {
    match term {
        Term::Var { name, id } => {
            if !acc.iter().any(|(_, i)| i == id) {
                acc.push((name.clone(), *id));
            }
        }
        Term::Compound(_, args) => {
            for arg in args {
                collect_vars(arg, acc);
            }
        }
        _ => {}
    }
}

/// Standard-Prolog predicates the engine recognizes but does not execute.
/// Calling one aborts with `unsupported-builtin`, the revisable error
/// class, rather than `unknown-predicate`. User clauses for these names
/// take priority when a program defines them itself.
fn is_recognized_builtin(name: &str, arity: usize) -> bool {
    matches!(
        (name, arity),
        ("not", 1)
            | ("call", 1..=8)
            | ("findall", 3 | 4)
            | ("bagof", 3)
            | ("setof", 3)
            | ("forall", 2)
            | ("aggregate_all", 3 | 4)
            | ("member", 2)
            | ("memberchk", 2)
            | ("append", 2 | 3)
            | ("length", 2)
            | ("nth0", 3)
            | ("nth1", 3)
            | ("last", 2)
            | ("reverse", 2)
            | ("msort", 2)
            | ("sort", 2 | 4)
            | ("permutation", 2)
            | ("sum_list", 2)
            | ("sumlist", 2)
            | ("max_list", 2)
            | ("min_list", 2)
            | ("numlist", 3)
            | ("maplist", 2..=6)
            | ("foldl", 4..=6)
            | ("include", 3)
            | ("exclude", 3)
            | ("format", 1..=3)
            | ("write", 1)
            | ("writeln", 1)
            | ("print", 1)
            | ("write_canonical", 1)
            | ("nl", 0 | 1)
            | ("read", 1)
            | ("tab", 1)
            | ("assert", 1)
            | ("asserta", 1)
            | ("assertz", 1)
            | ("retract", 1)
            | ("ground", 1)
            | ("var", 1)
            | ("nonvar", 1)
            | ("atom", 1)
            | ("atomic", 1)
            | ("number", 1)
            | ("integer", 1)
            | ("float", 1)
            | ("compound", 1)
            | ("callable", 1)
            | ("is_list", 1)
            | ("atom_length", 2)
            | ("atom_concat", 3)
            | ("atom_number", 2)
            | ("atom_codes", 2)
            | ("atom_chars", 2)
            | ("number_codes", 2)
            | ("number_chars", 2)
            | ("sub_atom", 5)
            | ("string_concat", 3)
            | ("string_to_atom", 2)
            | ("number_string", 2)
            | ("copy_term", 2)
            | ("functor", 3)
            | ("arg", 3)
            | ("=..", 2)
            | ("halt", 0 | 1)
            | ("label", 1)
            | ("labeling", 2)
            | ("ins", 2)
            | ("all_distinct", 1)
            | ("all_different", 1)
    )
}
