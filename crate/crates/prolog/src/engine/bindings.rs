//! Binding store with a trail for exact backtracking.

use crate::term::Term;

/// Substitution from variable ids to terms, plus the undo log.
///
/// Bindings are idempotent after dereferencing: a variable is never bound
/// to a chain that loops back to itself at the variable level, because
/// both sides are dereferenced before any bind.
#[derive(Debug, Default)]
pub struct Bindings {
    store: Vec<Option<Term>>,
    trail: Vec<usize>,
}

/// Full dereferencing hit the depth cap; the term is (or unfolds as)
/// an infinite structure created with the occurs check off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolveDepthExceeded;

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let id = self.trail.pop().expect("len checked");
            self.store[id] = None;
        }
    }

    pub fn store_len(&self) -> usize {
        self.store.len()
    }

    /// Reclaim store slots for variables allocated after `len`. Only valid
    /// after `undo_to` a mark taken at the same time as `len`.
    pub fn truncate_store(&mut self, len: usize) {
        debug_assert!(self.store[len.min(self.store.len())..]
            .iter()
            .all(Option::is_none));
        self.store.truncate(len);
    }

    pub fn is_fully_undone(&self) -> bool {
        self.trail.is_empty()
    }

    fn slot(&mut self, id: usize) -> &mut Option<Term> {
        if id >= self.store.len() {
            self.store.resize(id + 1, None);
        }
        &mut self.store[id]
    }

    pub fn lookup(&self, id: usize) -> Option<&Term> {
        self.store.get(id).and_then(Option::as_ref)
    }

    pub fn bind(&mut self, id: usize, term: Term) {
        let slot = self.slot(id);
        debug_assert!(slot.is_none(), "rebinding a bound variable");
        *slot = Some(term);
        self.trail.push(id);
    }

    /// Follow variable links until an unbound variable or a non-variable
    /// term. Returns a clone of the shallow result.
    pub fn deref_owned(&self, term: &Term) -> Term {
        let mut current = term;
        while let Term::Var { id, .. } = current {
            match self.lookup(*id) {
                Some(bound) => current = bound,
                None => break,
            }
        }
        current.clone()
    }

    /// Apply the substitution throughout the term. Unbound variables stay
    /// as variables. `max_depth` guards against cyclic bindings created
    /// with the occurs check off. Iterative, so deep answers cannot blow
    /// the stack.
    pub fn resolve(&self, term: &Term, max_depth: usize) -> Result<Term, ResolveDepthExceeded> {
        enum Frame {
            Enter(Term, usize),
            Build { functor: String, arity: usize },
        }
        let mut work = vec![Frame::Enter(term.clone(), 0)];
        let mut done: Vec<Term> = Vec::new();
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Enter(t, depth) => {
                    if depth > max_depth {
                        return Err(ResolveDepthExceeded);
                    }
                    match self.deref_owned(&t) {
                        Term::Compound(functor, args) => {
                            work.push(Frame::Build { functor, arity: args.len() });
                            for arg in args.into_iter().rev() {
                                work.push(Frame::Enter(arg, depth + 1));
                            }
                        }
                        leaf => done.push(leaf),
                    }
                }
                Frame::Build { functor, arity } => {
                    let args = done.split_off(done.len() - arity);
                    done.push(Term::Compound(functor, args));
                }
            }
        }
        Ok(done.pop().expect("resolve yields exactly one term"))
    }
}

/// Compute the most general unifier extension of `bindings`, or restore it
/// untouched and report failure.
pub fn unify(left: &Term, right: &Term, bindings: &mut Bindings, occurs_check: bool) -> bool {
    let mark = bindings.mark();
    let mut pending: Vec<(Term, Term)> = vec![(left.clone(), right.clone())];
    while let Some((a, b)) = pending.pop() {
        let a = bindings.deref_owned(&a);
        let b = bindings.deref_owned(&b);
        let ok = match (a, b) {
            (Term::Var { id: x, .. }, Term::Var { id: y, .. }) if x == y => true,
            (Term::Var { id, .. }, t) | (t, Term::Var { id, .. }) => {
                if occurs_check && occurs_in(id, &t, bindings) {
                    false
                } else {
                    bindings.bind(id, t);
                    true
                }
            }
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Num(x), Term::Num(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f == g && xs.len() == ys.len() {
                    pending.extend(xs.into_iter().zip(ys));
                    true
                } else {
                    false
                }
            }
            _ => false,
        };
        if !ok {
            bindings.undo_to(mark);
            return false;
        }
    }
    true
}

fn occurs_in(id: usize, term: &Term, bindings: &Bindings) -> bool {
    match bindings.deref_owned(term) {
        Term::Var { id: other, .. } => id == other,
        Term::Compound(_, args) => args.iter().any(|a| occurs_in(id, a, bindings)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn v(id: usize) -> Term {
        Term::var(format!("V{id}"), id)
    }

    #[test]
    fn binds_variable_to_constant() {
        let mut b = Bindings::new();
        assert!(unify(&v(0), &Term::int(3), &mut b, false));
        assert_eq!(b.deref_owned(&v(0)), Term::int(3));
    }

    #[test]
    fn unifies_compound_args_pairwise() {
        // f(X, b) ~ f(a, Y)  =>  X -> a, Y -> b
        let mut b = Bindings::new();
        let lhs = Term::compound("f", vec![v(0), Term::atom("b")]);
        let rhs = Term::compound("f", vec![Term::atom("a"), v(1)]);
        assert!(unify(&lhs, &rhs, &mut b, false));
        assert_eq!(b.deref_owned(&v(0)), Term::atom("a"));
        assert_eq!(b.deref_owned(&v(1)), Term::atom("b"));
    }

    #[test]
    fn functor_clash_fails_and_restores() {
        let mut b = Bindings::new();
        let lhs = Term::compound("f", vec![v(0), v(1)]);
        let rhs = Term::compound("g", vec![Term::atom("a"), Term::atom("b")]);
        let mark = b.mark();
        assert!(!unify(&lhs, &rhs, &mut b, false));
        assert_eq!(b.mark(), mark);
        assert!(b.lookup(0).is_none());
        // partial progress is also rolled back on late failure
        let lhs = Term::compound("f", vec![v(0), Term::atom("x")]);
        let rhs = Term::compound("f", vec![Term::atom("a"), Term::atom("y")]);
        assert!(!unify(&lhs, &rhs, &mut b, false));
        assert!(b.lookup(0).is_none());
    }

    #[test]
    fn unifier_is_sound() {
        // applying the substitution to both inputs yields equal terms
        let mut b = Bindings::new();
        let lhs = Term::compound("f", vec![v(0), Term::compound("g", vec![v(1)])]);
        let rhs = Term::compound("f", vec![Term::compound("g", vec![v(1)]), v(0)]);
        assert!(unify(&lhs, &rhs, &mut b, false));
        let l = b.resolve(&lhs, 100).unwrap();
        let r = b.resolve(&rhs, 100).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn occurs_check_flag() {
        let mut b = Bindings::new();
        let f_of_x = Term::compound("f", vec![v(0)]);
        assert!(!unify(&v(0), &f_of_x, &mut b, true));
        assert!(b.lookup(0).is_none());
        assert!(unify(&v(0), &f_of_x, &mut b, false));
        assert!(b.resolve(&v(0), 50).is_err());
    }

    #[test]
    fn trail_undoes_to_any_mark() {
        let mut b = Bindings::new();
        assert!(unify(&v(0), &Term::int(1), &mut b, false));
        let mid = b.mark();
        assert!(unify(&v(1), &Term::int(2), &mut b, false));
        assert!(unify(&v(2), &Term::int(3), &mut b, false));
        b.undo_to(mid);
        assert_eq!(b.deref_owned(&v(0)), Term::int(1));
        assert!(b.lookup(1).is_none());
        assert!(b.lookup(2).is_none());
    }
}
