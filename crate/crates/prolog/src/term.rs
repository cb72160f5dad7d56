//! Term, clause and program representations.
//!
//! Lists are desugared at parse time to `'.'/2` cells terminated by the
//! atom `[]`, so the engine never needs a dedicated list type.

use std::collections::HashMap;

use crate::rational::Rat;

pub const LIST_CONS: &str = ".";
pub const LIST_NIL: &str = "[]";

/// A Prolog term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Atom(String),
    /// A logic variable. `id` is unique within the clause (or query) the
    /// variable was read from, which makes clause renaming safe.
    Var { name: String, id: usize },
    Num(Rat),
    /// Functor application with arity >= 1; arity-0 callables are atoms.
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn atom(name: impl Into<String>) -> Term {
        Term::Atom(name.into())
    }

    pub fn var(name: impl Into<String>, id: usize) -> Term {
        Term::Var { name: name.into(), id }
    }

    pub fn int(n: i64) -> Term {
        Term::Num(Rat::from_int(n))
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        let functor = functor.into();
        debug_assert!(!args.is_empty(), "arity-0 callables are atoms");
        Term::Compound(functor, args)
    }

    pub fn nil() -> Term {
        Term::Atom(LIST_NIL.to_string())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(LIST_CONS.to_string(), vec![head, tail])
    }

    /// Build a proper list from items.
    pub fn list(items: Vec<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |tail, head| Term::cons(head, tail))
    }

    /// Functor and arity for callable terms; `None` for variables and numbers.
    pub fn functor_arity(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(name) => Some((name, 0)),
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn is_callable(&self) -> bool {
        self.functor_arity().is_some()
    }

    /// Largest variable id occurring in the term, if any.
    pub fn max_var_id(&self) -> Option<usize> {
        match self {
            Term::Var { id, .. } => Some(*id),
            Term::Compound(_, args) => args.iter().filter_map(Term::max_var_id).max(),
            _ => None,
        }
    }

    /// Structural equality up to a bijective renaming of variables.
    pub fn variant(&self, other: &Term) -> bool {
        fn walk(a: &Term, b: &Term, fwd: &mut HashMap<usize, usize>, bwd: &mut HashMap<usize, usize>) -> bool {
            match (a, b) {
                (Term::Atom(x), Term::Atom(y)) => x == y,
                (Term::Num(x), Term::Num(y)) => x == y,
                (Term::Var { id: x, .. }, Term::Var { id: y, .. }) => {
                    let f = *fwd.entry(*x).or_insert(*y);
                    let g = *bwd.entry(*y).or_insert(*x);
                    f == *y && g == *x
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    f == g
                        && xs.len() == ys.len()
                        && xs.iter().zip(ys).all(|(x, y)| walk(x, y, fwd, bwd))
                }
                _ => false,
            }
        }
        walk(self, other, &mut HashMap::new(), &mut HashMap::new())
    }
}

/// A fact or rule. Facts have an empty body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl Clause {
    pub fn fact(head: Term) -> Clause {
        Clause { head, body: Vec::new() }
    }

    pub fn key(&self) -> (String, usize) {
        let (name, arity) = self
            .head
            .functor_arity()
            .expect("clause heads are atoms or compounds");
        (name.to_string(), arity)
    }

    pub fn variant(&self, other: &Clause) -> bool {
        // Rebuild as a single term so the variable bijection spans head and body.
        let as_term = |c: &Clause| {
            let mut args = vec![c.head.clone()];
            args.extend(c.body.iter().cloned());
            Term::Compound("$clause".to_string(), args)
        };
        as_term(self).variant(&as_term(other))
    }
}

/// A parsed knowledge base: clauses in source order plus a functor/arity
/// index, and any directives encountered (recorded, never executed).
#[derive(Debug, Clone, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: HashMap<(String, usize), Vec<usize>>,
    directives: Vec<Term>,
    next_var_id: usize,
}

impl Program {
    pub fn new(clauses: Vec<Clause>, directives: Vec<Term>) -> Program {
        let next_var_id = clauses
            .iter()
            .flat_map(|c| std::iter::once(&c.head).chain(c.body.iter()))
            .chain(directives.iter())
            .filter_map(Term::max_var_id)
            .max()
            .map_or(0, |m| m + 1);
        let mut program = Program {
            clauses: Vec::new(),
            index: HashMap::new(),
            directives,
            next_var_id,
        };
        for clause in clauses {
            program.push_clause(clause);
        }
        program
    }

    fn push_clause(&mut self, clause: Clause) {
        let key = clause.key();
        self.index.entry(key).or_default().push(self.clauses.len());
        self.clauses.push(clause);
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn directives(&self) -> &[Term] {
        &self.directives
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty() && self.directives.is_empty()
    }

    /// Positions of the clauses defining `name/arity`, in source order.
    pub fn clauses_for(&self, name: &str, arity: usize) -> &[usize] {
        self.index
            .get(&(name.to_string(), arity))
            .map_or(&[][..], Vec::as_slice)
    }

    pub fn defines(&self, name: &str, arity: usize) -> bool {
        !self.clauses_for(name, arity).is_empty()
    }

    /// First variable id not used by any clause; engine renaming starts here.
    pub fn next_var_id(&self) -> usize {
        self.next_var_id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_desugars_to_cons_cells() {
        let t = Term::list(vec![Term::int(1), Term::int(2)]);
        assert_eq!(
            t,
            Term::cons(Term::int(1), Term::cons(Term::int(2), Term::nil()))
        );
    }

    #[test]
    fn variant_requires_bijection() {
        let a = Term::compound("f", vec![Term::var("X", 0), Term::var("Y", 1)]);
        let b = Term::compound("f", vec![Term::var("A", 5), Term::var("B", 9)]);
        let c = Term::compound("f", vec![Term::var("A", 5), Term::var("A", 5)]);
        assert!(a.variant(&b));
        assert!(!a.variant(&c));
        let d = Term::compound("f", vec![Term::var("X", 0), Term::var("X", 0)]);
        assert!(d.variant(&c));
        assert!(!d.variant(&b));
    }

    #[test]
    fn index_is_consistent_with_clause_order() {
        let p = Program::new(
            vec![
                Clause::fact(Term::compound("p", vec![Term::int(1)])),
                Clause::fact(Term::atom("q")),
                Clause::fact(Term::compound("p", vec![Term::int(2)])),
            ],
            vec![],
        );
        assert_eq!(p.clauses_for("p", 1), &[0, 2]);
        assert_eq!(p.clauses_for("q", 0), &[1]);
        assert_eq!(p.clauses_for("r", 0), &[] as &[usize]);
    }
}
