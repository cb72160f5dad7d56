//! Operator-precedence reader for the dialect.
//!
//! The operator table is a fixed whitelist. Directives (`:- Goal.`) are
//! recorded on the program but never executed. Clause bodies are flattened
//! conjunctions; `;`, `->` and `\+` stay nested inside single goals.

use std::collections::HashMap;

use crate::error::{ParseError, ParseErrorKind};
use crate::lexer::{tokenize, Span, SpannedToken, Token};
use crate::term::{Clause, Program, Term};

/// Cap on structural nesting so hostile inputs fail with a ParseError
/// instead of exhausting the stack. Operator chains (long conjunctions,
/// arithmetic chains) are parsed iteratively and do not count against it.
const MAX_TERM_DEPTH: usize = 1_000;

/// Infix operators: name -> (priority, left max, right max).
pub(crate) fn infix_op(name: &str) -> Option<(u32, u32, u32)> {
    let entry = match name {
        ":-" => (1200, 1199, 1199),
        ";" => (1100, 1099, 1100),
        "->" => (1050, 1049, 1050),
        "," => (1000, 999, 1000),
        "=" | "\\=" | "is" | "=:=" | "=\\=" | "<" | ">" | "=<" | ">=" => (700, 699, 699),
        "+" | "-" => (500, 500, 499),
        "*" | "/" | "//" | "mod" => (400, 400, 399),
        _ => return None,
    };
    Some(entry)
}

/// Prefix operators: name -> (priority, argument max).
pub(crate) fn prefix_op(name: &str) -> Option<(u32, u32)> {
    let entry = match name {
        ":-" => (1200, 1199),
        "\\+" => (900, 900),
        "-" => (200, 200),
        _ => return None,
    };
    Some(entry)
}

struct Parser {
    tokens: Vec<SpannedToken>,
    pos: usize,
    vars: HashMap<String, usize>,
    next_var: usize,
    eof: Span,
}

/// Parse a full program: clauses and directives, each ending in a dot.
/// Empty (or comment-only) source is an empty program, not an error.
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let mut parser = Parser::new(source)?;
    let mut clauses = Vec::new();
    let mut directives = Vec::new();
    while parser.peek().is_some() {
        parser.vars.clear();
        let clause_span = parser.current_span();
        let (term, _) = parser.parse(1200, 0)?;
        parser.expect_end()?;
        match term {
            Term::Compound(f, mut args) if f == ":-" && args.len() == 2 => {
                let body = args.pop().expect("arity 2");
                let head = args.pop().expect("arity 2");
                validate_head(&head, clause_span)?;
                let goals = flatten_conjunction(body);
                for goal in &goals {
                    validate_goal(goal, clause_span)?;
                }
                clauses.push(Clause { head, body: goals });
            }
            Term::Compound(f, mut args) if f == ":-" && args.len() == 1 => {
                directives.push(args.pop().expect("arity 1"));
            }
            head => {
                validate_head(&head, clause_span)?;
                clauses.push(Clause::fact(head));
            }
        }
    }
    Ok(Program::new(clauses, directives))
}

/// Parse a single term with no trailing dot.
pub fn parse_term(source: &str) -> Result<Term, ParseError> {
    let mut parser = Parser::new(source)?;
    if parser.peek().is_none() {
        return Err(parser.error_at(parser.eof, ParseErrorKind::UnexpectedToken, "empty input"));
    }
    let (term, _) = parser.parse(1200, 0)?;
    if parser.peek().is_some() {
        return Err(parser.leftover_error("end of input"));
    }
    Ok(term)
}

fn validate_head(head: &Term, span: Span) -> Result<(), ParseError> {
    let Some((name, arity)) = head.functor_arity() else {
        return Err(ParseError::new(
            span.line,
            span.column,
            ParseErrorKind::UnexpectedToken,
            "clause head must be an atom or compound term",
        ));
    };
    // Control constructs cannot be redefined.
    if arity > 0 && matches!(name, "," | ";" | "->" | ":-" | "\\+") {
        return Err(ParseError::new(
            span.line,
            span.column,
            ParseErrorKind::UnexpectedToken,
            format!("cannot define clause for control construct {name}/{arity}"),
        ));
    }
    Ok(())
}

/// Body goals must be callable, recursively through the control functors.
fn validate_goal(goal: &Term, span: Span) -> Result<(), ParseError> {
    match goal {
        Term::Var { .. } | Term::Num(_) => Err(ParseError::new(
            span.line,
            span.column,
            ParseErrorKind::UnexpectedToken,
            "clause body goal must be callable",
        )),
        Term::Compound(f, args)
            if args.len() == 2 && (f == "," || f == ";" || f == "->") =>
        {
            for arg in args {
                validate_goal(arg, span)?;
            }
            Ok(())
        }
        Term::Compound(f, args) if f == "\\+" && args.len() == 1 => validate_goal(&args[0], span),
        _ => Ok(()),
    }
}

fn flatten_conjunction(term: Term) -> Vec<Term> {
    match term {
        Term::Compound(f, args) if f == "," && args.len() == 2 => {
            let mut args = args.into_iter();
            let left = args.next().expect("arity 2");
            let right = args.next().expect("arity 2");
            let mut goals = flatten_conjunction(left);
            goals.extend(flatten_conjunction(right));
            goals
        }
        other => vec![other],
    }
}

fn describe(token: &Token) -> String {
    match token {
        Token::Atom(a) => format!("atom `{a}`"),
        Token::Var(v) => format!("variable `{v}`"),
        Token::Num(n) => format!("number {n}"),
        Token::Open | Token::OpenCT => "`(`".to_string(),
        Token::Close => "`)`".to_string(),
        Token::OpenList => "`[`".to_string(),
        Token::CloseList => "`]`".to_string(),
        Token::OpenCurly => "`{`".to_string(),
        Token::CloseCurly => "`}`".to_string(),
        Token::Comma => "`,`".to_string(),
        Token::Bar => "`|`".to_string(),
        Token::End => "end of clause".to_string(),
    }
}

fn starts_term(token: &Token) -> bool {
    matches!(
        token,
        Token::Atom(_)
            | Token::Var(_)
            | Token::Num(_)
            | Token::Open
            | Token::OpenCT
            | Token::OpenList
            | Token::OpenCurly
    )
}

impl Parser {
    fn new(source: &str) -> Result<Parser, ParseError> {
        let tokens = tokenize(source)?;
        let lines = source.lines().count().max(1);
        let eof = Span {
            line: lines,
            column: source.lines().last().map_or(1, |l| l.chars().count() + 1),
        };
        Ok(Parser { tokens, pos: 0, vars: HashMap::new(), next_var: 0, eof })
    }

    fn peek(&self) -> Option<&SpannedToken> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<SpannedToken> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn current_span(&self) -> Span {
        self.peek().map_or(self.eof, |t| t.span)
    }

    fn error_at(&self, span: Span, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError::new(span.line, span.column, kind, message)
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let span = self.current_span();
        let found = self
            .peek()
            .map_or("end of input".to_string(), |t| describe(&t.token));
        self.error_at(
            span,
            ParseErrorKind::UnexpectedToken,
            format!("expected {what}, found {found}"),
        )
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(SpannedToken { token: Token::End, .. }) => {
                self.bump();
                Ok(())
            }
            _ => Err(self.leftover_error("`.` at end of clause")),
        }
    }

    /// A leftover infix operator means a priority clash (e.g. `a = b = c`
    /// under an xfx operator); anything else is a plain unexpected token.
    fn leftover_error(&self, expected: &str) -> ParseError {
        if let Some(SpannedToken { token: Token::Atom(name), span }) = self.peek() {
            if infix_op(name).is_some() {
                return self.error_at(
                    *span,
                    ParseErrorKind::Operator,
                    format!("operator priority clash on `{name}`"),
                );
            }
        }
        self.unexpected(expected)
    }

    fn fresh_var(&mut self) -> usize {
        let id = self.next_var;
        self.next_var += 1;
        id
    }

    fn var_term(&mut self, name: String) -> Term {
        // Each bare `_` is a distinct variable; named variables are shared
        // within one clause.
        let id = if name == "_" {
            self.fresh_var()
        } else if let Some(&id) = self.vars.get(&name) {
            id
        } else {
            let id = self.fresh_var();
            self.vars.insert(name.clone(), id);
            id
        };
        Term::Var { name, id }
    }

    /// Parse one term with priority at most `max_prec`.
    /// Returns the term and the priority it was produced at.
    ///
    /// Infix chains are handled with explicit operand/operator stacks, so
    /// recursion depth tracks structural nesting only.
    fn parse(&mut self, max_prec: u32, depth: usize) -> Result<(Term, u32), ParseError> {
        if depth > MAX_TERM_DEPTH {
            let span = self.current_span();
            return Err(self.error_at(
                span,
                ParseErrorKind::UnexpectedToken,
                "term nesting exceeds depth limit",
            ));
        }
        let mut operands: Vec<(Term, u32)> = vec![self.parse_primary(max_prec, depth)?];
        let mut pending: Vec<(String, u32, u32)> = Vec::new(); // (name, prec, rmax)
        loop {
            let op = match self.peek() {
                Some(SpannedToken { token: Token::Comma, .. }) => ",".to_string(),
                Some(SpannedToken { token: Token::Atom(name), .. })
                    if infix_op(name).is_some() =>
                {
                    name.clone()
                }
                _ => break,
            };
            let (prec, lmax, rmax) = infix_op(&op).expect("checked above");
            // A stacked operator still building its right operand bounds
            // what may follow; reduce every operator tighter than this one.
            while pending.last().is_some_and(|(_, _, top_rmax)| prec > *top_rmax) {
                reduce(&mut operands, &mut pending);
            }
            let bound = pending.last().map_or(max_prec, |(_, _, r)| *r);
            let left_prec = operands.last().expect("nonempty").1;
            if prec > bound || left_prec > lmax {
                break;
            }
            self.bump();
            pending.push((op, prec, rmax));
            operands.push(self.parse_primary(rmax, depth)?);
        }
        while !pending.is_empty() {
            reduce(&mut operands, &mut pending);
        }
        let (term, prec) = operands.pop().expect("exactly one operand remains");
        debug_assert!(operands.is_empty());
        Ok((term, prec))
    }

    fn parse_primary(&mut self, max_prec: u32, depth: usize) -> Result<(Term, u32), ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("a term"));
        };
        match tok.token {
            Token::Num(n) => {
                self.bump();
                Ok((Term::Num(n), 0))
            }
            Token::Var(name) => {
                self.bump();
                Ok((self.var_term(name), 0))
            }
            Token::Atom(name) => {
                self.bump();
                if matches!(self.peek(), Some(SpannedToken { token: Token::OpenCT, .. })) {
                    self.bump();
                    let args = self.parse_args(depth + 1)?;
                    return Ok((fold_negative(Term::Compound(name, args)), 0));
                }
                if let Some((prec, argmax)) = prefix_op(&name) {
                    let starts = self.peek().is_some_and(|t| starts_term(&t.token));
                    if starts && prec <= max_prec {
                        let (arg, _) = self.parse(argmax, depth + 1)?;
                        let term = fold_negative(Term::Compound(name, vec![arg]));
                        let prec = if matches!(term, Term::Num(_)) { 0 } else { prec };
                        return Ok((term, prec));
                    }
                }
                Ok((Term::Atom(name), 0))
            }
            Token::Open | Token::OpenCT => {
                self.bump();
                let (term, _) = self.parse(1200, depth + 1)?;
                self.expect_close(Token::Close, "`)`")?;
                Ok((term, 0))
            }
            Token::OpenList => {
                self.bump();
                if matches!(self.peek(), Some(SpannedToken { token: Token::CloseList, .. })) {
                    self.bump();
                    return Ok((Term::nil(), 0));
                }
                let mut items = vec![self.parse(999, depth + 1)?.0];
                loop {
                    match self.peek() {
                        Some(SpannedToken { token: Token::Comma, .. }) => {
                            self.bump();
                            items.push(self.parse(999, depth + 1)?.0);
                        }
                        Some(SpannedToken { token: Token::Bar, .. }) => {
                            self.bump();
                            let tail = self.parse(999, depth + 1)?.0;
                            self.expect_close(Token::CloseList, "`]`")?;
                            let list = items
                                .into_iter()
                                .rev()
                                .fold(tail, |t, h| Term::cons(h, t));
                            return Ok((list, 0));
                        }
                        Some(SpannedToken { token: Token::CloseList, .. }) => {
                            self.bump();
                            return Ok((Term::list(items), 0));
                        }
                        _ => return Err(self.unexpected("`,`, `|` or `]` in list")),
                    }
                }
            }
            Token::OpenCurly => {
                self.bump();
                if matches!(self.peek(), Some(SpannedToken { token: Token::CloseCurly, .. })) {
                    self.bump();
                    return Ok((Term::Atom("{}".to_string()), 0));
                }
                let (inner, _) = self.parse(1200, depth + 1)?;
                self.expect_close(Token::CloseCurly, "`}`")?;
                Ok((Term::Compound("{}".to_string(), vec![inner]), 0))
            }
            Token::Comma
            | Token::Bar
            | Token::Close
            | Token::CloseList
            | Token::CloseCurly
            | Token::End => Err(self.unexpected("a term")),
        }
    }

    fn parse_args(&mut self, depth: usize) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.parse(999, depth)?.0];
        loop {
            match self.peek() {
                Some(SpannedToken { token: Token::Comma, .. }) => {
                    self.bump();
                    args.push(self.parse(999, depth)?.0);
                }
                Some(SpannedToken { token: Token::Close, .. }) => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.unexpected("`,` or `)` in argument list")),
            }
        }
    }

    fn expect_close(&mut self, token: Token, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.token == token => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(what)),
        }
    }
}

fn reduce(operands: &mut Vec<(Term, u32)>, pending: &mut Vec<(String, u32, u32)>) {
    let (op, prec, _) = pending.pop().expect("caller checks pending");
    let (right, _) = operands.pop().expect("two operands per infix op");
    let (left, _) = operands.pop().expect("two operands per infix op");
    operands.push((Term::Compound(op, vec![left, right]), prec));
}

/// `-` applied to a number literal reads as a negative number, matching
/// mainstream term readers.
fn fold_negative(term: Term) -> Term {
    match term {
        Term::Compound(f, args) if f == "-" && args.len() == 1 => match args.into_iter().next() {
            Some(Term::Num(n)) => Term::Num(n.neg()),
            Some(other) => Term::Compound("-".to_string(), vec![other]),
            None => unreachable!(),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ParseErrorKind;
    use crate::rational::Rat;

    /// Unambiguous functional rendering for tree-shape assertions.
    /// Variables print positionally (`_0`, `_1`, ...) in order of first
    /// occurrence so expectations do not depend on id assignment.
    fn canon(term: &Term) -> String {
        fn walk(t: &Term, names: &mut Vec<usize>, out: &mut String) {
            match t {
                Term::Atom(a) => out.push_str(a),
                Term::Num(n) => out.push_str(&n.to_text()),
                Term::Var { id, .. } => {
                    let pos = names.iter().position(|x| x == id).unwrap_or_else(|| {
                        names.push(*id);
                        names.len() - 1
                    });
                    out.push_str(&format!("_{pos}"));
                }
                Term::Compound(f, args) => {
                    out.push_str(f);
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        walk(a, names, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        walk(term, &mut Vec::new(), &mut out);
        out
    }

    fn canon_term(src: &str) -> String {
        canon(&parse_term(src).unwrap())
    }

    #[test]
    fn rule_bodies_flatten() {
        let p = parse_program("p :- q, r.").unwrap();
        let c = &p.clauses()[0];
        assert_eq!(c.head, Term::atom("p"));
        assert_eq!(c.body, vec![Term::atom("q"), Term::atom("r")]);
    }

    #[test]
    fn arithmetic_precedence_is_standard() {
        // shapes frozen from the standard operator table
        assert_eq!(canon_term("2*3+1"), "+(*(2,3),1)");
        assert_eq!(canon_term("2+3*4"), "+(2,*(3,4))");
        assert_eq!(canon_term("10-2-3"), "-(-(10,2),3)");
        assert_eq!(canon_term("2-3*4+5"), "+(-(2,*(3,4)),5)");
        assert_eq!(canon_term("(2+3)*4"), "*(+(2,3),4)");
        assert_eq!(canon_term("17 mod 5 + 17 // 5"), "+(mod(17,5),//(17,5))");
        assert_eq!(canon_term("1+2=<3*4"), "=<(+(1,2),*(3,4))");
        assert_eq!(canon_term("X is Y"), "is(_0,_1)");
    }

    #[test]
    fn clause_with_arithmetic_body() {
        let p = parse_program("cost(C) :- C is 2*3+1.").unwrap();
        let c = &p.clauses()[0];
        assert_eq!(canon(&c.head), "cost(_0)");
        assert_eq!(canon(&c.body[0]), "is(_0,+(*(2,3),1))");
    }

    #[test]
    fn control_constructs_nest() {
        assert_eq!(canon_term("a -> b ; c"), ";(->(a,b),c)");
        assert_eq!(canon_term("a ; b ; c"), ";(a,;(b,c))");
        assert_eq!(canon_term("a, b ; c"), ";(,(a,b),c)");
        assert_eq!(canon_term("\\+ a"), "\\+(a)");
        let p = parse_program("p :- (a ; b), c.").unwrap();
        assert_eq!(p.clauses()[0].body.len(), 2);
        assert_eq!(canon(&p.clauses()[0].body[0]), ";(a,b)");
    }

    #[test]
    fn lists_desugar() {
        assert_eq!(canon_term("[1,2]"), ".(1,.(2,[]))");
        assert_eq!(canon_term("[]"), "[]");
        assert_eq!(canon_term("[H|T]"), ".(_0,_1)");
        assert_eq!(canon_term("[1,2|T]"), ".(1,.(2,_0))");
        assert_eq!(canon_term("[[1],[2]]"), ".(.(1,[]),.(.(2,[]),[]))");
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse_term("-3").unwrap(), Term::int(-3));
        assert_eq!(canon_term("-3 + -4"), "+(-3,-4)");
        assert_eq!(canon_term("1 - -2"), "-(1,-2)");
        assert_eq!(canon_term("-(3)"), "-3");
        assert_eq!(canon_term("-(3+4)"), "-(+(3,4))");
        assert_eq!(canon_term("- x"), "-(x)");
    }

    #[test]
    fn curly_braces_wrap() {
        assert_eq!(canon_term("{X >= 3}"), "{}(>=(_0,3))");
        assert_eq!(canon_term("{}"), "{}");
    }

    #[test]
    fn quoted_atoms_are_plain_atoms() {
        assert_eq!(canon_term("'hello world'(X)"), "hello world(_0)");
        assert_eq!(parse_term("'a b'").unwrap(), Term::atom("a b"));
    }

    #[test]
    fn variables_share_ids_within_a_clause() {
        let p = parse_program("eq(X, X).\neq2(X, Y).").unwrap();
        let c0 = &p.clauses()[0];
        assert_eq!(c0.head, {
            let args = match &c0.head {
                Term::Compound(_, a) => a.clone(),
                _ => panic!(),
            };
            assert_eq!(args[0], args[1]);
            c0.head.clone()
        });
        // fresh ids across clauses; `_` is always fresh
        let anon = parse_program("f(_, _).").unwrap();
        let args = match &anon.clauses()[0].head {
            Term::Compound(_, a) => a.clone(),
            _ => panic!(),
        };
        assert_ne!(args[0], args[1]);
    }

    #[test]
    fn directives_are_recorded_not_executed() {
        let p = parse_program(":- use_module(library(lists)).\nfoo(1).").unwrap();
        assert_eq!(p.directives().len(), 1);
        assert_eq!(p.clauses().len(), 1);
        assert_eq!(canon(&p.directives()[0]), "use_module(library(lists))");
    }

    #[test]
    fn empty_source_is_an_empty_program() {
        assert!(parse_program("").unwrap().is_empty());
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn missing_end_dot_is_an_error() {
        let e = parse_program("p :- q").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedToken);
        assert!(e.message.contains("`.`"));
    }

    #[test]
    fn xfx_operators_do_not_chain() {
        let e = parse_term("a = b = c").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Operator);
        let e = parse_program("p :- X is 1 is 2.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Operator);
    }

    #[test]
    fn bad_heads_and_goals_are_rejected() {
        assert!(parse_program("3.").is_err());
        assert!(parse_program("X.").is_err());
        assert!(parse_program("p :- X.").is_err());
        assert!(parse_program("p :- 3.").is_err());
        assert!(parse_program("p :- (q ; 3).").is_err());
        assert!(parse_program("a, b.").is_err());
    }

    #[test]
    fn functor_requires_adjacent_paren() {
        assert!(parse_program("foo (X).").is_err());
        assert!(parse_program("foo(X).").is_ok());
    }

    #[test]
    fn deep_nesting_errors_instead_of_overflowing() {
        let mut src = String::new();
        for _ in 0..3000 {
            src.push_str("f(");
        }
        src.push('a');
        for _ in 0..3000 {
            src.push(')');
        }
        let e = parse_term(&src).unwrap_err();
        assert!(e.message.contains("depth"));
    }

    #[test]
    fn decimals_become_exact_rationals() {
        assert_eq!(
            parse_term("2.5").unwrap(),
            Term::Num(Rat::parse_decimal("2.5").unwrap())
        );
    }
}
