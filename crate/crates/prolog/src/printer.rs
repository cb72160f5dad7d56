//! Canonical printing. `parse_term(print_term(t))` reproduces `t` up to
//! variable renaming for every term the reader can produce.

use crate::term::{Clause, Program, Term, LIST_CONS, LIST_NIL};

use crate::parser::{infix_op, prefix_op};

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

pub fn print_term(term: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, term, 1200);
    out
}

pub fn print_clause(clause: &Clause) -> String {
    let mut out = String::new();
    write_term(&mut out, &clause.head, 1199);
    if !clause.body.is_empty() {
        out.push_str(" :- ");
        for (i, goal) in clause.body.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_term(&mut out, goal, 999);
        }
    }
    end_clause(&mut out);
    out
}

pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for directive in program.directives() {
        out.push_str(":- ");
        write_term(&mut out, directive, 1199);
        end_clause(&mut out);
        out.push('\n');
    }
    for clause in program.clauses() {
        out.push_str(&print_clause(clause));
        out.push('\n');
    }
    out
}

/// The clause dot must not fuse with a trailing symbolic atom.
fn end_clause(out: &mut String) {
    if out.ends_with(|c| SYMBOL_CHARS.contains(c)) {
        out.push(' ');
    }
    out.push('.');
}

fn is_symbol_char(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Push `piece`, inserting a space when direct concatenation would fuse
/// into a different token.
fn push_guarded(out: &mut String, piece: &str) {
    if let (Some(prev), Some(next)) = (out.chars().last(), piece.chars().next()) {
        let fuses = (is_symbol_char(prev) && is_symbol_char(next))
            || (is_name_char(prev) && is_name_char(next));
        if fuses {
            out.push(' ');
        }
    }
    out.push_str(piece);
}

fn atom_needs_quotes(name: &str) -> bool {
    if name.is_empty() || name == "." {
        return true;
    }
    if matches!(name, "[]" | "{}" | "!" | ";") {
        return false;
    }
    let mut chars = name.chars();
    let first = chars.next().expect("nonempty");
    if first.is_ascii_lowercase() {
        return !name.chars().all(is_name_char);
    }
    !name.chars().all(is_symbol_char)
}

fn quote_atom(name: &str) -> String {
    let mut s = String::with_capacity(name.len() + 2);
    s.push('\'');
    for c in name.chars() {
        match c {
            '\'' => s.push_str("\\'"),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\t' => s.push_str("\\t"),
            '\r' => s.push_str("\\r"),
            other => s.push(other),
        }
    }
    s.push('\'');
    s
}

fn write_atom(out: &mut String, name: &str) {
    if atom_needs_quotes(name) {
        push_guarded(out, &quote_atom(name));
    } else {
        push_guarded(out, name);
    }
}

fn write_term(out: &mut String, term: &Term, max_prec: u32) {
    match term {
        Term::Atom(name) => write_atom(out, name),
        Term::Var { name, id } => {
            if name == "_" {
                push_guarded(out, &format!("_G{id}"));
            } else {
                push_guarded(out, name);
            }
        }
        Term::Num(n) => push_guarded(out, &n.to_text()),
        Term::Compound(f, args) if f == LIST_CONS && args.len() == 2 => {
            write_list(out, &args[0], &args[1]);
        }
        Term::Compound(f, args) if f == "{}" && args.len() == 1 => {
            out.push('{');
            write_term(out, &args[0], 1200);
            out.push('}');
        }
        Term::Compound(f, args) if args.len() == 2 && infix_op(f).is_some() => {
            let (prec, lmax, rmax) = infix_op(f).expect("checked");
            let parens = prec > max_prec;
            if parens {
                out.push('(');
            }
            write_term(out, &args[0], lmax);
            if f.chars().all(is_name_char) {
                out.push(' ');
                out.push_str(f);
                out.push(' ');
            } else {
                push_guarded(out, f);
            }
            write_term(out, &args[1], rmax);
            if parens {
                out.push(')');
            }
        }
        Term::Compound(f, args) if args.len() == 1 && prefix_op(f).is_some() => {
            let (prec, argmax) = prefix_op(f).expect("checked");
            let parens = prec > max_prec;
            if parens {
                out.push('(');
            }
            push_guarded(out, f);
            write_term(out, &args[0], argmax);
            if parens {
                out.push(')');
            }
        }
        Term::Compound(f, args) => {
            write_atom(out, f);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(out, arg, 999);
            }
            out.push(')');
        }
    }
}

fn write_list(out: &mut String, head: &Term, tail: &Term) {
    out.push('[');
    write_term(out, head, 999);
    let mut rest = tail;
    loop {
        match rest {
            Term::Atom(name) if name == LIST_NIL => break,
            Term::Compound(f, args) if f == LIST_CONS && args.len() == 2 => {
                out.push(',');
                write_term(out, &args[0], 999);
                rest = &args[1];
            }
            other => {
                out.push('|');
                write_term(out, other, 999);
                break;
            }
        }
    }
    out.push(']');
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_clause(self))
    }
}
