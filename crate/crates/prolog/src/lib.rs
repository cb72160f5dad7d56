//! A small Prolog dialect for executing machine-generated arithmetic
//! programs: reader, canonical printer, and an SLD resolution engine with
//! exact rational arithmetic and hard execution budgets.
//!
//! The dialect is a fixed whitelist. Operators: `:-`, `,`, `;`, `->`, `=`,
//! `\=`, `is`, the arithmetic comparisons, `+ - * / // mod` and unary `-`,
//! plus the parse-accepted stubs `\+`, `!` and `{...}` which the engine
//! reports as unsupported rather than failing to read. Numbers are exact
//! rationals; `2.5` reads as 5/2.
//!
//! Everything here is pure and shares no global state: parse results are
//! plain data, and each query runs on its own machine, so concurrent use
//! from many threads needs no coordination.

mod error;
mod lexer;
mod parser;
mod printer;
mod rational;
mod term;

pub mod engine;

pub use error::{ParseError, ParseErrorKind};
pub use lexer::{tokenize, Span, SpannedToken, Token};
pub use parser::{parse_program, parse_term};
pub use printer::{print_clause, print_program, print_term};
pub use rational::Rat;
pub use term::{Clause, Program, Term};
