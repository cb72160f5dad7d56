//! Tokenizer for the dialect.
//!
//! Handles unquoted and quoted atoms, variables, integer and decimal
//! literals, punctuation, symbolic operators and end-of-clause dots.
//! `%` line comments and `/* */` block comments are stripped.

use crate::error::{ParseError, ParseErrorKind};
use crate::rational::Rat;

/// Characters that form symbolic atoms such as `:-`, `=<` and `\=`.
const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Atom(String),
    Var(String),
    Num(Rat),
    /// `(` opening a compound argument list (immediately follows a functor).
    OpenCT,
    /// `(` grouping a term.
    Open,
    Close,
    OpenList,
    CloseList,
    OpenCurly,
    CloseCurly,
    Comma,
    Bar,
    /// End-of-clause dot.
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedToken {
    pub token: Token,
    pub span: Span,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

/// Tokenize `source`. Returns the token stream or the first lexical error.
pub fn tokenize(source: &str) -> Result<Vec<SpannedToken>, ParseError> {
    let mut lexer = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    // Char index just past the previous token, for functor-paren adjacency.
    let mut last_end = usize::MAX;
    loop {
        lexer.skip_layout()?;
        let Some(c) = lexer.peek() else { break };
        let span = lexer.span();
        let start = lexer.pos;
        let token = match c {
            '(' => {
                lexer.bump();
                let adjacent = start == last_end
                    && matches!(tokens.last(), Some(SpannedToken { token: Token::Atom(_), .. }));
                if adjacent {
                    Token::OpenCT
                } else {
                    Token::Open
                }
            }
            ')' => {
                lexer.bump();
                Token::Close
            }
            '[' => {
                lexer.bump();
                Token::OpenList
            }
            ']' => {
                lexer.bump();
                Token::CloseList
            }
            '{' => {
                lexer.bump();
                Token::OpenCurly
            }
            '}' => {
                lexer.bump();
                Token::CloseCurly
            }
            ',' => {
                lexer.bump();
                Token::Comma
            }
            '|' => {
                lexer.bump();
                Token::Bar
            }
            '!' => {
                lexer.bump();
                Token::Atom("!".to_string())
            }
            ';' => {
                lexer.bump();
                Token::Atom(";".to_string())
            }
            '\'' => lexer.quoted_atom()?,
            '0'..='9' => lexer.number()?,
            c if c.is_ascii_lowercase() => Token::Atom(lexer.name()),
            c if c.is_ascii_uppercase() || c == '_' => Token::Var(lexer.name()),
            '.' => {
                // An end-of-clause dot is a '.' followed by layout, EOF or %.
                match lexer.peek_at(1) {
                    None => {
                        lexer.bump();
                        Token::End
                    }
                    Some(n) if n.is_whitespace() || n == '%' => {
                        lexer.bump();
                        Token::End
                    }
                    _ => lexer.symbolic()?,
                }
            }
            c if SYMBOL_CHARS.contains(c) => lexer.symbolic()?,
            c => {
                return Err(ParseError::new(
                    span.line,
                    span.column,
                    ParseErrorKind::Lex,
                    format!("illegal character {c:?}"),
                ))
            }
        };
        last_end = lexer.pos;
        tokens.push(SpannedToken { token, span });
    }
    Ok(tokens)
}

impl Lexer {
    fn span(&self) -> Span {
        Span { line: self.line, column: self.column }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_layout(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let span = self.span();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            Some('*') if self.peek_at(1) == Some('/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                            None => {
                                return Err(ParseError::new(
                                    span.line,
                                    span.column,
                                    ParseErrorKind::Unterminated,
                                    "unterminated block comment",
                                ))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn symbolic(&mut self) -> Result<Token, ParseError> {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if SYMBOL_CHARS.contains(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(Token::Atom(s))
    }

    fn number(&mut self) -> Result<Token, ParseError> {
        let span = self.span();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // A decimal point only counts when a digit follows; `7.` is the
        // integer 7 and an end-of-clause dot.
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            s.push('.');
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            let value = Rat::parse_decimal(&s).ok_or_else(|| {
                ParseError::new(span.line, span.column, ParseErrorKind::Lex, format!("bad decimal literal {s}"))
            })?;
            Ok(Token::Num(value))
        } else {
            let value = Rat::parse_integer(&s).ok_or_else(|| {
                ParseError::new(span.line, span.column, ParseErrorKind::Lex, format!("bad integer literal {s}"))
            })?;
            Ok(Token::Num(value))
        }
    }

    fn quoted_atom(&mut self) -> Result<Token, ParseError> {
        let span = self.span();
        self.bump(); // opening quote
        let mut s = String::new();
        loop {
            match self.peek() {
                None => {
                    return Err(ParseError::new(
                        span.line,
                        span.column,
                        ParseErrorKind::Unterminated,
                        "unterminated quoted atom",
                    ))
                }
                Some('\'') => {
                    self.bump();
                    // '' inside quotes is a literal quote
                    if self.peek() == Some('\'') {
                        s.push('\'');
                        self.bump();
                    } else {
                        return Ok(Token::Atom(s));
                    }
                }
                Some('\\') => {
                    let esc_span = self.span();
                    self.bump();
                    let Some(c) = self.bump() else {
                        return Err(ParseError::new(
                            span.line,
                            span.column,
                            ParseErrorKind::Unterminated,
                            "unterminated quoted atom",
                        ));
                    };
                    let replacement = match c {
                        '\\' => '\\',
                        '\'' => '\'',
                        '"' => '"',
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        'a' => '\x07',
                        'b' => '\x08',
                        'f' => '\x0c',
                        'v' => '\x0b',
                        '\n' => continue, // escaped newline is a continuation
                        other => {
                            return Err(ParseError::new(
                                esc_span.line,
                                esc_span.column,
                                ParseErrorKind::Lex,
                                format!("unknown escape \\{other}"),
                            ))
                        }
                    };
                    s.push(replacement);
                }
                Some(c) => {
                    s.push(c);
                    self.bump();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Token> {
        tokenize(src).unwrap().into_iter().map(|t| t.token).collect()
    }

    #[test]
    fn canonical_clause() {
        assert_eq!(
            toks("foo(X, 3)."),
            vec![
                Token::Atom("foo".into()),
                Token::OpenCT,
                Token::Var("X".into()),
                Token::Comma,
                Token::Num(Rat::from_int(3)),
                Token::Close,
                Token::End,
            ]
        );
    }

    #[test]
    fn comments_are_stripped() {
        assert_eq!(toks("% note\na."), vec![Token::Atom("a".into()), Token::End]);
        assert_eq!(
            toks("a /* inline */ . b."),
            vec![
                Token::Atom("a".into()),
                Token::End,
                Token::Atom("b".into()),
                Token::End
            ]
        );
    }

    #[test]
    fn symbolic_operators_munch_greedily() {
        assert_eq!(
            toks("X =:= Y"),
            vec![
                Token::Var("X".into()),
                Token::Atom("=:=".into()),
                Token::Var("Y".into())
            ]
        );
        assert_eq!(
            toks("a :- b"),
            vec![
                Token::Atom("a".into()),
                Token::Atom(":-".into()),
                Token::Atom("b".into())
            ]
        );
    }

    #[test]
    fn decimal_vs_end_dot() {
        assert_eq!(
            toks("x(2.5)."),
            vec![
                Token::Atom("x".into()),
                Token::OpenCT,
                Token::Num(Rat::parse_decimal("2.5").unwrap()),
                Token::Close,
                Token::End,
            ]
        );
        assert_eq!(toks("7."), vec![Token::Num(Rat::from_int(7)), Token::End]);
    }

    #[test]
    fn grouping_paren_is_not_compound_open() {
        assert_eq!(
            toks("a (b)"),
            vec![
                Token::Atom("a".into()),
                Token::Open,
                Token::Atom("b".into()),
                Token::Close
            ]
        );
        // quoted functor directly followed by ( still applies
        assert_eq!(
            toks("'f'(x)"),
            vec![
                Token::Atom("f".into()),
                Token::OpenCT,
                Token::Atom("x".into()),
                Token::Close
            ]
        );
    }

    #[test]
    fn unterminated_inputs_error() {
        let e = tokenize("'abc").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unterminated);
        let e = tokenize("/* no close").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unterminated);
        let e = tokenize("\"strings are not code\"").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Lex);
    }

    #[test]
    fn positions_are_one_based() {
        let ts = tokenize("a.\n bar.").unwrap();
        assert_eq!(ts[0].span, Span { line: 1, column: 1 });
        assert_eq!(ts[2].span, Span { line: 2, column: 2 });
    }
}
