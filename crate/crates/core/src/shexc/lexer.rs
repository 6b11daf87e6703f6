use super::ast::Position;
use super::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// `<...>` with the brackets stripped.
    IriRef(String),
    /// Prefixed name, e.g. `schema:name` or `:User`. Stored as written.
    PName { prefix: String, local: String },
    /// Bare word: keywords, `a`, and anything else alphabetic.
    Word(String),
    Int(u32),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Pipe,
    At,
    Dollar,
    Amp,
    Dot,
    Question,
    Star,
    Plus,
    Comma,
    Percent,
    Caret,
    Tilde,
    Minus,
    DoubleSlash,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::PName { prefix, local } => format!("{prefix}:{local}"),
            Tok::Word(w) => w.clone(),
            Tok::Int(n) => n.to_string(),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Eof => "end of input".to_string(),
            other => other.punct().to_string(),
        }
    }

    pub(crate) fn punct(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Pipe => "|",
            Tok::At => "@",
            Tok::Dollar => "$",
            Tok::Amp => "&",
            Tok::Dot => ".",
            Tok::Question => "?",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Comma => ",",
            Tok::Percent => "%",
            Tok::Caret => "^",
            Tok::Tilde => "~",
            Tok::Minus => "-",
            Tok::DoubleSlash => "//",
            _ => "",
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub pos: Position,
}

fn is_pn_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

fn is_local_char(c: char) -> bool {
    is_pn_char(c) || c == ':'
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }
}

/// Splits a trailing run of `.` off a name; PN_LOCAL may not end in a dot.
fn split_trailing_dots(mut name: String) -> (String, usize) {
    let mut dots = 0;
    while name.ends_with('.') {
        name.pop();
        dots += 1;
    }
    (name, dots)
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();

    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.bump() {
                if c == '\n' {
                    break;
                }
            }
            continue;
        }
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            '|' => Some(Tok::Pipe),
            '@' => Some(Tok::At),
            '$' => Some(Tok::Dollar),
            '&' => Some(Tok::Amp),
            '.' => Some(Tok::Dot),
            '?' => Some(Tok::Question),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            ',' => Some(Tok::Comma),
            '%' => Some(Tok::Percent),
            '^' => Some(Tok::Caret),
            '~' => Some(Tok::Tilde),
            '-' => Some(Tok::Minus),
            _ => None,
        };
        if let Some(tok) = simple {
            cur.bump();
            out.push(Spanned { tok, pos });
            continue;
        }
        if c == '/' {
            cur.bump();
            if cur.peek() == Some('/') {
                cur.bump();
                out.push(Spanned {
                    tok: Tok::DoubleSlash,
                    pos,
                });
                continue;
            }
            return Err(ParseError::new(
                ParseErrorKind::Syntax("unexpected character '/'".into()),
                pos,
            ));
        }
        if c == '<' {
            cur.bump();
            let mut iri = String::new();
            loop {
                match cur.bump() {
                    Some('>') => break,
                    Some(c) if c.is_whitespace() => {
                        return Err(ParseError::new(
                            ParseErrorKind::Syntax("whitespace inside IRI reference".into()),
                            pos,
                        ))
                    }
                    Some(c) => iri.push(c),
                    None => {
                        return Err(ParseError::new(
                            ParseErrorKind::Syntax("unterminated IRI reference".into()),
                            pos,
                        ))
                    }
                }
            }
            out.push(Spanned {
                tok: Tok::IriRef(iri),
                pos,
            });
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = c;
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.bump() {
                    Some(c) if c == quote => break,
                    Some('\\') => match cur.bump() {
                        Some(e) => {
                            s.push('\\');
                            s.push(e);
                        }
                        None => break,
                    },
                    Some('\n') | None => {
                        return Err(ParseError::new(
                            ParseErrorKind::Syntax("unterminated string literal".into()),
                            pos,
                        ))
                    }
                    Some(c) => s.push(c),
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let digits = cur.take_while(|c| c.is_ascii_digit());
            let n = digits.parse::<u32>().map_err(|_| {
                ParseError::new(
                    ParseErrorKind::Syntax(format!("integer out of range: {digits}")),
                    pos,
                )
            })?;
            out.push(Spanned {
                tok: Tok::Int(n),
                pos,
            });
            continue;
        }
        if c == ':' || is_pn_start(c) {
            let head = if c == ':' {
                String::new()
            } else {
                cur.take_while(is_pn_char)
            };
            if cur.peek() == Some(':') {
                cur.bump();
                let local = cur.take_while(is_local_char);
                let (local, dots) = split_trailing_dots(local);
                out.push(Spanned {
                    tok: Tok::PName {
                        prefix: head,
                        local,
                    },
                    pos,
                });
                push_dots(&mut out, dots, &cur);
            } else {
                let (word, dots) = split_trailing_dots(head);
                out.push(Spanned {
                    tok: Tok::Word(word),
                    pos,
                });
                push_dots(&mut out, dots, &cur);
            }
            continue;
        }
        return Err(ParseError::new(
            ParseErrorKind::Syntax(format!("unexpected character '{c}'")),
            pos,
        ));
    }

    out.push(Spanned {
        tok: Tok::Eof,
        pos: cur.pos(),
    });
    check_braces(&out)?;
    Ok(out)
}

fn push_dots(out: &mut Vec<Spanned>, dots: usize, cur: &Cursor<'_>) {
    let end = cur.pos();
    for i in 0..dots {
        out.push(Spanned {
            tok: Tok::Dot,
            pos: Position {
                line: end.line,
                column: end.column - dots + i,
            },
        });
    }
}

fn check_braces(tokens: &[Spanned]) -> Result<(), ParseError> {
    let mut open: Vec<Position> = Vec::new();
    for t in tokens {
        match t.tok {
            Tok::LBrace => open.push(t.pos),
            Tok::RBrace => {
                if open.pop().is_none() {
                    return Err(ParseError::new(
                        ParseErrorKind::UnbalancedBraces("'}' without matching '{'".into()),
                        t.pos,
                    ));
                }
            }
            _ => {}
        }
    }
    match open.pop() {
        Some(pos) => Err(ParseError::new(
            ParseErrorKind::UnbalancedBraces("'{' is never closed".into()),
            pos,
        )),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn prefixed_names_and_trailing_dot() {
        assert_eq!(
            toks(":name ."),
            vec![
                Tok::PName {
                    prefix: String::new(),
                    local: "name".into()
                },
                Tok::Dot,
                Tok::Eof
            ]
        );
        assert_eq!(
            toks("schema:name."),
            vec![
                Tok::PName {
                    prefix: "schema".into(),
                    local: "name".into()
                },
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn hyphenated_local_names() {
        assert_eq!(
            toks("cex:ref-area")[0],
            Tok::PName {
                prefix: "cex".into(),
                local: "ref-area".into()
            }
        );
    }

    #[test]
    fn comments_skipped_and_positions_tracked() {
        let t = tokenize("# header\n  :A IRI").unwrap();
        assert_eq!(t[0].pos, Position { line: 2, column: 3 });
        assert!(t[1].tok.is_keyword("iri"));
    }

    #[test]
    fn unclosed_brace_reports_opening_position() {
        let err = tokenize(":A {\n :p .").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnbalancedBraces(_)));
        assert_eq!((err.line, err.column), (1, 4));
    }

    #[test]
    fn stray_closing_brace() {
        let err = tokenize(":A { } }").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnbalancedBraces(_)));
        assert_eq!(err.column, 8);
    }
}
