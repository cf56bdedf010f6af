use serde::{Deserialize, Serialize};

/// Location of a token or syntax node in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn to(self, other: SourceSpan) -> SourceSpan {
        SourceSpan {
            start: self.start,
            end: other.end.max(self.start),
            line: self.line,
            column: self.column,
        }
    }
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Prime,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,
    DotDot,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Number(s) => format!("number '{s}'"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".into(),
            other => format!("'{}'", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Prime => "'",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Not => "!",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Arrow => "->",
            Tok::DotDot => "..",
            Tok::Question => "?",
            _ => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Splits `text` into tokens. `//` comments run to end of line; `#` comments
/// are accepted only when `hash_comments` is set (property files).
pub fn tokenize(text: &str, hash_comments: bool) -> Result<Vec<Token>, (SourceSpan, String)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span_at = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        start,
        end,
        line,
        column: start - line_start + 1,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if (c == b'/' && bytes.get(i + 1) == Some(&b'/')) || (hash_comments && c == b'#') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else if c.is_ascii_digit()
            || (c == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
        {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            // a single '.' followed by a digit continues the number; '..' is a range
            if i < bytes.len() && bytes[i] == b'.' && bytes.get(i + 1) != Some(&b'.') {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                let mut j = i + 1;
                if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            Tok::Number(text[start..i].to_string())
        } else if c == b'"' {
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                i += 1;
            }
            if i >= bytes.len() || bytes[i] != b'"' {
                return Err((
                    span_at(start, i, line, line_start),
                    "unterminated string literal".into(),
                ));
            }
            i += 1;
            Tok::Str(text[start + 1..i - 1].to_string())
        } else {
            let next = bytes.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                (b'-', Some(b'>')) => (Tok::Arrow, 2),
                (b'.', Some(b'.')) => (Tok::DotDot, 2),
                (b'!', Some(b'=')) => (Tok::Ne, 2),
                (b'<', Some(b'=')) => (Tok::Le, 2),
                (b'>', Some(b'=')) => (Tok::Ge, 2),
                (b'(', _) => (Tok::LParen, 1),
                (b')', _) => (Tok::RParen, 1),
                (b'[', _) => (Tok::LBracket, 1),
                (b']', _) => (Tok::RBracket, 1),
                (b';', _) => (Tok::Semi, 1),
                (b':', _) => (Tok::Colon, 1),
                (b'\'', _) => (Tok::Prime, 1),
                (b'=', _) => (Tok::Eq, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'>', _) => (Tok::Gt, 1),
                (b'&', _) => (Tok::And, 1),
                (b'|', _) => (Tok::Or, 1),
                (b'!', _) => (Tok::Not, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'*', _) => (Tok::Star, 1),
                (b'/', _) => (Tok::Slash, 1),
                (b'?', _) => (Tok::Question, 1),
                _ => {
                    // report the whole (possibly multi-byte) character
                    let ch_len = text[i..].chars().next().map(char::len_utf8).unwrap_or(1);
                    return Err((
                        span_at(start, start + ch_len, line, line_start),
                        format!("unexpected character '{}'", &text[i..i + ch_len]),
                    ));
                }
            };
            i += len;
            tok
        };
        out.push(Token {
            tok,
            span: span_at(start, i, line, line_start),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span_at(bytes.len(), bytes.len(), line, line_start),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, false).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ranges_are_not_decimals() {
        assert_eq!(
            toks("[0..9]"),
            vec![
                Tok::LBracket,
                Tok::Number("0".into()),
                Tok::DotDot,
                Tok::Number("9".into()),
                Tok::RBracket,
                Tok::Eof
            ]
        );
        assert_eq!(toks("1.0")[0], Tok::Number("1.0".into()));
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("dtmc // header\n  const", false).unwrap();
        assert_eq!(t[1].tok, Tok::Ident("const".into()));
        assert_eq!((t[1].span.line, t[1].span.column), (2, 3));
        assert!(tokenize("# x", false).is_err());
        assert_eq!(tokenize("# x", true).unwrap().len(), 1);
    }

    #[test]
    fn multibyte_error() {
        let (span, _) = tokenize("s = ≤", false).unwrap_err();
        assert_eq!(span.start, 4);
        assert_eq!(span.end, 7);
    }
}
