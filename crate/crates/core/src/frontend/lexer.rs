use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Double(f64),
    Str(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Double(v) => format!("number `{v}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Kw(k) => format!("`{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const KEYWORDS: &[&str] = &[
    "class", "static", "final", "public", "private", "protected", "void", "int", "double",
    "boolean", "String", "Optional", "if", "else", "for", "while", "return", "throw", "new",
    "this", "true", "false", "null",
];

// Longest first so that `<=` wins over `<`.
const SYMBOLS: &[&str] = &[
    "&&", "||", "==", "!=", "<=", ">=", "++", "--", "{", "}", "(", ")", ";", ",", ".", "=", "<",
    ">", "+", "-", "*", "/", "%", "!",
];

pub fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut line_start = 0usize;

    let span_at = |start: usize, end: usize, line: u32, line_start: usize| Span {
        start: start as u32,
        end: end as u32,
        line,
        col: (start - line_start) as u32 + 1,
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
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let (sl, sc) = (line, i - line_start + 1);
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(SyntaxError::new(sl, sc as u32, "unterminated comment"));
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, span: span_at(start, i, line, line_start) });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_double = false;
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                is_double = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_double = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let span = span_at(start, i, line, line_start);
            let word = &text[start..i];
            let tok = if is_double {
                Tok::Double(word.parse().map_err(|_| SyntaxError::at(span, "bad number"))?)
            } else {
                // One past i32::MAX is allowed so `-2147483648` folds; the parser
                // rejects it when not negated.
                let v: i64 = word.parse().map_err(|_| SyntaxError::at(span, "integer literal too large"))?;
                if v > i32::MAX as i64 + 1 {
                    return Err(SyntaxError::at(span, "integer literal too large"));
                }
                Tok::Int(v)
            };
            out.push(Token { tok, span });
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(&b) = bytes.get(i) else {
                    return Err(SyntaxError::at(span_at(start, i, line, line_start), "unterminated string"));
                };
                match b {
                    b'"' => {
                        i += 1;
                        break;
                    }
                    b'\n' => {
                        return Err(SyntaxError::at(span_at(start, i, line, line_start), "unterminated string"));
                    }
                    b'\\' => {
                        let esc = bytes.get(i + 1).copied();
                        s.push(match esc {
                            Some(b'n') => '\n',
                            Some(b't') => '\t',
                            Some(b'"') => '"',
                            Some(b'\\') => '\\',
                            _ => {
                                return Err(SyntaxError::at(span_at(i, i + 1, line, line_start), "bad escape"));
                            }
                        });
                        i += 2;
                    }
                    _ => {
                        let ch = text[i..].chars().next().expect("in bounds");
                        s.push(ch);
                        i += ch.len_utf8();
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), span: span_at(start, i, line, line_start) });
            continue;
        }
        match SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                out.push(Token { tok: Tok::Sym(sym), span: span_at(start, i, line, line_start) });
            }
            None => {
                let ch = text[i..].chars().next().expect("in bounds");
                return Err(SyntaxError::at(
                    span_at(start, start + ch.len_utf8(), line, line_start),
                    format!("unexpected character `{ch}`"),
                ));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: span_at(bytes.len(), bytes.len(), line, line_start) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn symbols_prefer_longest() {
        assert_eq!(
            toks("a<=b++"),
            vec![Tok::Ident("a".into()), Tok::Sym("<="), Tok::Ident("b".into()), Tok::Sym("++"), Tok::Eof]
        );
    }

    #[test]
    fn numbers_and_strings() {
        assert_eq!(toks("1 2.5 3e2 \"a\\n\""), vec![
            Tok::Int(1),
            Tok::Double(2.5),
            Tok::Double(300.0),
            Tok::Str("a\n".into()),
            Tok::Eof
        ]);
    }

    #[test]
    fn comments_and_crlf() {
        let t = lex("// x\r\n/* y\n*/ int").unwrap();
        assert_eq!(t[0].tok, Tok::Kw("int"));
        assert_eq!(t[0].span.line, 3);
    }

    #[test]
    fn rejects_stray_char() {
        let e = lex("int #").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
    }
}
