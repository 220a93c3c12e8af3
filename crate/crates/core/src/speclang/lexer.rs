use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers, numerals and operation names with a bracketed suffix.
    Ident(String),
    Sym(char),
    Arrow,
    DoubleArrow,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::SyntaxError { line, col, msg: msg.into() }
}

/// Re-spaces the contents of a bracketed suffix: one space between items,
/// none just inside brackets.
fn canonical_suffix(raw: &str) -> String {
    let mut out = String::new();
    let mut pending_space = false;
    for c in raw.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.ends_with(['(', '[']) && !matches!(c, ')' | ']') {
            out.push(' ');
        }
        pending_space = false;
        out.push(c);
    }
    out
}

pub fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
        } else if is_word_char(c) {
            let mut s = String::new();
            while i < chars.len() && is_word_char(chars[i]) {
                s.push(chars[i]);
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
            if i < chars.len() && chars[i] == '[' {
                let mut depth = 0;
                let mut raw = String::new();
                loop {
                    let Some(&d) = chars.get(i) else {
                        return Err(syntax(tl, tc, "unterminated `[` in operation name"));
                    };
                    advance(&mut i, &mut line, &mut col, d);
                    match d {
                        '[' => depth += 1,
                        ']' => depth -= 1,
                        '\n' => return Err(syntax(tl, tc, "line break inside an operation name")),
                        _ => {}
                    }
                    raw.push(d);
                    if depth == 0 {
                        break;
                    }
                }
                s.push_str(&canonical_suffix(&raw));
            }
            out.push(Token { tok: Tok::Ident(s), line: tl, col: tc });
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            advance(&mut i, &mut line, &mut col, c);
            advance(&mut i, &mut line, &mut col, '>');
            out.push(Token { tok: Tok::Arrow, line: tl, col: tc });
        } else if c == '=' && chars.get(i + 1) == Some(&'>') {
            advance(&mut i, &mut line, &mut col, c);
            advance(&mut i, &mut line, &mut col, '>');
            out.push(Token { tok: Tok::DoubleArrow, line: tl, col: tc });
        } else if "{}()[];:,=".contains(c) {
            advance(&mut i, &mut line, &mut col, c);
            out.push(Token { tok: Tok::Sym(c), line: tl, col: tc });
        } else {
            return Err(syntax(tl, tc, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
