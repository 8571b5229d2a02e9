//! Minimal s-expression reader with byte positions. `;` starts a comment.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom { text: String, pos: usize },
    List { items: Vec<SExpr>, pos: usize },
}

impl SExpr {
    pub fn pos(&self) -> usize {
        match self {
            SExpr::Atom { pos, .. } | SExpr::List { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(|h| h.as_atom())
    }
}

pub fn syntax(pos: usize, message: &str) -> ParseError {
    ParseError::Syntax { pos, message: message.to_string() }
}

/// Reads every top-level expression in `src`.
pub fn read_all(src: &str) -> Result<Vec<SExpr>, ParseError> {
    let bytes = src.as_bytes();
    let mut stack: Vec<(usize, Vec<SExpr>)> = Vec::new();
    let mut top = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                stack.push((i, Vec::new()));
                i += 1;
            }
            b')' => {
                let (pos, items) = stack.pop().ok_or_else(|| syntax(i, "unexpected `)`"))?;
                let e = SExpr::List { items, pos };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => top.push(e),
                }
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'(' | b')' | b';') {
                    i += 1;
                }
                let e = SExpr::Atom { text: src[start..i].to_string(), pos: start };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => top.push(e),
                }
            }
        }
    }
    if let Some((pos, _)) = stack.pop() {
        return Err(syntax(pos, "unclosed `(`"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = read_all("(a (b 1) ; note\n c)").unwrap();
        assert_eq!(e.len(), 1);
        let l = e[0].as_list().unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l[1].head(), Some("b"));
        assert_eq!(l[2].pos(), 17);
    }

    #[test]
    fn reports_positions() {
        assert_eq!(read_all("(a b"), Err(syntax(0, "unclosed `(`")));
        assert_eq!(read_all("a)"), Err(syntax(1, "unexpected `)`")));
    }
}
