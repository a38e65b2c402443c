use crate::error::ParseError;
use crate::term::{Cursor, Term};

/// A reader node. Inside lists, a `(` only opens an argument list when it
/// directly follows a functor, so `f(a)` is a term and `f (a)` is two items.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    List(Vec<Node>, Pos),
    /// A bare word containing `-`, used for keywords and config values.
    Sym(String, Pos),
    Term(Term, Pos),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    pub fn error(self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }
}

impl Node {
    pub fn pos(&self) -> Pos {
        match self {
            Node::List(_, p) | Node::Sym(_, p) | Node::Term(_, p) => *p,
        }
    }

    /// The node as a word: a symbol or an atom.
    pub fn word(&self) -> Option<&str> {
        match self {
            Node::Sym(s, _) => Some(s),
            Node::Term(Term::Atom(a), _) => Some(a),
            _ => None,
        }
    }
}

fn pos(cur: &Cursor<'_>) -> Pos {
    let (line, column) = cur.position();
    Pos { line, column }
}

fn item(cur: &mut Cursor<'_>) -> Result<Node, ParseError> {
    cur.skip_ws();
    let at = pos(cur);
    match cur.peek() {
        Some('(') => {
            cur.bump();
            let mut items = Vec::new();
            loop {
                cur.skip_ws();
                match cur.peek() {
                    Some(')') => {
                        cur.bump();
                        return Ok(Node::List(items, at));
                    }
                    None => return Err(at.error("unclosed '('")),
                    _ => items.push(item(cur)?),
                }
            }
        }
        Some(')') => Err(at.error("unexpected ')'")),
        _ => {
            let mark = cur.mark();
            if let Some(sym) = cur.symbol() {
                if sym.contains('-') {
                    return Ok(Node::Sym(sym, at));
                }
            }
            cur.reset(mark);
            Ok(Node::Term(cur.term(false)?, at))
        }
    }
}

/// Reads every top-level node of `src`.
pub(crate) fn read_all(src: &str) -> Result<Vec<Node>, ParseError> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            return Ok(out);
        }
        out.push(item(&mut cur)?);
    }
}
