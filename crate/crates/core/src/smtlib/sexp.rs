use std::fmt;

use super::SmtError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Loc),
    List(Vec<Sexp>, Loc),
}

impl Sexp {
    pub fn loc(&self) -> Loc {
        match self {
            Sexp::Atom(_, l) | Sexp::List(_, l) => *l,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => write!(f, "{s}"),
            Sexp::List(xs, _) => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    loc: Loc,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.loc.line += 1;
            self.loc.col = 1;
        } else {
            self.loc.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }
}

/// Parses every top-level s-expression in `text`.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, SmtError> {
    let mut lx = Lexer { chars: text.chars().peekable(), loc: Loc { line: 1, col: 1 } };
    let mut stack: Vec<(Vec<Sexp>, Loc)> = Vec::new();
    let mut top = Vec::new();
    loop {
        lx.skip_ws();
        let start = lx.loc;
        let Some(&c) = lx.chars.peek() else { break };
        let item = match c {
            '(' => {
                lx.bump();
                stack.push((Vec::new(), start));
                continue;
            }
            ')' => {
                lx.bump();
                let (items, l) = stack
                    .pop()
                    .ok_or_else(|| SmtError::Parse { msg: "unbalanced `)`".into(), loc: start })?;
                Sexp::List(items, l)
            }
            '|' => {
                lx.bump();
                let mut s = String::new();
                loop {
                    match lx.bump() {
                        Some('|') => break,
                        Some(ch) => s.push(ch),
                        None => return Err(SmtError::Parse { msg: "unterminated `|`".into(), loc: start }),
                    }
                }
                Sexp::Atom(s, start)
            }
            '"' => {
                lx.bump();
                let mut s = String::from("\"");
                loop {
                    match lx.bump() {
                        Some('"') => {
                            if lx.chars.peek() == Some(&'"') {
                                lx.bump();
                                s.push_str("\"\"");
                            } else {
                                break;
                            }
                        }
                        Some(ch) => s.push(ch),
                        None => return Err(SmtError::Parse { msg: "unterminated string".into(), loc: start }),
                    }
                }
                s.push('"');
                Sexp::Atom(s, start)
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = lx.chars.peek() {
                    if ch.is_whitespace() || ch == '(' || ch == ')' || ch == ';' {
                        break;
                    }
                    s.push(ch);
                    lx.bump();
                }
                Sexp::Atom(s, start)
            }
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => top.push(item),
        }
    }
    if let Some((_, l)) = stack.pop() {
        return Err(SmtError::Parse { msg: "unbalanced `(`".into(), loc: l });
    }
    Ok(top)
}
