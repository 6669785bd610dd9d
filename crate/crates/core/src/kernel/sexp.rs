//! A small s-expression reader: lists, bare atoms and double-quoted
//! strings. `;` comments run to end of line.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Sexp {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    pub(crate) fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

/// Reads exactly one expression from `text`. Errors carry a byte offset.
pub(crate) fn read(text: &str) -> Result<Sexp, (usize, String)> {
    let mut r = Reader { text, pos: 0 };
    let e = r.expr()?;
    r.skip();
    if r.pos < text.len() {
        return Err((r.pos, "trailing text after the proof".into()));
    }
    Ok(e)
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == ';' {
                while let Some(c) = self.peek() {
                    self.pos += c.len_utf8();
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<Sexp, (usize, String)> {
        self.skip();
        let start = self.pos;
        match self.peek() {
            None => Err((start, "unexpected end of input".into())),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip();
                    match self.peek() {
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, start));
                        }
                        None => return Err((start, "unclosed `(`".into())),
                        _ => items.push(self.expr()?),
                    }
                }
            }
            Some(')') => Err((start, "unexpected `)`".into())),
            Some('"') => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.peek() {
                        None => return Err((start, "unterminated string".into())),
                        Some('"') => {
                            self.pos += 1;
                            return Ok(Sexp::Str(s, start));
                        }
                        Some('\\') => {
                            self.pos += 1;
                            match self.peek() {
                                Some(c @ ('"' | '\\')) => {
                                    s.push(c);
                                    self.pos += 1;
                                }
                                _ => return Err((self.pos, "bad escape".into())),
                            }
                        }
                        Some(c) => {
                            s.push(c);
                            self.pos += c.len_utf8();
                        }
                    }
                }
            }
            Some(_) => {
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                Ok(Sexp::Atom(self.text[start..self.pos].to_string(), start))
            }
        }
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}
