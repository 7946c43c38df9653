use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Open,
    Close,
    Comma,
    Semi,
    Str(String),
    Word(String),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Open => "'('".into(),
            Tok::Close => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Word(w) => format!("'{w}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '(' | ')' | ',' | ';' => {
                it.next();
                let tok = match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    ',' => Tok::Comma,
                    _ => Tok::Semi,
                };
                out.push(Spanned { tok, offset: i });
            }
            '"' => {
                it.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, c)) = it.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match it.next() {
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\\')) => s.push('\\'),
                            Some((j, other)) => {
                                return Err(ParseError::new(j, ParseErrorKind::Invalid(format!("bad escape '\\{other}'"))))
                            }
                            None => break,
                        },
                        c => s.push(c),
                    }
                }
                if !closed {
                    return Err(ParseError::new(i, ParseErrorKind::Invalid("unterminated string".into())));
                }
                out.push(Spanned { tok: Tok::Str(s), offset: i });
            }
            _ => {
                let mut w = String::new();
                while let Some(&(_, c)) = it.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ',' | ';' | '"') {
                        break;
                    }
                    w.push(c);
                    it.next();
                }
                out.push(Spanned { tok: Tok::Word(w), offset: i });
            }
        }
    }
    Ok(out)
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Strict number grammar: optional sign, digits, optional `.digits`.
pub(crate) fn parse_number(w: &str) -> Option<f64> {
    let body = w.strip_prefix(['+', '-']).unwrap_or(w);
    let (int, frac) = match body.split_once('.') {
        Some((a, b)) => (a, Some(b)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return None;
    }
    w.parse().ok()
}

/// Cursor over a token stream with positioned errors.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Self { toks: tokenize(text)?, pos: 0, end: text.len() })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |s| s.offset)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    pub(crate) fn unexpected(&self, expected: &str) -> ParseError {
        let found = self.peek().map_or("end of input".to_string(), Tok::describe);
        ParseError::new(self.offset(), ParseErrorKind::Unexpected { expected: expected.into(), found })
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    pub(crate) fn word(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        match self.peek() {
            Some(Tok::Word(_)) => {
                let s = self.next().unwrap();
                let Tok::Word(w) = s.tok else { unreachable!() };
                Ok((w, s.offset))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("'{kw}'"))),
        }
    }

    pub(crate) fn string(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Str(_)) => {
                let Tok::Str(s) = self.next().unwrap().tok else { unreachable!() };
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Parses `( n, n, … )` and returns the numbers with the tuple's offset.
    pub(crate) fn tuple(&mut self) -> Result<(Vec<f64>, usize), ParseError> {
        let start = self.offset();
        self.expect(&Tok::Open, "'('")?;
        let mut vals = Vec::new();
        loop {
            let s = self.next().ok_or_else(|| {
                ParseError::new(self.end, ParseErrorKind::Unexpected { expected: "number".into(), found: "end of input".into() })
            })?;
            match s.tok {
                Tok::Word(w) => match parse_number(&w) {
                    Some(v) => vals.push(v),
                    None => return Err(ParseError::new(s.offset, ParseErrorKind::NonNumeric(w))),
                },
                other => {
                    return Err(ParseError::new(
                        s.offset,
                        ParseErrorKind::Unexpected { expected: "number".into(), found: other.describe() },
                    ))
                }
            }
            if self.eat(&Tok::Close) {
                return Ok((vals, start));
            }
            self.expect(&Tok::Comma, "',' or ')'")?;
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_grammar() {
        assert_eq!(parse_number("-1.250"), Some(-1.25));
        assert_eq!(parse_number("+3"), Some(3.0));
        for bad in ["1e5", "1,5", ".5", "5.", "inf", "NaN", "--1", ""] {
            assert_eq!(parse_number(bad), None, "{bad}");
        }
    }

    #[test]
    fn strings_round_trip() {
        let raw = "say \"hi\"\\ now\nplease";
        let toks = tokenize(&quote(raw)).unwrap();
        assert_eq!(toks[0].tok, Tok::Str(raw.into()));
    }
}
