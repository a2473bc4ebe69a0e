//! The little spec language for naming concrete groups, plus the "autos:"
//! extension for user-supplied automorphisms.
//!
//! ```text
//! spec     := family
//!           | "perm" INT ":" cycles ("," cycles)*
//!           | "product" "(" spec ")" "(" spec ")"
//!           | "semidirect" INT INT "(" spec ")" matrices
//! family   := ("cyclic"|"dihedral"|"quaternion"|"symmetric"|"alternating") INT
//!           | "elemabelian" INT INT
//! cycles   := ("(" INT+ ")")+
//! matrices := matrix ("," matrix)*
//! matrix   := "[" row (";" row)* "]"        // n rows of n entries, mod p
//! ```
//!
//! Whitespace-insensitive; `#` starts a comment to end of line. An autos file
//! is an `autos:` header followed by blank-line-separated blocks, one block
//! per automorphism, each line `gI -> word` with the word a product of `gJ`
//! or `gJ^-1` (or `e` for the empty word).

use std::fmt;

use crate::fpmat::FpMat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(u64),
    Dihedral(u64),
    Quaternion(u64),
    Symmetric(u64),
    Alternating(u64),
    /// (F_p)^n given as (p, n).
    ElemAbelian(u64, u64),
    /// Explicit permutation generators; each generator is a cycle product.
    Perm { degree: usize, gens: Vec<Vec<Vec<usize>>> },
    Product(Box<GroupSpec>, Box<GroupSpec>),
    /// H acting on (F_p)^n; one invertible n-by-n matrix per generator of H.
    Semidirect { p: u64, n: usize, h: Box<GroupSpec>, mats: Vec<FpMat> },
}

/// One user-supplied automorphism: for each generator index, a word in the
/// generators, as (generator index, exponent) factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoImages {
    pub images: Vec<(usize, Vec<(usize, i64)>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(usize, usize), // byte span into the source
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Arrow,
    Caret,
    Minus,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize, usize)>, // token, line, col
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let (tl, tc) = (line, col);
        let step = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if bytes[*i] == b'\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => step(&mut i, &mut line, &mut col),
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    step(&mut i, &mut line, &mut col);
                }
            }
            '(' | ')' | '[' | ']' | ',' | ';' | ':' | '^' => {
                toks.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        ',' => Tok::Comma,
                        ';' => Tok::Semi,
                        ':' => Tok::Colon,
                        _ => Tok::Caret,
                    },
                    tl,
                    tc,
                ));
                step(&mut i, &mut line, &mut col);
            }
            '-' => {
                step(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == b'>' {
                    step(&mut i, &mut line, &mut col);
                    toks.push((Tok::Arrow, tl, tc));
                } else {
                    toks.push((Tok::Minus, tl, tc));
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    step(&mut i, &mut line, &mut col);
                }
                let text = &src[start..i];
                let v: u64 = text.parse().map_err(|_| ParseError {
                    line: tl,
                    col: tc,
                    message: format!("integer literal `{text}` out of range"),
                })?;
                toks.push((Tok::Int(v), tl, tc));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    step(&mut i, &mut line, &mut col);
                }
                toks.push((Tok::Ident(start, i), tl, tc));
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Lexer { src, toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.1, t.2))
            .unwrap_or_else(|| self.toks.last().map(|t| (t.1, t.2 + 1)).unwrap_or((1, 1)))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, message: message.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(v)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn ident_text(&self, t: Tok) -> &'a str {
        match t {
            Tok::Ident(a, b) => &self.src[a..b],
            _ => unreachable!(),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec, ParseError> {
    let mut lx = Lexer::new(text)?;
    let spec = parse_spec(&mut lx)?;
    if lx.peek().is_some() {
        return lx.err("trailing input after group spec");
    }
    Ok(spec)
}

fn parse_spec(lx: &mut Lexer) -> Result<GroupSpec, ParseError> {
    let t = match lx.peek() {
        Some(t @ Tok::Ident(..)) => t,
        _ => return lx.err("expected a family name"),
    };
    let name = lx.ident_text(t).to_string();
    lx.bump();
    match name.as_str() {
        "cyclic" => {
            let n = lx.expect_int("group order after `cyclic`")?;
            if n == 0 {
                return lx.err("cyclic order must be at least 1");
            }
            Ok(GroupSpec::Cyclic(n))
        }
        "dihedral" => {
            let n = lx.expect_int("group order after `dihedral`")?;
            if n < 2 || n % 2 != 0 {
                return lx.err("dihedral takes the group order, an even integer >= 2");
            }
            Ok(GroupSpec::Dihedral(n))
        }
        "quaternion" => {
            let n = lx.expect_int("group order after `quaternion`")?;
            if n < 8 || n % 4 != 0 {
                return lx.err("quaternion takes the group order, a multiple of 4 that is >= 8");
            }
            Ok(GroupSpec::Quaternion(n))
        }
        "symmetric" => {
            let n = lx.expect_int("degree after `symmetric`")?;
            if n == 0 {
                return lx.err("symmetric degree must be at least 1");
            }
            Ok(GroupSpec::Symmetric(n))
        }
        "alternating" => {
            let n = lx.expect_int("degree after `alternating`")?;
            if n == 0 {
                return lx.err("alternating degree must be at least 1");
            }
            Ok(GroupSpec::Alternating(n))
        }
        "elemabelian" => {
            let p = lx.expect_int("prime after `elemabelian`")?;
            if !is_prime(p) {
                return lx.err(format!("elemabelian base {p} is not prime"));
            }
            let n = lx.expect_int("rank after the prime")?;
            if n == 0 {
                return lx.err("elemabelian rank must be at least 1");
            }
            Ok(GroupSpec::ElemAbelian(p, n))
        }
        "perm" => {
            let degree = lx.expect_int("degree after `perm`")? as usize;
            if degree == 0 {
                return lx.err("perm degree must be at least 1");
            }
            lx.expect(Tok::Colon, "`:` after the degree")?;
            let mut gens = Vec::new();
            loop {
                gens.push(parse_cycles(lx, degree)?);
                if lx.peek() == Some(Tok::Comma) {
                    lx.bump();
                } else {
                    break;
                }
            }
            Ok(GroupSpec::Perm { degree, gens })
        }
        "product" => {
            lx.expect(Tok::LParen, "`(` before the first factor")?;
            let a = parse_spec(lx)?;
            lx.expect(Tok::RParen, "`)` after the first factor")?;
            lx.expect(Tok::LParen, "`(` before the second factor")?;
            let b = parse_spec(lx)?;
            lx.expect(Tok::RParen, "`)` after the second factor")?;
            Ok(GroupSpec::Product(Box::new(a), Box::new(b)))
        }
        "semidirect" => {
            let p = lx.expect_int("prime after `semidirect`")?;
            if !is_prime(p) {
                return lx.err(format!("semidirect base {p} is not prime"));
            }
            let n = lx.expect_int("dimension after the prime")? as usize;
            if n == 0 {
                return lx.err("semidirect dimension must be at least 1");
            }
            lx.expect(Tok::LParen, "`(` before the acting group")?;
            let h = parse_spec(lx)?;
            lx.expect(Tok::RParen, "`)` after the acting group")?;
            let mut mats = Vec::new();
            loop {
                mats.push(parse_matrix(lx, p, n)?);
                if lx.peek() == Some(Tok::Comma) {
                    lx.bump();
                } else {
                    break;
                }
            }
            Ok(GroupSpec::Semidirect { p, n, h: Box::new(h), mats })
        }
        other => lx.err(format!("unknown family name `{other}`")),
    }
}

fn parse_cycles(lx: &mut Lexer, degree: usize) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut cycles = Vec::new();
    if lx.peek() != Some(Tok::LParen) {
        return lx.err("expected a cycle `(`");
    }
    while lx.peek() == Some(Tok::LParen) {
        lx.bump();
        let mut cyc = Vec::new();
        while let Some(Tok::Int(v)) = lx.peek() {
            if v as usize >= degree {
                return lx.err(format!("point {v} out of range for degree {degree}"));
            }
            cyc.push(v as usize);
            lx.bump();
        }
        if cyc.is_empty() {
            return lx.err("empty cycle");
        }
        lx.expect(Tok::RParen, "`)` closing the cycle")?;
        cycles.push(cyc);
    }
    Ok(cycles)
}

fn parse_matrix(lx: &mut Lexer, p: u64, n: usize) -> Result<FpMat, ParseError> {
    let (mline, mcol) = lx.here();
    lx.expect(Tok::LBracket, "`[` opening a matrix")?;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    loop {
        let mut row = Vec::new();
        while let Some(Tok::Int(v)) = lx.peek() {
            row.push(v % p);
            lx.bump();
        }
        if row.len() != n {
            return lx.err(format!("matrix row has {} entries, expected {n}", row.len()));
        }
        rows.push(row);
        match lx.peek() {
            Some(Tok::Semi) => {
                lx.bump();
            }
            Some(Tok::RBracket) => {
                lx.bump();
                break;
            }
            _ => return lx.err("expected `;` or `]` in matrix"),
        }
    }
    if rows.len() != n {
        return Err(ParseError {
            line: mline,
            col: mcol,
            message: format!("matrix has {} rows, expected {n}", rows.len()),
        });
    }
    let mat = FpMat::from_rows(p, &rows);
    if !mat.is_invertible() {
        return Err(ParseError {
            line: mline,
            col: mcol,
            message: format!("semidirect matrix is singular mod {p}"),
        });
    }
    Ok(mat)
}

/// Parses an autos file: `autos:` header, then one blank-line-separated block
/// per automorphism, each block one `gI -> word` line per generator.
pub fn parse_autos_spec(text: &str) -> Result<Vec<AutoImages>, ParseError> {
    let mut header_seen = false;
    let mut blocks: Vec<Vec<(usize, String, usize)>> = vec![Vec::new()]; // (line no, text, indent)
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim_end();
        let trimmed = line.trim();
        if !header_seen {
            if trimmed.is_empty() {
                continue;
            }
            if trimmed != "autos:" {
                return Err(ParseError {
                    line: ln + 1,
                    col: 1,
                    message: "autos file must start with `autos:`".into(),
                });
            }
            header_seen = true;
            continue;
        }
        if trimmed.is_empty() {
            if !blocks.last().unwrap().is_empty() {
                blocks.push(Vec::new());
            }
        } else {
            blocks.last_mut().unwrap().push((ln + 1, trimmed.to_string(), 1));
        }
    }
    if !header_seen {
        return Err(ParseError { line: 1, col: 1, message: "missing `autos:` header".into() });
    }
    let mut out = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let mut images = Vec::new();
        for (ln, line, _) in block {
            images.push(parse_auto_line(ln, &line)?);
        }
        out.push(AutoImages { images });
    }
    Ok(out)
}

fn parse_auto_line(line_no: usize, line: &str) -> Result<(usize, Vec<(usize, i64)>), ParseError> {
    let mut lx = Lexer::new(line).map_err(|mut e| {
        e.line = line_no;
        e
    })?;
    let fail = |lx: &Lexer, msg: &str| -> ParseError {
        ParseError { line: line_no, col: lx.here().1, message: msg.into() }
    };
    let gen = match lx.peek() {
        Some(t @ Tok::Ident(..)) => parse_gen_name(lx.ident_text(t))
            .ok_or_else(|| fail(&lx, "expected a generator name like `g0`"))?,
        _ => return Err(fail(&lx, "expected a generator name like `g0`")),
    };
    lx.bump();
    if lx.peek() != Some(Tok::Arrow) {
        return Err(fail(&lx, "expected `->`"));
    }
    lx.bump();
    let mut word = Vec::new();
    loop {
        match lx.peek() {
            None => break,
            Some(t @ Tok::Ident(..)) => {
                let name = lx.ident_text(t);
                if name == "e" {
                    lx.bump();
                    continue;
                }
                let g =
                    parse_gen_name(name).ok_or_else(|| fail(&lx, "expected `gI`, `gI^k` or `e`"))?;
                lx.bump();
                let mut exp: i64 = 1;
                if lx.peek() == Some(Tok::Caret) {
                    lx.bump();
                    let neg = if lx.peek() == Some(Tok::Minus) {
                        lx.bump();
                        true
                    } else {
                        false
                    };
                    let v = match lx.peek() {
                        Some(Tok::Int(v)) => {
                            lx.bump();
                            v as i64
                        }
                        _ => return Err(fail(&lx, "expected an exponent after `^`")),
                    };
                    exp = if neg { -v } else { v };
                }
                word.push((g, exp));
            }
            _ => return Err(fail(&lx, "unexpected token in word")),
        }
    }
    Ok((gen, word))
}

fn parse_gen_name(name: &str) -> Option<usize> {
    name.strip_prefix('g').and_then(|rest| rest.parse::<usize>().ok())
}
