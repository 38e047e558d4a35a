//! Finitely supported rational vectors over the positive integers.
//!
//! Entries are kept sorted by index and zero coefficients are never stored,
//! so structural equality is semantic equality.
//!
//! Text format, one vector per line: whitespace-separated `index:coeff`
//! tokens with strictly increasing indices, coefficients as `p/q` (bare
//! integers accepted on input). `#` starts a comment line; blank lines are
//! skipped at file level.

use crate::rat::Rat;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct FinVec {
    entries: Vec<(u32, Rat)>,
}

impl FinVec {
    pub fn empty() -> FinVec {
        FinVec { entries: Vec::new() }
    }

    /// The unit vector at `i`. Panics if `i` is zero: indices start at 1.
    pub fn unit(i: u32) -> FinVec {
        assert!(i >= 1, "vector indices start at 1");
        FinVec { entries: vec![(i, Rat::one())] }
    }

    /// Builds from arbitrary pairs: duplicates are summed, zeros dropped.
    /// Panics on index 0.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, Rat)>) -> FinVec {
        let mut entries: Vec<(u32, Rat)> = Vec::new();
        for (i, c) in pairs {
            assert!(i >= 1, "vector indices start at 1");
            entries.push((i, c));
        }
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(u32, Rat)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += &c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        FinVec { entries: out }
    }

    pub fn entries(&self) -> &[(u32, Rat)] {
        &self.entries
    }

    /// Coefficient at `i`; zero off the support.
    pub fn coeff(&self, i: u32) -> Rat {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_supp(&self) -> Option<u32> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_supp(&self) -> Option<u32> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Rat) -> FinVec {
        if c.is_zero() {
            return FinVec::empty();
        }
        FinVec {
            entries: self.entries.iter().map(|(i, a)| (*i, c * a)).collect(),
        }
    }

    pub fn add(&self, other: &FinVec) -> FinVec {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y.clone()));
                        b.next();
                    } else {
                        let s = x + y;
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y.clone()));
                    b.next();
                }
                (None, None) => break,
            }
        }
        FinVec { entries: out }
    }

    /// Exact linear combination; the coefficient and vector lists must have
    /// equal length.
    pub fn combine(coeffs: &[Rat], xs: &[FinVec]) -> Result<FinVec> {
        if coeffs.len() != xs.len() {
            return Err(Error::LengthMismatch { left: coeffs.len(), right: xs.len() });
        }
        let mut acc = FinVec::empty();
        for (c, x) in coeffs.iter().zip(xs) {
            acc = acc.add(&x.scale(c));
        }
        Ok(acc)
    }

    pub fn abs(&self) -> FinVec {
        FinVec {
            entries: self.entries.iter().map(|(i, c)| (*i, c.abs())).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> Rat {
        self.entries
            .iter()
            .map(|(_, c)| c.abs())
            .fold(Rat::zero(), Rat::max)
    }

    pub fn coeff_abs_sum(&self) -> Rat {
        self.entries.iter().map(|(_, c)| c.abs()).sum()
    }

    /// Parses one line of the text format. `lineno` is for error reporting.
    pub fn parse_line(line: &str, lineno: usize) -> Result<FinVec> {
        let mut entries: Vec<(u32, Rat)> = Vec::new();
        for tok in line.split_whitespace() {
            let (is, cs) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected index:coeff, got {tok:?}"),
            })?;
            let i: u32 = is.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad index {is:?}"),
            })?;
            if i == 0 {
                return Err(Error::Parse { line: lineno, msg: "index 0 (indices start at 1)".into() });
            }
            let c: Rat = cs.parse().map_err(|msg| Error::Parse { line: lineno, msg })?;
            if let Some((j, _)) = entries.last() {
                if *j >= i {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("indices must be strictly increasing ({j} then {i})"),
                    });
                }
            }
            if !c.is_zero() {
                entries.push((i, c));
            }
        }
        Ok(FinVec { entries })
    }

    /// Parses a whole document: one vector per non-blank non-comment line.
    pub fn parse_lines(text: &str) -> Result<Vec<FinVec>> {
        let mut out = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            out.push(FinVec::parse_line(t, k + 1)?);
        }
        Ok(out)
    }

    pub fn to_line(&self) -> String {
        self.entries
            .iter()
            .map(|(i, c)| format!("{i}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Sum of unit vectors over an inclusive index range.
pub fn range_sum(lo: u32, hi: u32) -> FinVec {
    assert!(lo >= 1 && lo <= hi);
    FinVec::from_pairs((lo..=hi).map(|i| (i, Rat::one())))
}
