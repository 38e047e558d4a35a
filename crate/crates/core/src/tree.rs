//! Functional trees: the elements of the norming set, represented
//! syntactically.
//!
//! Grammar (canonical form, whitespace-tolerant on input):
//!
//! ```text
//! tree  := "0" | leaf | avg | sch
//! leaf  := "L(" index "," sign ")"        sign := "+" | "-"
//! avg   := "A(" size ";" tree+ ")"        children space-separated
//! sch   := "S(" tree+ ")"
//! ```
//!
//! `0` is the zero functional. It is only meaningful as a whole tree; inside
//! a node it is a structural error. An average node carries its declared
//! size `n`, which may exceed the child count `d`; the node scales by `1/n`
//! regardless. A Schreier node scales by the space's theta.
//!
//! Printing is canonical, so `print(parse(s)) == print(t)` is bit-exact for
//! any `s` printed from `t`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::rat::Rat;
use crate::space::SpaceSpec;
use crate::vector::FinVec;
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn rat(self) -> Rat {
        match self {
            Sign::Plus => Rat::one(),
            Sign::Minus => -Rat::one(),
        }
    }

    /// Sign matching a coefficient; zero and positive map to `Plus`.
    pub fn of(r: &Rat) -> Sign {
        if r.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum FunctionalTree {
    Empty,
    Leaf { index: u32, sign: Sign },
    Avg { size: u32, children: Vec<FunctionalTree> },
    Sch { children: Vec<FunctionalTree> },
}

use FunctionalTree::{Avg, Empty, Leaf, Sch};

impl FunctionalTree {
    pub fn leaf(index: u32) -> FunctionalTree {
        Leaf { index, sign: Sign::Plus }
    }

    pub fn leaf_neg(index: u32) -> FunctionalTree {
        Leaf { index, sign: Sign::Minus }
    }

    pub fn avg(size: u32, children: Vec<FunctionalTree>) -> FunctionalTree {
        Avg { size, children }
    }

    pub fn sch(children: Vec<FunctionalTree>) -> FunctionalTree {
        Sch { children }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Empty)
    }

    pub fn is_avg(&self) -> bool {
        matches!(self, Avg { .. })
    }

    pub fn is_sch(&self) -> bool {
        matches!(self, Sch { .. })
    }

    /// Declared size label: `n` for an average, the leading child's size for
    /// a Schreier sum.
    pub fn declared_size(&self) -> Option<u32> {
        match self {
            Avg { size, .. } => Some(*size),
            Sch { children } => children.first().and_then(|c| c.declared_size()),
            _ => None,
        }
    }

    /// Number of summands of a Schreier node.
    pub fn sch_len(&self) -> Option<u32> {
        match self {
            Sch { children } => Some(children.len() as u32),
            _ => None,
        }
    }

    /// Smallest and largest leaf index, if any leaf exists.
    pub fn support_range(&self) -> Option<(u32, u32)> {
        match self {
            Empty => None,
            Leaf { index, .. } => Some((*index, *index)),
            Avg { children, .. } | Sch { children } => {
                let mut range: Option<(u32, u32)> = None;
                for c in children {
                    if let Some((lo, hi)) = c.support_range() {
                        range = Some(match range {
                            None => (lo, hi),
                            Some((a, b)) => (a.min(lo), b.max(hi)),
                        });
                    }
                }
                range
            }
        }
    }

    pub fn support_set(&self) -> BTreeSet<u32> {
        fn walk(t: &FunctionalTree, out: &mut BTreeSet<u32>) {
            match t {
                Empty => {}
                Leaf { index, .. } => {
                    out.insert(*index);
                }
                Avg { children, .. } | Sch { children } => {
                    children.iter().for_each(|c| walk(c, out))
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    pub fn node_count(&self) -> u64 {
        match self {
            Empty => 0,
            Leaf { .. } => 1,
            Avg { children, .. } | Sch { children } => {
                1 + children.iter().map(|c| c.node_count()).sum::<u64>()
            }
        }
    }

    /// Nesting depth: a leaf has depth 1, a node one more than its deepest
    /// child, the zero functional depth 0.
    pub fn depth(&self) -> u32 {
        match self {
            Empty => 0,
            Leaf { .. } => 1,
            Avg { children, .. } | Sch { children } => {
                1 + children.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Exact value of the functional on `x`. Errors on structurally
    /// malformed trees (bad arity, non-successive children, a non-average
    /// under a Schreier node, nested zero functionals); the admissibility
    /// and growth side conditions are `validate`'s concern, not evaluation's.
    pub fn evaluate(&self, x: &FinVec, space: &SpaceSpec) -> Result<Rat> {
        let mut path = Vec::new();
        self.eval_at(x, space, &mut path, true)
    }

    fn eval_at(
        &self,
        x: &FinVec,
        space: &SpaceSpec,
        path: &mut Vec<usize>,
        root: bool,
    ) -> Result<Rat> {
        let fail = |path: &[usize], msg: String| -> Result<Rat> {
            Err(Error::InvalidTree { path: path_string(path), msg })
        };
        match self {
            Empty => {
                if root {
                    Ok(Rat::zero())
                } else {
                    fail(path, "zero functional inside a node".into())
                }
            }
            Leaf { index, sign } => {
                if *index == 0 {
                    return fail(path, "leaf index 0 (indices start at 1)".into());
                }
                Ok(sign.rat() * x.coeff(*index))
            }
            Avg { size, children } => {
                if *size == 0 {
                    return fail(path, "average with size 0".into());
                }
                if children.is_empty() {
                    return fail(path, "average with no children".into());
                }
                if children.len() as u64 > *size as u64 {
                    return fail(
                        path,
                        format!("average arity {} exceeds size {}", children.len(), size),
                    );
                }
                check_successive(children, path)?;
                let sum = self.children_sum(children, x, space, path)?;
                Ok(sum.div_int(u64::from(*size)))
            }
            Sch { children } => {
                if children.is_empty() {
                    return fail(path, "Schreier sum with no children".into());
                }
                for (k, c) in children.iter().enumerate() {
                    if !c.is_avg() {
                        path.push(k);
                        let e = fail(path, "Schreier child is not an average".into());
                        path.pop();
                        return e;
                    }
                }
                check_successive(children, path)?;
                let sum = self.children_sum(children, x, space, path)?;
                Ok(&space.theta * &sum)
            }
        }
    }

    fn children_sum(
        &self,
        children: &[FunctionalTree],
        x: &FinVec,
        space: &SpaceSpec,
        path: &mut Vec<usize>,
    ) -> Result<Rat> {
        let mut sum = Rat::zero();
        for (k, c) in children.iter().enumerate() {
            path.push(k);
            let v = c.eval_at(x, space, path, false);
            path.pop();
            sum += &v?;
        }
        Ok(sum)
    }

    /// Restriction to an index set: leaves outside `keep` vanish, emptied
    /// nodes collapse, declared sizes survive. Total: any tree restricts,
    /// possibly to the zero functional.
    pub fn restrict(&self, keep: &BTreeSet<u32>) -> FunctionalTree {
        match self {
            Empty => Empty,
            Leaf { index, .. } => {
                if keep.contains(index) {
                    self.clone()
                } else {
                    Empty
                }
            }
            Avg { size, children } => {
                let kept: Vec<_> = children
                    .iter()
                    .map(|c| c.restrict(keep))
                    .filter(|c| !c.is_empty())
                    .collect();
                if kept.is_empty() {
                    Empty
                } else {
                    Avg { size: *size, children: kept }
                }
            }
            Sch { children } => {
                let kept: Vec<_> = children
                    .iter()
                    .map(|c| c.restrict(keep))
                    .filter(|c| !c.is_empty())
                    .collect();
                if kept.is_empty() {
                    Empty
                } else {
                    Sch { children: kept }
                }
            }
        }
    }

    pub fn parse(s: &str) -> Result<FunctionalTree> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        p.ws();
        let t = p.tree()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

fn path_string(path: &[usize]) -> String {
    let mut s = String::from("root");
    for k in path {
        s.push('.');
        s.push_str(&k.to_string());
    }
    s
}

fn check_successive(children: &[FunctionalTree], path: &mut Vec<usize>) -> Result<()> {
    let mut prev_hi: Option<u32> = None;
    for (k, c) in children.iter().enumerate() {
        let Some((lo, hi)) = c.support_range() else {
            path.push(k);
            let e = Err(Error::InvalidTree {
                path: path_string(path),
                msg: "child with empty support".into(),
            });
            path.pop();
            return e;
        };
        if let Some(p) = prev_hi {
            if lo <= p {
                path.push(k);
                let e = Err(Error::InvalidTree {
                    path: path_string(path),
                    msg: format!("children not successive ({p} then {lo})"),
                });
                path.pop();
                return e;
            }
        }
        prev_hi = Some(hi);
    }
    Ok(())
}

impl fmt::Display for FunctionalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Empty => write!(f, "0"),
            Leaf { index, sign } => {
                write!(f, "L({},{})", index, if *sign == Sign::Plus { '+' } else { '-' })
            }
            Avg { size, children } => {
                write!(f, "A({size}; ")?;
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            Sch { children } => {
                write!(f, "S(")?;
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for FunctionalTree {
    type Err = Error;
    fn from_str(s: &str) -> Result<FunctionalTree> {
        FunctionalTree::parse(s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: 1, msg: format!("{msg} at byte {}", self.pos) }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {:?}", b as char)))
        }
    }

    fn u32(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn tree(&mut self) -> Result<FunctionalTree> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Empty)
            }
            Some(b'L') => {
                self.pos += 1;
                self.eat(b'(')?;
                self.ws();
                let index = self.u32()?;
                self.ws();
                self.eat(b',')?;
                self.ws();
                let sign = match self.peek() {
                    Some(b'+') => Sign::Plus,
                    Some(b'-') => Sign::Minus,
                    _ => return Err(self.err("expected '+' or '-'")),
                };
                self.pos += 1;
                self.ws();
                self.eat(b')')?;
                Ok(Leaf { index, sign })
            }
            Some(b'A') => {
                self.pos += 1;
                self.eat(b'(')?;
                self.ws();
                let size = self.u32()?;
                self.ws();
                self.eat(b';')?;
                let children = self.children()?;
                Ok(Avg { size, children })
            }
            Some(b'S') => {
                self.pos += 1;
                self.eat(b'(')?;
                let children = self.children()?;
                Ok(Sch { children })
            }
            _ => Err(self.err("expected '0', 'L', 'A' or 'S'")),
        }
    }

    fn children(&mut self) -> Result<Vec<FunctionalTree>> {
        let mut out = Vec::new();
        loop {
            self.ws();
            if self.peek() == Some(b')') {
                self.pos += 1;
                if out.is_empty() {
                    return Err(self.err("node with no children"));
                }
                return Ok(out);
            }
            if self.peek().is_none() {
                return Err(self.err("unterminated node"));
            }
            out.push(self.tree()?);
        }
    }
}
