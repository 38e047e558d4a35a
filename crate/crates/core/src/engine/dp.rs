//! Memoized interval DP over the support of a nonnegative vector.
//!
//! Positions 0..n index the sorted support points of |x|; all value
//! functions range over contiguous position windows. Five mutually
//! recursive quantities, each memoized:
//!
//! * `V(lo,hi,dl)`: best functional value over the window within nesting
//!   depth `dl`, any node kind.
//! * `P(lo,hi,d,dl)`: best sum of `V` over a partition of the window into
//!   exactly `d` contiguous blocks (children of a prospective average).
//! * `A(lo,hi,sigma,dl,skip1)`: best average-node value with size floor
//!   `sigma`; arity 1 excluded when `skip1`.
//! * `S(lo,hi,sigma,lmax,dl)`: best Schreier-node value with size floor
//!   `sigma` and length at most `lmax`, excluding the one shape whose first
//!   child is a single-block average spanning the whole window.
//! * `T(pos,hi,sigma,budget,dl)`: best total of remaining Schreier children
//!   placed left to right from `pos` under the evolving very-fast-growth
//!   floor, at most `budget` more children; stopping is allowed.
//!
//! Dominance rules baked in, each value-safe:
//! * declared sizes are minimal: an average over `d` blocks under floor
//!   `sigma` declares `n = max(d, sigma)` (value scales by 1/n, and a
//!   smaller label only loosens every later growth floor);
//! * `V` skips arity-1 averages (identity wrappers) and `S` skips the
//!   whole-window single-block first child: both only reproduce `q * V` of
//!   the same window with `q <= 1`, and `v = max(c, q*v)` solves to `c`.
//!   Root-level class queries re-add the latter shape explicitly, where it
//!   is not self-referential (see `engine::best_value`).
//! * Schreier children are scanned on block windows starting immediately
//!   after the previous block: enlarging a child's window never lowers its
//!   value, and the growth floor carried forward is unchanged because a
//!   block's declared size `max(d, sigma)` never exceeds
//!   `max(sigma, last point of the block)`.
//!
//! The recursion is acyclic: every same-window call chain passes through a
//! candidate that strictly shrinks the window; the two excluded identity
//! shapes are exactly the ones that would not.
//!
//! Witnesses are rebuilt after the fact by re-running each decision scan
//! against the memoized values, materializing only tying candidates, and
//! picking the one with fewer nodes, then the lexicographically smaller
//! serialization.

use std::collections::HashMap;

use crate::rat::Rat;
use crate::space::SpaceSpec;
use crate::tree::FunctionalTree;
use crate::{Error, Result};

/// Depth allowance sentinel: unbounded.
pub(crate) const UNCAPPED: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    V { lo: u32, hi: u32, dl: u32 },
    P { lo: u32, hi: u32, d: u32, dl: u32 },
    A { lo: u32, hi: u32, sigma: u32, dl: u32, skip1: bool },
    S { lo: u32, hi: u32, sigma: u32, lmax: u32, dl: u32 },
    T { pos: u32, hi: u32, sigma: u32, budget: u32, dl: u32 },
}

fn dec(dl: u32) -> u32 {
    if dl == UNCAPPED {
        UNCAPPED
    } else {
        dl - 1
    }
}

pub(crate) struct Solver {
    pts: Vec<u32>,
    coeff: Vec<Rat>,
    theta: Rat,
    adm: bool,
    vfg: bool,
    size_cap: Option<u32>,
    node_budget: Option<u64>,
    pub(crate) subproblems: u64,
    pub(crate) memo_hits: u64,
    vals: HashMap<Key, Option<Rat>>,
    wit_one: HashMap<Key, FunctionalTree>,
    wit_many: HashMap<Key, Vec<FunctionalTree>>,
}

impl Solver {
    /// `pts`/`coeff`: the support of |x| with strictly positive entries.
    pub(crate) fn new(
        pts: Vec<u32>,
        coeff: Vec<Rat>,
        space: &SpaceSpec,
        size_cap: Option<u32>,
        node_budget: Option<u64>,
    ) -> Solver {
        debug_assert!(pts.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(coeff.iter().all(|c| c.is_positive()));
        Solver {
            pts,
            coeff,
            theta: space.theta.clone(),
            adm: space.enforce_admissible,
            vfg: space.enforce_vfg,
            size_cap,
            node_budget,
            subproblems: 0,
            memo_hits: 0,
            vals: HashMap::new(),
            wit_one: HashMap::new(),
            wit_many: HashMap::new(),
        }
    }

    fn len(&self) -> usize {
        self.pts.len()
    }

    fn lookup(&mut self, key: Key) -> Option<Option<Rat>> {
        if let Some(v) = self.vals.get(&key) {
            self.memo_hits += 1;
            return Some(v.clone());
        }
        None
    }

    fn charge(&mut self) -> Result<()> {
        self.subproblems += 1;
        if let Some(b) = self.node_budget {
            if self.subproblems > b {
                return Err(Error::ResourceBudget { budget: b });
            }
        }
        Ok(())
    }

    /// Growth floor for the child after one ending at position `e` that was
    /// placed under floor `sigma`. Without the growth condition later
    /// children are unconstrained.
    fn next_sigma(&self, sigma: u32, e: usize) -> u32 {
        if self.vfg {
            sigma.saturating_add(1).max(self.pts[e].saturating_add(1))
        } else {
            1
        }
    }

    /// Length budget for a Schreier sum whose first child starts at `p0`.
    fn sch_budget(&self, p0: usize, hi: usize, lmax: u32) -> u32 {
        let avail = (hi - p0 + 1) as u64;
        let mut b = (lmax as u64).min(avail);
        if self.adm {
            b = b.min(self.pts[p0] as u64);
        }
        b as u32
    }

    pub(crate) fn v(&mut self, lo: usize, hi: usize, dl: u32) -> Result<Option<Rat>> {
        if dl == 0 {
            return Ok(None);
        }
        let key = Key::V { lo: lo as u32, hi: hi as u32, dl };
        if let Some(v) = self.lookup(key) {
            return Ok(v);
        }
        self.charge()?;

        let mut best = self.coeff[lo..=hi].iter().max().unwrap().clone();
        if dl >= 2 {
            for d in 2..=(hi - lo + 1) {
                if self.size_cap.is_some_and(|cap| d as u64 > cap as u64) {
                    break;
                }
                if let Some(p) = self.p(lo, hi, d, dec(dl))? {
                    best = best.max(p.div_int(d as u64));
                }
            }
        }
        if dl >= 3 {
            if let Some(s) = self.sni(lo, hi, 1, UNCAPPED, dl)? {
                best = best.max(s);
            }
        }
        let out = Some(best);
        self.vals.insert(key, out.clone());
        Ok(out)
    }

    pub(crate) fn p(&mut self, lo: usize, hi: usize, d: usize, dl: u32) -> Result<Option<Rat>> {
        if d == 1 {
            return self.v(lo, hi, dl);
        }
        if d > hi - lo + 1 || dl == 0 {
            return Ok(None);
        }
        let key = Key::P { lo: lo as u32, hi: hi as u32, d: d as u32, dl };
        if let Some(v) = self.lookup(key) {
            return Ok(v);
        }
        self.charge()?;

        let mut best: Option<Rat> = None;
        for e in lo..=(hi - (d - 1)) {
            let (Some(head), Some(rest)) = (self.v(lo, e, dl)?, self.p(e + 1, hi, d - 1, dl)?)
            else {
                continue;
            };
            let cand = head + rest;
            best = Some(match best {
                None => cand,
                Some(b) => b.max(cand),
            });
        }
        self.vals.insert(key, best.clone());
        Ok(best)
    }

    pub(crate) fn a(
        &mut self,
        lo: usize,
        hi: usize,
        sigma: u32,
        dl: u32,
        skip1: bool,
    ) -> Result<Option<Rat>> {
        if dl < 2 {
            return Ok(None);
        }
        if self.size_cap.is_some_and(|cap| sigma > cap) {
            return Ok(None);
        }
        let key = Key::A { lo: lo as u32, hi: hi as u32, sigma, dl, skip1 };
        if let Some(v) = self.lookup(key) {
            return Ok(v);
        }
        self.charge()?;

        let mut best: Option<Rat> = None;
        let dmin = if skip1 { 2 } else { 1 };
        for d in dmin..=(hi - lo + 1) {
            let n = (d as u64).max(sigma as u64);
            if self.size_cap.is_some_and(|cap| n > cap as u64) {
                break;
            }
            if let Some(p) = self.p(lo, hi, d, dec(dl))? {
                let cand = p.div_int(n);
                best = Some(match best {
                    None => cand,
                    Some(b) => b.max(cand),
                });
            }
        }
        self.vals.insert(key, best.clone());
        Ok(best)
    }

    pub(crate) fn sni(
        &mut self,
        lo: usize,
        hi: usize,
        sigma: u32,
        lmax: u32,
        dl: u32,
    ) -> Result<Option<Rat>> {
        if dl < 3 || lmax == 0 {
            return Ok(None);
        }
        let key = Key::S { lo: lo as u32, hi: hi as u32, sigma, lmax, dl };
        if let Some(v) = self.lookup(key) {
            return Ok(v);
        }
        self.charge()?;

        let sigma1 = sigma.max(1);
        let mut best: Option<Rat> = None;
        for p0 in lo..=hi {
            let budget = self.sch_budget(p0, hi, lmax);
            if budget == 0 {
                continue;
            }
            for e in p0..=hi {
                let skip1 = p0 == lo && e == hi;
                let Some(first) = self.a(p0, e, sigma1, dec(dl), skip1)? else {
                    continue;
                };
                let sigma2 = self.next_sigma(sigma1, e);
                let rest = if e < hi {
                    match self.t(e + 1, hi, sigma2, budget - 1, dec(dl))? {
                        Some(r) => r,
                        None => continue,
                    }
                } else {
                    Rat::zero()
                };
                let cand = &self.theta * &(first + rest);
                best = Some(match best {
                    None => cand,
                    Some(b) => b.max(cand),
                });
            }
        }
        self.vals.insert(key, best.clone());
        Ok(best)
    }

    pub(crate) fn t(
        &mut self,
        pos: usize,
        hi: usize,
        sigma: u32,
        budget: u32,
        dl: u32,
    ) -> Result<Option<Rat>> {
        if pos > hi || budget == 0 {
            return Ok(Some(Rat::zero()));
        }
        // budget beyond the available points changes nothing; clamp to keep
        // the key space small
        let budget = budget.min((hi - pos + 1) as u32);
        let key = Key::T { pos: pos as u32, hi: hi as u32, sigma, budget, dl };
        if let Some(v) = self.lookup(key) {
            return Ok(v);
        }
        self.charge()?;

        let mut best = Rat::zero(); // stopping is always allowed
        for e in pos..=hi {
            let Some(first) = self.a(pos, e, sigma, dl, false)? else {
                continue;
            };
            let sigma2 = self.next_sigma(sigma, e);
            let Some(rest) = self.t(e + 1, hi, sigma2, budget - 1, dl)? else {
                continue;
            };
            best = best.max(first + rest);
        }
        let out = Some(best);
        self.vals.insert(key, out.clone());
        Ok(out)
    }

    // ------------------------------------------------------------------
    // Witness reconstruction. Each wit_* mirrors the scan of its value
    // function, keeps every candidate attaining the memoized value, and
    // returns the tie-break minimum. Only called on attained keys.
    // ------------------------------------------------------------------

    fn pick_one(mut cands: Vec<FunctionalTree>) -> FunctionalTree {
        debug_assert!(!cands.is_empty());
        let mut best_idx = 0;
        let mut best_rank = (cands[0].node_count(), cands[0].to_string());
        for (k, c) in cands.iter().enumerate().skip(1) {
            let rank = (c.node_count(), c.to_string());
            if rank < best_rank {
                best_rank = rank;
                best_idx = k;
            }
        }
        cands.swap_remove(best_idx)
    }

    fn pick_many(mut cands: Vec<Vec<FunctionalTree>>) -> Vec<FunctionalTree> {
        debug_assert!(!cands.is_empty());
        let rank = |c: &[FunctionalTree]| {
            let nodes: u64 = c.iter().map(|t| t.node_count()).sum();
            let s = c.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
            (nodes, s)
        };
        let mut best_idx = 0;
        let mut best_rank = rank(&cands[0]);
        for (k, c) in cands.iter().enumerate().skip(1) {
            let r = rank(c);
            if r < best_rank {
                best_rank = r;
                best_idx = k;
            }
        }
        cands.swap_remove(best_idx)
    }

    pub(crate) fn wit_v(&mut self, lo: usize, hi: usize, dl: u32) -> Result<FunctionalTree> {
        let key = Key::V { lo: lo as u32, hi: hi as u32, dl };
        if let Some(w) = self.wit_one.get(&key) {
            return Ok(w.clone());
        }
        let target = self.v(lo, hi, dl)?.expect("witness for unattained V");
        let mut cands = Vec::new();
        for pos in lo..=hi {
            if self.coeff[pos] == target {
                cands.push(FunctionalTree::leaf(self.pts[pos]));
            }
        }
        if dl >= 2 {
            for d in 2..=(hi - lo + 1) {
                if self.size_cap.is_some_and(|cap| d as u64 > cap as u64) {
                    break;
                }
                if self.p(lo, hi, d, dec(dl))?.map(|p| p.div_int(d as u64)) == Some(target.clone())
                {
                    let children = self.wit_p(lo, hi, d, dec(dl))?;
                    cands.push(FunctionalTree::avg(d as u32, children));
                }
            }
        }
        if dl >= 3 && self.sni(lo, hi, 1, UNCAPPED, dl)? == Some(target.clone()) {
            cands.push(self.wit_sni(lo, hi, 1, UNCAPPED, dl)?);
        }
        let w = Self::pick_one(cands);
        self.wit_one.insert(key, w.clone());
        Ok(w)
    }

    fn wit_p(&mut self, lo: usize, hi: usize, d: usize, dl: u32) -> Result<Vec<FunctionalTree>> {
        if d == 1 {
            return Ok(vec![self.wit_v(lo, hi, dl)?]);
        }
        let key = Key::P { lo: lo as u32, hi: hi as u32, d: d as u32, dl };
        if let Some(w) = self.wit_many.get(&key) {
            return Ok(w.clone());
        }
        let target = self.p(lo, hi, d, dl)?.expect("witness for unattained P");
        let mut cands = Vec::new();
        for e in lo..=(hi - (d - 1)) {
            let (Some(head), Some(rest)) = (self.v(lo, e, dl)?, self.p(e + 1, hi, d - 1, dl)?)
            else {
                continue;
            };
            if head + rest == target {
                let mut blocks = vec![self.wit_v(lo, e, dl)?];
                blocks.extend(self.wit_p(e + 1, hi, d - 1, dl)?);
                cands.push(blocks);
            }
        }
        let w = Self::pick_many(cands);
        self.wit_many.insert(key, w.clone());
        Ok(w)
    }

    pub(crate) fn wit_a(
        &mut self,
        lo: usize,
        hi: usize,
        sigma: u32,
        dl: u32,
        skip1: bool,
    ) -> Result<FunctionalTree> {
        let key = Key::A { lo: lo as u32, hi: hi as u32, sigma, dl, skip1 };
        if let Some(w) = self.wit_one.get(&key) {
            return Ok(w.clone());
        }
        let target = self.a(lo, hi, sigma, dl, skip1)?.expect("witness for unattained A");
        let mut cands = Vec::new();
        let dmin = if skip1 { 2 } else { 1 };
        for d in dmin..=(hi - lo + 1) {
            let n = (d as u64).max(sigma as u64);
            if self.size_cap.is_some_and(|cap| n > cap as u64) {
                break;
            }
            if self.p(lo, hi, d, dec(dl))?.map(|p| p.div_int(n)) == Some(target.clone()) {
                let children = self.wit_p(lo, hi, d, dec(dl))?;
                cands.push(FunctionalTree::avg(n as u32, children));
            }
        }
        let w = Self::pick_one(cands);
        self.wit_one.insert(key, w.clone());
        Ok(w)
    }

    pub(crate) fn wit_sni(
        &mut self,
        lo: usize,
        hi: usize,
        sigma: u32,
        lmax: u32,
        dl: u32,
    ) -> Result<FunctionalTree> {
        let key = Key::S { lo: lo as u32, hi: hi as u32, sigma, lmax, dl };
        if let Some(w) = self.wit_one.get(&key) {
            return Ok(w.clone());
        }
        let target = self.sni(lo, hi, sigma, lmax, dl)?.expect("witness for unattained S");
        let sigma1 = sigma.max(1);
        let mut cands = Vec::new();
        for p0 in lo..=hi {
            let budget = self.sch_budget(p0, hi, lmax);
            if budget == 0 {
                continue;
            }
            for e in p0..=hi {
                let skip1 = p0 == lo && e == hi;
                let Some(first) = self.a(p0, e, sigma1, dec(dl), skip1)? else {
                    continue;
                };
                let sigma2 = self.next_sigma(sigma1, e);
                let rest = if e < hi {
                    match self.t(e + 1, hi, sigma2, budget - 1, dec(dl))? {
                        Some(r) => r,
                        None => continue,
                    }
                } else {
                    Rat::zero()
                };
                if &self.theta * &(first + rest) == target {
                    let mut children = vec![self.wit_a(p0, e, sigma1, dec(dl), skip1)?];
                    if e < hi {
                        children.extend(self.wit_t(e + 1, hi, sigma2, budget - 1, dec(dl))?);
                    }
                    cands.push(FunctionalTree::sch(children));
                }
            }
        }
        let w = Self::pick_one(cands);
        self.wit_one.insert(key, w.clone());
        Ok(w)
    }

    fn wit_t(
        &mut self,
        pos: usize,
        hi: usize,
        sigma: u32,
        budget: u32,
        dl: u32,
    ) -> Result<Vec<FunctionalTree>> {
        if pos > hi || budget == 0 {
            return Ok(Vec::new());
        }
        let budget = budget.min((hi - pos + 1) as u32);
        let key = Key::T { pos: pos as u32, hi: hi as u32, sigma, budget, dl };
        if let Some(w) = self.wit_many.get(&key) {
            return Ok(w.clone());
        }
        let target = self.t(pos, hi, sigma, budget, dl)?.expect("witness for unattained T");
        if target.is_zero() {
            // all placeable children have strictly positive value, so zero
            // means the empty suffix, which is also the fewest-nodes choice
            self.wit_many.insert(key, Vec::new());
            return Ok(Vec::new());
        }
        let mut cands = Vec::new();
        for e in pos..=hi {
            let Some(first) = self.a(pos, e, sigma, dl, false)? else {
                continue;
            };
            let sigma2 = self.next_sigma(sigma, e);
            let Some(rest) = self.t(e + 1, hi, sigma2, budget - 1, dl)? else {
                continue;
            };
            if first + rest == target {
                let mut out = vec![self.wit_a(pos, e, sigma, dl, false)?];
                out.extend(self.wit_t(e + 1, hi, sigma2, budget - 1, dl)?);
                cands.push(out);
            }
        }
        let w = Self::pick_many(cands);
        self.wit_many.insert(key, w.clone());
        Ok(w)
    }

    /// Root entry: value and witness over the whole support, any class.
    pub(crate) fn solve_any(&mut self, dl: u32) -> Result<(Rat, FunctionalTree)> {
        let hi = self.len() - 1;
        let value = self.v(0, hi, dl)?.expect("depth allowance below 1");
        let wit = self.wit_v(0, hi, dl)?;
        Ok((value, wit))
    }

    /// Root entry for the average class: size floor `min_size`.
    pub(crate) fn solve_avg(&mut self, min_size: u32, dl: u32) -> Result<Option<(Rat, FunctionalTree)>> {
        let hi = self.len() - 1;
        match self.a(0, hi, min_size.max(1), dl, false)? {
            None => Ok(None),
            Some(value) => {
                let wit = self.wit_a(0, hi, min_size.max(1), dl, false)?;
                Ok(Some((value, wit)))
            }
        }
    }

    /// Root entry for the Schreier class. Re-admits the one shape `sni`
    /// excludes: a single child declared at the floor size wrapping the
    /// whole window's best functional (legal here because the query is not
    /// itself a candidate of `V`).
    pub(crate) fn solve_sch(
        &mut self,
        min_size: u32,
        lmax: u32,
        dl: u32,
    ) -> Result<Option<(Rat, FunctionalTree)>> {
        let hi = self.len() - 1;
        let sigma = min_size.max(1);
        let scanned = self.sni(0, hi, sigma, lmax, dl)?;

        let mut wrapped: Option<Rat> = None;
        if lmax >= 1 && dl >= 3 && !self.size_cap.is_some_and(|cap| sigma > cap) {
            if let Some(inner) = self.v(0, hi, dec(dec(dl)))? {
                wrapped = Some(&self.theta * &inner.div_int(sigma as u64));
            }
        }

        let value = match (scanned.clone(), wrapped.clone()) {
            (None, None) => return Ok(None),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.max(b),
        };

        let mut cands = Vec::new();
        if scanned == Some(value.clone()) {
            cands.push(self.wit_sni(0, hi, sigma, lmax, dl)?);
        }
        if wrapped == Some(value.clone()) {
            let inner = self.wit_v(0, hi, dec(dec(dl)))?;
            cands.push(FunctionalTree::sch(vec![FunctionalTree::avg(sigma, vec![inner])]));
        }
        Ok(Some((value, Self::pick_one(cands))))
    }
}
