//! Brute-force oracle: enumerates the functional set itself, with no
//! dominance reasoning, and takes maxima over the enumerated elements.
//!
//! Elements are kept as coefficient vectors over the support points (the
//! functional applied coordinatewise), not as trees: enumeration follows
//! the set's stratification W0 (signed units) then repeated closure under
//! average and Schreier formation, to a fixpoint under the depth and size
//! caps. The norm of a nonnegative vector only needs positive leaves, so
//! leaves are generated positive; a full signed mini-enumeration in the
//! tests corroborates that reduction.
//!
//! Deduplication is by (coefficient vector, declared size, node kind),
//! keeping the smallest nesting depth and, for Schreier elements, the
//! smallest summand count realizing the pair; both stay correct for later
//! composition because smaller is always at least as composable.
//!
//! Rationals are interned in a pool so vectors are arrays of small ids and
//! arithmetic on repeated values is memoized.

use std::collections::HashMap;

use crate::rat::Rat;
use crate::space::SpaceSpec;
use crate::vector::FinVec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOpts {
    pub depth_cap: u32,
    pub size_cap: u32,
    /// Abort guard on generation attempts across the whole family build.
    pub node_budget: Option<u64>,
}

impl OracleOpts {
    pub fn new(depth_cap: u32, size_cap: u32) -> OracleOpts {
        OracleOpts { depth_cap, size_cap, node_budget: None }
    }
}

/// One-shot form: builds the family for supp(x) and maximizes.
pub fn brute_force_norm(
    x: &FinVec,
    space: &SpaceSpec,
    opts: OracleOpts,
) -> Result<Rat> {
    Oracle::new(space.clone(), opts).norm(x)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Kind {
    Leaf,
    Avg,
    Sch,
}

pub(crate) struct Elem {
    /// Interned coefficient ids, dense over the support positions.
    pub(crate) vec: Box<[u32]>,
    pub(crate) size: u32,
    pub(crate) kind: Kind,
    pub(crate) depth: u32,
    /// Schreier only: fewest summands realizing this (vec, size).
    pub(crate) min_len: u32,
    /// Position range of the nonzero coefficients.
    pub(crate) lo: u32,
    pub(crate) hi: u32,
    /// Cleared when a structurally interchangeable element with pointwise
    /// larger coefficients arrives; dead elements are dropped between
    /// closure passes.
    alive: bool,
}

struct RatPool {
    rats: Vec<Rat>,
    ids: HashMap<Rat, u32>,
    add_memo: HashMap<(u32, u32), u32>,
    div_memo: HashMap<(u32, u64), u32>,
    mul_memo: HashMap<u32, u32>,
}

impl RatPool {
    fn new() -> RatPool {
        let mut p = RatPool {
            rats: Vec::new(),
            ids: HashMap::new(),
            add_memo: HashMap::new(),
            div_memo: HashMap::new(),
            mul_memo: HashMap::new(),
        };
        let z = p.intern(Rat::zero());
        debug_assert_eq!(z, 0);
        p
    }

    fn intern(&mut self, r: Rat) -> u32 {
        if let Some(id) = self.ids.get(&r) {
            return *id;
        }
        let id = self.rats.len() as u32;
        self.rats.push(r.clone());
        self.ids.insert(r, id);
        id
    }

    fn get(&self, id: u32) -> &Rat {
        &self.rats[id as usize]
    }

    fn add(&mut self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(id) = self.add_memo.get(&key) {
            return *id;
        }
        let r = self.get(key.0) + self.get(key.1);
        let id = self.intern(r);
        self.add_memo.insert(key, id);
        id
    }

    fn div(&mut self, a: u32, n: u64) -> u32 {
        if a == 0 || n == 1 {
            return a;
        }
        if let Some(id) = self.div_memo.get(&(a, n)) {
            return *id;
        }
        let r = self.get(a).div_int(n);
        let id = self.intern(r);
        self.div_memo.insert((a, n), id);
        id
    }

    fn mul_theta(&mut self, a: u32, theta: &Rat) -> u32 {
        if a == 0 {
            return a;
        }
        if let Some(id) = self.mul_memo.get(&a) {
            return *id;
        }
        let r = theta * self.get(a);
        let id = self.intern(r);
        self.mul_memo.insert(a, id);
        id
    }
}

/// Elements that may stand in for one another anywhere in the closure:
/// same node kind, same declared size, same support window.
type BucketKey = (Kind, u32, u32, u32);

pub(crate) struct Family {
    pub(crate) pts: Vec<u32>,
    pool: RatPool,
    pub(crate) elems: Vec<Elem>,
    buckets: HashMap<BucketKey, Vec<usize>>,
    attempts: u64,
    /// Indices surviving the pointwise-domination filter, for norm queries.
    eval_list: Option<Vec<usize>>,
}

impl Family {
    fn npts(&self) -> usize {
        self.pts.len()
    }

    /// f(x) for x given coordinatewise over the same positions.
    pub(crate) fn value_on(&self, elem: &Elem, coeffs: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for pos in (elem.lo as usize)..=(elem.hi as usize) {
            let id = elem.vec[pos];
            if id != 0 {
                acc += &(self.pool.get(id) * &coeffs[pos]);
            }
        }
        acc
    }

    /// Adds a candidate unless the bucket already holds an element that is
    /// at least as deep-capable, at least as short, and pointwise at least
    /// as large; symmetrically retires bucket members the candidate covers.
    ///
    /// This is the only pruning rule of the oracle. It is sound because
    /// both forming rules are pointwise monotone and positive-linear in
    /// their children, and bucket mates satisfy every structural side
    /// condition (successiveness, admissibility, growth, size floors)
    /// identically, so swapping a pruned element for its dominator inside
    /// any larger functional yields a valid functional with a value at
    /// least as large at every nonnegative vector.
    fn insert(&mut self, vec: Box<[u32]>, size: u32, kind: Kind, depth: u32, min_len: u32) -> bool {
        let (lo, hi) = match span(&vec) {
            Some(r) => r,
            None => return false, // all-zero element carries no information
        };
        let key: BucketKey = (kind, size, lo, hi);
        let mut bucket = self.buckets.remove(&key).unwrap_or_default();
        let mut doomed: Vec<usize> = Vec::new();
        let mut verdict: Option<bool> = None;
        for (bi, &ei) in bucket.iter().enumerate() {
            let e = &self.elems[ei];
            if e.vec == vec {
                let e = &mut self.elems[ei];
                let mut improved = false;
                if depth < e.depth {
                    e.depth = depth;
                    improved = true;
                }
                if min_len < e.min_len {
                    e.min_len = min_len;
                    improved = true;
                }
                verdict = Some(improved);
                break;
            }
            if e.depth <= depth && e.min_len <= min_len && pw_ge(&self.pool, &e.vec, &vec) {
                verdict = Some(false);
                break;
            }
            if depth <= e.depth && min_len <= e.min_len && pw_ge(&self.pool, &vec, &e.vec) {
                doomed.push(bi);
            }
        }
        let changed = match verdict {
            Some(v) => v,
            None => {
                for &bi in doomed.iter().rev() {
                    self.elems[bucket[bi]].alive = false;
                    bucket.swap_remove(bi);
                }
                bucket.push(self.elems.len());
                self.elems.push(Elem { vec, size, kind, depth, min_len, lo, hi, alive: true });
                true
            }
        };
        self.buckets.insert(key, bucket);
        changed
    }

    /// Drops retired elements and remaps the bucket indices.
    fn compact(&mut self) {
        if self.elems.iter().all(|e| e.alive) {
            return;
        }
        let mut remap = vec![usize::MAX; self.elems.len()];
        let mut kept = Vec::with_capacity(self.elems.len());
        for (i, e) in std::mem::take(&mut self.elems).into_iter().enumerate() {
            if e.alive {
                remap[i] = kept.len();
                kept.push(e);
            }
        }
        self.elems = kept;
        for bucket in self.buckets.values_mut() {
            for ei in bucket.iter_mut() {
                *ei = remap[*ei];
                debug_assert_ne!(*ei, usize::MAX);
            }
        }
    }
}

/// Pointwise >= on interned coefficient vectors.
fn pw_ge(pool: &RatPool, a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == y || pool.get(x) >= pool.get(y))
}

fn span(vec: &[u32]) -> Option<(u32, u32)> {
    let lo = vec.iter().position(|&id| id != 0)?;
    let hi = vec.iter().rposition(|&id| id != 0).unwrap();
    Some((lo as u32, hi as u32))
}

pub struct Oracle {
    space: SpaceSpec,
    opts: OracleOpts,
    families: HashMap<Vec<u32>, Family>,
}

impl Oracle {
    pub fn new(space: SpaceSpec, opts: OracleOpts) -> Oracle {
        assert!(opts.depth_cap >= 1 && opts.size_cap >= 1, "caps start at 1");
        Oracle { space, opts, families: HashMap::new() }
    }

    /// Maximum of f(x) over the enumerated family for supp(x).
    pub fn norm(&mut self, x: &FinVec) -> Result<Rat> {
        if x.is_empty() {
            return Ok(Rat::zero());
        }
        let ax = x.abs();
        let pts: Vec<u32> = ax.support().collect();
        let coeffs: Vec<Rat> = ax.entries().iter().map(|(_, c)| c.clone()).collect();
        let fam = self.family(&pts)?;
        let list = fam.eval_list.as_ref().expect("eval list built with family");
        let mut best = Rat::zero();
        for &i in list {
            best = best.max(fam.value_on(&fam.elems[i], &coeffs));
        }
        Ok(best)
    }

    /// Maximum of f(x) over enumerated Schreier elements with declared size
    /// at least `min_size` and length at most `max_len`. `None` if the
    /// family has no such element.
    pub fn best_sch(&mut self, x: &FinVec, min_size: u32, max_len: u32) -> Result<Option<Rat>> {
        if x.is_empty() {
            return Ok(None);
        }
        let ax = x.abs();
        let pts: Vec<u32> = ax.support().collect();
        let coeffs: Vec<Rat> = ax.entries().iter().map(|(_, c)| c.clone()).collect();
        let fam = self.family(&pts)?;
        let mut best: Option<Rat> = None;
        for e in &fam.elems {
            if e.kind == Kind::Sch && e.size >= min_size && e.min_len <= max_len {
                let v = fam.value_on(e, &coeffs);
                best = Some(match best {
                    None => v,
                    Some(b) => b.max(v),
                });
            }
        }
        Ok(best)
    }

    /// The full enumerated family over exactly these support points.
    pub(crate) fn family(&mut self, pts: &[u32]) -> Result<&Family> {
        if !self.families.contains_key(pts) {
            let fam = self.build(pts)?;
            self.families.insert(pts.to_vec(), fam);
        }
        Ok(&self.families[pts])
    }

    fn build(&mut self, pts: &[u32]) -> Result<Family> {
        debug_assert!(pts.windows(2).all(|w| w[0] < w[1]) && pts.iter().all(|&p| p >= 1));
        let mut fam = Family {
            pts: pts.to_vec(),
            pool: RatPool::new(),
            elems: Vec::new(),
            buckets: HashMap::new(),
            attempts: 0,
            eval_list: None,
        };
        let one = fam.pool.intern(Rat::one());
        let npts = fam.npts();
        for pos in 0..npts {
            let mut vec = vec![0u32; npts].into_boxed_slice();
            vec[pos] = one;
            fam.insert(vec, 1, Kind::Leaf, 1, 0);
        }

        loop {
            let avg_changed = self.gen_avgs(&mut fam)?;
            let sch_changed = self.gen_schs(&mut fam)?;
            fam.compact();
            if !avg_changed && !sch_changed {
                break;
            }
        }

        fam.eval_list = Some(build_eval_list(&fam));
        Ok(fam)
    }

    fn charge(&self, fam: &mut Family, by: u64) -> Result<()> {
        fam.attempts += by;
        if let Some(b) = self.opts.node_budget {
            if fam.attempts > b {
                return Err(Error::ResourceBudget { budget: b });
            }
        }
        Ok(())
    }

    /// Generates every average element formable from the current family:
    /// combinations of successively supported elements (gaps allowed), each
    /// declared at every size from the child count to the cap. Inserts
    /// stream into the family; returns whether anything changed.
    ///
    /// Combinations are enumerated right to left: `tails_exact[q]` holds the
    /// combination sums starting exactly at position q, grouped by end
    /// position and kept Pareto-minimal under (pointwise value, child count,
    /// max child depth), which is all the produced elements depend on.
    /// Children come from a snapshot taken at pass start, so elements the
    /// streamed inserts retire mid-pass still combine this pass; they are
    /// genuine family members, merely redundant, and the next pass rebuilds
    /// from survivors only.
    fn gen_avgs(&self, fam: &mut Family) -> Result<bool> {
        let npts = fam.npts();
        let child_depth_cap = self.opts.depth_cap.saturating_sub(1);
        // (vec, depth, hi) of eligible children, by start position
        let mut starts: Vec<Vec<(Box<[u32]>, u32, usize)>> = vec![Vec::new(); npts];
        for e in &fam.elems {
            if e.depth <= child_depth_cap {
                starts[e.lo as usize].push((e.vec.clone(), e.depth, e.hi as usize));
            }
        }

        let mut tails_exact: Vec<HashMap<u32, Vec<Chain>>> =
            (0..npts).map(|_| HashMap::new()).collect();
        for pos in (0..npts).rev() {
            let mut here: HashMap<u32, Vec<Chain>> = HashMap::new();
            for (evec, edepth, ehi) in &starts[pos] {
                // the element alone
                self.charge(fam, 1)?;
                pareto_chain(&fam.pool, here.entry(*ehi as u32).or_default(), evec.clone(), 1, *edepth);
                // the element followed by any later combination
                for later in &tails_exact[*ehi + 1..] {
                    for (hi, group) in later {
                        for (svec, d, md) in group {
                            self.charge(fam, 1)?;
                            let sum = add_vec(&mut fam.pool, evec, svec);
                            pareto_chain(
                                &fam.pool,
                                here.entry(*hi).or_default(),
                                sum,
                                d + 1,
                                (*md).max(*edepth),
                            );
                        }
                    }
                }
            }
            tails_exact[pos] = here;
        }

        let mut changed = false;
        for exact in &tails_exact {
            for group in exact.values() {
                for (sum, d, md) in group {
                    if md + 1 > self.opts.depth_cap {
                        continue;
                    }
                    for n in *d..=self.opts.size_cap {
                        let scaled = div_vec(&mut fam.pool, sum, u64::from(n));
                        changed |= fam.insert(scaled, n, Kind::Avg, md + 1, 0);
                    }
                }
            }
        }
        Ok(changed)
    }

    /// Generates every Schreier element formable from the current family's
    /// averages, respecting whichever of the admissibility and growth
    /// conditions the space enforces. Inserts stream into the family;
    /// returns whether anything changed. Children come from a pass-start
    /// snapshot, as in `gen_avgs`.
    fn gen_schs(&self, fam: &mut Family) -> Result<bool> {
        let npts = fam.npts();
        let child_depth_cap = self.opts.depth_cap.saturating_sub(1);
        // (vec, size, depth, hi) of eligible averages, by start position
        let mut starts: Vec<Vec<SchStart>> = vec![Vec::new(); npts];
        for e in &fam.elems {
            if e.kind == Kind::Avg && e.depth <= child_depth_cap {
                starts[e.lo as usize].push((e.vec.clone(), e.size, e.depth, e.hi as usize));
            }
        }

        let mut memo: HashMap<(usize, u32, u32), Vec<Chain>> = HashMap::new();
        let theta = self.space.theta.clone();
        let mut changed = false;

        for first_pos in 0..npts {
            for (evec, esize, edepth, ehi) in &starts[first_pos] {
                let budget = if self.space.enforce_admissible {
                    (fam.pts[first_pos] as u64).min(npts as u64) as u32
                } else {
                    npts as u32
                };
                if budget == 0 {
                    continue;
                }
                let floor = self.next_floor(*esize, fam.pts[*ehi]);
                let mut sums: Vec<Chain> = vec![(evec.clone(), *edepth, 1)];
                if budget > 1 && *ehi + 1 < npts {
                    let tails =
                        self.sch_tails(fam, &starts, &mut memo, *ehi + 1, floor, budget - 1)?;
                    self.charge(fam, tails.len() as u64)?;
                    for (svec, md, l) in tails {
                        let sum = add_vec(&mut fam.pool, evec, &svec);
                        sums.push((sum, md.max(*edepth), l + 1));
                    }
                }
                self.charge(fam, sums.len() as u64)?;
                for (sum, md, len) in sums {
                    if md + 1 > self.opts.depth_cap {
                        continue;
                    }
                    let scaled = theta_vec(&mut fam.pool, &sum, &theta);
                    changed |= fam.insert(scaled, *esize, Kind::Sch, md + 1, len);
                }
            }
        }
        Ok(changed)
    }

    /// Nonempty suffix chains of averages from `pos` on under the given
    /// growth floor and length budget, grouped by support span and kept
    /// Pareto-minimal under (pointwise value, max depth, length).
    fn sch_tails(
        &self,
        fam: &mut Family,
        starts: &[Vec<SchStart>],
        memo: &mut HashMap<(usize, u32, u32), Vec<Chain>>,
        pos: usize,
        floor: u32,
        rem: u32,
    ) -> Result<Vec<Chain>> {
        let npts = fam.npts();
        if pos >= npts || rem == 0 {
            return Ok(Vec::new());
        }
        let key = (pos, floor, rem.min((npts - pos) as u32));
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let mut acc: HashMap<(u32, u32), Vec<Chain>> = HashMap::new();
        for p in pos..npts {
            for (evec, esize, edepth, ehi) in &starts[p] {
                if *esize < floor {
                    continue;
                }
                self.charge(fam, 1)?;
                pareto_chain(
                    &fam.pool,
                    acc.entry((p as u32, *ehi as u32)).or_default(),
                    evec.clone(),
                    *edepth,
                    1,
                );
                if rem > 1 && *ehi + 1 < npts {
                    let next_floor = self.next_floor(*esize, fam.pts[*ehi]);
                    let tails =
                        self.sch_tails(fam, starts, memo, *ehi + 1, next_floor, rem - 1)?;
                    self.charge(fam, tails.len() as u64)?;
                    for (svec, md, l) in tails {
                        let sum = add_vec(&mut fam.pool, evec, &svec);
                        let (_, shi) = span(&sum).expect("chain sums are nonzero");
                        pareto_chain(
                            &fam.pool,
                            acc.entry((p as u32, shi)).or_default(),
                            sum,
                            md.max(*edepth),
                            l + 1,
                        );
                    }
                }
            }
        }
        let flat: Vec<Chain> = acc.into_values().flatten().collect();
        memo.insert(key, flat.clone());
        Ok(flat)
    }

    /// Size floor for the Schreier child after one of size `size` ending at
    /// support point `last_pt`.
    fn next_floor(&self, size: u32, last_pt: u32) -> u32 {
        if self.space.enforce_vfg {
            size.saturating_add(1).max(last_pt.saturating_add(1))
        } else {
            1
        }
    }
}

fn add_vec(pool: &mut RatPool, a: &[u32], b: &[u32]) -> Box<[u32]> {
    a.iter().zip(b).map(|(&x, &y)| pool.add(x, y)).collect()
}

fn div_vec(pool: &mut RatPool, a: &[u32], n: u64) -> Box<[u32]> {
    a.iter().map(|&x| pool.div(x, n)).collect()
}

fn theta_vec(pool: &mut RatPool, a: &[u32], theta: &Rat) -> Box<[u32]> {
    a.iter().map(|&x| pool.mul_theta(x, theta)).collect()
}

/// Partial combination during closure: interned sum plus two cost labels
/// where smaller is better (child count or max depth, then max depth or
/// chain length, depending on the pass).
type Chain = (Box<[u32]>, u32, u32);

/// Snapshot of an average eligible as a Schreier child: (vec, size, depth, hi).
type SchStart = (Box<[u32]>, u32, u32, usize);

/// Keeps a span group of chains Pareto-minimal: a kept chain stands in for
/// any candidate it matches or beats pointwise at no greater cost labels.
/// Sound for the same reason as `Family::insert`: within a span group the
/// chains are interchangeable in every later combination step.
fn pareto_chain(pool: &RatPool, group: &mut Vec<Chain>, vec: Box<[u32]>, a: u32, b: u32) {
    for (v, ka, kb) in group.iter() {
        if *ka <= a && *kb <= b && pw_ge(pool, v, &vec) {
            return;
        }
    }
    group.retain(|(v, ka, kb)| !(a <= *ka && b <= *kb && pw_ge(pool, &vec, v)));
    group.push((vec, a, b));
}

/// Indices of elements not strictly dominated coordinatewise by another
/// element; the norm of a nonnegative vector is attained on this list.
/// Domination checks are capped per element, so the list may keep extras;
/// that only costs time, never correctness.
fn build_eval_list(fam: &Family) -> Vec<usize> {
    // ranks make coordinate comparisons integer-sized
    let mut order: Vec<u32> = (0..fam.pool.rats.len() as u32).collect();
    order.sort_by(|&a, &b| fam.pool.get(a).cmp(fam.pool.get(b)));
    let mut rank = vec![0u32; fam.pool.rats.len()];
    for (r, &id) in order.iter().enumerate() {
        rank[id as usize] = r as u32;
    }

    let ranked: Vec<Vec<u32>> = fam
        .elems
        .iter()
        .map(|e| e.vec.iter().map(|&id| rank[id as usize]).collect())
        .collect();

    let mut by_weight: Vec<usize> = (0..fam.elems.len()).collect();
    let weight = |i: usize| -> u64 { ranked[i].iter().map(|&r| r as u64).sum() };
    by_weight.sort_by_key(|&i| std::cmp::Reverse(weight(i)));

    const COMPARE_CAP: usize = 4096;
    let mut kept: Vec<usize> = Vec::new();
    'outer: for &i in &by_weight {
        for (scanned, &j) in kept.iter().enumerate() {
            if scanned >= COMPARE_CAP {
                break;
            }
            if ranked[i].iter().zip(&ranked[j]).all(|(a, b)| a <= b) {
                continue 'outer; // dominated: never the unique maximizer
            }
        }
        kept.push(i);
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{best_value, norm as engine_norm, EngineOpts};
    use crate::tree::FunctionalTree;
    use crate::validate::validate;
    use crate::vector::range_sum;
    use crate::NodeClass;

    fn std_space() -> SpaceSpec {
        SpaceSpec::standard()
    }

    #[test]
    fn leaf_stratum_only() {
        let x = FinVec::from_pairs([(2, Rat::new(1, 2)), (5, Rat::new(1, 3))]);
        let v = brute_force_norm(&x, &std_space(), OracleOpts::new(1, 1)).unwrap();
        assert_eq!(v, Rat::new(1, 2));
    }

    #[test]
    fn two_point_norm() {
        let v = brute_force_norm(&range_sum(1, 2), &std_space(), OracleOpts::new(4, 4)).unwrap();
        assert_eq!(v, Rat::one());
    }

    #[test]
    fn monotone_in_caps() {
        let x = range_sum(3, 7);
        let mut prev = Rat::zero();
        for d in 1..=4 {
            let v = brute_force_norm(&x, &std_space(), OracleOpts::new(d, 6)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = Rat::zero();
        for s in 1..=6 {
            let v = brute_force_norm(&x, &std_space(), OracleOpts::new(4, s)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn budget_guard_fires() {
        let err =
            Oracle::new(std_space(), OracleOpts { depth_cap: 6, size_cap: 8, node_budget: Some(50) })
                .norm(&range_sum(1, 6))
                .unwrap_err();
        assert!(matches!(err, Error::ResourceBudget { budget: 50 }));
    }

    #[test]
    fn agrees_with_engine_on_small_supports() {
        let sp = std_space();
        let caps = EngineOpts { depth_cap: Some(4), size_cap: Some(4), ..Default::default() };
        let mut oracle = Oracle::new(sp.clone(), OracleOpts::new(4, 4));
        let xs = [
            FinVec::unit(1),
            range_sum(1, 2),
            range_sum(2, 4),
            FinVec::from_pairs([(1, Rat::one()), (3, Rat::new(1, 2)), (4, Rat::one())]),
            FinVec::from_pairs([(2, Rat::new(1, 2)), (3, Rat::new(1, 2)), (5, Rat::one())]),
        ];
        for x in &xs {
            let e = engine_norm(x, &sp, &caps).unwrap();
            let o = oracle.norm(x).unwrap();
            assert_eq!(e.value, o, "engine vs oracle on {}", x.to_line());
        }
    }

    #[test]
    fn sch_filter_matches_engine() {
        let sp = std_space();
        let caps = EngineOpts { depth_cap: Some(4), size_cap: Some(6), ..Default::default() };
        let mut oracle = Oracle::new(sp.clone(), OracleOpts::new(4, 6));
        let x = range_sum(2, 5);
        for s in [1u32, 2, 3] {
            for l in [1u32, 2] {
                let e = best_value(&x, &sp, NodeClass::sch(s, l), &caps).unwrap();
                let o = oracle.best_sch(&x, s, l).unwrap().unwrap();
                assert_eq!(e.value, o, "class sch({s},{l})");
            }
        }
    }

    // Full signed enumeration on a tiny support, independently of the
    // positive-leaf reduction both the oracle family and the engine use.
    fn signed_trees(pts: &[u32], depth_cap: u32, size_cap: u32, sp: &SpaceSpec) -> Vec<FunctionalTree> {
        let mut all: Vec<FunctionalTree> = pts
            .iter()
            .flat_map(|&i| [FunctionalTree::leaf(i), FunctionalTree::leaf_neg(i)])
            .collect();
        loop {
            let mut fresh: Vec<FunctionalTree> = Vec::new();
            // every child sequence over the current set, by support order
            let seqs = child_seqs(&all, pts);
            for seq in &seqs {
                let d = seq.len() as u32;
                for n in d..=size_cap {
                    let t = FunctionalTree::avg(n, seq.clone());
                    if t.depth() <= depth_cap && validate(&t, sp).is_pass() && !all.contains(&t) {
                        fresh.push(t);
                    }
                }
                if seq.iter().all(|c| c.is_avg()) {
                    let t = FunctionalTree::sch(seq.clone());
                    if t.depth() <= depth_cap && validate(&t, sp).is_pass() && !all.contains(&t) {
                        fresh.push(t);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            all.extend(fresh);
        }
        all
    }

    fn child_seqs(all: &[FunctionalTree], pts: &[u32]) -> Vec<Vec<FunctionalTree>> {
        // sequences of trees with strictly increasing support ranges
        let mut out: Vec<Vec<FunctionalTree>> = Vec::new();
        fn extend(
            all: &[FunctionalTree],
            min_lo: u32,
            cur: &mut Vec<FunctionalTree>,
            out: &mut Vec<Vec<FunctionalTree>>,
            max_pt: u32,
        ) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            if cur.len() >= 3 {
                return; // plenty for a 2-3 point support
            }
            for t in all {
                let Some((lo, hi)) = t.support_range() else { continue };
                if lo >= min_lo && hi <= max_pt {
                    cur.push(t.clone());
                    extend(all, hi + 1, cur, out, max_pt);
                    cur.pop();
                }
            }
        }
        let max_pt = *pts.iter().max().unwrap();
        extend(all, 0, &mut Vec::new(), &mut out, max_pt);
        out
    }

    #[test]
    fn positive_leaf_reduction_is_sound() {
        let sp = std_space();
        let pts = [1u32, 2];
        let trees = signed_trees(&pts, 3, 2, &sp);
        assert!(trees.len() > 10);
        let coeff_choices = [Rat::one(), -Rat::one(), Rat::new(1, 2), Rat::new(-1, 2)];
        let mut oracle = Oracle::new(sp.clone(), OracleOpts::new(3, 2));
        for a in &coeff_choices {
            for b in &coeff_choices {
                let x = FinVec::from_pairs([(1, a.clone()), (2, b.clone())]);
                let signed_max = trees
                    .iter()
                    .map(|t| t.evaluate(&x, &sp).unwrap())
                    .fold(Rat::zero(), Rat::max);
                let fam_max = oracle.norm(&x).unwrap();
                assert_eq!(signed_max, fam_max, "signed vs positive on {}", x.to_line());
            }
        }
    }

    /// Not an assertion; prints family sizes and build times at the caps the
    /// expensive cross-checks use. Run by hand when tuning:
    /// `cargo test -p normset --lib family_scale -- --ignored --nocapture`
    #[test]
    #[ignore]
    fn family_scale() {
        for (npts, depth, size) in [(6u32, 6, 8), (7, 6, 8), (8, 3, 8)] {
            let pts: Vec<u32> = (1..=npts).collect();
            let mut oracle = Oracle::new(std_space(), OracleOpts::new(depth, size));
            let t0 = std::time::Instant::now();
            let fam = oracle.family(&pts).unwrap();
            println!(
                "pts=1..{npts} depth={depth} size={size}: {} elems, eval list {}, {:?}",
                fam.elems.len(),
                fam.eval_list.as_ref().map_or(0, Vec::len),
                t0.elapsed()
            );
        }
    }
}
