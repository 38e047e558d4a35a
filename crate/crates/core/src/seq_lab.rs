//! Block-sequence constructions and the experiments built on arrays of them:
//! blockings, mixed sequences, the greedy index selection, the sandwich
//! estimate, spreading-model surrogates, asymptotic-model weights, and the
//! symmetry ratio.
//!
//! The selection mirrors a constructive proof rather than any limit: each row
//! carries a size floor that strictly increases and stays above every support
//! seen so far, so the witness averages of the chosen members glue into one
//! admissible Schreier functional. That makes the reported lower bound
//! self-certifying: the sum of the frozen surrogates is a value some valid
//! functional actually takes on the combined vector (up to the epsilon the
//! thresholds give away).

use crate::class::NodeClass;
use crate::engine::{self, EngineOpts};
use crate::rat::Rat;
use crate::space::SpaceSpec;
use crate::vector::FinVec;
use crate::{Error, Result};

/// Finitely many vectors with strictly increasing supports.
#[derive(Clone, Debug)]
pub struct BlockSeq {
    members: Vec<FinVec>,
    kind: String,
    normalized: bool,
}

impl BlockSeq {
    /// `normalized` records that the construction guarantees norm one for
    /// every member; consumers that need the guarantee re-verify otherwise.
    pub fn new(members: Vec<FinVec>, kind: impl Into<String>, normalized: bool) -> Result<BlockSeq> {
        if members.is_empty() {
            return Err(Error::Precondition("a block sequence needs at least one member".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if m.is_empty() {
                return Err(Error::Precondition(format!("member {} is the zero vector", i + 1)));
            }
            if i > 0 && members[i - 1].max_supp().unwrap() >= m.min_supp().unwrap() {
                return Err(Error::NotBlock { prev: i, index: i + 1 });
            }
        }
        Ok(BlockSeq { members, kind: kind.into(), normalized })
    }

    pub fn members(&self) -> &[FinVec] {
        &self.members
    }

    /// 1-based, matching reported indices.
    pub fn member(&self, j: usize) -> &FinVec {
        &self.members[j - 1]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }
}

/// Successive index sets F_1 < F_2 < … with #F_n <= min F_n and #F_n
/// nondecreasing.
#[derive(Clone, Debug)]
pub struct IndexFamily {
    sets: Vec<Vec<u32>>,
}

impl IndexFamily {
    pub fn new(sets: Vec<Vec<u32>>) -> Result<IndexFamily> {
        if sets.is_empty() {
            return Err(Error::BadFamily("the family has no sets".into()));
        }
        let mut prev_max = 0u32;
        let mut prev_card = 0usize;
        for (n, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::BadFamily(format!("set {} is empty", n + 1)));
            }
            if !set.windows(2).all(|w| w[0] < w[1]) || set[0] == 0 {
                return Err(Error::BadFamily(format!(
                    "set {} must be strictly increasing positive indices",
                    n + 1
                )));
            }
            if set.len() as u64 > set[0] as u64 {
                return Err(Error::BadFamily(format!(
                    "set {} has {} elements but min {}",
                    n + 1,
                    set.len(),
                    set[0]
                )));
            }
            if set.len() < prev_card {
                return Err(Error::BadFamily(format!(
                    "set sizes must be nondecreasing, but set {} shrinks to {}",
                    n + 1,
                    set.len()
                )));
            }
            if set[0] <= prev_max {
                return Err(Error::BadFamily(format!(
                    "sets must be successive, but set {} starts at {} after {}",
                    n + 1,
                    set[0],
                    prev_max
                )));
            }
            prev_max = *set.last().unwrap();
            prev_card = set.len();
        }
        Ok(IndexFamily { sets })
    }

    /// F_k = {2^(k-1), …, 2^k - 1}; cardinality equals the minimum, so the
    /// family constraints hold with equality.
    pub fn dyadic(count: usize) -> IndexFamily {
        assert!(count >= 1 && count <= 24, "dyadic family size out of range");
        let sets = (1..=count as u32).map(|k| (1u32 << (k - 1)..1 << k).collect()).collect();
        IndexFamily { sets }
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

pub fn basis_seq(len: usize) -> Result<BlockSeq> {
    if len == 0 {
        return Err(Error::Precondition("basis sequence length must be positive".into()));
    }
    let members = (1..=len as u32).map(FinVec::unit).collect();
    BlockSeq::new(members, "basis", true)
}

/// y_n = sum of e_i over F_n.
pub fn flat_blocks(family: &IndexFamily) -> Result<BlockSeq> {
    let members = family
        .sets()
        .iter()
        .map(|set| FinVec::from_pairs(set.iter().map(|&i| (i, Rat::one()))))
        .collect();
    BlockSeq::new(members, "flat-blocks", false)
}

pub fn custom_seq(text: &str) -> Result<BlockSeq> {
    let members = FinVec::parse_lines(text)?;
    BlockSeq::new(members, "custom", false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMode {
    Sum,
    Average,
}

/// Blocks `seq` along the family: member n is the sum (or the average) of
/// the seq members indexed by F_n. Sum takes unit vectors toward summing
/// behavior; Average renormalizes mass back down.
pub fn block_seq(seq: &BlockSeq, family: &IndexFamily, mode: BlockMode) -> Result<BlockSeq> {
    let mut members = Vec::with_capacity(family.len());
    for set in family.sets() {
        let last = *set.last().unwrap() as usize;
        if last > seq.len() {
            return Err(Error::Precondition(format!(
                "family index {last} exceeds the sequence length {}",
                seq.len()
            )));
        }
        let mut acc = FinVec::empty();
        for &i in set {
            acc = acc.add(seq.member(i as usize));
        }
        if mode == BlockMode::Average {
            acc = acc.scale(&Rat::one().div_int(set.len() as u64));
        }
        members.push(acc);
    }
    let tag = match mode {
        BlockMode::Sum => format!("block-sum({})", seq.kind()),
        BlockMode::Average => format!("block-average({})", seq.kind()),
    };
    BlockSeq::new(members, tag, false)
}

/// z_j = (x_j + w*y_j) / ||x_j + w*y_j||, requiring the interleaving
/// x_j < y_j < x_{j+1} support-wise. The common length is the shorter input.
pub fn mix_seq(
    xs: &BlockSeq,
    ys: &BlockSeq,
    w: &Rat,
    space: &SpaceSpec,
    opts: &EngineOpts,
) -> Result<BlockSeq> {
    if w.is_negative() || *w > Rat::one() {
        return Err(Error::Precondition(format!("mix weight {w} is outside [0, 1]")));
    }
    let len = xs.len().min(ys.len());
    let mut members = Vec::with_capacity(len);
    for j in 1..=len {
        let (x, y) = (xs.member(j), ys.member(j));
        if x.max_supp().unwrap() >= y.min_supp().unwrap() {
            return Err(Error::NotInterleaved { pair: j });
        }
        if j < len && y.max_supp().unwrap() >= xs.member(j + 1).min_supp().unwrap() {
            return Err(Error::NotInterleaved { pair: j });
        }
        let v = x.add(&y.scale(w));
        let norm = engine::norm(&v, space, opts)?.value;
        members.push(v.scale(&norm.recip()));
    }
    BlockSeq::new(members, format!("mix({w})"), true)
}

/// Rows for the array experiments; the optional anchor plays x_0.
#[derive(Clone, Debug)]
pub struct SeqArray {
    pub anchor: Option<FinVec>,
    pub rows: Vec<BlockSeq>,
}

impl SeqArray {
    pub fn new(anchor: Option<FinVec>, rows: Vec<BlockSeq>) -> Result<SeqArray> {
        if rows.is_empty() {
            return Err(Error::Precondition("an array needs at least one row".into()));
        }
        if let Some(a) = &anchor {
            if a.is_empty() {
                return Err(Error::Precondition(
                    "pass no anchor instead of the zero vector".into(),
                ));
            }
        }
        Ok(SeqArray { anchor, rows })
    }

    fn anchor_max_supp(&self) -> u32 {
        self.anchor.as_ref().and_then(FinVec::max_supp).unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SelectOpts {
    /// Consecutive members that must test under the target before a size
    /// threshold counts as found.
    pub streak: usize,
    /// Members examined per row and size step during the threshold search.
    pub scan_cap: usize,
    /// Candidate size thresholds, tried in order.
    pub s_schedule: Vec<u32>,
    /// Base of the composable size floor; the floor also stays above every
    /// support already used.
    pub surrogate_s: u32,
    /// Length budget of the surrogate queries.
    pub surrogate_len: u32,
    pub engine: EngineOpts,
}

impl Default for SelectOpts {
    fn default() -> SelectOpts {
        SelectOpts {
            streak: 2,
            scan_cap: 24,
            s_schedule: vec![2, 4, 8, 16],
            surrogate_s: 2,
            surrogate_len: 1,
            engine: EngineOpts::default(),
        }
    }
}

/// Outcome of the greedy selection; indices are 1-based into each row.
#[derive(Clone, Debug)]
pub struct Selection {
    pub indices: Vec<usize>,
    /// Schreier value of the chosen member at its row's composable floor;
    /// these are the surrogates every later bound uses.
    pub surrogates: Vec<Rat>,
    /// Row-wide maximum at the same floor (the row's empirical index value).
    pub row_alpha: Vec<Rat>,
    /// Composable size floor per row.
    pub size_floors: Vec<u32>,
    pub size_thresholds: Vec<u32>,
    pub start_thresholds: Vec<usize>,
}

fn sch_value(
    x: &FinVec,
    space: &SpaceSpec,
    min_size: u32,
    max_len: u32,
    opts: &EngineOpts,
) -> Result<Rat> {
    Ok(engine::best_value(x, space, NodeClass::sch(min_size, max_len), opts)?.value)
}

/// Walks the rows in order, choosing one member per row. Per row: freeze the
/// composable floor, sweep the row's Schreier values at that floor, find a
/// size threshold whose values stay under (row max + eps/2n) for a streak,
/// then take the first member past the thresholds whose support clears
/// everything used so far and whose own value is within eps/2n of the row
/// max. Rows that cannot provide such a member abort with Exhausted.
pub fn select_indices(
    array: &SeqArray,
    space: &SpaceSpec,
    eps: &Rat,
    opts: &SelectOpts,
) -> Result<Selection> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    if opts.streak == 0 || opts.scan_cap == 0 || opts.s_schedule.is_empty() {
        return Err(Error::Precondition("selection needs a streak, a scan cap, and a schedule".into()));
    }
    let n = array.rows.len();
    let delta = eps.div_int(2 * n as u64);

    let mut sel = Selection {
        indices: Vec::with_capacity(n),
        surrogates: Vec::with_capacity(n),
        row_alpha: Vec::with_capacity(n),
        size_floors: Vec::with_capacity(n),
        size_thresholds: Vec::with_capacity(n),
        start_thresholds: Vec::with_capacity(n),
    };
    let mut n_prev = array.anchor_max_supp();
    let mut floor_prev = 0u32;

    for (ri, row) in array.rows.iter().enumerate() {
        let floor = opts.surrogate_s.max(n_prev + 1).max(floor_prev + 1);
        let cand: Vec<Rat> = row
            .members()
            .iter()
            .map(|m| sch_value(m, space, floor, opts.surrogate_len, &opts.engine))
            .collect::<Result<_>>()?;
        let row_alpha = cand.iter().cloned().fold(Rat::zero(), Rat::max);
        let target = &row_alpha + &delta;
        let len_budget = n_prev.max(1);
        let streak = opts.streak.min(row.len());

        let mut found = None;
        'schedule: for &s in &opts.s_schedule {
            let mut run = 0usize;
            for j in 1..=row.len().min(opts.scan_cap) {
                let v = sch_value(row.member(j), space, s, len_budget, &opts.engine)?;
                if v < target {
                    run += 1;
                    if run == streak {
                        found = Some((s, j + 1 - run));
                        break 'schedule;
                    }
                } else {
                    run = 0;
                }
            }
        }
        let (s_thr, q_thr) = found.ok_or_else(|| Error::Exhausted {
            row: ri + 1,
            reason: format!(
                "no size step in {:?} stayed under the row target {target} for {streak} members",
                opts.s_schedule
            ),
        })?;

        // the first pick also carries the row count, for admissibility of
        // the glued witness
        let supp_floor = if ri == 0 { s_thr.max(n as u32) } else { s_thr };
        let near = &row_alpha - &delta;
        let pick = (q_thr..=row.len())
            .find(|&j| {
                let m = row.member(j);
                m.min_supp().unwrap() > n_prev
                    && m.min_supp().unwrap() >= supp_floor
                    && cand[j - 1] >= near
            })
            .ok_or_else(|| Error::Exhausted {
                row: ri + 1,
                reason: format!(
                    "no member from {q_thr} on clears support floor {supp_floor} past index {n_prev} \
                     with value near the row maximum {row_alpha}"
                ),
            })?;

        n_prev = row.member(pick).max_supp().unwrap();
        floor_prev = floor;
        sel.indices.push(pick);
        sel.surrogates.push(cand[pick - 1].clone());
        sel.row_alpha.push(row_alpha);
        sel.size_floors.push(floor);
        sel.size_thresholds.push(s_thr);
        sel.start_thresholds.push(q_thr);
    }
    Ok(sel)
}

#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub selection: Selection,
    /// Norm of anchor + chosen members.
    pub a: Rat,
    pub lower: Rat,
    pub upper: Rat,
    /// Norms of the anchor (first, when present) and the chosen members.
    pub member_norms: Vec<Rat>,
    pub eps: Rat,
    pub pass: bool,
}

/// One norm call on the combined vector, sandwiched between
/// max(largest member norm, sum of surrogates) and twice that pair's sum,
/// within eps on both sides.
pub fn sandwich_check(
    array: &SeqArray,
    space: &SpaceSpec,
    eps: &Rat,
    opts: &SelectOpts,
) -> Result<SandwichReport> {
    let selection = select_indices(array, space, eps, opts)?;

    let mut combined = array.anchor.clone().unwrap_or_else(FinVec::empty);
    let mut member_norms = Vec::new();
    if let Some(a) = &array.anchor {
        member_norms.push(engine::norm(a, space, &opts.engine)?.value);
    }
    for (row, &j) in array.rows.iter().zip(&selection.indices) {
        let m = row.member(j);
        combined = combined.add(m);
        member_norms.push(engine::norm(m, space, &opts.engine)?.value);
    }
    let a = engine::norm(&combined, space, &opts.engine)?.value;

    let max_norm = member_norms.iter().cloned().fold(Rat::zero(), Rat::max);
    let surr_sum: Rat = selection.surrogates.iter().sum();
    let lower = max_norm.clone().max(surr_sum.clone());
    let upper = (max_norm + surr_sum).scale_int(2);
    let pass = &lower - eps <= a && a <= &upper + eps;

    Ok(SandwichReport { selection, a, lower, upper, member_norms, eps: eps.clone(), pass })
}

#[derive(Clone, Debug)]
pub struct SymReport {
    pub a: Rat,
    pub b: Rat,
    pub ratio: Rat,
    pub constant: Rat,
    pub eps: Rat,
    pub pass: bool,
    pub base: SandwichReport,
    pub permuted: SandwichReport,
}

/// Runs the sandwich estimate on the array and on the row-permuted array
/// (selection redone from scratch) and compares the two norms within the
/// fixed factor 4.
pub fn symmetry_check(
    array: &SeqArray,
    perm: &[usize],
    space: &SpaceSpec,
    eps: &Rat,
    opts: &SelectOpts,
) -> Result<SymReport> {
    let n = array.rows.len();
    let mut seen = perm.to_vec();
    seen.sort_unstable();
    if perm.len() != n || seen != (0..n).collect::<Vec<_>>() {
        return Err(Error::Precondition(format!(
            "perm {:?} is not a permutation of 0..{n}",
            perm
        )));
    }
    let base = sandwich_check(array, space, eps, opts)?;
    let rows = perm.iter().map(|&i| array.rows[i].clone()).collect();
    let permuted_array = SeqArray { anchor: array.anchor.clone(), rows };
    let permuted = sandwich_check(&permuted_array, space, eps, opts)?;

    let constant = Rat::new(4, 1);
    let (a, b) = (base.a.clone(), permuted.a.clone());
    let pass = &a <= &(&(&constant * &b) + eps) && &b <= &(&(&constant * &a) + eps);
    let ratio = &a / &b;
    Ok(SymReport { a, b, ratio, constant, eps: eps.clone(), pass, base, permuted })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpreadClass {
    C0Like,
    L1Like,
}

impl std::fmt::Display for SpreadClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpreadClass::C0Like => "C0_LIKE",
            SpreadClass::L1Like => "L1_LIKE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SpreadReport {
    pub indices: Vec<usize>,
    pub value: Rat,
    pub lower: Rat,
    pub upper: Rat,
    /// Row value at the widest profile point (large size, full length);
    /// drives the classification.
    pub surrogate: Rat,
    pub ones_value: Rat,
    pub fitted_c: Rat,
    pub class: SpreadClass,
    pub pass: bool,
}

/// Spreads `coeffs` along every `spacing`-th member from `start` (1-based)
/// and compares the exact norm against the two-sided bound built from the
/// empirical index value. The surrogate describes the whole row, so on rows
/// whose early members are much narrower than their late ones the lower
/// bound only holds once `start` passes the narrow stretch; a FAIL readout
/// there is the experiment reporting that inhomogeneity.
/// Classification: a surrogate under `trend_eps` reads as c0-like (the upper
/// bound collapses to twice the largest coefficient); otherwise l1-like with
/// the fitted per-pick value reported.
pub fn spreading_surrogate(
    seq: &BlockSeq,
    coeffs: &[Rat],
    start: usize,
    spacing: usize,
    space: &SpaceSpec,
    trend_eps: &Rat,
    opts: &SelectOpts,
) -> Result<SpreadReport> {
    if coeffs.is_empty() {
        return Err(Error::Precondition("spreading needs at least one coefficient".into()));
    }
    if start == 0 || spacing == 0 {
        return Err(Error::Precondition("start and spacing must be at least 1".into()));
    }
    let k = coeffs.len();
    let need = start + (k - 1) * spacing;
    if need > seq.len() {
        return Err(Error::Precondition(format!(
            "need member {need} but the sequence has {}",
            seq.len()
        )));
    }
    let indices: Vec<usize> = (0..k).map(|i| start + i * spacing).collect();
    let picks: Vec<FinVec> = indices.iter().map(|&j| seq.member(j).clone()).collect();

    let value = engine::norm(&FinVec::combine(coeffs, &picks)?, space, &opts.engine)?.value;
    let ones = vec![Rat::one(); k];
    let ones_value = if coeffs.iter().all(|c| *c == Rat::one()) {
        value.clone()
    } else {
        engine::norm(&FinVec::combine(&ones, &picks)?, space, &opts.engine)?.value
    };

    // widest profile point: largest default grid size, full length budget
    let mut surrogate = Rat::zero();
    for m in seq.members() {
        surrogate = surrogate.max(sch_value(m, space, 16, 3, &opts.engine)?);
    }

    let lam_max = coeffs.iter().map(Rat::abs).fold(Rat::zero(), Rat::max);
    let lam_sum: Rat = coeffs.iter().map(Rat::abs).sum();
    let weighted = &surrogate * &lam_sum;
    let lower = lam_max.clone().max(weighted.clone());
    let upper = (lam_max + weighted).scale_int(2);
    let pass = lower <= value && value <= upper;

    let fitted_c = ones_value.div_int(k as u64);
    let class =
        if surrogate < *trend_eps { SpreadClass::C0Like } else { SpreadClass::L1Like };
    Ok(SpreadReport { indices, value, lower, upper, surrogate, ones_value, fitted_c, class, pass })
}

#[derive(Clone, Debug)]
pub struct ModelCheck {
    pub coeffs: Vec<Rat>,
    pub value: Rat,
    pub lower: Rat,
    pub upper: Rat,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct AsModelReport {
    pub selection: Selection,
    /// Per-row weights: the surrogates frozen at selection time.
    pub weights: Vec<Rat>,
    pub checks: Vec<ModelCheck>,
    pub pass: bool,
}

/// Selects one member per row, reads off the per-row weights, and checks the
/// weighted two-sided estimate for every supplied coefficient vector. Rows
/// must be normalized (verified on the chosen members).
pub fn asymptotic_model_weights(
    array: &SeqArray,
    lambdas: &[Vec<Rat>],
    space: &SpaceSpec,
    eps: &Rat,
    opts: &SelectOpts,
) -> Result<AsModelReport> {
    let selection = select_indices(array, space, eps, opts)?;
    let picks: Vec<FinVec> = array
        .rows
        .iter()
        .zip(&selection.indices)
        .map(|(row, &j)| row.member(j).clone())
        .collect();
    for (i, pick) in picks.iter().enumerate() {
        let norm = engine::norm(pick, space, &opts.engine)?.value;
        if norm != Rat::one() {
            return Err(Error::NotNormalized { index: i + 1, norm: norm.to_string() });
        }
    }

    let weights = selection.surrogates.clone();
    let mut checks = Vec::with_capacity(lambdas.len());
    let mut pass = true;
    for coeffs in lambdas {
        if coeffs.len() != picks.len() {
            return Err(Error::LengthMismatch { left: coeffs.len(), right: picks.len() });
        }
        let value = engine::norm(&FinVec::combine(coeffs, &picks)?, space, &opts.engine)?.value;
        let lam_max = coeffs.iter().map(Rat::abs).fold(Rat::zero(), Rat::max);
        let weighted: Rat = weights.iter().zip(coeffs).map(|(w, c)| w * &c.abs()).sum();
        let lower = lam_max.clone().max(weighted.clone());
        let upper = (lam_max + weighted).scale_int(2);
        let ok = lower <= value && value <= upper;
        pass &= ok;
        checks.push(ModelCheck { coeffs: coeffs.clone(), value, lower, upper, pass: ok });
    }
    Ok(AsModelReport { selection, weights, checks, pass })
}
