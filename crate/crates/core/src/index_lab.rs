//! Empirical index sweeps and the averaging bound check.
//!
//! The index surrogate of a sequence measures how much Schreier-type mass a
//! tail of the sequence still supports: at each grid point (minimum declared
//! size, length budget, tail start) we take the best constrained value over
//! the tail members. Large declared sizes are exactly where the distinction
//! lives, so the trend is judged at the grid's extreme point. The trend is a
//! diagnostic about the computed window, not a claim about the limit.

use crate::class::NodeClass;
use crate::engine::oracle::{Kind, Oracle, OracleOpts};
use crate::engine::{self, EngineOpts};
use crate::rat::Rat;
use crate::report::Report;
use crate::seq_lab::BlockSeq;
use crate::space::SpaceSpec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPoint {
    /// Smallest declared size the Schreier element may use.
    pub s_min: u32,
    /// Summand budget of the Schreier element.
    pub max_len: u32,
    /// 1-based first member of the tail swept.
    pub tail_start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trend {
    /// The judgment point's value fell under eps.
    Vanishing,
    /// Every grid value stayed above eps; carries the smallest one.
    BoundedBelow(Rat),
    Inconclusive,
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Trend::Vanishing => f.write_str("VANISHING"),
            Trend::BoundedBelow(v) => write!(f, "BOUNDED_BELOW({v})"),
            Trend::Inconclusive => f.write_str("INCONCLUSIVE"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AlphaProfile {
    /// Grid points with their sweep values, in grid order.
    pub entries: Vec<(GridPoint, Rat)>,
    pub trend: Trend,
    pub eps: Rat,
}

impl AlphaProfile {
    /// The entry the trend was judged at: lexicographically largest
    /// (s_min, tail_start, max_len), i.e. hardest size with the latest tail.
    pub fn judgment(&self) -> &(GridPoint, Rat) {
        self.entries
            .iter()
            .max_by_key(|(g, _)| (g.s_min, g.tail_start, g.max_len))
            .expect("profiles hold at least one entry")
    }

    pub fn report(&self) -> Report {
        let mut rep = Report::new(["s_min", "maxLen", "tailStart", "value_num", "value_den"]);
        rep.meta("eps", &self.eps);
        for (g, v) in &self.entries {
            rep.row([
                g.s_min.to_string(),
                g.max_len.to_string(),
                g.tail_start.to_string(),
                v.numer().to_string(),
                v.denom().to_string(),
            ]);
        }
        rep.footer(format!("trend = {}", self.trend));
        rep
    }
}

/// Doubling sizes, length budgets to 3, and two tail starts: the full
/// sequence and its back half.
pub fn default_grid(members: usize) -> Vec<GridPoint> {
    assert!(members >= 1);
    let mut tails = vec![1, members.div_ceil(2)];
    tails.dedup();
    let mut grid = Vec::new();
    for s_min in [2u32, 4, 8, 16] {
        for max_len in [1u32, 2, 3] {
            for &tail_start in &tails {
                grid.push(GridPoint { s_min, max_len, tail_start });
            }
        }
    }
    grid
}

/// Sweeps the grid: the value at a point is the best constrained Schreier
/// value any tail member attains. Values are nonincreasing in s_min and
/// nondecreasing in max_len, pointwise.
pub fn empirical_alpha_tilde(
    seq: &BlockSeq,
    space: &SpaceSpec,
    grid: &[GridPoint],
    eps: &Rat,
    opts: &EngineOpts,
) -> Result<AlphaProfile> {
    if grid.is_empty() {
        return Err(Error::Precondition("the profile grid is empty".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    for g in grid {
        if g.s_min < 1 || g.max_len < 1 {
            return Err(Error::Precondition(format!(
                "grid point ({}, {}, {}) needs positive size and length",
                g.s_min, g.max_len, g.tail_start
            )));
        }
        if g.tail_start < 1 || g.tail_start > seq.len() {
            return Err(Error::Precondition(format!(
                "tail start {} outside 1..={}",
                g.tail_start,
                seq.len()
            )));
        }
    }

    let mut entries = Vec::with_capacity(grid.len());
    for g in grid {
        let mut best = Rat::zero();
        for j in g.tail_start..=seq.len() {
            let v = engine::best_value(
                seq.member(j),
                space,
                NodeClass::sch(g.s_min, g.max_len),
                opts,
            )?
            .value;
            best = best.max(v);
        }
        entries.push((*g, best));
    }

    let judged = entries
        .iter()
        .max_by_key(|(g, _)| (g.s_min, g.tail_start, g.max_len))
        .expect("nonempty grid")
        .1
        .clone();
    let min = entries.iter().map(|(_, v)| v.clone()).fold(None::<Rat>, |acc, v| {
        Some(match acc {
            None => v,
            Some(a) => a.min(v),
        })
    });
    let min = min.expect("nonempty grid");
    let trend = if judged < *eps {
        Trend::Vanishing
    } else if min > *eps {
        Trend::BoundedBelow(min)
    } else {
        Trend::Inconclusive
    };
    Ok(AlphaProfile { entries, trend, eps: eps.clone() })
}

#[derive(Clone, Debug)]
pub struct AvgBoundOpts {
    /// Largest declared average size enumerated.
    pub max_size: u32,
    /// Nesting depth cap of the enumeration (leaves count 1).
    pub max_depth: u32,
    /// Accept members of any norm; the bound is scaled by the largest one.
    pub unnormalized: bool,
    pub node_budget: Option<u64>,
    /// Used for the member norm precondition only.
    pub engine: EngineOpts,
}

impl Default for AvgBoundOpts {
    fn default() -> AvgBoundOpts {
        AvgBoundOpts {
            max_size: 8,
            max_depth: 3,
            unnormalized: false,
            node_budget: None,
            engine: EngineOpts::default(),
        }
    }
}

/// One checked average that came close to (or broke) the bound.
#[derive(Clone, Debug)]
pub struct AvgCase {
    pub size: u32,
    pub value: Rat,
    pub bound: Rat,
}

#[derive(Clone, Debug)]
pub struct AvgBoundReport {
    /// Number of members averaged.
    pub members: usize,
    /// Largest member norm; 1 when the normalization precondition ran.
    pub scale: Rat,
    /// Average elements checked.
    pub checked: usize,
    /// The case with the least slack (bound - value).
    pub tightest: Option<AvgCase>,
    /// Bound violations; any entry here means a defect in the norming-set
    /// closure itself, not in the inputs.
    pub violations: Vec<AvgCase>,
    pub pass: bool,
}

/// Checks |f(y)| <= scale * (1/size(f) + 2/n) for every enumerated average
/// f up to the caps, where y averages the n members of `xs`.
///
/// The enumeration generates positive-leaf elements; since an average's
/// coefficients are a fixed sign pattern over products of its scaling
/// factors, the positive element evaluated at |y| dominates every signed
/// variant at y, so this checks the signed claim in full.
pub fn average_bound_check(
    xs: &BlockSeq,
    space: &SpaceSpec,
    opts: &AvgBoundOpts,
) -> Result<AvgBoundReport> {
    let n = xs.len();
    let mut scale = Rat::one();
    if opts.unnormalized {
        let mut m = Rat::zero();
        for x in xs.members() {
            m = m.max(engine::norm(x, space, &opts.engine)?.value);
        }
        scale = m;
    } else {
        for (i, x) in xs.members().iter().enumerate() {
            let norm = engine::norm(x, space, &opts.engine)?.value;
            if norm != Rat::one() {
                return Err(Error::NotNormalized { index: i + 1, norm: norm.to_string() });
            }
        }
    }

    let mut sum = crate::vector::FinVec::empty();
    for x in xs.members() {
        sum = sum.add(x);
    }
    let y = sum.scale(&Rat::one().div_int(n as u64)).abs();
    let pts: Vec<u32> = y.support().collect();
    let coeffs: Vec<Rat> = y.entries().iter().map(|(_, c)| c.clone()).collect();

    let mut oracle = Oracle::new(
        space.clone(),
        OracleOpts { depth_cap: opts.max_depth, size_cap: opts.max_size, node_budget: opts.node_budget },
    );
    let fam = oracle.family(&pts)?;

    let two_over_n = Rat::new(2, n as i64);
    let mut checked = 0usize;
    let mut tightest: Option<AvgCase> = None;
    let mut violations = Vec::new();
    for e in &fam.elems {
        if e.kind != Kind::Avg {
            continue;
        }
        let value = fam.value_on(e, &coeffs);
        let bound = &(&Rat::one().div_int(e.size as u64) + &two_over_n) * &scale;
        checked += 1;
        let case = AvgCase { size: e.size, value: value.clone(), bound: bound.clone() };
        if value > bound {
            violations.push(case);
        } else {
            // total order so the winner is independent of enumeration order
            let key = |c: &AvgCase| (&c.bound - &c.value, c.size, c.value.clone());
            let tighter = match &tightest {
                None => true,
                Some(t) => key(&case) < key(t),
            };
            if tighter {
                tightest = Some(case);
            }
        }
    }
    violations.sort_by_key(|c| (&c.bound - &c.value, c.size, c.value.clone()));
    let pass = violations.is_empty() && checked > 0;
    Ok(AvgBoundReport { members: n, scale, checked, tightest, violations, pass })
}
