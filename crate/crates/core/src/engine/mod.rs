//! Exact norm and constrained best-value computation.
//!
//! `norm` computes `sup f(x)` over the whole functional set; `best_value`
//! restricts the supremum to a [`NodeClass`]. Both return the exact rational
//! value together with a certifying witness tree that validates and
//! evaluates back to the value.
//!
//! The search runs on |x| with positive leaves (the norm is invariant under
//! coordinate sign flips, and flipping the matching leaf signs recovers a
//! witness for x itself) and only considers trees with leaves inside
//! supp(x), which the restriction closure of the functional set justifies.
//!
//! `oracle` holds an independent brute-force enumerator used to corroborate
//! the DP on small supports.

mod dp;
pub mod oracle;

use std::time::{Duration, Instant};

use crate::class::NodeClass;
use crate::rat::Rat;
use crate::space::SpaceSpec;
use crate::tree::{FunctionalTree, Sign};
use crate::vector::FinVec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineOpts {
    /// Largest declared size the search may use. `None`: unbounded.
    pub size_cap: Option<u32>,
    /// Largest tree nesting depth (a leaf has depth 1). `None`: unbounded.
    pub depth_cap: Option<u32>,
    /// Abort past this many solved subproblems. `None`: no guard.
    pub node_budget: Option<u64>,
}

impl EngineOpts {
    fn check(&self) -> Result<()> {
        if self.size_cap == Some(0) {
            return Err(Error::Precondition("size cap must be at least 1".into()));
        }
        if self.depth_cap == Some(0) {
            return Err(Error::Precondition("depth cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub subproblems: u64,
    pub memo_hits: u64,
    /// Wall time of the call. Excluded from serialized reports so reruns
    /// stay byte-identical.
    pub wall: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormResult {
    pub value: Rat,
    pub witness: FunctionalTree,
    pub stats: EngineStats,
}

/// `sup f(x)` over the functional set, exact, with witness.
///
/// The empty vector has norm 0 with the zero functional as witness.
pub fn norm(x: &FinVec, space: &SpaceSpec, opts: &EngineOpts) -> Result<NormResult> {
    if x.is_empty() {
        space.check()?;
        opts.check()?;
        return Ok(NormResult {
            value: Rat::zero(),
            witness: FunctionalTree::Empty,
            stats: EngineStats::default(),
        });
    }
    best_value(x, space, NodeClass::Any, opts)
}

/// `sup f(x)` over the sub-family selected by `cls`, exact, with witness.
pub fn best_value(
    x: &FinVec,
    space: &SpaceSpec,
    cls: NodeClass,
    opts: &EngineOpts,
) -> Result<NormResult> {
    space.check()?;
    opts.check()?;
    if x.is_empty() {
        return Err(Error::Precondition("best_value needs a nonempty vector".into()));
    }
    if let NodeClass::Sch { max_len: Some(0), .. } = cls {
        return Err(Error::EmptyFamily("Schreier class with length bound 0".into()));
    }

    let start = Instant::now();
    let (pts, coeff): (Vec<u32>, Vec<Rat>) =
        x.entries().iter().map(|(i, c)| (*i, c.abs())).unzip();
    let mut solver =
        dp::Solver::new(pts, coeff, space, opts.size_cap, opts.node_budget);
    let dl = opts.depth_cap.unwrap_or(dp::UNCAPPED);

    let solved = match cls {
        NodeClass::Any => Some(solver.solve_any(dl)?),
        NodeClass::Avg { min_size } => solver.solve_avg(min_size, dl)?,
        NodeClass::Sch { min_size, max_len } => {
            solver.solve_sch(min_size, max_len.unwrap_or(dp::UNCAPPED), dl)?
        }
    };
    let Some((value, positive_witness)) = solved else {
        return Err(Error::EmptyFamily(format!("no functional in {cls} fits the caps")));
    };

    let witness = match_signs(&positive_witness, x);
    let stats = EngineStats {
        subproblems: solver.subproblems,
        memo_hits: solver.memo_hits,
        wall: start.elapsed(),
    };
    debug_assert_eq!(witness.evaluate(x, space).unwrap(), value);
    Ok(NormResult { value, witness, stats })
}

/// Flips each positive leaf to the sign of the matching coordinate of `x`,
/// turning a witness for |x| into one for `x`.
fn match_signs(tree: &FunctionalTree, x: &FinVec) -> FunctionalTree {
    match tree {
        FunctionalTree::Empty => FunctionalTree::Empty,
        FunctionalTree::Leaf { index, .. } => FunctionalTree::Leaf {
            index: *index,
            sign: Sign::of(&x.coeff(*index)),
        },
        FunctionalTree::Avg { size, children } => FunctionalTree::Avg {
            size: *size,
            children: children.iter().map(|c| match_signs(c, x)).collect(),
        },
        FunctionalTree::Sch { children } => FunctionalTree::Sch {
            children: children.iter().map(|c| match_signs(c, x)).collect(),
        },
    }
}
