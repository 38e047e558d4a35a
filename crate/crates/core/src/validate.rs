//! Membership checking: does a tree denote an element of the norming set?
//!
//! `evaluate` already polices the structural rules it needs; this walk
//! re-checks those and additionally the two side conditions that define the
//! set, collecting every violation with its node path instead of stopping at
//! the first:
//!
//! * admissibility: a Schreier sum of length k needs k at most the smallest
//!   support point of its first summand;
//! * very fast growth: along a Schreier sum the declared sizes strictly
//!   increase, and each summand's size exceeds the previous summand's
//!   largest support point.
//!
//! Each side condition is checked only while the corresponding flag in the
//! space is on. The zero functional passes as a whole tree and fails inside
//! a node.

use std::fmt;

use crate::space::SpaceSpec;
use crate::tree::FunctionalTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    LeafIndexZero,
    ZeroSize,
    NoChildren,
    ArityOverSize { arity: usize, size: u32 },
    NotSuccessive { prev_max: u32, next_min: u32 },
    EmptySupportChild,
    NestedZero,
    SchChildNotAvg,
    NotAdmissible { len: usize, first_min: u32 },
    SizeNotIncreasing { prev: u32, next: u32 },
    SizeBelowPrevSupport { size: u32, prev_max: u32 },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ViolationKind::*;
        match self {
            LeafIndexZero => write!(f, "leaf index 0"),
            ZeroSize => write!(f, "average size 0"),
            NoChildren => write!(f, "node with no children"),
            ArityOverSize { arity, size } => {
                write!(f, "arity {arity} exceeds declared size {size}")
            }
            NotSuccessive { prev_max, next_min } => {
                write!(f, "children not successive ({prev_max} then {next_min})")
            }
            EmptySupportChild => write!(f, "child with empty support"),
            NestedZero => write!(f, "zero functional inside a node"),
            SchChildNotAvg => write!(f, "Schreier child is not an average"),
            NotAdmissible { len, first_min } => {
                write!(f, "length {len} exceeds first summand's min support {first_min}")
            }
            SizeNotIncreasing { prev, next } => {
                write!(f, "sizes not strictly increasing ({prev} then {next})")
            }
            SizeBelowPrevSupport { size, prev_max } => {
                write!(f, "size {size} not above previous summand's max support {prev_max}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Dotted child-index path from the root, e.g. `root.0.2`.
    pub path: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.kind)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            write!(f, "PASS")
        } else {
            writeln!(f, "FAIL")?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

pub fn validate(tree: &FunctionalTree, space: &SpaceSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut path = Vec::new();
    walk(tree, space, true, &mut path, &mut report);
    report
}

fn push(report: &mut ValidationReport, path: &[usize], kind: ViolationKind) {
    let mut p = String::from("root");
    for k in path {
        p.push('.');
        p.push_str(&k.to_string());
    }
    report.violations.push(Violation { kind, path: p });
}

fn walk(
    tree: &FunctionalTree,
    space: &SpaceSpec,
    root: bool,
    path: &mut Vec<usize>,
    report: &mut ValidationReport,
) {
    match tree {
        FunctionalTree::Empty => {
            if !root {
                push(report, path, ViolationKind::NestedZero);
            }
        }
        FunctionalTree::Leaf { index, .. } => {
            if *index == 0 {
                push(report, path, ViolationKind::LeafIndexZero);
            }
        }
        FunctionalTree::Avg { size, children } => {
            if *size == 0 {
                push(report, path, ViolationKind::ZeroSize);
            }
            if children.is_empty() {
                push(report, path, ViolationKind::NoChildren);
            } else if children.len() as u64 > *size as u64 && *size > 0 {
                push(
                    report,
                    path,
                    ViolationKind::ArityOverSize { arity: children.len(), size: *size },
                );
            }
            check_successive(children, path, report);
            recurse(children, space, path, report);
        }
        FunctionalTree::Sch { children } => {
            if children.is_empty() {
                push(report, path, ViolationKind::NoChildren);
                return;
            }
            let mut all_avg = true;
            for (k, c) in children.iter().enumerate() {
                if !c.is_avg() && !c.is_empty() {
                    path.push(k);
                    push(report, path, ViolationKind::SchChildNotAvg);
                    path.pop();
                    all_avg = false;
                }
            }
            check_successive(children, path, report);

            if space.enforce_admissible {
                if let Some((lo, _)) = children[0].support_range() {
                    if children.len() as u64 > lo as u64 {
                        push(
                            report,
                            path,
                            ViolationKind::NotAdmissible {
                                len: children.len(),
                                first_min: lo,
                            },
                        );
                    }
                }
            }

            if space.enforce_vfg && all_avg {
                for k in 1..children.len() {
                    let (Some(prev), Some(next)) =
                        (children[k - 1].declared_size(), children[k].declared_size())
                    else {
                        continue;
                    };
                    if next <= prev {
                        path.push(k);
                        push(report, path, ViolationKind::SizeNotIncreasing { prev, next });
                        path.pop();
                    }
                    if let Some((_, prev_max)) = children[k - 1].support_range() {
                        if next <= prev_max {
                            path.push(k);
                            push(
                                report,
                                path,
                                ViolationKind::SizeBelowPrevSupport { size: next, prev_max },
                            );
                            path.pop();
                        }
                    }
                }
            }

            recurse(children, space, path, report);
        }
    }
}

fn recurse(
    children: &[FunctionalTree],
    space: &SpaceSpec,
    path: &mut Vec<usize>,
    report: &mut ValidationReport,
) {
    for (k, c) in children.iter().enumerate() {
        path.push(k);
        walk(c, space, false, path, report);
        path.pop();
    }
}

fn check_successive(children: &[FunctionalTree], path: &mut Vec<usize>, report: &mut ValidationReport) {
    let mut prev_hi: Option<u32> = None;
    for (k, c) in children.iter().enumerate() {
        let Some((lo, hi)) = c.support_range() else {
            path.push(k);
            push(report, path, ViolationKind::EmptySupportChild);
            path.pop();
            continue;
        };
        if let Some(p) = prev_hi {
            if lo <= p {
                path.push(k);
                push(report, path, ViolationKind::NotSuccessive { prev_max: p, next_min: lo });
                path.pop();
            }
        }
        prev_hi = Some(hi);
    }
}
