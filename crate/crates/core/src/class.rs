//! Constraint classes for best-value queries.

/// Which functionals a best-value search ranges over.
///
/// `Avg` restricts to average nodes with declared size at least `min_size`.
/// `Sch` restricts to Schreier-sum nodes whose leading declared size is at
/// least `min_size` and whose length (number of summands) is at most
/// `max_len`; `None` leaves the length unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Any,
    Avg { min_size: u32 },
    Sch { min_size: u32, max_len: Option<u32> },
}

impl NodeClass {
    pub fn sch(min_size: u32, max_len: u32) -> NodeClass {
        NodeClass::Sch { min_size, max_len: Some(max_len) }
    }
}

impl std::fmt::Display for NodeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeClass::Any => write!(f, "any"),
            NodeClass::Avg { min_size } => write!(f, "avg(size>={min_size})"),
            NodeClass::Sch { min_size, max_len: Some(l) } => {
                write!(f, "sch(size>={min_size},len<={l})")
            }
            NodeClass::Sch { min_size, max_len: None } => {
                write!(f, "sch(size>={min_size})")
            }
        }
    }
}
