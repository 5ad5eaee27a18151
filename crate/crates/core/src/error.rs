use thiserror::Error;

/// Errors shared by the graph, group and separator layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pair ({0}, {1}) is not admissible")]
    NotAdmissible(usize, usize),

    #[error("graph is not an immersion")]
    NotImmersion,

    #[error("{what}: cap of {cap} exceeded{}", order_hint(.order))]
    CapExceeded {
        what: &'static str,
        cap: usize,
        order: Option<u128>,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("alphabet mismatch: expected {expected} symbols, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    /// A step that the product theorem guarantees did not go through.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn order_hint(order: &Option<u128>) -> String {
    match order {
        Some(n) => format!(" (order {n})"),
        None => String::new(),
    }
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
