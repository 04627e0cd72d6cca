use core::fmt;

/// Errors shared across the crate. Variants mirror the failure modes of the
/// individual operations; callers that can recover (e.g. the glancing set)
/// match on the variant.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// |trace| <= 2 where a hyperbolic element was required.
    NonHyperbolic,
    /// Two geodesics share an endpoint, or a crossing is tangential within
    /// tolerance; the caller decides policy near the glancing set.
    Degenerate,
    /// Word operation on an empty word.
    EmptyWord,
    /// Enumeration exceeded its node budget.
    BudgetExceeded { visited: u64, budget: u64 },
    /// Intersection vector not realizable by any admissible path.
    NotAdmissible,
    /// Marked-curve configuration outside the shipped set.
    UnsupportedConfiguration,
    /// Translate enumeration did not stabilize within the radius cap.
    RadiusOverflow,
    /// Admissible path requested for a class with no crossings.
    EmptyPath,
    /// Region labeling hit a point within tolerance of a multicurve lift.
    LabelingAmbiguity,
    /// Scattering ray meets a curve lift tangentially within tolerance.
    Glancing,
    /// Doubled-surface table has an odd cell; the 2:1 correspondence is exact,
    /// so this signals a bug upstream.
    OddCount { n: usize, count: u64 },
    /// Not enough data in the requested window for a fit or statistic.
    InsufficientData,
    /// A concrete surface model failed its defining checks.
    ConstructionFailure,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonHyperbolic => write!(f, "element is not hyperbolic"),
            Error::Degenerate => write!(f, "degenerate incidence (shared endpoint or tangency)"),
            Error::EmptyWord => write!(f, "empty word"),
            Error::BudgetExceeded { visited, budget } => {
                write!(f, "node budget exceeded ({visited} visited, budget {budget})")
            }
            Error::NotAdmissible => write!(f, "intersection vector is not admissible"),
            Error::UnsupportedConfiguration => write!(f, "unsupported marked-curve configuration"),
            Error::RadiusOverflow => write!(f, "translate enumeration did not stabilize"),
            Error::EmptyPath => write!(f, "class has no crossings"),
            Error::LabelingAmbiguity => write!(f, "point too close to a multicurve lift"),
            Error::Glancing => write!(f, "glancing incidence"),
            Error::OddCount { n, count } => {
                write!(f, "odd doubled count N_double({n}) = {count}")
            }
            Error::InsufficientData => write!(f, "insufficient data in window"),
            Error::ConstructionFailure => write!(f, "surface construction failed validation"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
