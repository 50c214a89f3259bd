//! Closed-form coverage chain: association, serving distance, interference
//! Laplace transform and SIR coverage.

mod association;
mod coverage;
mod laplace;

pub use association::{association_prob, r_max, serving_cdf, serving_joint_pdf, serving_pdf};
pub use coverage::{
    conditional_coverage, coverage_probability, joint_coverage, CoverageQuery, CoverageResult,
};
pub use laplace::{
    laplace_exponent, laplace_terms, laplace_transform_derivatives, LaplaceExponentTerms,
    Population,
};

/// Which tier serves the typical receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// Served by a tier-1 node.
    E1,
    /// Served by a tier-2 node on the receiver's own line.
    E2,
}

impl Event {
    pub const BOTH: [Event; 2] = [Event::E1, Event::E2];

    pub fn index(self) -> usize {
        match self {
            Event::E1 => 0,
            Event::E2 => 1,
        }
    }
}
