//! Two-sided bounds with rigor grades and inline certificates.

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rigor {
    /// Proven from a verified witness or an exact algorithm.
    Rigorous,
    /// Backed by search only.
    Heuristic,
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    #[default]
    None,
    /// Closed-form or exact-algorithm value; the string names the argument.
    Exact { reason: String },
    /// Trivial bound from the ambient dimension or a general inequality.
    Trivial { reason: String },
    /// Orthonormal vectors (columns) witnessing an independent set, clique or full projection.
    Vectors { kind: String, vectors: ComplexMatrix },
    /// A PSD matrix in a convex corner, or a feasible point of a relaxation.
    Matrix { description: String, matrix: ComplexMatrix },
    /// An SDP value over a restricted family of constraints.
    Relaxation { description: String, constraints: usize },
    /// A channel (Kraus operators) with a state, for θ̂-type bounds.
    ChannelState { kraus: Vec<ComplexMatrix>, sigma: ComplexMatrix },
    /// Free-form justification.
    Note { text: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_rigor: Rigor,
    pub upper_rigor: Rigor,
    pub lower_certificate: Certificate,
    pub upper_certificate: Certificate,
}

impl BoundInterval {
    pub fn new(lower: f64, lower_rigor: Rigor, lower_certificate: Certificate, upper: f64, upper_rigor: Rigor, upper_certificate: Certificate) -> Self {
        Self { lower, upper, lower_rigor, upper_rigor, lower_certificate, upper_certificate }
    }

    /// Both sides equal and rigorous.
    pub fn exact(value: f64, reason: impl Into<String>) -> Self {
        let reason = reason.into();
        Self::new(
            value,
            Rigor::Rigorous,
            Certificate::Exact { reason: reason.clone() },
            value,
            Rigor::Rigorous,
            Certificate::Exact { reason },
        )
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_collapsed(&self, tol: f64) -> bool {
        self.width().abs() <= tol
    }

    pub fn is_rigorous(&self) -> bool {
        self.lower_rigor == Rigor::Rigorous && self.upper_rigor == Rigor::Rigorous
    }

    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + 1e-6
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lower - tol <= v && v <= self.upper + tol
    }

    /// Intersection of two valid brackets for the same quantity; keeps the better side of each.
    pub fn tighten(self, other: BoundInterval) -> BoundInterval {
        let (lower, lower_rigor, lower_certificate) = if other.lower > self.lower {
            (other.lower, other.lower_rigor, other.lower_certificate)
        } else {
            (self.lower, self.lower_rigor, self.lower_certificate)
        };
        let (upper, upper_rigor, upper_certificate) = if other.upper < self.upper {
            (other.upper, other.upper_rigor, other.upper_certificate)
        } else {
            (self.upper, self.upper_rigor, self.upper_certificate)
        };
        BoundInterval { lower, upper, lower_rigor, upper_rigor, lower_certificate, upper_certificate }
    }
}
