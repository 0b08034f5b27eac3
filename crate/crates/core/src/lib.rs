//! Exact signed-measure computations deciding weighted K-polystability of
//! rank-two spherical Fano varieties whose valuation cone is a half-plane.

pub mod geometry;
pub mod measures;
pub mod poly;
pub mod stability;
pub mod weights;

pub use geometry::{GeometryError, MomentPolytope, Point, Slice};
pub use measures::{CaseData, CaseKind, MeasureError, MeasureKind, MeasurePair, SignedMeasure};
pub use poly::{PiecewisePoly, PolyError, Polynomial, Rational};
pub use stability::{
    Certificate, Classification, LogPairThreshold, StabilityError, StabilityVerdict, ThresholdResult,
};
pub use weights::{ClosedFormCase, PairingMethod, PairingResult, WeightError, WeightSpec};
