//! Exact 2-descent and congruent-number toolkit for curves y^2 = x(x^2 + A).

pub mod congruent;
pub mod curve;
pub mod descent;
pub mod error;
pub mod exactnum;
pub mod families;
pub mod isogeny;

pub use curve::{CurveA, CurvePoint, TorsionVerdict, TwoTorsionKind};
pub use error::{Error, Result};
pub use exactnum::{Int, Rat, SquareClass};
