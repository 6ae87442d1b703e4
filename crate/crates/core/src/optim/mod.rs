//! Small solver kit: assignment, 1-D and 2-D concave maximization,
//! fractional programming, and brute-force oracles to check them.

mod dinkelbach;
mod golden;
mod hungarian;
pub mod oracle;
mod region;

pub use dinkelbach::{dinkelbach, DinkelbachOptions, DinkelbachOutcome, DinkelbachStep, FractionalProgram};
pub use golden::{golden_section_max, DEFAULT_TOL as GOLDEN_DEFAULT_TOL};
pub use hungarian::{hungarian, Assignment};
pub use region::{concave_max_box, HalfPlane, Maximum2, Region2};
