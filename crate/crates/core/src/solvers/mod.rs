//! LP and SDP back ends sized for desk-scale problems.

pub mod lp;
pub mod sdp;

pub use lp::{lp_solve, LinearProgram, LpError, LpSolution, LpStatus, Sense, VarBound};
pub use sdp::{sdp_solve, SdpError, SdpSettings, SdpSolution, SdpStatus, SemidefiniteProgram, SymEntry};
