//! Small dense numerical kernels: simplex geometry, linear and semidefinite
//! programming, eigenvalues, and a max-min ascent on products of simplices.

pub mod linalg;
pub mod lp;
pub mod minimax;
pub mod sdp;
pub mod simplex;

pub use linalg::min_eigenvalue;
pub use lp::{solve_lp, LpProblem, LpSolution, Relation};
pub use minimax::{exchange_polish, maximize_min, snap_polish, MinimaxOptions, MinimaxResult, Piece};
pub use sdp::{solve_sdp, SdpOptions, SdpProblem, SdpSolution, SparseSym};
pub use simplex::{maximize_concave_on_simplex, project_simplex, Ascent, AscentOptions, SimplexPoint};
