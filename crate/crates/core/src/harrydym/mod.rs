pub mod inner;
pub mod outer;

pub use inner::{assemble_rk, inner_eval, inner_residual, solve_g0, solve_gk, solve_hierarchy, InnerEval, InnerSolution};
pub use outer::{hd_outer_coeffs, hd_outer_eval, OuterEval, OuterSeries};
