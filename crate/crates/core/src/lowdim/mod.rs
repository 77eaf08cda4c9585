//! Low-dimensional structure: the explicit relations for `m = 2, 3`, the Euler weights
//! of `h`, and the two-dimensional positivity equation.

mod relations;
mod tt2d;

pub use relations::{
    check_euler_weights, check_euler_weights_canonical, check_m2_relations, check_m3_relations, LowDimRelationsInput,
};
pub use tt2d::{node_residuals, solve_tt2d, tt2d_residual, Boundary, Grid, InitialGuess, Tt2dOptions, Tt2dSolution};
