//! Bath-model comparison: the periodic Hilbert transform, the nonlocal
//! euclidean action of an ohmic bath and relaxation to its bounce.

mod action;
mod compare;
mod path;
mod relax;

pub use action::{
    action_parts, effective_action, hilbert_transform, instanton_residual, ActionParts,
    HilbertOutput, OhmicKernel,
};
pub use compare::{
    compare_exponents, period_convergence, relax_barrier, trend_signs, ExponentRow, ExponentTable,
    PeriodCheck,
};
pub use path::{PathGrid, PathProfile};
pub use relax::{bump_guess, relax_instanton, RelaxOptions, Relaxed};
