//! Isotopies of the unit disk: specs, evaluation and sampling.

mod eval;
mod geom;
mod sample;
mod spec;

pub(crate) use eval::path_frames;
pub use eval::{endpoint, endpoint_map, evaluate_path, frame_at, uniform_grid, FrameTrajectory, TOL_AREA};
pub use geom::{Frame, Mat2, Point, TOL_BOUNDARY};
pub use sample::{mix_seed, sample_disk, sample_point, stream_rng};
pub use spec::{
    group_op, CompositeMode, GroupOp, HamiltonianFamily, HamiltonianJet, HamiltonianSpec, IsotopySpec, TwistProfile,
    DEFAULT_STEPS,
};
