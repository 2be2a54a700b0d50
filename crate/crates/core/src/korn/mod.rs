//! Estimates of the optimal Korn constants on discretized thin domains,
//! scaling fits, and the extension and subdivision checks.

mod eigen;
mod extension;
mod fit;
mod korn2;
mod nodal;
mod subdivision;

pub use eigen::{dense_top, lanczos_top, TopEigen};
pub use extension::{
    extension_check, extension_check_with, Box3, CartesianField, ExtensionReport, HarmonicGradient, NestedBoxPair,
    Rescaled, RigidMotion, ShearedRotation, EXTENSION_CELLS,
};
pub use fit::{fit_scaling, ScalingFit};
pub use korn2::{
    interpolation_constant, korn2_constant_p2, korn2_estimate, span_forms, FieldSpace, Korn2Estimate, EIGEN_TOL,
};
pub use nodal::{Assembled, NodalSpace, MIN_DIM};
pub use subdivision::{
    subdivision_run, subdivision_run_with, PieceStats, SubdivisionReport, CELLS_PER_PIECE, THICKNESS_CELLS,
};
