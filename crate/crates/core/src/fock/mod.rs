//! Truncated Fock-space engine.
//!
//! States live on a product basis with a cutoff per mode, mode 0 being the
//! most significant index. Generators are exponentiated in a padded space and
//! cropped; every weight lost that way is accumulated as a trace deficit.

mod array;
mod basis;
mod gate;
mod map;
mod moments;
mod nongauss;
mod sparse;

pub use array::{
    build_state, coherent_amplitudes, relative_entropy, von_neumann_entropy, FockArray, FockConfig, FockData,
    FockKind, StateKind, DEFAULT_CUTOFF,
};
pub use basis::{density_expectation, ket_expectation, ladder, Ladder, Word};
pub use gate::{build_unitary, padded, Gate, PreparedGate};
pub use map::{apply_map, ConditionalMap, KrausKind, KrausOp, MapBody, MapOutput};
pub use moments::{covariance_from_moments, expectations, moments, MomentRecord, ModeMoments, PairMoments};
pub use nongauss::{delta_g, delta_g_relative, gaussian_to_fock, gaussian_to_fock_dims, gaussify};
pub(crate) use basis::resize as resize_ket;
