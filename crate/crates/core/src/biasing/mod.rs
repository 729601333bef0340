//! Size-bias couplings for the index and zero-bias transforms for summands.

mod coupling;
mod size_bias;
mod zero_bias;

pub use coupling::{
    coupling_statistics, make_coupling, read_joint_csv, CouplingKind, CouplingStatistics, JointAtom, JointPmf,
    Provenance, SizeBiasCoupling, StatisticsMode, MAX_JOINT_ATOMS,
};
pub use size_bias::{size_bias_distance_identities, size_bias_pmf, SizeBiasDistances};
pub use zero_bias::{non_zero_bias_sample, sum_non_zero_bias, zero_bias_density, NonZeroBias, StepDensity};
