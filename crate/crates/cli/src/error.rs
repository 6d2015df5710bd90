use fracton::appendix::AppendixError;
use fracton::barrier::BarrierError;
use fracton::codes::CodeError;
use fracton::distance::DistanceError;
use fracton::instantiate::InstanceError;
use fracton::lattice::LatticeError;
use fracton::specfile::{SpecError, SpecUseError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}: {1}")]
    Io(String, std::io::Error),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    SpecUse(#[from] SpecUseError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Appendix(#[from] AppendixError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
