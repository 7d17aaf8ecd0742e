use crate::algebra::AlgebraError;
use crate::invariants::MembershipReport;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("matrix is not in the Lie algebra: {0}")]
    NotInLieAlgebra(Box<MembershipReport>),
    #[error("matrices {i} and {j} do not commute")]
    NotCommuting { i: usize, j: usize },
    #[error("invalid GL_d action: {0}")]
    InvalidAction(String),
    #[error("specialization misses base symbol {0}")]
    IncompleteSpecialization(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("grading violation: {0}")]
    GradingViolation(String),
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("localization error on overlap {pair:?}: {detail}")]
    Localization { pair: (usize, usize), detail: String },
    #[error("invalid atlas: {0}")]
    InvalidAtlas(String),
    #[error("no restriction map: {0}")]
    NoRestriction(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Algebra(AlgebraError::ResourceExhausted { .. }))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
