use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank must be at least 1, got {0}")]
    InvalidRank(usize),
    #[error("case I requires m_s = 0, got m_s = {0}")]
    CaseIShort(f64),
    #[error("resonant spectral parameter at kappa = {kappa:?} (|2<kappa,lambda> - <kappa,kappa>| = {size:e})")]
    ResonantParameter { kappa: Vec<i64>, size: f64 },
    #[error("pole: {0}")]
    Pole(String),
    #[error("series did not converge below height {max_height} (last block {last_block:e})")]
    NoConvergence { max_height: usize, last_block: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Gram matrix ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("weight {mu:?} is not in the lattice for l = {l}")]
    NotInLattice { mu: Vec<i64>, l: i64 },
    #[error("grid or bundle mismatch: {0}")]
    Mismatch(String),
    #[error("all samples underflow (below 1e-280); use a smaller t range")]
    Underflow,
    #[error("unknown catalog key {0:?}")]
    Catalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
