use thiserror::Error;

use crate::coeff::CoeffError;
use crate::ncpoly::GenSymbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator {0} is not in the algebra")]
    UnknownGenerator(GenSymbol),
    #[error("no rule for the out-of-order pair {hi}*{lo}")]
    MissingRule { hi: GenSymbol, lo: GenSymbol },
    #[error("bad rule {hi}*{lo}: {reason}")]
    BadRule { hi: GenSymbol, lo: GenSymbol, reason: String },
    #[error("rank {0} is too small (need n >= 2)")]
    RankTooSmall(u32),
    #[error("the splitting constraint is only defined for n = 3, not n = {0}")]
    SplitUndefined(u32),
    #[error("bad index set: {0}")]
    BadIndexSet(String),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("bad generator: {0}")]
    BadGenerator(String),
    #[error("the closed-form action exists only for n = 3, not n = {0}")]
    RankNot3(u32),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}
