use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("target plane normal has zero length")]
    ZeroNormal,
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),
    #[error("evader and pursuer coincide")]
    CoincidentPlayers,
    #[error("pursuers {0} and {1} coincide")]
    CoincidentPursuers(usize, usize),
    #[error("players {0} and {1} share a position")]
    DuplicatePlayers(String, String),
    #[error("at least one pursuer is required")]
    EmptyPursuerSet,
    #[error("oracle extent must be positive and finite, got {0}")]
    NonPositiveExtent(f64),
    #[error("oracle grid needs at least 3 points per side, got {0}")]
    GridTooSmall(usize),
    #[error("pursuer projections coincide; the pair is not jointly active")]
    NotBothActive,
    #[error("evader must start strictly inside the play subspace")]
    EvaderNotInPlay,
    #[error("configuration has no evader")]
    MissingEvader,
    #[error("pursuer projections are collinear")]
    CollinearProjections,
    #[error("triple is not a collinear three-pursuer case with the given middle")]
    NotCollinearCase,
    #[error("triple is not a noncollinear three-pursuer case")]
    NotThreeActive,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("heading {0} is not a unit vector")]
    NonUnitHeading(usize),
    #[error("expected {expected} pursuer headings, got {got}")]
    HeadingCount { expected: usize, got: usize },
    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("escape target must lie on the target plane")]
    TargetNotOnPlane,
    #[error("mesh resolution must be at least 8, got {0}")]
    ResolutionTooLow(usize),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
