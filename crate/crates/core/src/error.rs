use thiserror::Error;

/// Failures surfaced by the library. Each variant maps to a domain error at the CLI.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid language: {0}")]
    InvalidLanguage(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("language mismatch: {0}")]
    LanguageMismatch(String),
    #[error("forbidden structure {index} is not irreducible")]
    NotIrreducible { index: usize },
    #[error("the class is empty: every one-point structure is forbidden")]
    EmptyClass,
    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },
    #[error("map is not a structure map: {0}")]
    BadMap(String),
    #[error("tree node level mismatch: {0}")]
    LevelMismatch(String),
    #[error("digit {digit} outside alphabet of size {k}")]
    BadDigit { digit: u8, k: u8 },
    #[error("node of level {have} cannot be padded to level {want}")]
    TooShort { have: usize, want: usize },
    #[error("map domain is incomplete: {0}")]
    DomainIncomplete(String),
    #[error("ambient prefix too shallow: need level {need}, have {have}")]
    AmbientTooShallow { need: usize, have: usize },
    #[error("extension target does not extend its source: {0}")]
    ExtensionNotAboveSource(String),
    #[error("prefix exhausted before the next level could be placed (level {level}, dead branch: {dead})")]
    PrefixExhausted { level: usize, dead: bool },
    #[error("search budget exhausted after {spent} steps")]
    BudgetExhausted { spent: usize },
    #[error("not an envelope: {0}")]
    NotAnEnvelope(String),
    #[error("critical level {level} is not resolved by a copy")]
    CritResolutionFailure { level: usize },
    #[error("obligation is not a valid one-point extension: {0}")]
    InvalidObligation(String),
    #[error("structure is not in the class: {0}")]
    NotInClass(String),
    #[error("census too large at size {size} (more than {cap} structures)")]
    CensusTooLarge { size: usize, cap: usize },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `module::Variant`, naming where the failure originates.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidLanguage(_) => "structure::InvalidLanguage",
            Error::InvalidStructure(_) => "structure::InvalidStructure",
            Error::LanguageMismatch(_) => "structure::LanguageMismatch",
            Error::NotIrreducible { .. } => "forb::NotIrreducible",
            Error::EmptyClass => "limit::EmptyClass",
            Error::OutOfRange { .. } => "structure::OutOfRange",
            Error::BadMap(_) => "structure::BadMap",
            Error::LevelMismatch(_) => "tree::LevelMismatch",
            Error::BadDigit { .. } => "tree::BadDigit",
            Error::TooShort { .. } => "tree::TooShort",
            Error::DomainIncomplete(_) => "aemb::DomainIncomplete",
            Error::AmbientTooShallow { .. } => "aemb::AmbientTooShallow",
            Error::ExtensionNotAboveSource(_) => "aemb::ExtensionNotAboveSource",
            Error::PrefixExhausted { .. } => "aemb::PrefixExhausted",
            Error::BudgetExhausted { .. } => "nice::BudgetExhausted",
            Error::NotAnEnvelope(_) => "envelope::NotAnEnvelope",
            Error::CritResolutionFailure { .. } => "nice::CritResolutionFailure",
            Error::InvalidObligation(_) => "limit::InvalidObligation",
            Error::NotInClass(_) => "forb::NotInClass",
            Error::CensusTooLarge { .. } => "degrees::CensusTooLarge",
            Error::EmptyInput(_) => "envelope::EmptyInput",
            Error::Parse(_) => "io::Parse",
        }
    }
}
