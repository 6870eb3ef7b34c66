use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
///
/// Element witnesses are carried by name so that messages stay readable
/// without the group tables at hand.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group order {order} exceeds the cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("not a homomorphism: f({x}) f({y}) != f({x} {y})")]
    NotHomomorphism { x: String, y: String },

    #[error("the given elements do not generate the source group")]
    NotGenerating,

    #[error("subgroup is not normal: {g} {n} {g}^-1 = {conj} lies outside it")]
    NotNormal { g: String, n: String, conj: String },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("word {word} is not a member of the {what}")]
    NotAMember { word: String, what: String },

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid split extension: {0}")]
    InvalidExtension(String),

    #[error("invalid crossed module: {0}")]
    InvalidCrossedModule(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),

    #[error("word length {len} exceeds the cap of {cap}")]
    LengthCap { len: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
