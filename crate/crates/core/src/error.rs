use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field degree must be positive")]
    ZeroDegree,
    #[error("GF({p}^{h}) exceeds the supported field size")]
    FieldTooLarge { p: u32, h: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid field element: {0}")]
    InvalidElement(String),
    #[error("frobenius exponent {k} out of range for degree {h}")]
    FrobeniusRange { k: u32, h: u32 },
    #[error("characteristic 2 is not supported here")]
    EvenCharacteristic,
    #[error("not a nonsquare: {0}")]
    NotNonsquare(u16),

    #[error("malformed geometry: {0}")]
    Malformed(String),
    #[error("points {0} and {1} lie on two common lines")]
    DuplicateCollinearity(u32, u32),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("4-gonal family check failed: {0}")]
    FamilyCheck(String),
    #[error("not an oval: {0}")]
    NotAnOval(String),

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("generator does not stabilize the subgeometry")]
    NotStabilizing,
    #[error("{0} is not an axis of symmetry")]
    NotAxis(u32),

    #[error("subgeometry is not a hyperplane: {0}")]
    NotHyperplane(String),
    #[error("point {0} lies in the subquadrangle")]
    InsideSubgeometry(u32),
    #[error("structure violation: {0}")]
    Structure(String),
    #[error("propagation contradiction: {0}")]
    Contradiction(String),
    #[error("certificate failed: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
