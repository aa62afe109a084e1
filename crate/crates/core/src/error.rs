use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WpsError {
    #[error("weight {index} is zero")]
    ZeroWeight { index: usize },
    #[error("weights {weights:?} are not well formed: dropping index {skip} leaves gcd {gcd}")]
    NotWellFormed { weights: [u32; 5], skip: usize, gcd: u32 },
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("family {id}: check `{check}` failed: {detail}")]
    Validation { id: u32, check: String, detail: String },
    #[error("family {0} appears twice")]
    DuplicateId(u32),
    #[error("family {0} is not in the catalog")]
    UnknownFamily(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SingularityError {
    #[error(
        "no monomial x_{vertex}^k * x_j of degree {degree}: general member not quasismooth at the vertex"
    )]
    NoTangentMonomial { vertex: usize, degree: u32 },
    #[error("no monomial of degree {degree} survives on the stratum ({i},{j})")]
    EmptyRestriction { i: usize, j: usize, degree: u32 },
    #[error("stratum ({i},{j}): remaining degree {remaining} not divisible by {lcm}")]
    IndivisibleDegree { i: usize, j: usize, remaining: u32, lcm: u32 },
    #[error("point of index {r} with weights {weights:?} is not a terminal quotient")]
    NotTerminal { r: u32, weights: [u32; 3] },
    #[error("index {0} out of range")]
    BadIndex(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PencilError {
    #[error("pencil generator {generator} has undetermined order at {point}")]
    DependentGenerator { generator: String, point: String },
    #[error("pencil needs at least two distinct generators of one degree")]
    NotMobile,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("curve {index} has self-intersection {self_int}, not -1")]
    NotMinusOne { index: usize, self_int: i64 },
    #[error("intersection matrix of a chain is singular")]
    SingularGram,
    #[error("no monomial of degree {0} in the given weights")]
    EmptyPolygon(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Singularity(#[from] SingularityError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error("inconsistent rule: {0}")]
    InconsistentRule(String),
    #[error("incomplete evidence: {0}")]
    IncompleteEvidence(String),
}
