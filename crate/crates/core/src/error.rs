use thiserror::Error;

/// Error type shared by every module of the kernel.
#[derive(Debug, Error)]
pub enum KernelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cone is not pointed (contains the line through {0})")]
    NotPointed(String),

    #[error("ambient dimension {0} exceeds the configured limit {1}")]
    DimensionLimit(usize, usize),

    #[error("fan is not complete: {0}")]
    NotComplete(String),

    #[error("fan is not smooth: {0}")]
    NotSmooth(String),

    #[error("empty linear system")]
    EmptySystem,

    #[error("divisor is not pseudo-effective")]
    NotPseudoEffective,

    #[error("{0} is contained in the stable base locus")]
    InBaseLocus(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("pipeline stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<KernelError>,
    },
}

impl KernelError {
    pub fn at_stage(self, stage: &'static str) -> KernelError {
        KernelError::Stage { stage, source: Box::new(self) }
    }
}
