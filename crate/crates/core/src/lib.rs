//! Run-length encoded sequence analysis.
//!
//! The pipeline this crate implements:
//!
//! * [`codec`]: run-length encoding and decoding of symbol sequences.
//! * [`process`]: Bernoulli and Markov symbol sources with deterministic,
//!   stream-splittable sampling.
//! * [`matching`]: longest-common-substring statistics over raw symbols and
//!   over encoded run tokens, including the shifted-prefix statistic that
//!   links window sizes in raw and encoded time.
//! * [`entropy`]: collision (order-2 Renyi) entropy of the encoded process
//!   by closed form, eigenvalue reduction, truncated oracle, or plug-in
//!   estimation.
//! * [`experiment`]: Monte Carlo harness reproducing the logarithmic growth
//!   law for longest matches between independent encoded sequences, with
//!   deterministic reports.
//!
//! Entropy values are in nats throughout.

pub mod codec;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod matching;
pub mod numfmt;
pub mod process;

pub use codec::{Alphabet, Run, RunSequence, Symbol, SymbolSequence};
pub use entropy::{Diagnostics, EncodedChainModel, EntropyEstimate, EstimateKind};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentReport, ReportFormat, TargetMethod};
pub use matching::MatchResult;
pub use process::{BernoulliSpec, BlockDecayCertificate, MarkovSpec, Source};
