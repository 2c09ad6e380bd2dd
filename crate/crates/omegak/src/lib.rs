//! Verification engine and machine-checked catalog for a family of graded
//! bicommutative Hopf algebras over the two-element field.
//!
//! The algebras handled here are tensor products of single-generator Borel
//! factors: polynomial `P(x)`, exterior `E(x)`, truncated polynomial
//! `TP_{2^k}(x)`, and divided-power `Γ[x]` algebras, with one generator per
//! degree in an arithmetic-progression index pattern. The engine computes
//! Hopf kernels and cokernels of the structured maps that arise between such
//! algebras, runs the associated fibration spectral sequences (Tor pages,
//! declared differentials, declared multiplicative extensions), and checks
//! the results against a shipped catalog of twenty infinite loop spaces,
//! ninety-eight spectral-sequence records, connecting maps, and homotopy
//! long exact sequence tables.
//!
//! Everything is exact: graded dimensions are arbitrary-precision integers,
//! degree patterns are manipulated as eventually periodic sets, and every
//! catalog claim is either verified or reported with the first failing
//! degree.

pub mod catalog;
pub mod homotopy;
pub mod hopfmap;
pub mod pattern;
pub mod presentation;
pub mod report;
pub mod series;
pub mod specseq;
pub mod tor;
pub mod verify;

use thiserror::Error;

/// Errors shared by every layer of the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree pattern: {0}")]
    Pattern(String),

    #[error("invalid series operation: {0}")]
    Series(String),

    #[error("invalid presentation: {0}")]
    Presentation(String),

    #[error("invalid map: {0}")]
    Map(String),

    #[error("map needs regeneration: {0}")]
    NeedsRegeneration(String),

    #[error("Tor engine: {0}")]
    Tor(String),

    #[error("bar oracle resource bound exceeded: {0}")]
    BarResource(String),

    #[error("spectral sequence: {0}")]
    SpecSeq(String),

    #[error("homotopy table: {0}")]
    Homotopy(String),

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("catalog file {path}: {source}")]
    CatalogIo {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("catalog json at {path}: {source}")]
    CatalogJson {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Engine version reported alongside catalog versions in reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
