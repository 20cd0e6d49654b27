//! Explanation regeneration over a fact tablestore: preprocessing, TF-IDF
//! retrieval, iterated query expansion, rank fusion, external re-ranking and
//! mean average precision.

pub mod corpus;
pub mod diag;
pub mod error;
pub mod eval;
pub mod fixture;
pub mod io;
pub mod pipeline;
pub mod rankers;
pub mod textproc;
pub mod tfidf;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/preprocessing.md")]
    mod preprocessing {}
    #[doc = include_str!("../../../book/src/tfidf.md")]
    mod tfidf {}
    #[doc = include_str!("../../../book/src/ranking.md")]
    mod ranking {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
