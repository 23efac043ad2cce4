//! Recommend exception-handling code examples for a fragment of Java code.
//!
//! A context fragment is parsed into a [`model::SourceUnit`], turned into a
//! two-term [`query::SearchQuery`], and each candidate from a local or remote
//! [`corpus`] is scored on API usage structure ([`structural`]), token
//! similarity ([`lexical`]) and handler quality ([`quality`]). [`ranking`]
//! normalizes the three over the pool and fuses them; [`eval`] scores rankings
//! against an oracle.
//!
//! ```
//! use exrec::corpus::Candidate;
//! use exrec::model::parse;
//! use exrec::query::{formulate_query, ExceptionKnowledgeBase};
//! use exrec::ranking::{rank, WeightConfig};
//! use std::path::Path;
//!
//! let context = parse("URL u = new URL(s);\nURLConnection c = u.openConnection();");
//! let query = formulate_query(&context, &ExceptionKnowledgeBase::bundled(), None)?;
//! assert_eq!(query.rendered, "IOException URL");
//!
//! let pool = vec![
//!     Candidate::local(Path::new("a.java"), "try { URL u = new URL(s); u.openConnection(); } catch (IOException e) { log(e); }"),
//!     Candidate::local(Path::new("b.java"), "try { run(); } catch (IOException e) { }"),
//! ];
//! let ranked = rank(&context, &pool, &WeightConfig::default(), 10)?;
//! assert_eq!(ranked[0].origin.to_string(), "a.java");
//! # Ok::<(), exrec::Error>(())
//! ```

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod graph;
pub mod lexer;
pub mod lexical;
pub mod model;
pub mod quality;
pub mod query;
pub mod ranking;
pub mod structural;
mod syntax;

pub use error::{Error, Result};
