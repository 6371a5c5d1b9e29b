//! Maintenance of relationships between the artifacts of a software
//! language repository.
//!
//! A repository declares, in `.ueber` files, which languages exist, which
//! files belong to them and how functions map files onto each other. The
//! [`megamodel`] module collects those declarations, [`checker`] validates
//! them, and [`verifier`] runs the declared predicates through the
//! [`plugin_host`].

pub mod checker;
pub mod content;
pub mod langkit;
pub mod megamodel;
pub mod path;
pub mod plugin_host;
pub mod problem;
pub mod term;
pub mod verifier;

pub use content::{Content, ContentError};
pub use megamodel::{collect, CollectedModel, Decl, Lang, SourcedDecl};
pub use path::RepoPath;
pub use problem::{Finding, Problem, Severity};
pub use term::{read_term, write_term, Term};
pub use checker::check_model;
pub use plugin_host::{HostConfig, PluginHost};
pub use verifier::{standard_registry, verify_model, Mode, Verifier, VerifyConfig};
