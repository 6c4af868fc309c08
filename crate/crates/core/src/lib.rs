//! Signature-generic abstract syntax with variable binding.
//!
//! Given a binding signature (per-constructor binder counts), this crate
//! builds the language's syntax as well-scoped de Bruijn terms with
//! lawful simultaneous substitution, and provides:
//!
//! - the substitution-safe recursion principle: [`models::fold`] into any
//!   [`models::Model`], with a sampling law harness;
//! - the unscoped de Bruijn presentation and the functors relating it to
//!   the scoped one, including support computation and the
//!   scope-0/closed-terms check ([`unscoped`]);
//! - simply-typed signatures, retyping, signature morphisms, typed
//!   syntax, pullback of models along morphisms, and the PCF to
//!   untyped-lambda-calculus translation with Church encodings
//!   ([`typed`]);
//! - line-oriented law suites shared by the CLI and the test suite
//!   ([`laws`]).

pub mod laws;
pub mod models;
mod node;
pub mod scoped;
pub mod sexpr;
pub mod signature;
pub mod typed;
pub mod unscoped;

#[cfg(test)]
pub(crate) mod named;
