//! Exact-arithmetic computations in operadic homotopy theory, truncated at
//! finite arity and degree.
//!
//! The crate is organized bottom-up: exact linear algebra ([`exactla`]), the
//! two base categories (bounded chain complexes in [`chaincat`], truncated
//! simplicial vector spaces in [`simpcat`]), sequences and the composition
//! product ([`seqcomp`]), tree combinatorics ([`trees`]), operads and their
//! cellular presentations ([`operads`]), algebras over operads ([`algebras`]),
//! and base change along colax-lax monoidal adjunctions ([`basechange`]).

pub mod exactla;
pub mod chaincat;
pub mod simpcat;
pub mod seqcomp;
pub mod trees;
pub mod operads;
pub mod algebras;
pub mod basechange;
