//! Exact computation kit for finite-support coloured symmetric sequences.
//!
//! A coloured symmetric sequence assigns to every sorted word of input
//! colours and every output colour a finite set carrying an action of the
//! stabilizer (Young) subgroup of the word.  This crate implements the two
//! monoidal-style operations on such sequences together with the structural
//! morphisms relating them: associators, unitors, the interchange map, and
//! executable checks of the coherence axioms they satisfy.
//!
//! Everything is computed exactly over explicit orbit quotients; independent
//! counting oracles (partition rectangles, closed-form counts, fixed-point
//! sums) cross-check the engine.
//!
//! The two operations are substitution composition, which grafts argument
//! blocks onto the inputs of a head operation, and the arithmetic product,
//! which glues two operations along the lexicographic product of their
//! input words.

pub mod arithprod;
pub mod cli;
pub mod compose;
pub mod error;
pub mod format;
pub mod gset;
pub(crate) mod par;
pub mod perm;
pub mod report;
pub mod seq;
pub mod species;

pub use error::Error;
pub use gset::{orbit_quotient, GSet, QuotientResult};
pub use perm::{
    act_word, adjacent_factorization, grid_embed, sorting_permutation, theta, young_generators,
    ColourId, ColourSet, Permutation, SortedWord, Word,
};
pub use seq::{cardinality_table, identity_seq, SeqIso, SeqKey, SeqMorphism, SymSeq};
