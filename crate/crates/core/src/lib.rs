//! Requirement sets in structured natural language, their translation to
//! LTL, and behaviour-checked refactorings over them.

pub mod abstraction;
pub mod analysis;
pub mod corpus;
pub mod fretish;
pub mod refactor;
pub mod store;
pub mod translate;
