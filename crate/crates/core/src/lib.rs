#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod convex;
pub mod error;
pub mod flow;
pub mod quad;
pub mod translators;
pub mod verify;
