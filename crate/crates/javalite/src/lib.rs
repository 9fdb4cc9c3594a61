//! Checker and interpreter for a Java subset, with a JUnit 4 style runner.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity, clippy::wrong_self_convention)]

pub mod builtins;
pub mod check;
pub mod cli;
pub mod interp;
pub mod ir;
pub mod jfmt;
pub mod junit;
pub mod types;
pub mod value;
