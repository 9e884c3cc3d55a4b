pub mod arith;
pub mod britton;
pub mod examples;
pub mod machine;
pub mod path;
pub mod predicate;
pub mod presentation;
pub mod reduction;
pub mod selftest;
pub mod words;
pub mod wp;

pub use arith::{enumerate_rationals, enumerate_vectors, rat_op, ArithError, Rat, RatOp, RatVec};
