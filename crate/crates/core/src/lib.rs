//! Rule theories over a small single-variable logic: parsing, stratified
//! forward chaining with negation as failure, proof enumeration, and a
//! synthetic question-answering dataset generator built on top.

pub mod analysis;
pub mod corpora;
pub mod engine;
pub mod explain;
pub mod generator;
pub mod logic;
pub mod pipeline;
pub mod questions;
pub mod record;
pub mod render;
#[cfg(feature = "service")]
pub mod service;
pub mod syntax;
