//! Forward-only Vision Transformer inference with learned dynamic token
//! merging, plus everything needed to train the merging policy offline:
//! a small tensor/autodiff kernel set, a deterministic RNG, the frozen
//! backbone, the merge executor, the actor-critic agent, the distillation
//! reward, a PPO trainer, and an analytic MACs profiler with a
//! corruption-robustness evaluation harness.
//!
//! The crate is `no_std`-compatible (with `alloc`); all file formats and
//! IO live in the companion `vitmerge-cli` crate. Every transcendental
//! goes through `libm` so results are bit-identical across platforms.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod agent;
pub mod backbone;
pub mod error;
pub mod eval;
pub mod graph;
pub mod merge;
pub mod num;
pub mod ppo;
pub mod profiler;
pub mod reward;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::Tensor;
