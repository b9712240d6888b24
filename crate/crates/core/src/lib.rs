//! Distillation of a procedural analytic head generator into a trainable
//! implicit field, plus the downstream geometry pipeline built on top of it.
//!
//! The crate is organised around one data flow:
//!
//! 1. [`teacher`] — an analytic head/hair generator that supplies images,
//!    masks, densities and ground-truth orientations for any latent.
//! 2. [`student`] — a small MLP field predicting signed distance, color,
//!    hair probability and 3D orientation per point, with a reverse-mode
//!    tape ([`tape`]) sufficient to train it.
//! 3. [`render`] — differentiable volume rendering, first-sign-change
//!    surface detection, and projection of semantics/orientations to
//!    image space.
//! 4. [`supervise`] — Gabor orientation maps, the loss stack, the training
//!    loop and latent inversion.
//! 5. [`extract`] — dense-grid mesh extraction, scalp fitting, extrusion,
//!    voxel booleans and the closed hair volume.
//! 6. [`strands`] — root sampling, orientation-guided strand growth and
//!    boundary alignment optimisation.
//!
//! [`geom`] holds the shared vector/camera/grid/image vocabulary, [`config`]
//! the flat key=value configuration format, [`metrics`] the evaluation
//! metrics, and [`pipeline`] the stage orchestration used by the CLI.

pub mod config;
pub mod error;
pub mod extract;
pub mod geom;
pub mod metrics;
pub mod pipeline;
pub mod render;
pub mod strands;
pub mod student;
pub mod supervise;
pub mod tape;
pub mod teacher;

pub use error::{Error, Result};
