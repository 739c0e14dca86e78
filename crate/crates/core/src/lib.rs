//! Symbolic disentangled object codes on holographic reduced representations.
//!
//! Objects are superpositions of role ⊛ filler bindings over a frozen item
//! memory. Single generative factors are edited by algebraic exchange,
//! decoded by unbinding and cleanup, and scored with change-table
//! disentanglement metrics over a deterministic render-and-classify loop.
//!
//! ```
//! use symdis_core::{build_memory, decode_object, encode_object, exchange_latent,
//!                   FactorSchema, SpaceConfig, SymbolicObject};
//!
//! let schema = FactorSchema::dsprites();
//! let memory = build_memory(&schema, SpaceConfig::new(1024, 7)?);
//! let a = SymbolicObject::new(vec![2, 5, 39, 31, 0]);
//! let o = encode_object(&a, &memory)?;
//! assert_eq!(decode_object(&o, &memory)?, a);
//!
//! // move the object to posX = 3 without re-encoding
//! let moved = exchange_latent(&o, 31, 3, 3, &memory)?;
//! assert_eq!(decode_object(&moved, &memory)?.values, vec![2, 5, 39, 3, 0]);
//! # Ok::<(), symdis_core::Error>(())
//! ```

pub mod composer;
pub mod error;
pub mod experiments;
pub mod hv;
pub mod memory;
pub mod metrics;
pub mod scene;
pub mod stream;

pub use error::{Error, Result};
pub use hv::{
    add_noise, bind, bundle, cosine, involution, sample_seed, unbind, Hypervector, SpaceConfig,
};
pub use memory::{
    attention_readout, attention_readout_with, build_memory, cleanup, top_k, FactorSchema,
    ItemMemory, KeyProjection, Readout, ReadoutProjections,
};
pub use composer::{
    decode_factor, decode_factors, decode_object, encode_object, exchange_latent,
    exchange_latent_decoded, exchange_symbolic, generate_pairs, DifferenceMode, Exclusion,
    PairedExample, SymbolicObject,
};
pub use scene::{classify, iou, render, Image, RenderConfig, ShapeKind, TemplateClassifier};
pub use metrics::{
    build_change_table, dcm, dmm, ChangeTable, LatentUnitSpec, MetricReport, Pipeline,
    ProbePolicy, Reconstruction, SymbolicPipeline,
};
