//! Unit distances under planar norms: decorated unit-distance graphs, the
//! edge-colored graph machinery behind the color cover, linear dependences
//! among unit directions, and exact certificates that perturbed polygonal
//! norms admit no η-separated realization.

pub mod exec;
pub mod linalg;
pub mod norms;
pub mod colored_graphs;
pub mod constructions;
pub mod udg;
pub mod lindep;
pub mod certifier;
pub mod pipeline;
