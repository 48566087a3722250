//! Small-world social networks built on top of real road networks.
//!
//! The crate constructs social networks by adding long-range contact edges to a
//! weighted road graph under three generative models (inverse-distance KL,
//! degree-driven BA, and the combined NPA model plus its degree-capped
//! variant), then routes messages through them with a decentralized greedy
//! algorithm that always forwards to the contact nearest the target in
//! road-network distance.
//!
//! Pipeline: ingest DIMACS road data ([`roadnet`]) -> compute exact shortest
//! paths ([`distance`]) -> generate long-range edges ([`models`]) -> run greedy
//! routing ([`routing`]) -> aggregate hop counts, dropout sweeps and degree
//! distributions ([`experiments`]). The [`cli`] module exposes all of it as one
//! binary with file-based artifacts between stages.

pub mod cli;
pub mod distance;
pub mod experiments;
pub mod models;
pub mod roadnet;
pub mod routing;

pub use distance::{sssp, DistanceMap, DistanceOracle};
pub use models::{ModelKind, ModelParams, SocialNetwork};
pub use roadnet::{RoadNetwork, VertexId};
pub use routing::{greedy_route, RouteQuery, RouteResult};
