//! Generic transducer algorithms.

pub mod compose;
pub mod connect;
pub mod path;
pub mod prune;
pub mod replace;
pub mod scale;
pub mod shortest_path;

pub use compose::compose;
pub use connect::connect;
pub use path::{project_input, project_output, project_unk, PathArc, PathWitness};
pub use prune::prune_to_node_budget;
pub use replace::replace;
pub use scale::{scale_feature, scale_weights};
pub use shortest_path::{nbest, shortest_path};
