//! Query answering: the feature cache, the knowledge base the plan tools run
//! against, and the engine that plans, repairs and executes.

mod cache;
mod engine;
mod features;
mod kb;

pub use cache::{load_features, sidecar_paths, write_cache, CacheRow, FeatureCache, CACHE_COLUMNS};
pub use engine::{build_client, build_planner, build_store_index, load_knowledge_base, warm_cache, AnswerEnvelope, Engine};
pub use features::{compute_features, ContractFeatures};
pub use kb::KnowledgeBase;
pub use crate::plan::{Entities, QuerySpec, Task};
