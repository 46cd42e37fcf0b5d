use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "logicbench";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamp carried by every report record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub config_hash: String,
}

impl ReportHeader {
    /// Hashes the canonical JSON form of `config`, so formatting differences
    /// in the source manifest do not change the hash.
    pub fn new(kind: &str, config: &impl Serialize) -> ReportHeader {
        ReportHeader { tool: TOOL.into(), version: VERSION.into(), kind: kind.into(), config_hash: config_hash(config) }
    }
}

pub fn config_hash(config: &impl Serialize) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_content_only() {
        #[derive(Serialize)]
        struct C {
            a: u32,
        }
        assert_eq!(config_hash(&C { a: 1 }), config_hash(&C { a: 1 }));
        assert_ne!(config_hash(&C { a: 1 }), config_hash(&C { a: 2 }));
        assert_eq!(config_hash(&C { a: 1 }).len(), 64);
    }
}
