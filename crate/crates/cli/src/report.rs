//! Append-only JSON Lines reports. Each run adds one timestamped record.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use logicbench::experiments::ReportHeader;
use serde_json::{json, Value};

pub fn append(path: &Path, header: &ReportHeader, exit: u8, body: Value) -> std::io::Result<()> {
    let unix_time = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let record = json!({
        "unix_time": unix_time,
        "tool": header.tool,
        "version": header.version,
        "kind": header.kind,
        "config_hash": header.config_hash,
        "argv": std::env::args().skip(1).collect::<Vec<_>>(),
        "exit": exit,
        "report": body,
    });
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{record}")
}
