use serde::Serialize;
use spin7lab::Status;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Discrepancy = 1,
    Usage = 2,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config_path: Option<String>,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finished_at: Option<String>,
    pub status: Status,
}

impl RunManifest {
    pub fn start(command: &str, config_path: Option<String>, seed: Option<u64>, timestamps: bool) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_path,
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            started_at: timestamps.then(now),
            finished_at: None,
            status: Status::Pass,
        }
    }

    pub fn finish(&mut self, status: Status) {
        if self.started_at.is_some() {
            self.finished_at = Some(now());
        }
        self.status = status;
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Debug, Serialize)]
pub struct Document<T: Serialize> {
    pub manifest: RunManifest,
    pub result: T,
}
