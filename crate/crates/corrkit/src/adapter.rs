//! Client for external taggers speaking `tagger/1`.
//!
//! The adapter is a child process exchanging newline-delimited JSON over its
//! standard streams. Its first line is the handshake
//! `{"protocol":"tagger/1","name":...}`; afterwards every request line
//! `{"id","tokens","boundary"}` is answered by `{"id","labels"}`. Closing the
//! adapter's input asks it to exit.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use corrkit_core::datagen::DatasetRecord;
use corrkit_core::eval::LabelSource;
use corrkit_core::tagger::repair_labels;
use corrkit_core::LabelTag;
use serde::{Deserialize, Serialize};

pub const PROTOCOL: &str = "tagger/1";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, thiserror::Error)]
pub enum AdapterError {
    #[error("could not start adapter: {0}")]
    Spawn(#[source] std::io::Error),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("adapter crashed: {0}")]
    Crashed(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Handshake {
    pub protocol: String,
    pub name: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagRequest {
    pub id: String,
    pub tokens: Vec<String>,
    pub boundary: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagResponse {
    pub id: String,
    pub labels: Vec<String>,
}

/// A running adapter process. One batch in flight at a time.
pub struct ExternalTagger {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    name: String,
    next_id: u64,
    timeout: Duration,
    lenient: bool,
}

impl std::fmt::Debug for ExternalTagger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalTagger")
            .field("name", &self.name)
            .field("pid", &self.child.id())
            .field("timeout", &self.timeout)
            .finish_non_exhaustive()
    }
}

impl ExternalTagger {
    /// Runs `command` through `sh -c` and waits for the handshake.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, AdapterError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(AdapterError::Spawn)?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut tagger = ExternalTagger {
            child,
            stdin,
            lines: rx,
            name: String::new(),
            next_id: 0,
            timeout,
            lenient: false,
        };
        let deadline = Instant::now() + timeout;
        let line = tagger.read_line(deadline)?;
        let hs: Handshake = serde_json::from_str(&line)
            .map_err(|e| AdapterError::Protocol(format!("bad handshake {line:?}: {e}")))?;
        if hs.protocol != PROTOCOL {
            return Err(AdapterError::Protocol(format!(
                "adapter speaks {:?}, expected {PROTOCOL:?}",
                hs.protocol
            )));
        }
        tagger.name = hs.name;
        Ok(tagger)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// When set, returned labels go through the repair pass.
    pub fn set_lenient(&mut self, lenient: bool) {
        self.lenient = lenient;
    }

    fn read_line(&mut self, deadline: Instant) -> Result<String, AdapterError> {
        let wait = deadline.saturating_duration_since(Instant::now());
        match self.lines.recv_timeout(wait) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(AdapterError::Crashed(format!("reading output: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                let _ = self.child.kill();
                Err(AdapterError::Crashed(format!(
                    "no answer within {:.0?}",
                    self.timeout
                )))
            }
            Err(RecvTimeoutError::Disconnected) => {
                let status = self.child.wait().ok();
                Err(AdapterError::Crashed(match status {
                    Some(s) => format!("process exited ({s})"),
                    None => "output closed".into(),
                }))
            }
        }
    }

    /// Sends all requests, then collects all answers; the timeout covers the
    /// whole batch.
    pub fn predict_batch<S: AsRef<str>>(
        &mut self,
        batch: &[(&[S], usize)],
    ) -> Result<Vec<Vec<LabelTag>>, AdapterError> {
        let mut ids = Vec::with_capacity(batch.len());
        let mut payload = String::new();
        for (tokens, boundary) in batch {
            let id = self.next_id.to_string();
            self.next_id += 1;
            let req = TagRequest {
                id: id.clone(),
                tokens: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
                boundary: *boundary,
            };
            payload.push_str(&serde_json::to_string(&req).expect("requests serialize"));
            payload.push('\n');
            ids.push(id);
        }
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| AdapterError::Crashed("input already closed".into()))?;
        stdin
            .write_all(payload.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| AdapterError::Crashed(format!("writing request: {e}")))?;

        let deadline = Instant::now() + self.timeout;
        let mut out = Vec::with_capacity(batch.len());
        for (id, (tokens, boundary)) in ids.iter().zip(batch) {
            let line = self.read_line(deadline)?;
            let resp: TagResponse = serde_json::from_str(&line)
                .map_err(|e| AdapterError::Protocol(format!("bad response {line:?}: {e}")))?;
            if &resp.id != id {
                return Err(AdapterError::Protocol(format!(
                    "expected id {id:?}, got {:?}",
                    resp.id
                )));
            }
            if resp.labels.len() != tokens.len() {
                return Err(AdapterError::Protocol(format!(
                    "{} labels for {} tokens",
                    resp.labels.len(),
                    tokens.len()
                )));
            }
            let labels = resp
                .labels
                .iter()
                .map(|l| l.parse::<LabelTag>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| AdapterError::Protocol(e.to_string()))?;
            out.push(if self.lenient {
                repair_labels(&labels, *boundary)
            } else {
                labels
            });
        }
        Ok(out)
    }

    pub fn predict<S: AsRef<str>>(
        &mut self,
        tokens: &[S],
        boundary: usize,
    ) -> Result<Vec<LabelTag>, AdapterError> {
        let mut out = self.predict_batch(&[(tokens, boundary)])?;
        Ok(out.pop().expect("one answer per request"))
    }

    /// Closes the adapter's input and waits up to the timeout for it to exit.
    pub fn shutdown(mut self) -> Result<std::process::ExitStatus, AdapterError> {
        self.stdin.take();
        let deadline = Instant::now() + self.timeout;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => return Ok(status),
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(10)),
                Ok(None) => {
                    let _ = self.child.kill();
                    return Err(AdapterError::Crashed(
                        "did not exit after input closed".into(),
                    ));
                }
                Err(e) => return Err(AdapterError::Crashed(e.to_string())),
            }
        }
    }
}

impl Drop for ExternalTagger {
    fn drop(&mut self) {
        self.stdin.take();
        if let Ok(None) = self.child.try_wait() {
            thread::sleep(Duration::from_millis(20));
            if let Ok(None) = self.child.try_wait() {
                let _ = self.child.kill();
            }
        }
        let _ = self.child.wait();
    }
}

impl LabelSource for &mut ExternalTagger {
    type Error = AdapterError;

    fn labels(&mut self, record: &DatasetRecord) -> Result<Vec<LabelTag>, AdapterError> {
        self.predict(&record.tagged.words(), record.tagged.boundary())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckItem {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub adapter_name: Option<String>,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|i| i.ok)
    }
}

/// Probe inputs: the cook example, the cutlery drawer example, and a
/// one-word request without a correction.
pub fn golden_probes() -> [(&'static str, Vec<&'static str>, usize); 3] {
    [
        (
            "probe cook rice",
            vec!["cook", "rice", "for", "me", "no", "curry", "rice"],
            4,
        ),
        (
            "probe cutlery drawer",
            "put the cleaned knives into the cutlery drawer no into the drawer right of the sink"
                .split(' ')
                .collect(),
            8,
        ),
        ("probe no correction", vec!["stop"], 1),
    ]
}

/// Handshake, three probes and a clean exit on closed input. Conformance
/// only; the labels themselves are not judged.
pub fn adapter_check(command: &str, timeout: Duration) -> CheckReport {
    let mut items = Vec::new();
    let mut tagger = match ExternalTagger::spawn(command, timeout) {
        Ok(t) => {
            items.push(CheckItem {
                name: "handshake",
                ok: true,
                detail: format!("name {:?}", t.name()),
            });
            t
        }
        Err(e) => {
            items.push(CheckItem {
                name: "handshake",
                ok: false,
                detail: e.to_string(),
            });
            return CheckReport {
                adapter_name: None,
                items,
            };
        }
    };
    let name = tagger.name().to_string();
    for (probe, tokens, boundary) in golden_probes() {
        let item = match tagger.predict(&tokens, boundary) {
            Ok(labels) => CheckItem {
                name: probe,
                ok: true,
                detail: labels
                    .iter()
                    .map(|l| l.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            },
            Err(e) => CheckItem {
                name: probe,
                ok: false,
                detail: e.to_string(),
            },
        };
        let failed = !item.ok;
        items.push(item);
        if failed {
            return CheckReport {
                adapter_name: Some(name),
                items,
            };
        }
    }
    items.push(match tagger.shutdown() {
        Ok(status) if status.success() => CheckItem {
            name: "exit on closed input",
            ok: true,
            detail: status.to_string(),
        },
        Ok(status) => CheckItem {
            name: "exit on closed input",
            ok: false,
            detail: status.to_string(),
        },
        Err(e) => CheckItem {
            name: "exit on closed input",
            ok: false,
            detail: e.to_string(),
        },
    });
    CheckReport {
        adapter_name: Some(name),
        items,
    }
}
