//! A scriptable `tagger/1` adapter for exercising the client and the
//! conformance check.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use corrkit_core::datagen::DatasetRecord;

use crate::adapter::{Handshake, TagRequest, TagResponse, PROTOCOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MockMode {
    /// Every word labeled C.
    Copy,
    /// Gold labels looked up in a dataset; C for unknown inputs.
    Gold,
    /// One label too few.
    Short,
    /// A non-JSON line instead of an answer.
    Garbage,
    /// Answers with an id that was never asked for.
    WrongId,
    /// Exits after the handshake.
    Crash,
    /// Never answers.
    Silent,
    /// Announces a different protocol.
    BadHandshake,
}

fn key(tokens: &[String], boundary: usize) -> String {
    format!("{boundary}\u{1}{}", tokens.join(" "))
}

/// Serves requests from `input` until it closes.
pub fn serve<R: BufRead, W: Write>(
    mode: MockMode,
    gold: &[DatasetRecord],
    input: R,
    mut output: W,
) -> io::Result<i32> {
    let protocol = if mode == MockMode::BadHandshake {
        "tagger/0"
    } else {
        PROTOCOL
    };
    let hs = Handshake {
        protocol: protocol.into(),
        name: format!("mock-{mode:?}").to_lowercase(),
    };
    writeln!(output, "{}", serde_json::to_string(&hs)?)?;
    output.flush()?;
    if mode == MockMode::Crash {
        return Ok(3);
    }
    let table: HashMap<String, Vec<String>> = gold
        .iter()
        .map(|r| {
            let words: Vec<String> = r.tagged.words().into_iter().map(String::from).collect();
            let labels = r
                .tagged
                .labels()
                .iter()
                .map(|l| l.as_str().to_string())
                .collect();
            (key(&words, r.tagged.boundary()), labels)
        })
        .collect();
    for line in input.lines() {
        let line = line?;
        let req: TagRequest = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("mock adapter: bad request: {e}");
                return Ok(1);
            }
        };
        let copy = || vec!["C".to_string(); req.tokens.len()];
        let response = match mode {
            MockMode::Silent => continue,
            MockMode::Garbage => {
                writeln!(output, "this is not json")?;
                output.flush()?;
                continue;
            }
            MockMode::Gold => table
                .get(&key(&req.tokens, req.boundary))
                .cloned()
                .unwrap_or_else(copy),
            MockMode::Short => {
                let mut l = copy();
                l.pop();
                l
            }
            _ => copy(),
        };
        let id = if mode == MockMode::WrongId {
            format!("{}-other", req.id)
        } else {
            req.id
        };
        let resp = TagResponse {
            id,
            labels: response,
        };
        writeln!(output, "{}", serde_json::to_string(&resp)?)?;
        output.flush()?;
    }
    Ok(0)
}
