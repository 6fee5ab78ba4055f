use std::time::Duration;

use corrkit::adapter::{adapter_check, AdapterError, ExternalTagger};
use corrkit::dataset::write_jsonl;
use corrkit_core::datagen::{generate, GenerationConfig};
use corrkit_core::eval::evaluate;
use corrkit_core::LabelTag;

const BIN: &str = env!("CARGO_BIN_EXE_corrkit");
const TIMEOUT: Duration = Duration::from_secs(5);

fn mock(mode: &str) -> String {
    format!("{BIN} mock-adapter --mode {mode}")
}

fn fig4() -> (Vec<&'static str>, usize) {
    (vec!["cook", "rice", "for", "me", "no", "curry", "rice"], 4)
}

#[test]
fn copy_adapter_labels_everything_c() {
    let mut tagger = ExternalTagger::spawn(&mock("copy"), TIMEOUT).unwrap();
    assert_eq!(tagger.name(), "mock-copy");
    let (words, boundary) = fig4();
    assert_eq!(
        tagger.predict(&words, boundary).unwrap(),
        vec![LabelTag::C; 7]
    );
    let batch = [(&words[..], boundary), (&words[..3], 2)];
    let out = tagger.predict_batch(&batch).unwrap();
    assert_eq!(out.len(), 2);
    assert_eq!(out[1].len(), 3);
    assert!(tagger.shutdown().unwrap().success());
}

#[test]
fn protocol_violations_are_reported() {
    let (words, boundary) = fig4();
    for mode in ["short", "garbage", "wrong-id"] {
        let mut tagger = ExternalTagger::spawn(&mock(mode), TIMEOUT).unwrap();
        let err = tagger.predict(&words, boundary).unwrap_err();
        assert!(matches!(err, AdapterError::Protocol(_)), "{mode}: {err:?}");
    }
}

#[test]
fn bad_handshake_is_rejected() {
    let err = ExternalTagger::spawn(&mock("bad-handshake"), TIMEOUT).unwrap_err();
    assert!(matches!(err, AdapterError::Protocol(_)), "{err:?}");
}

#[test]
fn crash_and_silence_are_detected() {
    let (words, boundary) = fig4();
    let mut tagger = ExternalTagger::spawn(&mock("crash"), TIMEOUT).unwrap();
    let err = tagger.predict(&words, boundary).unwrap_err();
    assert!(matches!(err, AdapterError::Crashed(_)), "{err:?}");

    let mut tagger = ExternalTagger::spawn(&mock("silent"), Duration::from_millis(500)).unwrap();
    let err = tagger.predict(&words, boundary).unwrap_err();
    assert!(
        matches!(err, AdapterError::Crashed(_) | AdapterError::Protocol(_)),
        "{err:?}"
    );

    let err = ExternalTagger::spawn("exit 0", TIMEOUT).unwrap_err();
    assert!(
        matches!(err, AdapterError::Crashed(_) | AdapterError::Protocol(_)),
        "{err:?}"
    );
}

#[test]
fn gold_adapter_scores_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GenerationConfig {
        train_size: 0,
        val_sizes: [10, 10, 10, 10],
        test_sizes: [0; 4],
        ..GenerationConfig::empty(3)
    };
    let records = generate(
        &corrkit::data::default_templates(),
        &corrkit::data::default_lexicon(),
        &cfg,
    )
    .unwrap();
    let path = dir.path().join("val.jsonl");
    write_jsonl(&path, &records).unwrap();
    let cmd = format!("{BIN} mock-adapter --mode gold --data {}", path.display());
    let mut tagger = ExternalTagger::spawn(&cmd, TIMEOUT).unwrap();
    let outcome = evaluate(&records, &mut tagger, false).unwrap();
    assert_eq!(outcome.overall().n, 40);
    assert_eq!(outcome.overall().accuracy(), Some(1.0));
}

#[test]
fn conformance_check() {
    let report = adapter_check(&mock("copy"), TIMEOUT);
    assert!(report.ok(), "{report:?}");
    assert_eq!(report.adapter_name.as_deref(), Some("mock-copy"));
    for mode in ["short", "garbage", "crash", "bad-handshake"] {
        let report = adapter_check(&mock(mode), TIMEOUT);
        assert!(!report.ok(), "{mode} passed");
    }
    assert!(!adapter_check("/nonexistent/adapter", TIMEOUT).ok());
}
