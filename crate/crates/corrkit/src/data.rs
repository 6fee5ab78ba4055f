//! TOML carriers for templates and lexicons.
//!
//! A template directory holds `train.toml` and optionally `unknown.toml`
//! (paraphrases for the unknown-template splits) and `ood.toml`
//! (out-of-domain tasks). Every `*.toml` file in a lexicon directory is read
//! in file-name order.

use std::fs;
use std::path::{Path, PathBuf};

use corrkit_core::datagen::{Lexicon, SchemaError, SlotName, Template, TemplateSet};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Schema { path: PathBuf, source: SchemaError },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    #[serde(default)]
    template: Vec<TemplateEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateEntry {
    id: String,
    kind: String,
    task: String,
    pattern: String,
    #[serde(default)]
    corrected_slots: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    #[serde(default)]
    lexicon: Vec<LexiconEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconEntry {
    slot: String,
    tier: String,
    entries: Vec<String>,
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.into(),
        source,
    })
}

fn schema(path: &Path) -> impl Fn(SchemaError) -> DataError + '_ {
    move |source| DataError::Schema {
        path: path.into(),
        source,
    }
}

/// Parses template TOML; `origin` only labels errors.
pub fn parse_templates(text: &str, origin: &Path) -> Result<Vec<Template>, DataError> {
    let file: TemplateFile = toml::from_str(text).map_err(|source| DataError::Parse {
        path: origin.into(),
        source,
    })?;
    let mut out = Vec::with_capacity(file.template.len());
    for e in file.template {
        let slots = e
            .corrected_slots
            .iter()
            .map(|s| s.parse::<SlotName>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(schema(origin))?;
        let kind = e.kind.parse().map_err(schema(origin))?;
        let task = e.task.parse().map_err(schema(origin))?;
        out.push(Template::new(&e.id, kind, task, &e.pattern, slots).map_err(schema(origin))?);
    }
    corrkit_core::datagen::check_unique_ids(&out).map_err(schema(origin))?;
    Ok(out)
}

pub fn parse_template_file(path: &Path) -> Result<Vec<Template>, DataError> {
    parse_templates(&read(path)?, path)
}

fn optional_templates(path: &Path) -> Result<Vec<Template>, DataError> {
    if path.exists() {
        parse_template_file(path)
    } else {
        Ok(Vec::new())
    }
}

pub fn load_template_dir(dir: &Path) -> Result<TemplateSet, DataError> {
    let train = parse_template_file(&dir.join("train.toml"))?;
    let unknown = optional_templates(&dir.join("unknown.toml"))?;
    let ood = optional_templates(&dir.join("ood.toml"))?;
    TemplateSet::new(train, unknown, ood).map_err(schema(dir))
}

/// Adds the entries of one lexicon TOML document to `lexicon`.
pub fn parse_lexicon(text: &str, origin: &Path, lexicon: &mut Lexicon) -> Result<(), DataError> {
    let file: LexiconFile = toml::from_str(text).map_err(|source| DataError::Parse {
        path: origin.into(),
        source,
    })?;
    for e in file.lexicon {
        let slot = e.slot.parse().map_err(schema(origin))?;
        let tier = e.tier.parse().map_err(schema(origin))?;
        lexicon
            .extend(slot, tier, e.entries.iter().map(String::as_str))
            .map_err(schema(origin))?;
    }
    Ok(())
}

pub fn load_lexicon_dir(dir: &Path) -> Result<Lexicon, DataError> {
    let entries = fs::read_dir(dir).map_err(|source| DataError::Io {
        path: dir.into(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    let mut lexicon = Lexicon::new();
    for f in files {
        parse_lexicon(&read(&f)?, &f, &mut lexicon)?;
    }
    Ok(lexicon)
}

const DEFAULT_TEMPLATES: [(&str, &str); 3] = [
    ("train.toml", include_str!("../data/templates/train.toml")),
    (
        "unknown.toml",
        include_str!("../data/templates/unknown.toml"),
    ),
    ("ood.toml", include_str!("../data/templates/ood.toml")),
];

const DEFAULT_LEXICONS: [(&str, &str); 3] = [
    ("bring.toml", include_str!("../data/lexicons/bring.toml")),
    ("cook.toml", include_str!("../data/lexicons/cook.toml")),
    ("ood.toml", include_str!("../data/lexicons/ood.toml")),
];

/// The template set shipped with the crate.
pub fn default_templates() -> TemplateSet {
    let [train, unknown, ood] = DEFAULT_TEMPLATES.map(|(name, text)| {
        parse_templates(text, Path::new(name)).expect("shipped templates are valid")
    });
    TemplateSet::new(train, unknown, ood).expect("shipped template ids are unique")
}

/// The lexicon shipped with the crate.
pub fn default_lexicon() -> Lexicon {
    let mut lexicon = Lexicon::new();
    for (name, text) in DEFAULT_LEXICONS {
        parse_lexicon(text, Path::new(name), &mut lexicon).expect("shipped lexicon is valid");
    }
    lexicon
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrkit_core::datagen::{TemplateKind, Tier};

    #[test]
    fn request_template_from_toml() {
        let text = r#"
[[template]]
id = "r1"
kind = "request"
task = "bring"
pattern = "can you put the {object} into the {location}"
"#;
        let t = parse_templates(text, Path::new("t.toml")).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].kind, TemplateKind::Request);
        assert_eq!(
            t[0].placeholders(),
            vec![SlotName::Object, SlotName::Location]
        );
    }

    #[test]
    fn correction_template_from_toml() {
        let text = r#"
[[template]]
id = "c1"
kind = "correction"
task = "bring"
pattern = "i meant the {location}"
corrected_slots = ["location"]
"#;
        let t = parse_templates(text, Path::new("t.toml")).unwrap();
        assert_eq!(t[0].corrected_slots, vec![SlotName::Location]);
        assert_eq!(t[0].interregnum_tokens(), vec!["i", "meant", "the"]);
    }

    #[test]
    fn malformed_and_invalid() {
        assert!(matches!(
            parse_templates("[[template]\nid=1", Path::new("x")),
            Err(DataError::Parse { .. })
        ));
        let three = r#"
[[template]]
id = "c1"
kind = "correction"
task = "bring"
pattern = "no the {object} {location} {recipe}"
corrected_slots = ["object", "location", "recipe"]
"#;
        assert!(matches!(
            parse_templates(three, Path::new("x")),
            Err(DataError::Schema { .. })
        ));
        let dup = r#"
[[template]]
id = "a"
kind = "request"
task = "cook"
pattern = "cook {recipe}"

[[template]]
id = "a"
kind = "request"
task = "cook"
pattern = "make {recipe}"
"#;
        assert!(matches!(
            parse_templates(dup, Path::new("x")),
            Err(DataError::Schema {
                source: SchemaError::DuplicateId(_),
                ..
            })
        ));
        let bad_slot = r#"
[[lexicon]]
slot = "vehicle"
tier = "train"
entries = ["car"]
"#;
        assert!(matches!(
            parse_lexicon(bad_slot, Path::new("x"), &mut Lexicon::new()),
            Err(DataError::Schema { .. })
        ));
    }

    #[test]
    fn shipped_data_counts() {
        let t = default_templates();
        let count = |list: &[Template], kind| list.iter().filter(|t| t.kind == kind).count();
        assert_eq!(count(&t.train, TemplateKind::Request), 15);
        assert_eq!(count(&t.train, TemplateKind::Correction), 45);
        assert!(!t.unknown.is_empty());
        assert!(t.ood.iter().all(|t| t.task.is_out_of_domain()));
        let lex = default_lexicon();
        assert!(!lex.entities(SlotName::Object, Tier::Unknown).is_empty());
        assert!(!lex.entities(SlotName::Product, Tier::Ood).is_empty());
    }
}
