use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Characters stripped from both edges of a word.
const EDGE_PUNCT: &[char] = &[',', '.', '?', '!'];

/// A word and its 0-based position in the sequence it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub text: String,
    pub index: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, index: usize) -> Self {
        Token {
            text: text.into(),
            index,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Splits on whitespace runs, trims `, . ? !` from word edges and drops
/// words left empty. Indices are assigned consecutively from 0.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<Token> {
    text.split_whitespace()
        .map(|w| w.trim_matches(EDGE_PUNCT))
        .filter(|w| !w.is_empty())
        .enumerate()
        .map(|(i, w)| {
            let text = if lowercase {
                w.to_lowercase()
            } else {
                w.to_string()
            };
            Token { text, index: i }
        })
        .collect()
}

/// Builds tokens from already split words, numbering them from 0.
pub fn from_words<S: AsRef<str>>(words: &[S]) -> Vec<Token> {
    words
        .iter()
        .enumerate()
        .map(|(i, w)| Token::new(w.as_ref(), i))
        .collect()
}

/// Renumbers a token slice from 0, cloning the texts.
pub fn renumber<'a, I>(tokens: I) -> Vec<Token>
where
    I: IntoIterator<Item = &'a Token>,
{
    tokens
        .into_iter()
        .enumerate()
        .map(|(i, t)| Token::new(t.text.clone(), i))
        .collect()
}

/// Joins token texts with single spaces.
pub fn join<T: AsRef<str>>(tokens: &[T]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}
