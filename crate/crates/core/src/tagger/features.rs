//! Feature templates for the greedy tagger.
//!
//! Keys have the form `<template>=<value>`. Neighbor windows stay inside the
//! word's own segment; positions outside it read as `<BOS>` / `<EOS>`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use hashbrown::HashSet;

use crate::label::LabelTag;

const BOS: &str = "<BOS>";
const EOS: &str = "<EOS>";

/// Per-sequence data shared by all positions.
pub struct SequenceContext {
    lower: Vec<String>,
    raw: Vec<String>,
    boundary: usize,
    request_words: HashSet<String>,
    correction_words: HashSet<String>,
    /// Correction words that do not occur in the request.
    novel: Vec<String>,
}

impl SequenceContext {
    pub fn new<T: AsRef<str>>(tokens: &[T], boundary: usize) -> Self {
        let raw: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        let lower: Vec<String> = raw.iter().map(|w| w.to_lowercase()).collect();
        let boundary = boundary.min(lower.len());
        let request_words: HashSet<String> = lower[..boundary].iter().cloned().collect();
        let correction_words: HashSet<String> = lower[boundary..].iter().cloned().collect();
        let mut novel = Vec::new();
        for w in &lower[boundary..] {
            if !request_words.contains(w) && !novel.contains(w) {
                novel.push(w.clone());
            }
        }
        SequenceContext {
            lower,
            raw,
            boundary,
            request_words,
            correction_words,
            novel,
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    fn segment(&self, position: usize) -> core::ops::Range<usize> {
        if position < self.boundary {
            0..self.boundary
        } else {
            self.boundary..self.lower.len()
        }
    }

    /// Lowercased word at `position + offset`, or a sentinel outside the segment.
    fn neighbor(&self, position: usize, offset: isize) -> &str {
        let seg = self.segment(position);
        let target = position as isize + offset;
        if target < seg.start as isize {
            BOS
        } else if target >= seg.end as isize {
            EOS
        } else {
            &self.lower[target as usize]
        }
    }

    /// Feature keys for one position given the labels of all earlier positions.
    pub fn features(&self, position: usize, history: &[LabelTag]) -> Vec<String> {
        let mut f = Vec::with_capacity(48);
        let w = &self.lower[position];
        let in_request = position < self.boundary;

        f.push("bias".to_string());
        f.push(format!("w0={}", self.raw[position]));
        f.push(format!("lw0={w}"));
        let chars: Vec<char> = w.chars().collect();
        for n in 1..=3 {
            if chars.len() >= n {
                let pre: String = chars[..n].iter().collect();
                let suf: String = chars[chars.len() - n..].iter().collect();
                f.push(format!("p{n}={pre}"));
                f.push(format!("s{n}={suf}"));
            }
        }
        f.push(format!("shape={}", shape(&self.raw[position])));

        let (m2, m1, p1, p2) = (
            self.neighbor(position, -2),
            self.neighbor(position, -1),
            self.neighbor(position, 1),
            self.neighbor(position, 2),
        );
        f.push(format!("w[-2]={m2}"));
        f.push(format!("w[-1]={m1}"));
        f.push(format!("w[+1]={p1}"));
        f.push(format!("w[+2]={p2}"));
        f.push(format!("w[-1]w0={m1}|{w}"));
        f.push(format!("w0w[+1]={w}|{p1}"));
        f.push(format!("w[-2]w[-1]={m2}|{m1}"));

        let seg = if in_request { "request" } else { "correction" };
        f.push(format!("seg={seg}"));
        let dist = if in_request {
            self.boundary - position
        } else {
            position - self.boundary
        };
        f.push(format!("dist_boundary={}", bucket(dist)));
        let from_start = position - self.segment(position).start;
        f.push(format!("pos_in_seg={}", from_start.min(3)));

        let prev = history.last().map_or(BOS, |l| l.as_str());
        let prev2 = if history.len() >= 2 {
            history[history.len() - 2].as_str()
        } else {
            BOS
        };
        f.push(format!("prev_label={prev}"));
        f.push(format!("prev2_label={prev2}|{prev}"));
        f.push(format!("prev_label+w0={prev}|{w}"));
        f.push(format!("prev_label+seg={prev}|{seg}"));

        let other = if in_request {
            &self.correction_words
        } else {
            &self.request_words
        };
        let in_other = other.contains(w.as_str());
        f.push(format!("in_other={in_other}"));
        f.push(format!("prev_label+in_other={prev}|{in_other}"));

        let hist_r = summary(history, [LabelTag::R1, LabelTag::R2]);
        let hist_s = summary(history, [LabelTag::S1, LabelTag::S2]);
        f.push(format!("hist_r={hist_r}"));
        f.push(format!("hist_s={hist_s}"));
        f.push(format!("hist_rs={hist_r}|{hist_s}|{seg}"));
        f.push(format!("prev_label+hist_r={prev}|{hist_r}"));

        if in_request {
            self.request_features(position, m2, m1, &mut f);
        } else {
            self.correction_features(position, history, prev, &mut f);
        }
        f
    }

    fn request_features(&self, position: usize, m2: &str, m1: &str, f: &mut Vec<String>) {
        let corr = &self.lower[self.boundary..];
        let corr_first = corr.first().map_or(EOS, String::as_str);
        f.push(format!("corr_first={corr_first}"));
        f.push(format!("corr_first+w[-1]={corr_first}|{m1}"));
        f.push(format!("corr_len={}", bucket(corr.len())));
        f.push(format!("novel_count={}", self.novel.len().min(4)));

        // Does the left context of this word reappear in the correction in
        // front of a word the request does not contain?
        let mut l2_match = false;
        let mut l1_match = false;
        for k in 0..corr.len() {
            if self.request_words.contains(&corr[k]) {
                continue;
            }
            let c1 = if k >= 1 { corr[k - 1].as_str() } else { BOS };
            let c2 = if k >= 2 { corr[k - 2].as_str() } else { BOS };
            if c1 == m1 {
                l1_match = true;
                if c2 == m2 {
                    l2_match = true;
                }
            }
        }
        f.push(format!("lctx1_in_corr={l1_match}"));
        f.push(format!("lctx2_in_corr={l2_match}"));
        f.push(format!("lctx2={m2}|{m1}|l2match={l2_match}"));

        for nw in &self.novel {
            f.push(format!("lctx2+novel={m2}|{m1}|{nw}"));
            let chars: Vec<char> = nw.chars().collect();
            let suf: String = chars[chars.len().saturating_sub(3)..].iter().collect();
            f.push(format!("lctx2+novel_s3={m2}|{m1}|{suf}"));
            f.push(format!("w0+novel={}|{nw}", self.lower[position]));
        }
    }

    fn correction_features(
        &self,
        position: usize,
        history: &[LabelTag],
        prev: &str,
        f: &mut Vec<String>,
    ) {
        let m1 = self.neighbor(position, -1);
        let m2 = self.neighbor(position, -2);
        let request = &self.lower[..self.boundary];
        let label_at = |j: usize| history.get(j).map_or("?", |l| l.as_str());

        let mut ctx2 = "NONE";
        let mut ctx1 = [false; 6];
        for j in 0..request.len() {
            let r1 = if j >= 1 { request[j - 1].as_str() } else { BOS };
            let r2 = if j >= 2 { request[j - 2].as_str() } else { BOS };
            if r1 == m1 {
                if let Some(l) = history.get(j) {
                    ctx1[l.ordinal()] = true;
                }
                if r2 == m2 && ctx2 == "NONE" {
                    ctx2 = label_at(j);
                }
            }
        }
        let mut ctx1_key = String::new();
        for l in LabelTag::ALL {
            if ctx1[l.ordinal()] && l != LabelTag::C {
                ctx1_key.push_str(l.as_str());
            }
        }
        if ctx1_key.is_empty() {
            ctx1_key.push_str("NONE");
        }
        f.push(format!("ctx2_req={ctx2}"));
        f.push(format!("ctx1_req={ctx1_key}"));
        f.push(format!("ctx2_req+prev={ctx2}|{prev}"));
        f.push(format!("ctx1_req+prev={ctx1_key}|{prev}"));

        // label the request gave to this very word
        let mut same = "NONE";
        for (j, rw) in request.iter().enumerate() {
            if *rw == self.lower[position] {
                same = label_at(j);
                if same != "C" {
                    break;
                }
            }
        }
        f.push(format!("same_word_req={same}"));
        f.push(format!("same_word_req+prev={same}|{prev}"));

        // Coarse shape of the request: its first word and the word after
        // the R1 run. Lets slot order depend on how the request was phrased.
        let first = request.first().map_or(BOS, String::as_str);
        let after_r1 = history[..self.boundary.min(history.len())]
            .iter()
            .rposition(|l| *l == LabelTag::R1)
            .map_or("NONE", |j| request.get(j + 1).map_or(EOS, String::as_str));
        let sig = format!("{first}|{after_r1}");
        let hist_s = summary(history, [LabelTag::S1, LabelTag::S2]);
        f.push(format!("sig={sig}"));
        f.push(format!("sig+w[-1]={sig}|{m1}"));
        f.push(format!("sig+w[-2]w[-1]={sig}|{m2}|{m1}"));
        f.push(format!("sig+w0={sig}|{}", self.lower[position]));
        f.push(format!("sig+hist_s={sig}|{hist_s}|{prev}"));
    }
}

/// Feature keys for `position`; see [`SequenceContext::features`].
pub fn featurize<T: AsRef<str>>(
    tokens: &[T],
    boundary: usize,
    position: usize,
    label_history: &[LabelTag],
) -> Vec<String> {
    SequenceContext::new(tokens, boundary).features(position, label_history)
}

fn bucket(n: usize) -> &'static str {
    match n {
        0 => "0",
        1 => "1",
        2 => "2",
        3 => "3",
        4 => "4",
        5..=7 => "5-7",
        8..=11 => "8-11",
        _ => "12+",
    }
}

fn summary(history: &[LabelTag], tags: [LabelTag; 2]) -> &'static str {
    match (history.contains(&tags[0]), history.contains(&tags[1])) {
        (false, false) => "none",
        (true, false) => "1",
        (false, true) => "2",
        (true, true) => "12",
    }
}

fn shape(word: &str) -> String {
    let mut out = String::new();
    let mut last = None;
    for c in word.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if last != Some(s) {
            out.push(s);
            last = Some(s);
        }
    }
    out
}
