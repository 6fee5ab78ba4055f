use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use hashbrown::{HashMap, HashSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::instantiate::{instantiate, Binding, InstantiateError};
use super::lexicon::{Lexicon, Tier};
use super::record::{Condition, DatasetRecord, Partition, Split};
use super::template::{SlotName, Template, TemplateKind, TemplateSet};
use crate::token::join;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationConfig {
    pub seed: u64,
    pub train_size: usize,
    /// Per condition, in [`Condition::ALL`] order.
    pub val_sizes: [usize; 4],
    pub test_sizes: [usize; 4],
    /// Skip records whose (request, correction) text was already emitted.
    pub dedup: bool,
    pub allow_identity: bool,
}

impl GenerationConfig {
    pub const DEFAULT_TRAIN_SIZE: usize = 74_309;
    pub const DEFAULT_VAL_SIZES: [usize; 4] = [100, 100, 100, 100];
    pub const DEFAULT_TEST_SIZES: [usize; 4] = [205, 606, 584, 332];

    /// All split sizes zero.
    pub fn empty(seed: u64) -> Self {
        GenerationConfig {
            seed,
            train_size: 0,
            val_sizes: [0; 4],
            test_sizes: [0; 4],
            ..Self::default()
        }
    }

    pub fn size_of(&self, split: Split) -> usize {
        match (split.partition(), split.condition()) {
            (Partition::Train, _) | (_, None) => self.train_size,
            (Partition::Validation, Some(c)) => self.val_sizes[c as usize],
            (Partition::Test, Some(c)) => self.test_sizes[c as usize],
        }
    }
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 42,
            train_size: Self::DEFAULT_TRAIN_SIZE,
            val_sizes: Self::DEFAULT_VAL_SIZES,
            test_sizes: Self::DEFAULT_TEST_SIZES,
            dedup: true,
            allow_identity: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("split {split}: requested {requested} records but only {available} distinct combinations exist")]
    InsufficientCombinations {
        split: Split,
        requested: usize,
        available: usize,
    },
    #[error(transparent)]
    Instantiate(#[from] InstantiateError),
}

/// Which templates and entity tier a split draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Space {
    Seen,
    Eval(Condition),
}

impl Space {
    fn of(split: Split) -> Space {
        split.condition().map_or(Space::Seen, Space::Eval)
    }

    /// ChaCha stream id; every space shuffles independently.
    fn stream(self) -> u64 {
        match self {
            Space::Seen => 0,
            Space::Eval(c) => c as u64 + 1,
        }
    }

    fn sources(self, templates: &TemplateSet) -> (&[Template], Tier) {
        match self {
            Space::Seen => (&templates.train, Tier::Train),
            Space::Eval(Condition::UnknownEntities) => (&templates.train, Tier::Unknown),
            Space::Eval(Condition::UnknownTemplates) => (&templates.unknown, Tier::Train),
            Space::Eval(Condition::UnknownBoth) => (&templates.unknown, Tier::Unknown),
            Space::Eval(Condition::OutOfDomain) => (&templates.ood, Tier::Ood),
        }
    }
}

/// One compatible (request template, correction template) combination and
/// the mixed-radix layout of its entity choices.
struct Block<'a> {
    request: &'a Template,
    correction: &'a Template,
    /// Request slots in order, whether corrected, entity count.
    slots: Vec<(SlotName, bool, u64)>,
    size: u64,
}

/// Enumerates every valid (templates, entities) choice of one space as a
/// contiguous index range.
struct CombinationSpace<'a> {
    blocks: Vec<Block<'a>>,
    /// Exclusive end index of each block.
    ends: Vec<u64>,
    lexicon: &'a Lexicon,
    tier: Tier,
    allow_identity: bool,
}

impl<'a> CombinationSpace<'a> {
    fn new(
        templates: &'a [Template],
        lexicon: &'a Lexicon,
        tier: Tier,
        allow_identity: bool,
    ) -> Self {
        let mut blocks = Vec::new();
        let mut ends = Vec::new();
        let mut total: u64 = 0;
        let requests = templates.iter().filter(|t| t.kind == TemplateKind::Request);
        for request in requests {
            let placeholders = request.placeholders();
            let corrections = templates.iter().filter(|t| {
                t.kind == TemplateKind::Correction
                    && t.task == request.task
                    && t.corrected_slots.iter().all(|s| placeholders.contains(s))
            });
            for correction in corrections {
                let mut slots = Vec::new();
                let mut size: u64 = 1;
                for &s in &placeholders {
                    let n = lexicon.entities(s, tier).len() as u64;
                    let corrected = correction.corrected_slots.contains(&s);
                    let radix = match (corrected, allow_identity) {
                        (false, _) => n,
                        (true, true) => n * n,
                        (true, false) => n * n.saturating_sub(1),
                    };
                    size = size.saturating_mul(radix);
                    slots.push((s, corrected, n));
                }
                if size == 0 {
                    continue;
                }
                total = total.saturating_add(size);
                blocks.push(Block {
                    request,
                    correction,
                    slots,
                    size,
                });
                ends.push(total);
            }
        }
        CombinationSpace {
            blocks,
            ends,
            lexicon,
            tier,
            allow_identity,
        }
    }

    fn len(&self) -> u64 {
        self.ends.last().copied().unwrap_or(0)
    }

    fn decode(&self, index: u64) -> (&'a Template, &'a Template, BTreeMap<SlotName, Binding>) {
        let b = self.ends.partition_point(|&end| end <= index);
        let block = &self.blocks[b];
        let start = if b == 0 { 0 } else { self.ends[b - 1] };
        let mut rest = index - start;
        debug_assert!(rest < block.size);
        let mut bindings = BTreeMap::new();
        for &(slot, corrected, n) in &block.slots {
            let entities = self.lexicon.entities(slot, self.tier);
            let binding = if corrected {
                let (radix, others) = if self.allow_identity {
                    (n * n, n)
                } else {
                    (n * (n - 1), n - 1)
                };
                let digit = rest % radix;
                rest /= radix;
                let original = digit / others;
                let mut replacement = digit % others;
                if !self.allow_identity && replacement >= original {
                    replacement += 1;
                }
                Binding::replaced(
                    entities[original as usize].clone(),
                    entities[replacement as usize].clone(),
                )
            } else {
                let digit = rest % n;
                rest /= n;
                Binding::kept(entities[digit as usize].clone())
            };
            bindings.insert(slot, binding);
        }
        (block.request, block.correction, bindings)
    }
}

/// Number of distinct (templates, entities) combinations of `templates`
/// with entities from `tier`.
pub fn combination_count(
    templates: &[Template],
    lexicon: &Lexicon,
    tier: Tier,
    allow_identity: bool,
) -> u64 {
    CombinationSpace::new(templates, lexicon, tier, allow_identity).len()
}

/// Fisher-Yates shuffle of `0..len`, materialized one position at a time.
/// Only displaced entries are stored.
struct LazyPermutation {
    len: u64,
    next: u64,
    displaced: HashMap<u64, u64>,
    rng: ChaCha8Rng,
}

impl LazyPermutation {
    fn new(len: u64, rng: ChaCha8Rng) -> Self {
        LazyPermutation {
            len,
            next: 0,
            displaced: HashMap::new(),
            rng,
        }
    }

    fn remaining(&self) -> u64 {
        self.len - self.next
    }
}

impl Iterator for LazyPermutation {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.next >= self.len {
            return None;
        }
        let i = self.next;
        let j = self.rng.gen_range(i..self.len);
        let at_i = self.displaced.remove(&i).unwrap_or(i);
        let at_j = if j == i {
            at_i
        } else {
            let v = self.displaced.get(&j).copied().unwrap_or(j);
            self.displaced.insert(j, at_i);
            v
        };
        self.next += 1;
        Some(at_j)
    }
}

struct SpaceState<'a> {
    space: CombinationSpace<'a>,
    order: LazyPermutation,
}

/// Streams records split by split: train, the four validation splits, then
/// the four test splits. Validation and test of one condition draw from the
/// same shuffled stream, so they never share a combination.
pub struct Generator<'a> {
    config: GenerationConfig,
    templates: &'a TemplateSet,
    lexicon: &'a Lexicon,
    spaces: HashMap<u64, SpaceState<'a>>,
    seen_text: HashSet<String>,
    split_idx: usize,
    emitted: usize,
    failed: bool,
}

impl<'a> Generator<'a> {
    pub fn new(templates: &'a TemplateSet, lexicon: &'a Lexicon, config: GenerationConfig) -> Self {
        Generator {
            config,
            templates,
            lexicon,
            spaces: HashMap::new(),
            seen_text: HashSet::new(),
            split_idx: 0,
            emitted: 0,
            failed: false,
        }
    }

    fn state(&mut self, space: Space) -> &mut SpaceState<'a> {
        let (templates, lexicon, config) = (self.templates, self.lexicon, &self.config);
        self.spaces.entry(space.stream()).or_insert_with(|| {
            let (list, tier) = space.sources(templates);
            let combos = CombinationSpace::new(list, lexicon, tier, config.allow_identity);
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(space.stream());
            let len = combos.len();
            SpaceState {
                space: combos,
                order: LazyPermutation::new(len, rng),
            }
        })
    }
}

impl Iterator for Generator<'_> {
    type Item = Result<DatasetRecord, GenerateError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let split = *Split::ALL.get(self.split_idx)?;
            let target = self.config.size_of(split);
            if self.emitted >= target {
                self.split_idx += 1;
                self.emitted = 0;
                continue;
            }
            let dedup = self.config.dedup;
            let allow_identity = self.config.allow_identity;
            let emitted = self.emitted;
            let state = self.state(Space::of(split));
            let Some(index) = state.order.next() else {
                self.failed = true;
                return Some(Err(GenerateError::InsufficientCombinations {
                    split,
                    requested: target,
                    available: emitted,
                }));
            };
            let (request, correction, bindings) = state.space.decode(index);
            let id = format!("{}-{:06}", split.as_str(), emitted);
            let record =
                match instantiate(request, correction, &bindings, allow_identity, id, split) {
                    Ok(r) => r,
                    Err(e) => {
                        self.failed = true;
                        return Some(Err(e.into()));
                    }
                };
            if dedup {
                let key = format!(
                    "{}\u{1}{}",
                    join(record.tagged.request_tokens()),
                    join(record.tagged.correction_tokens())
                );
                if !self.seen_text.insert(key) {
                    continue;
                }
            }
            self.emitted += 1;
            return Some(Ok(record));
        }
    }
}

impl Generator<'_> {
    /// Combinations not yet drawn from the space behind `split`.
    pub fn remaining(&mut self, split: Split) -> u64 {
        self.state(Space::of(split)).order.remaining()
    }
}

/// Collects the whole stream.
pub fn generate(
    templates: &TemplateSet,
    lexicon: &Lexicon,
    config: &GenerationConfig,
) -> Result<Vec<DatasetRecord>, GenerateError> {
    Generator::new(templates, lexicon, config.clone()).collect()
}
