//! Seeded synthetic corpora with rare, partly unseen entities.
//!
//! Sentences mix lowercase filler words, a capitalized first word, the odd
//! capitalized common noun, and at most a couple of person or place
//! mentions. Names in the validation and test splits are drawn partly from
//! pools never seen in training, so a tagger has to generalize from shape,
//! character n-grams and context.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{project_bio, AnnotatedSentence, Corpus, EntityMention, EntityType, Split};
use crate::ingest::tokenize;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub sentences: usize,
    pub seed: u64,
    /// Probability that a sentence carries a person mention.
    pub person_rate: f64,
    /// Probability that a sentence carries a place mention.
    pub place_rate: f64,
    /// Share of validation/test names taken from the unseen pools.
    pub unseen_rate: f64,
    pub min_filler: usize,
    pub max_filler: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            sentences: 2000,
            seed: 7,
            person_rate: 0.35,
            place_rate: 0.3,
            unseen_rate: 0.5,
            min_filler: 14,
            max_filler: 26,
        }
    }
}

const ONSETS: [&str; 16] = ["b", "d", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "st", "kr"];
const VOWELS: [&str; 6] = ["a", "e", "i", "o", "u", "y"];
const CODAS: [&str; 6] = ["", "n", "l", "s", "k", "r"];

fn word(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS.choose(rng).unwrap());
        w.push_str(VOWELS.choose(rng).unwrap());
    }
    w.push_str(CODAS.choose(rng).unwrap());
    w
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn pool(rng: &mut ChaCha8Rng, n: usize, syllables: (usize, usize), suffix: &str) -> Vec<String> {
    (0..n)
        .map(|_| {
            let s = rng.gen_range(syllables.0..=syllables.1);
            capitalize(&format!("{}{suffix}", word(rng, s)))
        })
        .collect()
}

struct Pools {
    filler: Vec<String>,
    common_caps: Vec<String>,
    first_names: [Vec<String>; 2],
    surnames: [Vec<String>; 2],
    places: [Vec<String>; 2],
}

/// Build a corpus already split 80/10/10 in sentence order.
pub fn imbalanced_corpus(config: &SyntheticConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let p = Pools {
        filler: (0..300)
            .map(|_| {
                let s = rng.gen_range(1..=3);
                word(&mut rng, s)
            })
            .collect(),
        common_caps: pool(&mut rng, 20, (2, 3), ""),
        first_names: [pool(&mut rng, 40, (2, 2), ""), pool(&mut rng, 40, (2, 2), "")],
        surnames: [pool(&mut rng, 40, (2, 3), "ský"), pool(&mut rng, 40, (2, 3), "ský")],
        places: [pool(&mut rng, 40, (2, 3), "ov"), pool(&mut rng, 40, (2, 3), "ov")],
    };
    let n_train = config.sentences * 8 / 10;
    let n_val = config.sentences / 10;
    let mut corpus = Corpus::new("synthetic");
    for i in 0..config.sentences {
        let split = if i < n_train {
            Split::Train
        } else if i < n_train + n_val {
            Split::Validation
        } else {
            Split::Test
        };
        let held_out = split != Split::Train;
        let s = sentence(&mut rng, &p, config, held_out, i);
        corpus.push(s, split);
    }
    corpus
}

fn pick<'a>(rng: &mut ChaCha8Rng, pools: &'a [Vec<String>; 2], held_out: bool, unseen_rate: f64) -> &'a str {
    let which = usize::from(held_out && rng.gen_bool(unseen_rate));
    pools[which].choose(rng).unwrap()
}

fn sentence(
    rng: &mut ChaCha8Rng,
    p: &Pools,
    config: &SyntheticConfig,
    held_out: bool,
    index: usize,
) -> AnnotatedSentence {
    let n = rng.gen_range(config.min_filler..=config.max_filler);
    let mut words: Vec<String> = (0..n).map(|_| p.filler.choose(rng).unwrap().clone()).collect();
    words[0] = capitalize(&words[0]);
    if rng.gen_bool(0.3) {
        let at = rng.gen_range(1..n);
        words[at] = p.common_caps.choose(rng).unwrap().clone();
    }
    // (insert position, words, type), inserted back to front
    let mut inserts: Vec<(usize, Vec<String>, EntityType)> = Vec::new();
    if rng.gen_bool(config.person_rate) {
        let mut name = vec![pick(rng, &p.first_names, held_out, config.unseen_rate).to_string()];
        if rng.gen_bool(0.5) {
            name.push(pick(rng, &p.surnames, held_out, config.unseen_rate).to_string());
        }
        let at = rng.gen_range(1..n);
        inserts.push((at, name, EntityType::Per));
    }
    if rng.gen_bool(config.place_rate) {
        let mut place = vec![pick(rng, &p.places, held_out, config.unseen_rate).to_string()];
        if rng.gen_bool(0.15) {
            place.push(pick(rng, &p.places, held_out, config.unseen_rate).to_string());
        }
        let at = rng.gen_range(1..n);
        let prep = ["v", "z", "do", "u"].choose(rng).unwrap().to_string();
        inserts.push((at, std::iter::once(prep).chain(place).collect(), EntityType::Loc));
    }
    inserts.sort_by_key(|(at, _, _)| std::cmp::Reverse(*at));
    // mark entity words with their type; prepositions stay outside
    let mut typed: Vec<(String, Option<EntityType>)> = words.into_iter().map(|w| (w, None)).collect();
    for (at, ws, ty) in inserts {
        let skip = usize::from(ty == EntityType::Loc);
        for (k, w) in ws.into_iter().enumerate().rev() {
            let label = (k >= skip).then_some(ty);
            typed.insert(at, (w, label));
        }
    }
    typed.push((".".into(), None));

    let mut text = String::new();
    let mut spans: Vec<(usize, usize, Option<EntityType>)> = Vec::new();
    let mut pos = 0;
    for (k, (w, ty)) in typed.iter().enumerate() {
        if k > 0 && w != "." {
            text.push(' ');
            pos += 1;
        }
        let len = w.chars().count();
        spans.push((pos, pos + len, *ty));
        text.push_str(w);
        pos += len;
    }
    let mut mentions: Vec<EntityMention> = Vec::new();
    for (a, b, ty) in spans {
        let Some(ty) = ty else { continue };
        match mentions.last_mut() {
            Some(m) if m.entity_type == ty && m.char_end + 1 == a => m.char_end = b,
            _ => mentions.push(EntityMention::new(ty, a, b)),
        }
    }
    let tokens = tokenize(&text);
    let tags = project_bio(&tokens, &mentions).expect("generated mentions are aligned");
    AnnotatedSentence {
        sentence_id: format!("syn#{index:05}"),
        doc_id: "syn".into(),
        language: "cs".into(),
        text,
        tokens,
        tags,
        gold_entities: None,
    }
}
