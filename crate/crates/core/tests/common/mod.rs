//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use domino::coding::{CodingInstance, PatternCoding};
use domino::freegroup::Generator;
use domino::{NNInstance, Triple, Word};
use rand::seq::SliceRandom;
use rand::Rng;

/// A standard instance with `|F|` drawn uniformly from `0..=|A|²·rank`.
pub fn random_instance(rng: &mut impl Rng, rank: usize, letters: usize) -> NNInstance {
    let mut all: Vec<Triple> = (0..rank)
        .flat_map(|s| (0..letters).flat_map(move |a| (0..letters).map(move |b| Triple::new(a, b, s))))
        .collect();
    all.shuffle(rng);
    let k = rng.gen_range(0..=all.len());
    NNInstance::numbered(rank, letters, all[..k].iter().copied()).unwrap()
}

/// A standard instance with exactly `k` forbidden triples.
pub fn random_instance_with(rng: &mut impl Rng, rank: usize, letters: usize, k: usize) -> NNInstance {
    let mut all: Vec<Triple> = (0..rank)
        .flat_map(|s| (0..letters).flat_map(move |a| (0..letters).map(move |b| Triple::new(a, b, s))))
        .collect();
    all.shuffle(rng);
    NNInstance::numbered(rank, letters, all[..k.min(all.len())].iter().copied()).unwrap()
}

/// A uniformly random reduced word of length exactly `len`.
pub fn random_word(rng: &mut impl Rng, rank: usize, len: usize) -> Word {
    let gens: Vec<Generator> = Generator::all(rank).collect();
    let mut letters: Vec<Generator> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = *gens.choose(rng).unwrap();
        if letters.last() != Some(&g.inverse()) {
            letters.push(g);
        }
    }
    Word::new(rank, letters).unwrap()
}

/// A rank-1 coding instance over `letters` letters whose codings sit in
/// `[-n, n]`.
pub fn random_z_codings(rng: &mut impl Rng, letters: usize, n: i64) -> CodingInstance {
    let count = rng.gen_range(0..=4);
    let codings = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=3);
            let mut offsets: BTreeSet<i64> = BTreeSet::new();
            while offsets.len() < size.min(2 * n as usize + 1) {
                offsets.insert(rng.gen_range(-n..=n));
            }
            PatternCoding::new(offsets.into_iter().map(|i| (Word::t_power(i), rng.gen_range(0..letters)))).unwrap()
        })
        .collect();
    let alphabet = (0..letters).map(|a| a.to_string()).collect();
    CodingInstance::new(1, alphabet, codings).unwrap()
}

/// Exact emptiness on the integers for codings of radius at most `n`: a
/// configuration is a bi-infinite walk in the graph whose edges are the
/// admissible windows of length `2n + 1`. Returns, for every letter, whether
/// some configuration carries it at the origin.
pub fn de_bruijn_letters(inst: &CodingInstance, n: usize) -> Vec<bool> {
    let letters = inst.alphabet().len();
    let len = 2 * n + 1;
    let rules: Vec<Vec<(usize, usize)>> = inst
        .codings()
        .iter()
        .map(|c| {
            c.entries()
                .iter()
                .map(|(w, a)| ((w.exponent_sum() + n as i64) as usize, *a))
                .collect()
        })
        .collect();
    let mut windows: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..len {
        windows = windows
            .into_iter()
            .flat_map(|w| {
                (0..letters).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    let mut edges: Vec<Vec<usize>> = windows
        .into_iter()
        .filter(|w| !rules.iter().any(|r| r.iter().all(|&(i, a)| w[i] == a)))
        .collect();
    loop {
        let sources: BTreeSet<&[usize]> = edges.iter().map(|w| &w[..len - 1]).collect();
        let targets: BTreeSet<&[usize]> = edges.iter().map(|w| &w[1..]).collect();
        let kept: Vec<Vec<usize>> = edges
            .iter()
            .filter(|w| targets.contains(&w[..len - 1]) && sources.contains(&w[1..]))
            .cloned()
            .collect();
        if kept.len() == edges.len() {
            break;
        }
        edges = kept;
    }
    let mut out = vec![false; letters];
    for w in &edges {
        out[w[n]] = true;
    }
    out
}
