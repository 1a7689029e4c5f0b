use std::fmt::Write as _;

use super::{EmbeddingError, EmbeddingSet};

/// Cosine similarity in double precision.
pub fn cosine<T: Copy + Into<f64>>(u: &[T], v: &[T]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::LengthMismatch(u.len(), v.len()));
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b): (f64, f64) = (a.into(), b.into());
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word: String,
    pub similarity: f64,
}

fn ranked(word: &str, set: &EmbeddingSet) -> Result<Vec<Neighbor>, EmbeddingError> {
    let query = set.get(word).ok_or_else(|| EmbeddingError::UnknownWord(word.to_string()))?;
    let mut all: Vec<Neighbor> = set
        .iter()
        .filter_map(|(w, v)| {
            cosine(query, v).ok().map(|similarity| Neighbor { word: w.to_string(), similarity })
        })
        .collect();
    all.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.word.cmp(&b.word))
    });
    Ok(all)
}

/// Top-`k` words by descending cosine similarity to `word`, ties broken
/// lexicographically. Zero vectors are skipped.
pub fn nearest_neighbors(
    word: &str,
    k: usize,
    set: &EmbeddingSet,
    include_query: bool,
) -> Result<Vec<Neighbor>, EmbeddingError> {
    let mut all = ranked(word, set)?;
    if !include_query {
        all.retain(|n| n.word != word);
    }
    all.truncate(k);
    Ok(all)
}

/// 1-based rank of `other` among the neighbours of `word`, query included.
pub fn rank_of(word: &str, other: &str, set: &EmbeddingSet) -> Result<usize, EmbeddingError> {
    ranked(word, set)?
        .iter()
        .position(|n| n.word == other)
        .map(|p| p + 1)
        .ok_or_else(|| EmbeddingError::UnknownWord(other.to_string()))
}

/// Mean vector of the tokens found in `set`, and how many were found.
/// Returns a zero vector when none are.
pub fn avg_sentence_embedding<S: AsRef<str>>(tokens: &[S], set: &EmbeddingSet) -> (Vec<f32>, usize) {
    let mut acc = vec![0f64; set.dim()];
    let mut found = 0;
    for v in tokens.iter().filter_map(|t| set.get(t.as_ref())) {
        found += 1;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += *x as f64;
        }
    }
    if found > 0 {
        acc.iter_mut().for_each(|a| *a /= found as f64);
    }
    (acc.into_iter().map(|a| a as f32).collect(), found)
}

/// Side-by-side neighbour columns, one per query.
pub fn neighbors_table(results: &[(String, Vec<Neighbor>)]) -> String {
    let cells: Vec<Vec<String>> = results
        .iter()
        .map(|(q, ns)| {
            std::iter::once(q.clone())
                .chain(ns.iter().map(|n| format!("{} {:.3}", n.word, n.similarity)))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = cells.iter().map(|c| c.iter().map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let depth = cells.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in 0..depth {
        let line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(col, w)| format!("{:<w$}", col.get(row).map(String::as_str).unwrap_or(""), w = w))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        if row == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "=".repeat(*w)).collect();
            writeln!(out, "{}", rule.join("  ")).unwrap();
        }
    }
    out
}

/// CSV `query,rank,word,cosine`.
pub fn neighbors_csv(results: &[(String, Vec<Neighbor>)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["query", "rank", "word", "cosine"]).unwrap();
    for (q, ns) in results {
        for (i, n) in ns.iter().enumerate() {
            w.write_record([q.as_str(), &(i + 1).to_string(), &n.word, &format!("{:.6}", n.similarity)])
                .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// One row per `(query, other)` pair with similarity and rank.
pub fn pairs_table(pairs: &[(String, String, f64, usize)]) -> String {
    let mut out = String::from("pair              cosine   rank\n");
    for (a, b, sim, rank) in pairs {
        writeln!(out, "{:<16} {:>7.3} {:>6}", format!("{a}:{b}"), sim, rank).unwrap();
    }
    out
}
