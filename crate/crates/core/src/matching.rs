//! Longest-common-substring statistics.
//!
//! Two routes to the same quantity: a quadratic dynamic program kept as an
//! oracle, and a suffix-automaton walk for real workloads. Both report the
//! match length together with one witness position per sequence, tie-broken
//! to the lexicographically smallest `(i, j)`.
//!
//! On top of plain LCS, two statistics specific to run-length encoded data:
//! [`lcs_rle`] compares fixed-size prefixes of the encodings, and
//! [`shifted_prefix_match`] scans all shifted tails of the raw sequences for
//! the longest common encoded prefix. The two bracket each other:
//! `lcs_rle` at `n` runs is at least `shifted_prefix_match` at `n` symbols
//! minus one, and at most it once `u` runs have settled on both sides.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::codec::{rle_encode, Run, Symbol, SymbolSequence};
use crate::error::{Error, Result};

/// Match length plus the start of one occurrence in each sequence.
///
/// For a zero-length match the witnesses are `(0, 0)` by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub length: usize,
    pub witness_i: usize,
    pub witness_j: usize,
}

impl MatchResult {
    fn empty() -> Self {
        MatchResult { length: 0, witness_i: 0, witness_j: 0 }
    }
}

const NO_STATE: usize = usize::MAX;

struct SamState<T> {
    len: usize,
    link: usize,
    next: HashMap<T, usize>,
}

/// Suffix automaton over arbitrary hashable tokens. Transitions live in hash
/// maps because run tokens range over an unbounded set of (symbol, length)
/// pairs.
struct SuffixAutomaton<T> {
    states: Vec<SamState<T>>,
}

impl<T: Eq + Hash + Clone> SuffixAutomaton<T> {
    fn build(tokens: &[T]) -> Self {
        let mut states = vec![SamState { len: 0, link: NO_STATE, next: HashMap::new() }];
        let mut last = 0usize;
        for tok in tokens {
            last = Self::extend(&mut states, last, tok);
        }
        Self { states }
    }

    fn extend(states: &mut Vec<SamState<T>>, last: usize, tok: &T) -> usize {
        let cur = states.len();
        states.push(SamState {
            len: states[last].len + 1,
            link: NO_STATE,
            next: HashMap::new(),
        });
        let mut p = last;
        while p != NO_STATE && !states[p].next.contains_key(tok) {
            states[p].next.insert(tok.clone(), cur);
            p = states[p].link;
        }
        if p == NO_STATE {
            states[cur].link = 0;
        } else {
            let q = states[p].next[tok];
            if states[p].len + 1 == states[q].len {
                states[cur].link = q;
            } else {
                let clone = states.len();
                states.push(SamState {
                    len: states[p].len + 1,
                    link: states[q].link,
                    next: states[q].next.clone(),
                });
                while p != NO_STATE && states[p].next.get(tok) == Some(&q) {
                    states[p].next.insert(tok.clone(), clone);
                    p = states[p].link;
                }
                states[q].link = clone;
                states[cur].link = clone;
            }
        }
        cur
    }

    /// Longest match ending at each position of `tokens`, reported to `visit`
    /// as `(state, length, position)`.
    fn walk(&self, tokens: &[T], mut visit: impl FnMut(usize, usize, usize)) {
        let mut v = 0usize;
        let mut l = 0usize;
        for (idx, tok) in tokens.iter().enumerate() {
            loop {
                if let Some(&nxt) = self.states[v].next.get(tok) {
                    v = nxt;
                    l += 1;
                    break;
                }
                if v == 0 {
                    l = 0;
                    break;
                }
                v = self.states[v].link;
                l = self.states[v].len;
            }
            visit(v, l, idx);
        }
    }

    /// State indices ordered by decreasing length; suffix links always point
    /// from longer to strictly shorter, so this is a topological order for
    /// propagating values up the link tree.
    fn by_decreasing_len(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (1..self.states.len()).collect();
        order.sort_by(|&a, &b| self.states[b].len.cmp(&self.states[a].len));
        order
    }
}

/// First occurrence of `needle` in `haystack` (Knuth-Morris-Pratt).
fn find_first<T: Eq>(haystack: &[T], needle: &[T]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    let mut fail = vec![0usize; needle.len()];
    let mut k = 0usize;
    for q in 1..needle.len() {
        while k > 0 && needle[k] != needle[q] {
            k = fail[k - 1];
        }
        if needle[k] == needle[q] {
            k += 1;
        }
        fail[q] = k;
    }
    let mut k = 0usize;
    for (idx, t) in haystack.iter().enumerate() {
        while k > 0 && needle[k] != *t {
            k = fail[k - 1];
        }
        if needle[k] == *t {
            k += 1;
        }
        if k == needle.len() {
            return Some(idx + 1 - k);
        }
    }
    None
}

/// Quadratic-time LCS oracle: common-suffix dynamic program over all index
/// pairs, tracking the smallest witness on the fly.
pub fn lcs_bruteforce<T: Eq>(a: &[T], b: &[T]) -> MatchResult {
    if a.is_empty() || b.is_empty() {
        return MatchResult::empty();
    }
    let mut best = MatchResult::empty();
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ta) in a.iter().enumerate() {
        for (j, tb) in b.iter().enumerate() {
            if ta == tb {
                let len = prev[j] + 1;
                cur[j + 1] = len;
                let wi = i + 1 - len;
                let wj = j + 1 - len;
                if len > best.length
                    || (len == best.length && (wi, wj) < (best.witness_i, best.witness_j))
                {
                    best = MatchResult { length: len, witness_i: wi, witness_j: wj };
                }
            } else {
                cur[j + 1] = 0;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Linear-time LCS via a suffix automaton of `b` walked with `a`.
///
/// Returns the same length and the same smallest witness as
/// [`lcs_bruteforce`]: the walk finds the first end position in `a` at which
/// the maximum is attained (the running match length grows by at most one per
/// step, so the first attainment has the smallest start), and a pattern
/// search locates the earliest occurrence in `b`.
pub fn lcs_fast<T: Eq + Hash + Clone>(a: &[T], b: &[T]) -> MatchResult {
    if a.is_empty() || b.is_empty() {
        return MatchResult::empty();
    }
    let sam = SuffixAutomaton::build(b);
    let mut best = 0usize;
    let mut best_end = 0usize;
    sam.walk(a, |_, l, idx| {
        if l > best {
            best = l;
            best_end = idx;
        }
    });
    if best == 0 {
        return MatchResult::empty();
    }
    let i = best_end + 1 - best;
    let j = find_first(b, &a[i..i + best])
        .expect("a substring matched during the automaton walk must occur in b");
    MatchResult { length: best, witness_i: i, witness_j: j }
}

/// Longest substring common to every sequence.
///
/// Builds the automaton of the first sequence and, for each other sequence,
/// records the longest match reaching each state (propagated down suffix
/// links); the answer is the best state-wise minimum.
pub fn lcs_multi<T: Eq + Hash + Clone>(seqs: &[&[T]]) -> Result<usize> {
    if seqs.len() < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 sequences, got {}",
            seqs.len()
        )));
    }
    if seqs.iter().any(|s| s.is_empty()) {
        return Ok(0);
    }
    let sam = SuffixAutomaton::build(seqs[0]);
    let order = sam.by_decreasing_len();
    let mut combined: Vec<usize> = sam.states.iter().map(|s| s.len).collect();
    for s in &seqs[1..] {
        let mut best = vec![0usize; sam.states.len()];
        sam.walk(s, |v, l, _| {
            if l > best[v] {
                best[v] = l;
            }
        });
        // A match of positive length at a state covers the full longest
        // string of every suffix-link ancestor.
        for &v in &order {
            if best[v] > 0 {
                let lk = sam.states[v].link;
                let cand = best[v].min(sam.states[lk].len);
                if cand > best[lk] {
                    best[lk] = cand;
                }
            }
        }
        for (c, b) in combined.iter_mut().zip(&best) {
            *c = (*c).min(*b);
        }
    }
    Ok(combined.into_iter().max().unwrap_or(0))
}

/// LCS between the first `n_runs` run tokens of the two encodings.
///
/// Tokens are whole `(symbol, length)` pairs; a match must agree on both
/// coordinates. Requires both sequences to encode to at least `n_runs` runs.
pub fn lcs_rle(x: &SymbolSequence, y: &SymbolSequence, n_runs: usize) -> Result<MatchResult> {
    let fx = rle_encode(x);
    let fy = rle_encode(y);
    for (name, encoded) in [("first", &fx), ("second", &fy)] {
        if encoded.len() < n_runs {
            return Err(Error::Precondition(format!(
                "{name} sequence encodes to {} runs, but {n_runs} are required",
                encoded.len()
            )));
        }
    }
    Ok(lcs_fast(&fx.runs()[..n_runs], &fy.runs()[..n_runs]))
}

/// Per-position run lookup for one sequence: which run covers a position and
/// where that run ends.
struct RunIndex {
    runs: Vec<Run>,
    run_of: Vec<usize>,
    run_end: Vec<usize>,
}

impl RunIndex {
    fn new(seq: &SymbolSequence) -> Self {
        let runs: Vec<Run> = rle_encode(seq).runs().to_vec();
        let mut run_of = Vec::with_capacity(seq.len());
        let mut run_end = Vec::with_capacity(runs.len());
        let mut pos = 0usize;
        for (idx, run) in runs.iter().enumerate() {
            let end = pos + run.length() as usize;
            run_end.push(end);
            for _ in pos..end {
                run_of.push(idx);
            }
            pos = end;
        }
        Self { runs, run_of, run_end }
    }
}

/// Number of leading run tokens shared by the encodings of the tails
/// `x[i..]` and `y[j..]`, counted up to `limit`. The run covering the start
/// position enters truncated to its remaining length.
fn common_encoded_prefix(x: &RunIndex, i: usize, y: &RunIndex, j: usize, limit: usize) -> usize {
    if limit == 0 {
        return 0;
    }
    let ri = x.run_of[i];
    let rj = y.run_of[j];
    let head_x = (x.runs[ri].symbol(), (x.run_end[ri] - i) as u64);
    let head_y = (y.runs[rj].symbol(), (y.run_end[rj] - j) as u64);
    if head_x != head_y {
        return 0;
    }
    let mut count = 1usize;
    let mut a = ri + 1;
    let mut b = rj + 1;
    while count < limit && a < x.runs.len() && b < y.runs.len() && x.runs[a] == y.runs[b] {
        count += 1;
        a += 1;
        b += 1;
    }
    count
}

/// Maximum over start positions `i, j < n` of the common encoded prefix of
/// the tails `x[i..]` and `y[j..]`, where a prefix of `k` runs only counts if
/// `i, j <= n - k`.
///
/// For `x == y` the shift `(0, 0)` realizes `min(total runs, n)`. The scan
/// skips shift pairs whose budget `n - max(i, j)` cannot beat the current
/// best.
pub fn shifted_prefix_match(x: &SymbolSequence, y: &SymbolSequence, n: usize) -> Result<usize> {
    for (name, seq) in [("first", x), ("second", y)] {
        if n > seq.len() {
            return Err(Error::Range(format!(
                "window {n} exceeds the {name} sequence length {}",
                seq.len()
            )));
        }
    }
    let rx = RunIndex::new(x);
    let ry = RunIndex::new(y);
    let mut best = 0usize;
    for i in 0..n {
        for j in 0..n {
            let budget = n - i.max(j);
            if budget <= best {
                continue;
            }
            let cp = common_encoded_prefix(&rx, i, &ry, j, budget);
            if cp > best {
                best = cp;
            }
        }
    }
    Ok(best)
}

/// Convenience: raw character tokens of a sequence, for LCS over symbols
/// rather than runs.
pub fn symbol_tokens(seq: &SymbolSequence) -> &[Symbol] {
    seq.symbols()
}
