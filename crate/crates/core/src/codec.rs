//! Run-length codec.
//!
//! A sequence over a finite alphabet is encoded as the sequence of its
//! maximal runs: `(symbol, length)` pairs in which adjacent pairs carry
//! distinct symbols and every length is at least one. Encoding is a
//! bijection onto such pair sequences, so decoding is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symbols are single Unicode scalar values; alphabets are small and finite.
pub type Symbol = char;

/// An ordered set of distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    /// Builds an alphabet from distinct symbols. Order is kept but carries no
    /// meaning for the codec.
    pub fn new<I: IntoIterator<Item = Symbol>>(symbols: I) -> Result<Self> {
        let symbols: Vec<Symbol> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::Validation("alphabet must not be empty".into()));
        }
        for (idx, s) in symbols.iter().enumerate() {
            if symbols[..idx].contains(s) {
                return Err(Error::Validation(format!(
                    "duplicate symbol {s:?} in alphabet"
                )));
            }
        }
        Ok(Self { symbols })
    }

    /// The distinct characters of `text` in order of first appearance.
    pub fn from_text(text: &str) -> Self {
        let mut symbols = Vec::new();
        for c in text.chars() {
            if !symbols.contains(&c) {
                symbols.push(c);
            }
        }
        Self { symbols }
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        self.symbols.contains(&symbol)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A finite sequence of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolSequence {
    symbols: Vec<Symbol>,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    /// One character per symbol, no validation.
    pub fn from_text(text: &str) -> Self {
        Self {
            symbols: text.chars().collect(),
        }
    }

    /// Parses `text` and rejects characters outside `alphabet`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let seq = Self::from_text(text);
        seq.check_alphabet(alphabet)?;
        Ok(seq)
    }

    /// Verifies that every symbol belongs to `alphabet`.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        for (pos, &s) in self.symbols.iter().enumerate() {
            if !alphabet.contains(s) {
                return Err(Error::Validation(format!(
                    "symbol {s:?} at position {pos} is not in the declared alphabet"
                )));
            }
        }
        Ok(())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.symbols.iter().collect()
    }
}

/// One maximal run: a symbol and how many times it repeats.
///
/// Lengths are unbounded 64-bit counts; construction rejects zero.
/// Serialized form is the two-element array `["a", 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "(Symbol, u64)", try_from = "(Symbol, u64)")]
pub struct Run {
    symbol: Symbol,
    length: u64,
}

impl Run {
    pub fn new(symbol: Symbol, length: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::Validation(format!(
                "run of {symbol:?} has zero length"
            )));
        }
        Ok(Self { symbol, length })
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn length(&self) -> u64 {
        self.length
    }
}

impl From<Run> for (Symbol, u64) {
    fn from(run: Run) -> Self {
        (run.symbol, run.length)
    }
}

impl TryFrom<(Symbol, u64)> for Run {
    type Error = Error;

    fn try_from((symbol, length): (Symbol, u64)) -> Result<Self> {
        Run::new(symbol, length)
    }
}

/// A valid run-length encoding: all lengths positive, adjacent symbols
/// distinct. Instances can only be built through validating constructors,
/// so holding a `RunSequence` is proof of both invariants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunSequence {
    runs: Vec<Run>,
}

impl RunSequence {
    pub fn new(runs: Vec<Run>) -> Result<Self> {
        for (idx, pair) in runs.windows(2).enumerate() {
            if pair[0].symbol == pair[1].symbol {
                return Err(Error::Validation(format!(
                    "adjacent runs {idx} and {} share symbol {:?}",
                    idx + 1,
                    pair[0].symbol
                )));
            }
        }
        Ok(Self { runs })
    }

    /// For runs produced by the encoder itself, where the invariants hold by
    /// construction.
    pub(crate) fn from_runs_unchecked(runs: Vec<Run>) -> Self {
        debug_assert!(runs.windows(2).all(|p| p[0].symbol != p[1].symbol));
        Self { runs }
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Number of runs (encoded length).
    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Length of the decoded sequence.
    pub fn decoded_len(&self) -> u64 {
        self.runs.iter().map(|r| r.length).sum()
    }

    /// JSON array of `[symbol, length]` pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.runs).expect("runs serialize infallibly")
    }

    /// Parses the JSON pair format and validates both invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let runs: Vec<Run> = serde_json::from_str(text)?;
        Self::new(runs)
    }
}

/// Incremental run builder. Feed symbols one at a time; a run is returned
/// the moment a differing symbol closes it, which makes every emitted run
/// final regardless of what follows.
#[derive(Debug, Clone, Default)]
pub struct RunAccumulator {
    current: Option<(Symbol, u64)>,
}

impl RunAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Absorbs one symbol and yields the run it just closed, if any.
    pub fn push(&mut self, symbol: Symbol) -> Option<Run> {
        match self.current {
            Some((s, len)) if s == symbol => {
                self.current = Some((s, len + 1));
                None
            }
            Some((s, len)) => {
                self.current = Some((symbol, 1));
                Some(Run { symbol: s, length: len })
            }
            None => {
                self.current = Some((symbol, 1));
                None
            }
        }
    }

    /// Closes and returns the trailing run, resetting the accumulator.
    pub fn finish(&mut self) -> Option<Run> {
        self.current.take().map(|(symbol, length)| Run { symbol, length })
    }

    /// The run in progress, without closing it.
    pub fn pending(&self) -> Option<Run> {
        self.current.map(|(symbol, length)| Run { symbol, length })
    }
}

fn encode_symbols(symbols: &[Symbol]) -> RunSequence {
    let mut acc = RunAccumulator::new();
    let mut runs = Vec::new();
    for &s in symbols {
        if let Some(run) = acc.push(s) {
            runs.push(run);
        }
    }
    if let Some(run) = acc.finish() {
        runs.push(run);
    }
    RunSequence::from_runs_unchecked(runs)
}

/// Encodes a sequence as its maximal runs. The empty sequence encodes to the
/// empty run sequence.
pub fn rle_encode(seq: &SymbolSequence) -> RunSequence {
    encode_symbols(seq.symbols())
}

/// Decodes runs back to the symbol sequence. Exact inverse of [`rle_encode`];
/// fails only if the decoded length does not fit in memory addressing.
pub fn rle_decode(runs: &RunSequence) -> Result<SymbolSequence> {
    let total = runs.decoded_len();
    let total: usize = total.try_into().map_err(|_| {
        Error::Range(format!("decoded length {total} exceeds addressable size"))
    })?;
    let mut symbols = Vec::with_capacity(total);
    for run in runs.runs() {
        for _ in 0..run.length {
            symbols.push(run.symbol);
        }
    }
    Ok(SymbolSequence::new(symbols))
}

/// Encodes exactly the first `n` symbols of `seq`.
///
/// The trailing run of the result reflects only those `n` symbols; it may be
/// shorter than the corresponding run of the full encoding.
pub fn encode_prefix_runs(seq: &SymbolSequence, n: usize) -> Result<RunSequence> {
    if n > seq.len() {
        return Err(Error::Range(format!(
            "prefix of {n} symbols requested from a sequence of length {}",
            seq.len()
        )));
    }
    Ok(encode_symbols(&seq.symbols()[..n]))
}

/// Splits raw text into one sequence per line. Carriage returns are stripped
/// so CRLF input behaves like LF.
pub fn parse_raw_lines(text: &str) -> Vec<SymbolSequence> {
    text.lines()
        .map(|line| SymbolSequence::from_text(line.trim_end_matches('\r')))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn runs(pairs: &[(char, u64)]) -> Vec<Run> {
        pairs.iter().map(|&(s, l)| Run::new(s, l).unwrap()).collect()
    }

    #[test]
    fn encodes_binary_example() {
        // 36-character worked example; the string is the unique decode of the
        // run list, so encode and decode are checked against each other.
        let expected = runs(&[
            ('0', 4),
            ('1', 3),
            ('0', 8),
            ('1', 2),
            ('0', 2),
            ('1', 9),
            ('0', 8),
        ]);
        let canonical = RunSequence::new(expected.clone()).unwrap();
        let seq = rle_decode(&canonical).unwrap();
        assert_eq!(seq.to_text(), "000011100000000110011111111100000000");
        assert_eq!(seq.len(), 36);
        let encoded = rle_encode(&seq);
        assert_eq!(encoded.runs(), expected.as_slice());
        assert_eq!(encoded.len(), 7);
        assert_eq!(encoded.decoded_len(), 36);
    }

    #[test]
    fn encodes_constant_and_alternating_sequences() {
        let constant = rle_encode(&SymbolSequence::from_text("aaaa"));
        assert_eq!(constant.runs(), runs(&[('a', 4)]).as_slice());

        let alternating = rle_encode(&SymbolSequence::from_text("ababab"));
        assert_eq!(
            alternating.runs(),
            runs(&[('a', 1), ('b', 1), ('a', 1), ('b', 1), ('a', 1), ('b', 1)]).as_slice()
        );
    }

    #[test]
    fn empty_round_trip() {
        let empty = SymbolSequence::default();
        let encoded = rle_encode(&empty);
        assert!(encoded.is_empty());
        assert_eq!(rle_decode(&encoded).unwrap(), empty);
    }

    #[test]
    fn prefix_encoding_truncates_final_run() {
        let seq = SymbolSequence::from_text("aaabba");
        let prefix = encode_prefix_runs(&seq, 5).unwrap();
        assert_eq!(prefix.runs(), runs(&[('a', 3), ('b', 2)]).as_slice());

        let shorter = encode_prefix_runs(&seq, 4).unwrap();
        assert_eq!(shorter.runs(), runs(&[('a', 3), ('b', 1)]).as_slice());

        assert!(encode_prefix_runs(&seq, 0).unwrap().is_empty());
        assert!(matches!(
            encode_prefix_runs(&seq, 7),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn rejects_invalid_run_sequences() {
        assert!(matches!(Run::new('a', 0), Err(Error::Validation(_))));

        let adjacent = vec![Run::new('a', 2).unwrap(), Run::new('a', 1).unwrap()];
        assert!(matches!(RunSequence::new(adjacent), Err(Error::Validation(_))));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let seq = rle_encode(&SymbolSequence::from_text("0001100"));
        let json = seq.to_json();
        assert_eq!(json, r#"[["0",3],["1",2],["0",2]]"#);
        assert_eq!(RunSequence::from_json(&json).unwrap(), seq);

        assert!(matches!(
            RunSequence::from_json(r#"[["a",0]]"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            RunSequence::from_json(r#"[["a",2],["a",1]]"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(RunSequence::from_json("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn alphabet_validation() {
        let alphabet = Alphabet::new(['0', '1']).unwrap();
        assert!(SymbolSequence::parse("0101", &alphabet).is_ok());
        assert!(matches!(
            SymbolSequence::parse("01021", &alphabet),
            Err(Error::Validation(_))
        ));
        assert!(matches!(Alphabet::new(['a', 'a']), Err(Error::Validation(_))));
        assert!(matches!(Alphabet::new([]), Err(Error::Validation(_))));
        assert_eq!(Alphabet::from_text("banana").symbols(), &['b', 'a', 'n']);
    }

    #[test]
    fn accumulator_emits_only_settled_runs() {
        let mut acc = RunAccumulator::new();
        assert_eq!(acc.push('a'), None);
        assert_eq!(acc.push('a'), None);
        assert_eq!(acc.pending(), Some(Run::new('a', 2).unwrap()));
        assert_eq!(acc.push('b'), Some(Run::new('a', 2).unwrap()));
        assert_eq!(acc.finish(), Some(Run::new('b', 1).unwrap()));
        assert_eq!(acc.finish(), None);
    }

    fn arb_sequence(max_alphabet: usize, max_len: usize) -> impl Strategy<Value = SymbolSequence> {
        (2..=max_alphabet).prop_flat_map(move |k| {
            prop::collection::vec(0..k, 0..=max_len).prop_map(|indices| {
                let symbols = indices
                    .into_iter()
                    .map(|i| char::from(b'a' + i as u8))
                    .collect();
                SymbolSequence::new(symbols)
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(seq in arb_sequence(5, 300)) {
            let encoded = rle_encode(&seq);
            prop_assert_eq!(rle_decode(&encoded).unwrap(), seq);
        }

        #[test]
        fn encoding_invariants_hold(seq in arb_sequence(5, 300)) {
            let encoded = rle_encode(&seq);
            prop_assert!(encoded.runs().iter().all(|r| r.length() >= 1));
            prop_assert!(encoded
                .runs()
                .windows(2)
                .all(|p| p[0].symbol() != p[1].symbol()));
            prop_assert_eq!(encoded.decoded_len(), seq.len() as u64);
        }

        #[test]
        fn prefix_run_count_is_monotone(seq in arb_sequence(4, 200)) {
            let mut prev = 0usize;
            for n in 0..=seq.len() {
                let count = encode_prefix_runs(&seq, n).unwrap().len();
                // Extending by one symbol adds at most one run.
                prop_assert!(count == prev || count == prev + 1);
                prop_assert!(count >= prev);
                prev = count;
            }
            prop_assert_eq!(prev, rle_encode(&seq).len());
        }

        #[test]
        fn json_format_round_trips(seq in arb_sequence(5, 100)) {
            let encoded = rle_encode(&seq);
            prop_assert_eq!(RunSequence::from_json(&encoded.to_json()).unwrap(), encoded);
        }
    }
}
