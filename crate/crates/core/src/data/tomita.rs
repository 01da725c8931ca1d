//! The seven Tomita grammars: membership DFAs and balanced dataset
//! sampling.
//!
//! Rules follow the standard published definitions:
//!
//! 1. `1*`
//! 2. `(10)*`
//! 3. no odd run of 1s immediately followed by an even (nonzero) run of 0s
//! 4. no `000` substring
//! 5. even number of 0s and even number of 1s
//! 6. (#0 − #1) divisible by 3
//! 7. `0*1*0*1*`

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rng};
use crate::scalar::Scalar;

use super::{Label, LabeledSequenceSet, SequenceSample, Task};

/// A validated Tomita grammar index (1 through 7).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrammarId(u8);

impl GrammarId {
    /// Wrap an index, rejecting anything outside 1..=7.
    pub fn new(id: u8) -> Result<GrammarId> {
        if (1..=7).contains(&id) {
            Ok(GrammarId(id))
        } else {
            Err(Error::Config(format!("grammar id must be 1..=7, got {id}")))
        }
    }

    pub fn get(&self) -> u8 {
        self.0
    }
}

impl fmt::Display for GrammarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Config(format!(
                "tomita string must be over {{0,1}}, found '{other}' at position {i}"
            ))),
        })
        .collect()
}

/// Maximal runs of equal bits as `(bit, run length)` pairs.
fn runs(bits: &[u8]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &b in bits {
        match out.last_mut() {
            Some((bit, len)) if *bit == b => *len += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

fn accepts(g: GrammarId, bits: &[u8]) -> bool {
    match g.get() {
        1 => bits.iter().all(|&b| b == 1),
        2 => bits.len() % 2 == 0 && bits.chunks(2).all(|p| p == [1, 0]),
        3 => {
            let rs = runs(bits);
            !rs.windows(2)
                .any(|w| w[0].0 == 1 && w[0].1 % 2 == 1 && w[1].0 == 0 && w[1].1 % 2 == 0)
        }
        4 => !bits.windows(3).any(|w| w == [0, 0, 0]),
        5 => {
            let ones = bits.iter().filter(|&&b| b == 1).count();
            (bits.len() - ones) % 2 == 0 && ones % 2 == 0
        }
        6 => {
            let ones = bits.iter().filter(|&&b| b == 1).count() as i64;
            let zeros = bits.len() as i64 - ones;
            (zeros - ones).rem_euclid(3) == 0
        }
        7 => {
            // DFA over the pattern 0*1*0*1*: phase counts how many
            // symbol alternations we have consumed.
            let mut phase = 0u8;
            for &b in bits {
                phase = match (phase, b) {
                    (0, 0) | (2, 0) => phase,
                    (1, 1) | (3, 1) => phase,
                    (0, 1) => 1,
                    (1, 0) => 2,
                    (2, 1) => 3,
                    (3, 0) => return false,
                    _ => unreachable!(),
                };
            }
            true
        }
        _ => unreachable!("GrammarId is validated"),
    }
}

/// Does grammar `g` accept the binary string `s`?
///
/// `s` must be over the alphabet {0,1}; any other character is
/// rejected with its position named.
pub fn tomita_membership(g: GrammarId, s: &str) -> Result<bool> {
    Ok(accepts(g, &parse_bits(s)?))
}

fn one_hot_steps<T: Scalar>(bits: &[u8]) -> Matrix<T> {
    let mut m = Matrix::zeros(bits.len(), 2);
    for (t, &b) in bits.iter().enumerate() {
        m[(t, b as usize)] = T::one();
    }
    m
}

/// Sample a balanced accept/reject dataset for one grammar.
///
/// Each candidate draws a length uniformly from `[1, max_len]` and then
/// uniform random bits, keeping the string if its membership matches
/// the class still being filled (rejection sampling). Steps are one-hot
/// encoded over {0,1}; labels are 1 = accept, 0 = reject. If a class
/// cannot be filled within the sampling budget — for example grammar 4
/// has no rejecting strings shorter than 3 — the error names the class.
pub fn tomita_dataset<T: Scalar>(
    g: GrammarId,
    max_len: usize,
    per_class: usize,
    rng: &mut Rng,
) -> Result<LabeledSequenceSet<T>> {
    if per_class == 0 {
        return Err(Error::Config("per_class must be at least 1".into()));
    }
    if max_len == 0 {
        return Err(Error::Config("max_len must be at least 1".into()));
    }
    let budget = per_class.saturating_mul(50_000).max(1_000_000);
    let mut sequences: Vec<SequenceSample<T>> = Vec::with_capacity(2 * per_class);
    for accept_class in [true, false] {
        let mut found = 0usize;
        let mut attempts = 0usize;
        while found < per_class {
            if attempts >= budget {
                let class = if accept_class { "accept" } else { "reject" };
                return Err(Error::Generation(format!(
                    "grammar {g}: could not sample {per_class} '{class}' strings of length <= {max_len} within {budget} attempts"
                )));
            }
            attempts += 1;
            let len = 1 + (rng.next_u64() as usize) % max_len;
            let bits: Vec<u8> = (0..len).map(|_| (rng.next_u64() & 1) as u8).collect();
            if accepts(g, &bits) == accept_class {
                sequences.push(SequenceSample {
                    steps: one_hot_steps(&bits),
                    label: Label::Class(accept_class as usize),
                });
                found += 1;
            }
        }
    }
    LabeledSequenceSet::new(Task::BinaryAccept, sequences)
}
