//! Digit blocks, the admissible block set and the rank counter behind the
//! witness function.
//!
//! Position along side AB is measured by the key `1 - u` (0 at B, 1 at A).
//! A {0,2,3}-digit meets AB in a segment whose key interval is the image of
//! `[0, 1]` under one of
//!
//! ```text
//! f0(x) = (1 - x) / 4     f2(x) = (1 + x) / 4     f3(x) = (1 + x) / 2
//! ```
//!
//! (the branch-1 map of each digit sends AB or AC onto AB, and the system is
//! symmetric under the reflection swapping B and C). Digit 0 reverses the
//! direction, which is what the orientation bit of the rank DP tracks. The
//! geometric oracle in [`super::geom`] recomputes these segments from the
//! triangles themselves.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use num_bigint::BigInt;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Longest block for which the per-block rank table is materialized
/// (`3^k` entries).
pub const MAX_BLOCK_LEN: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    digits: Vec<u8>,
}

impl Block {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Parse("empty block".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 3) {
            return Err(Error::Parse(format!("digit {d} outside 0..=3")));
        }
        Ok(Block { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn non_three(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 3).count()
    }

    pub fn has_one(&self) -> bool {
        self.digits.contains(&1)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block({self})")
    }
}

impl FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .trim()
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("bad digit {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Block::new(digits)
    }
}

/// Parses `"b1|b2|...|bm"`.
pub fn parse_address(s: &str) -> Result<Vec<Block>> {
    s.split('|').map(str::parse).collect()
}

pub fn format_address(blocks: &[Block]) -> String {
    blocks.iter().map(Block::to_string).collect::<Vec<_>>().join("|")
}

pub fn flatten(blocks: &[Block]) -> Vec<u8> {
    blocks.iter().flat_map(|b| b.digits.iter().copied()).collect()
}

/// Affine map `x -> slope * x + offset` acting on AB keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyMap {
    pub slope: Dyadic,
    pub offset: Dyadic,
}

impl KeyMap {
    pub fn identity() -> Self {
        KeyMap { slope: Dyadic::one(), offset: Dyadic::zero() }
    }

    pub fn digit(d: u8) -> Result<Self> {
        let q = Dyadic::new(1, 2);
        match d {
            0 => Ok(KeyMap { slope: -&q, offset: q }),
            2 => Ok(KeyMap { slope: q.clone(), offset: q }),
            3 => Ok(KeyMap { slope: Dyadic::new(1, 1), offset: Dyadic::new(1, 1) }),
            _ => Err(Error::Contract(format!("digit {d} has no AB section"))),
        }
    }

    pub fn of_digits(digits: &[u8]) -> Result<Self> {
        let mut acc = KeyMap::identity();
        for &d in digits {
            acc = acc.then(&KeyMap::digit(d)?);
        }
        Ok(acc)
    }

    /// `self ∘ inner`.
    pub fn then(&self, inner: &KeyMap) -> KeyMap {
        KeyMap { slope: &self.slope * &inner.slope, offset: &(&self.slope * &inner.offset) + &self.offset }
    }

    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        &(&self.slope * x) + &self.offset
    }

    pub fn interval(&self) -> (Dyadic, Dyadic) {
        let a = self.offset.clone();
        let b = &self.offset + &self.slope;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn reverses(&self) -> bool {
        self.slope.is_negative()
    }
}

/// `#I(k, w) = sum_{j <= w} binom(k, j) 2^j`.
pub fn admissible_count(k_star: usize, w: usize) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    for j in 0..=w.min(k_star) {
        total += &binom << j;
        binom = binom * BigUint::from(k_star - j) / BigUint::from(j + 1);
    }
    total
}

#[derive(Clone, Debug)]
pub struct AdmissibleSet {
    k_star: usize,
    w: usize,
    /// Sorted by `<4` in the base orientation.
    blocks: Vec<Block>,
}

impl AdmissibleSet {
    pub fn new(k_star: usize, w: usize) -> Result<Self> {
        if k_star == 0 || k_star > MAX_BLOCK_LEN {
            return Err(Error::Parameter(format!("k* must lie in 1..={MAX_BLOCK_LEN}, got {k_star}")));
        }
        if w == 0 {
            return Err(Error::Parameter("w = 0 leaves a single admissible block".into()));
        }
        let w = w.min(k_star);
        let mut keyed = Vec::new();
        for code in 0..3usize.pow(k_star as u32) {
            let block = block_from_code(code, k_star);
            if block.non_three() <= w {
                let lo = KeyMap::of_digits(block.digits())?.interval().0;
                keyed.push((lo, block));
            }
        }
        keyed.sort();
        Ok(AdmissibleSet { k_star, w, blocks: keyed.into_iter().map(|(_, b)| b).collect() })
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn contains(&self, b: &Block) -> bool {
        b.len() == self.k_star && !b.has_one() && b.non_three() <= self.w
    }

    pub fn position(&self, b: &Block) -> Option<usize> {
        self.blocks.iter().position(|x| x == b)
    }
}

const DIGITS_023: [u8; 3] = [0, 2, 3];

fn block_from_code(mut code: usize, k: usize) -> Block {
    let mut digits = vec![0u8; k];
    for slot in digits.iter_mut() {
        *slot = DIGITS_023[code % 3];
        code /= 3;
    }
    Block { digits }
}

fn code_of(digits: &[u8]) -> Option<usize> {
    let mut code = 0;
    for &d in digits.iter().rev() {
        let idx = DIGITS_023.iter().position(|&x| x == d)?;
        code = code * 3 + idx;
    }
    Some(code)
}

#[derive(Clone, Copy, Debug)]
struct BlockInfo {
    /// Admissible blocks strictly below, in base / reversed orientation.
    below: [u64; 2],
    flips: bool,
    admissible: bool,
}

/// Counts admissible addresses below a given one, block by block: the block
/// order inside a cylinder is the base order or its reverse according to the
/// parity of the zeros before it.
#[derive(Clone, Debug)]
pub struct RankCounter {
    set: AdmissibleSet,
    table: Vec<BlockInfo>,
}

impl RankCounter {
    pub fn new(set: AdmissibleSet) -> Result<Self> {
        let k = set.k_star;
        let los: Vec<Dyadic> = set
            .blocks
            .iter()
            .map(|b| KeyMap::of_digits(b.digits()).map(|m| m.interval().0))
            .collect::<Result<_>>()?;
        let n = los.len() as u64;
        let mut table = Vec::with_capacity(3usize.pow(k as u32));
        for code in 0..3usize.pow(k as u32) {
            let block = block_from_code(code, k);
            let map = KeyMap::of_digits(block.digits())?;
            let lo = map.interval().0;
            let under = los.partition_point(|x| x < &lo) as u64;
            let equal = los.get(under as usize).is_some_and(|x| x == &lo) as u64;
            table.push(BlockInfo {
                below: [under, n - under - equal],
                flips: map.reverses(),
                admissible: set.contains(&block),
            });
        }
        Ok(RankCounter { set, table })
    }

    pub fn set(&self) -> &AdmissibleSet {
        &self.set
    }

    pub fn base(&self) -> u64 {
        self.set.size() as u64
    }

    fn info(&self, digits: &[u8]) -> Result<BlockInfo> {
        code_of(digits)
            .map(|c| self.table[c])
            .ok_or_else(|| Error::Contract(format!("block {digits:?} is not over {{0,2,3}}")))
    }

    fn check_blocks(&self, blocks: &[Block]) -> Result<()> {
        if blocks.is_empty() {
            return Err(Error::Contract("address needs at least one block".into()));
        }
        for b in blocks {
            if b.len() != self.set.k_star {
                return Err(Error::Contract(format!("block {b} has length {}, expected {}", b.len(), self.set.k_star)));
            }
        }
        Ok(())
    }

    /// `#{a in I^m : a <4 blocks}`. Blocks after the first inadmissible one
    /// contribute nothing.
    pub fn rank_count(&self, blocks: &[Block]) -> Result<BigUint> {
        self.check_blocks(blocks)?;
        let n = BigUint::from(self.base());
        let mut count = BigUint::zero();
        let mut orient = 0usize;
        let mut alive = true;
        for b in blocks {
            count *= &n;
            if alive {
                let info = self.info(b.digits())?;
                count += info.below[orient];
                alive = info.admissible;
                orient ^= info.flips as usize;
            }
        }
        Ok(count)
    }

    /// Value of the witness on the cylinder of `blocks`: `[k, k+1] / N^m` when
    /// all blocks are admissible, the constant `k / N^m` otherwise.
    pub fn eval_blocks(&self, blocks: &[Block]) -> Result<PhiInterval> {
        let rank = self.rank_count(blocks)?;
        let admissible = blocks.iter().all(|b| self.set.contains(b));
        Ok(PhiInterval { rank, base: self.base(), m: blocks.len() as u32, degenerate: !admissible })
    }

    /// Witness value of the digit sequence `digits` followed by `3, 3, ...`.
    /// A digit 1 freezes the value at the junction of its 0- and 2-siblings,
    /// which is the value of `prefix, 0, 0, 3, 3, ...`.
    pub fn value_of_digits(&self, digits: &[u8]) -> Result<BigRational> {
        if let Some(p) = digits.iter().position(|&d| d == 1) {
            let mut chain = digits[..p].to_vec();
            chain.extend([0, 0]);
            return self.value_of_digits(&chain);
        }
        let k = self.set.k_star;
        let n = BigUint::from(self.base());
        let mut num = BigUint::zero();
        let mut den = BigUint::one();
        let mut orient = 0usize;
        let mut buf = vec![3u8; k];
        for chunk in digits.chunks(k) {
            buf.fill(3);
            buf[..chunk.len()].copy_from_slice(chunk);
            let info = self.info(&buf)?;
            num = num * &n + info.below[orient];
            den *= &n;
            if !info.admissible {
                return Ok(ratio(num, den));
            }
            orient ^= info.flips as usize;
        }
        // all-3 tail: N - 1 per block in base orientation, 0 in reversed
        if orient == 0 {
            num += 1u32;
        }
        Ok(ratio(num, den))
    }

    /// Value range over the cylinder of a digit prefix: its two extreme
    /// continuations are `3, 3, ...` and `0, 3, 3, ...`.
    pub fn range_of_digits(&self, digits: &[u8]) -> Result<(BigRational, BigRational)> {
        let a = self.value_of_digits(digits)?;
        let mut ext = digits.to_vec();
        ext.push(0);
        let b = self.value_of_digits(&ext)?;
        Ok(if a <= b { (a, b) } else { (b, a) })
    }

    /// Constant value on the cylinder `(prefix, 1)`, checked against the
    /// second extreme chain `(prefix, 2, 0, 3, ...)`.
    pub fn extend_constant(&self, prefix: &[u8]) -> Result<BigRational> {
        if prefix.iter().any(|&d| d == 1 || d > 3) {
            return Err(Error::Contract("prefix before the digit 1 must be over {0,2,3}".into()));
        }
        let (left, right) = self.junction_chains(prefix)?;
        if left != right {
            return Err(Error::Construction(format!(
                "extreme chains disagree after {prefix:?}: {left} vs {right}"
            )));
        }
        Ok(left)
    }

    /// Values of the two chains meeting at the junction of `(prefix, 0)` and
    /// `(prefix, 2)`.
    pub fn junction_chains(&self, prefix: &[u8]) -> Result<(BigRational, BigRational)> {
        let mut a = prefix.to_vec();
        a.extend([0, 0]);
        let mut b = prefix.to_vec();
        b.extend([2, 0]);
        Ok((self.value_of_digits(&a)?, self.value_of_digits(&b)?))
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `[rank, rank + 1] / N^m`, or the single point `rank / N^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiInterval {
    pub rank: BigUint,
    pub base: u64,
    pub m: u32,
    pub degenerate: bool,
}

impl PhiInterval {
    pub fn denominator(&self) -> BigUint {
        BigUint::from(self.base).pow(self.m)
    }

    pub fn lo(&self) -> BigRational {
        ratio(self.rank.clone(), self.denominator())
    }

    pub fn hi(&self) -> BigRational {
        let top = if self.degenerate { self.rank.clone() } else { &self.rank + 1u32 };
        ratio(top, self.denominator())
    }

    pub fn endpoint_strings(&self) -> [String; 2] {
        let den = self.denominator();
        let top = if self.degenerate { self.rank.clone() } else { &self.rank + 1u32 };
        [format!("{}/{den}", self.rank), format!("{top}/{den}")]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_maps_tile_the_side() {
        let spans: Vec<_> = [0u8, 2, 3].iter().map(|&d| KeyMap::digit(d).unwrap().interval()).collect();
        assert_eq!(spans[0], (Dyadic::zero(), Dyadic::new(1, 2)));
        assert_eq!(spans[1], (Dyadic::new(1, 2), Dyadic::new(1, 1)));
        assert_eq!(spans[2], (Dyadic::new(1, 1), Dyadic::one()));
        assert!(KeyMap::digit(0).unwrap().reverses());
        assert!(KeyMap::digit(1).is_err());
    }

    #[test]
    fn block_codes_round_trip() {
        for code in 0..81 {
            let b = block_from_code(code, 4);
            assert_eq!(code_of(b.digits()), Some(code));
        }
        assert_eq!(code_of(&[1, 0]), None);
    }

    #[test]
    fn address_parsing() {
        let a = parse_address("033|233").unwrap();
        assert_eq!(format_address(&a), "033|233");
        assert_eq!(flatten(&a), vec![0, 3, 3, 2, 3, 3]);
        assert!(parse_address("03x").is_err());
        assert!(parse_address("").is_err());
    }
}
