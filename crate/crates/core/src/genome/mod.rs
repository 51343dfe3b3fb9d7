//! The 64-bit planner genome.
//!
//! Bit 0 is the most significant bit of the backing `u64` and the first
//! character of the literal form. Fields are contiguous, so flipping one
//! bit changes exactly one token. Every bit pattern decodes.

mod codebook;
mod config;
mod describe;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::PlannerRng;

pub use codebook::{
    AlphaRow, Cinf, Codebook, ExploitRows, ExploitOp, ExploreOp, ExploreRows, FixedParams, MutationRow, PenaltyRow,
    Planner, SelectionRows, SortRows, CODEBOOK_ENV,
};
pub use config::{
    decode, decode_with, encode, encode_with, Case1Kind, Coded, Division, EndKind, ExploitKind, ExploreKind,
    PlannerConfig, SelectionKind, SortKind,
};
pub use describe::{describe, describe_with, parse_describe, parse_describe_with};

pub const GENOME_BITS: usize = 64;

/// Parameter tables of the genome; `I` to `V` in the describe output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Table {
    Initialization,
    SortSelect,
    Exploitation,
    Ending,
    Other,
}

impl Table {
    pub fn roman(self) -> &'static str {
        match self {
            Table::Initialization => "I",
            Table::SortSelect => "II",
            Table::Exploitation => "III",
            Table::Ending => "IV",
            Table::Other => "V",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub token: &'static str,
    pub table: Table,
    pub offset: usize,
    pub width: usize,
}

macro_rules! layout {
    ($($token:literal $table:ident $offset:literal $width:literal),* $(,)?) => {
        [$(FieldSpec { token: $token, table: Table::$table, offset: $offset, width: $width }),*]
    };
}

/// Field layout in genome order.
pub const LAYOUT: [FieldSpec; 32] = layout![
    "#CP" Initialization 0 2,
    "#P" Initialization 2 2,
    "#I" Initialization 4 3,
    "Di" Initialization 7 2,
    "Cv" Initialization 9 2,
    "So" SortSelect 11 2,
    "So_param" SortSelect 13 3,
    "Elitism" SortSelect 16 2,
    "Rank" SortSelect 18 2,
    "Se" SortSelect 20 2,
    "Se_param" SortSelect 22 2,
    "Exploit" Exploitation 24 3,
    "Exploit_param" Exploitation 27 2,
    "Twins" Exploitation 29 1,
    "Explore" Exploitation 30 3,
    "Explore_param" Exploitation 33 2,
    "Infer" Exploitation 35 1,
    "End" Ending 36 1,
    "End_param" Ending 37 3,
    "Case1" Ending 40 2,
    "Case1_param" Ending 42 2,
    "Case2" Ending 44 2,
    "Case2_param" Ending 46 2,
    "Case3" Ending 48 1,
    "Cell" Other 49 1,
    "Injc" Other 50 2,
    "Rpar" Other 52 2,
    "Mgrt" Other 54 2,
    "Anti" Other 56 2,
    "Fbcl" Other 58 1,
    "Decy" Other 59 2,
    "PFIH" Other 61 3,
];

/// Index of `token` in [`LAYOUT`].
pub fn field_index(token: &str) -> Option<usize> {
    LAYOUT.iter().position(|f| f.token == token)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlannerGenome(pub u64);

impl PlannerGenome {
    pub const ZEROS: Self = Self(0);
    pub const ONES: Self = Self(u64::MAX);

    pub fn bit(self, i: usize) -> bool {
        (self.0 >> (63 - i)) & 1 == 1
    }

    pub fn with_bit(self, i: usize, on: bool) -> Self {
        let mask = 1u64 << (63 - i);
        Self(if on { self.0 | mask } else { self.0 & !mask })
    }

    /// Raw value of `width` bits starting at `offset`, first bit most
    /// significant.
    pub fn bits_at(self, offset: usize, width: usize) -> u32 {
        ((self.0 << offset) >> (64 - width)) as u32
    }

    pub fn with_bits_at(self, offset: usize, width: usize, value: u32) -> Self {
        let shift = 64 - offset - width;
        let mask = ((1u64 << width) - 1) << shift;
        Self((self.0 & !mask) | ((u64::from(value) << shift) & mask))
    }

    pub fn field(self, f: &FieldSpec) -> u32 {
        self.bits_at(f.offset, f.width)
    }

    /// The `width`-character binary string of a field.
    pub fn field_literal(self, f: &FieldSpec) -> String {
        format!("{:0w$b}", self.field(f), w = f.width)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != GENOME_BITS {
            return Err(Error::GenomeLiteral(format!("expected 64 bits, got {}", bits.len())));
        }
        Ok(bits.iter().fold(Self(0), |g, &b| Self((g.0 << 1) | u64::from(b))))
    }

    pub fn to_bits(self) -> Vec<bool> {
        (0..GENOME_BITS).map(|i| self.bit(i)).collect()
    }

    pub fn hamming(self, other: Self) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

impl fmt::Display for PlannerGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:064b}", self.0)
    }
}

impl FromStr for PlannerGenome {
    type Err = Error;

    /// Parses a 64-character `0`/`1` string; surrounding whitespace is
    /// ignored.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != GENOME_BITS {
            return Err(Error::GenomeLiteral(format!("expected 64 characters, got {}", s.chars().count())));
        }
        let bits = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::GenomeLiteral(format!("character {other:?} at position {i}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for PlannerGenome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlannerGenome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn random_genome(rng: &mut PlannerRng) -> PlannerGenome {
    PlannerGenome(rng.random())
}

/// Flips each bit independently with probability `p_bit`.
pub fn mutate_genome(g: PlannerGenome, p_bit: f64, rng: &mut PlannerRng) -> Result<PlannerGenome> {
    if !(0.0..=1.0).contains(&p_bit) {
        return Err(Error::Config(format!("bit-flip probability {p_bit} outside [0, 1]")));
    }
    let mut mask = 0u64;
    for i in 0..GENOME_BITS {
        if rng.random::<f64>() < p_bit {
            mask |= 1 << (63 - i);
        }
    }
    Ok(PlannerGenome(g.0 ^ mask))
}

/// Single-point crossover after bit `cut - 1`, `cut` in `1..=63`.
pub fn crossover_at(a: PlannerGenome, b: PlannerGenome, cut: usize) -> (PlannerGenome, PlannerGenome) {
    let suffix = u64::MAX >> cut;
    let prefix = !suffix;
    (
        PlannerGenome((a.0 & prefix) | (b.0 & suffix)),
        PlannerGenome((b.0 & prefix) | (a.0 & suffix)),
    )
}

pub fn crossover_genome(a: PlannerGenome, b: PlannerGenome, rng: &mut PlannerRng) -> (PlannerGenome, PlannerGenome) {
    crossover_at(a, b, rng.random_range(1..GENOME_BITS))
}
