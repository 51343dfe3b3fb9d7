use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Codebook, PlannerGenome, LAYOUT};
use crate::error::{Error, Result};
use crate::operators::{Case2, RankScheme};
use crate::pathmodel::SmoothMethod;

/// A categorical token whose variants are listed in code order.
pub trait Coded: Copy + PartialEq + 'static {
    const ALL: &'static [Self];

    fn name(self) -> &'static str;

    fn code(self) -> u32 {
        Self::ALL.iter().position(|v| *v == self).expect("variant listed in ALL") as u32
    }

    /// Variant for a raw field value; codes past the list wrap around.
    fn from_code(code: u32) -> Self {
        Self::ALL[code as usize % Self::ALL.len()]
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|v| v.name() == name)
    }
}

macro_rules! coded {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $($variant),*
        }

        impl Coded for $name {
            const ALL: &'static [Self] = &[$($name::$variant),*];

            fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),*
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

macro_rules! coded_foreign {
    ($name:ty { $($variant:path => $text:literal),* $(,)? }) => {
        impl Coded for $name {
            const ALL: &'static [Self] = &[$($variant),*];

            fn name(self) -> &'static str {
                match self {
                    $($variant => $text),*
                }
            }
        }
    };
}

coded!(
    /// How the individuals are split into populations.
    Division {
        Single => "single",
        Island => "island",
        Maps => "maps",
        Cegda => "cegda",
    }
);

coded!(SortKind {
    Penalty => "penalty",
    NonDominated => "non-dominated",
    AlphaLevel => "alpha-level",
    ViolationCount => "violation-count",
});

coded!(SelectionKind {
    Tournament => "tournament",
    Truncation => "truncation",
    Roulette => "roulette",
    Sus => "sus",
});

coded!(ExploitKind {
    NPoint => "npx",
    Uniform => "ux",
    Arithmetic => "ax",
    Cipso => "cipso",
    Safari => "safari",
    Commensalism => "commensalism",
    DeRand => "de-rand",
    DeBest => "de-best",
});

coded!(ExploreKind {
    Uniform => "um",
    NonUniform => "num",
    Gaussian => "gm",
    Cauchy => "cm",
    Pus => "pus",
    Sgwo => "sgwo",
    Cinf => "cinf",
    None => "none",
});

coded!(EndKind {
    Generations => "generations",
    WallTime => "wall-time",
});

coded!(Case1Kind {
    None => "none",
    Stagnation => "stagnation",
    Homogenization => "homogenization",
    Goal => "goal",
});

coded_foreign!(SmoothMethod {
    SmoothMethod::Bezier => "bezier",
    SmoothMethod::BSpline => "bspline",
    SmoothMethod::Rts => "rts",
    SmoothMethod::TangentCircle => "tangent-circle",
});

coded_foreign!(RankScheme {
    RankScheme::Linear => "linear",
    RankScheme::Logarithmic => "logarithmic",
    RankScheme::Exponential => "exponential",
    RankScheme::Identity => "identity",
});

coded_foreign!(Case2 {
    Case2::None => "none",
    Case2::Reset => "reset",
    Case2::Kill => "kill",
    Case2::Adjust => "adjust",
});

/// A decoded genome. Counts and percentages hold codebook values;
/// `*_param` and auxiliary fields hold codebook row indices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub n_control_points: usize,
    pub n_populations: usize,
    pub individuals: usize,
    pub division: Division,
    pub smoother: SmoothMethod,

    pub sort: SortKind,
    pub sort_param: u8,
    pub elitism_pct: f64,
    pub rank: RankScheme,
    pub selection: SelectionKind,
    pub selection_param: u8,

    pub exploit: ExploitKind,
    pub exploit_param: u8,
    pub twins: bool,
    pub explore: ExploreKind,
    pub explore_param: u8,
    pub keep_inferior: bool,

    pub end: EndKind,
    pub end_param: u8,
    pub case1: Case1Kind,
    pub case1_param: u8,
    pub case2: Case2,
    pub case2_param: u8,
    pub restart: bool,

    pub cellular: bool,
    pub injection: u8,
    pub repair: u8,
    pub migration: u8,
    pub antibody: u8,
    pub forbid_clones: bool,
    pub decay: u8,
    pub pfih: u8,
}

/// Raw field values in [`LAYOUT`] order.
fn fields(g: PlannerGenome) -> [u32; 32] {
    std::array::from_fn(|i| g.field(&LAYOUT[i]))
}

pub fn decode_with(g: PlannerGenome, cb: &Codebook) -> PlannerConfig {
    let v = fields(g);
    let idx = |i: usize| v[i] as usize;
    let code = |i: usize| v[i] as u8;
    PlannerConfig {
        n_control_points: cb.control_points[idx(0)],
        n_populations: cb.populations[idx(1)],
        individuals: cb.individuals[idx(2)],
        division: Division::from_code(v[3]),
        smoother: SmoothMethod::from_code(v[4]),
        sort: SortKind::from_code(v[5]),
        sort_param: code(6),
        elitism_pct: cb.elitism_pct[idx(7)],
        rank: RankScheme::from_code(v[8]),
        selection: SelectionKind::from_code(v[9]),
        selection_param: code(10),
        exploit: ExploitKind::from_code(v[11]),
        exploit_param: code(12),
        twins: v[13] == 1,
        explore: ExploreKind::from_code(v[14]),
        explore_param: code(15),
        keep_inferior: v[16] == 1,
        end: EndKind::from_code(v[17]),
        end_param: code(18),
        case1: Case1Kind::from_code(v[19]),
        case1_param: code(20),
        case2: Case2::from_code(v[21]),
        case2_param: code(22),
        restart: v[23] == 1,
        cellular: v[24] == 1,
        injection: code(25),
        repair: code(26),
        migration: code(27),
        antibody: code(28),
        forbid_clones: v[29] == 1,
        decay: code(30),
        pfih: code(31),
    }
}

/// Decodes against the built-in codebook.
pub fn decode(g: PlannerGenome) -> PlannerConfig {
    decode_with(g, Codebook::builtin())
}

fn position<T: PartialEq + fmt::Display>(field: usize, table: &[T], value: &T) -> Result<u32> {
    table.iter().position(|t| t == value).map(|p| p as u32).ok_or_else(|| Error::Encoding {
        field: LAYOUT[field].token,
        value: value.to_string(),
        width: LAYOUT[field].width as u32,
    })
}

fn param(field: usize, value: u8) -> Result<u32> {
    let width = LAYOUT[field].width as u32;
    if u32::from(value) < (1 << width) {
        Ok(u32::from(value))
    } else {
        Err(Error::Encoding {
            field: LAYOUT[field].token,
            value: value.to_string(),
            width,
        })
    }
}

pub fn encode_with(c: &PlannerConfig, cb: &Codebook) -> Result<PlannerGenome> {
    let v: [u32; 32] = [
        position(0, &cb.control_points, &c.n_control_points)?,
        position(1, &cb.populations, &c.n_populations)?,
        position(2, &cb.individuals, &c.individuals)?,
        c.division.code(),
        c.smoother.code(),
        c.sort.code(),
        param(6, c.sort_param)?,
        position(7, &cb.elitism_pct, &c.elitism_pct)?,
        c.rank.code(),
        c.selection.code(),
        param(10, c.selection_param)?,
        c.exploit.code(),
        param(12, c.exploit_param)?,
        u32::from(c.twins),
        c.explore.code(),
        param(15, c.explore_param)?,
        u32::from(c.keep_inferior),
        c.end.code(),
        param(18, c.end_param)?,
        c.case1.code(),
        param(20, c.case1_param)?,
        c.case2.code(),
        param(22, c.case2_param)?,
        u32::from(c.restart),
        u32::from(c.cellular),
        param(25, c.injection)?,
        param(26, c.repair)?,
        param(27, c.migration)?,
        param(28, c.antibody)?,
        u32::from(c.forbid_clones),
        param(30, c.decay)?,
        param(31, c.pfih)?,
    ];
    Ok(LAYOUT
        .iter()
        .zip(v)
        .fold(PlannerGenome::ZEROS, |g, (f, x)| g.with_bits_at(f.offset, f.width, x)))
}

/// Encodes against the built-in codebook.
pub fn encode(c: &PlannerConfig) -> Result<PlannerGenome> {
    encode_with(c, Codebook::builtin())
}
