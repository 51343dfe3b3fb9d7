//! Seeded scenario generation from density and relief presets.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    blocks_endpoint, generate_terrain, GridDomain, MissionSpace, Missile, NoFlyZone, NoiseSpec,
    Octave, Radar, Scenario, Threat, UavShape,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::rng::stream;

/// Obstacle density families, from empty to crowded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityPreset {
    None,
    Sparse,
    Medium,
    More,
    Dense,
}

impl DensityPreset {
    pub const ALL: [DensityPreset; 5] = [
        DensityPreset::None,
        DensityPreset::Sparse,
        DensityPreset::Medium,
        DensityPreset::More,
        DensityPreset::Dense,
    ];

    /// (radars, missiles, no-fly zones)
    pub fn counts(self) -> (usize, usize, usize) {
        match self {
            DensityPreset::None => (0, 0, 0),
            DensityPreset::Sparse => (1, 1, 1),
            DensityPreset::Medium => (2, 1, 2),
            DensityPreset::More => (2, 2, 3),
            DensityPreset::Dense => (3, 3, 5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DensityPreset::None => "none",
            DensityPreset::Sparse => "sparse",
            DensityPreset::Medium => "medium",
            DensityPreset::More => "more",
            DensityPreset::Dense => "dense",
        }
    }
}

/// Terrain relief families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReliefPreset {
    Basic,
    Mountain,
    Canyon,
    Hills,
}

impl ReliefPreset {
    pub const ALL: [ReliefPreset; 4] = [
        ReliefPreset::Basic,
        ReliefPreset::Mountain,
        ReliefPreset::Canyon,
        ReliefPreset::Hills,
    ];

    pub fn noise(self) -> NoiseSpec {
        let oct = |frequency: f64, amplitude: f64, seed: u64| Octave { frequency, amplitude, seed };
        let (base, octaves) = match self {
            ReliefPreset::Basic => (0.0, vec![oct(1.0 / 60.0, 6.0, 1), oct(1.0 / 25.0, 2.5, 2), oct(0.1, 0.8, 3)]),
            ReliefPreset::Mountain => (
                4.0,
                vec![oct(1.0 / 50.0, 14.0, 1), oct(1.0 / 20.0, 4.0, 2), oct(0.125, 1.0, 3)],
            ),
            ReliefPreset::Canyon => (
                10.0,
                vec![oct(1.0 / 30.0, 10.0, 1), oct(1.0 / 12.0, 3.0, 2), oct(1.0 / 6.0, 0.5, 3)],
            ),
            ReliefPreset::Hills => (0.0, vec![oct(1.0 / 20.0, 4.0, 1), oct(1.0 / 9.0, 2.0, 2), oct(0.2, 0.6, 3)]),
        };
        NoiseSpec { base, octaves }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReliefPreset::Basic => "basic",
            ReliefPreset::Mountain => "mountain",
            ReliefPreset::Canyon => "canyon",
            ReliefPreset::Hills => "hills",
        }
    }
}

macro_rules! preset_parse {
    ($ty:ty) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                <$ty>::ALL
                    .into_iter()
                    .find(|p| p.name() == s)
                    .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

preset_parse!(DensityPreset);
preset_parse!(ReliefPreset);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Endpoints {
    /// Horizontal start and target positions; altitude is placed at the
    /// safe height above ground.
    Fixed { start: [f64; 2], target: [f64; 2] },
    /// Drawn uniformly in the mission space, at least `min_separation` apart.
    Random { min_separation: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub density: DensityPreset,
    pub relief: ReliefPreset,
    pub endpoints: Endpoints,
    pub width: f64,
    pub depth: f64,
    pub cell_size: f64,
    pub safe_height: f64,
    pub uav: UavShape,
    /// Detector constants given to generated radars.
    pub radar_zeta: (f64, f64),
    /// Overrides the preset's (radars, missiles, no-fly zones) counts.
    #[serde(default)]
    pub counts: Option<(usize, usize, usize)>,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_retries() -> usize {
    1000
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            density: DensityPreset::Sparse,
            relief: ReliefPreset::Basic,
            endpoints: Endpoints::Fixed {
                start: [0.0, 0.0],
                target: [100.0, 70.0],
            },
            width: 150.0,
            depth: 100.0,
            cell_size: 1.0,
            safe_height: 1.0,
            uav: UavShape::default(),
            radar_zeta: (1.0, 1e-4),
            counts: None,
            max_retries: default_retries(),
        }
    }
}

impl ScenarioParams {
    pub fn new(density: DensityPreset, relief: ReliefPreset) -> Self {
        Self {
            density,
            relief,
            ..Self::default()
        }
    }

    pub fn threat_counts(&self) -> (usize, usize, usize) {
        self.counts.unwrap_or_else(|| self.density.counts())
    }
}

const ENDPOINT_CLEARANCE: f64 = 3.0;

fn clear_of(threat: &Threat, p: [f64; 2]) -> bool {
    let q = Vec3::new(p[0], p[1], 0.0);
    match threat {
        Threat::Nfz(z) => {
            let grown = NoFlyZone {
                x_min: z.x_min - ENDPOINT_CLEARANCE,
                x_max: z.x_max + ENDPOINT_CLEARANCE,
                y_min: z.y_min - ENDPOINT_CLEARANCE,
                y_max: z.y_max + ENDPOINT_CLEARANCE,
            };
            !grown.contains(p[0], p[1])
        }
        Threat::Missile(m) => {
            (p[0] - m.center[0]).hypot(p[1] - m.center[1]) > m.radius + ENDPOINT_CLEARANCE
        }
        Threat::Radar(_) => !blocks_endpoint(threat, q),
    }
}

/// Generates a scenario deterministically from `seed`.
pub fn generate_scenario(seed: u64, params: &ScenarioParams) -> Result<Scenario> {
    let domain = GridDomain {
        width: params.width,
        height: params.depth,
        cell_size: params.cell_size,
    };
    let terrain = generate_terrain(seed, domain, &params.relief.noise())?;
    let ms = MissionSpace {
        x_min: 0.0,
        x_max: params.width,
        y_min: 0.0,
        y_max: params.depth,
    };
    let mut rng = stream(seed, &[0x5ce_4a410]);
    let retries = params.max_retries.max(1);

    let (start, target) = match params.endpoints {
        Endpoints::Fixed { start, target } => (start, target),
        Endpoints::Random { min_separation } => {
            let mut found = None;
            for _ in 0..retries {
                let s = [rng.random_range(ms.x_min..=ms.x_max), rng.random_range(ms.y_min..=ms.y_max)];
                let t = [rng.random_range(ms.x_min..=ms.x_max), rng.random_range(ms.y_min..=ms.y_max)];
                if (s[0] - t[0]).hypot(s[1] - t[1]) >= min_separation {
                    found = Some((s, t));
                    break;
                }
            }
            found.ok_or(Error::Placement {
                what: "start/target".into(),
                attempts: retries,
            })?
        }
    };
    for (name, p) in [("start", start), ("target", target)] {
        if !ms.contains(p[0], p[1]) {
            return Err(Error::Config(format!("{name} lies outside the mission space")));
        }
    }

    let (radars, missiles, zones) = params.threat_counts();
    let mut threats = Vec::with_capacity(radars + missiles + zones);
    // Threats cluster around the start-target corridor so density matters
    // to the path rather than to empty corners of the map.
    let corridor = |rng: &mut crate::rng::PlannerRng| -> [f64; 2] {
        let t = rng.random_range(0.15..0.85);
        let off = rng.random_range(-25.0..25.0);
        let (dx, dy) = (target[0] - start[0], target[1] - start[1]);
        let len = dx.hypot(dy).max(1e-9);
        let (nx, ny) = (-dy / len, dx / len);
        [
            (start[0] + t * dx + off * nx).clamp(ms.x_min, ms.x_max),
            (start[1] + t * dy + off * ny).clamp(ms.y_min, ms.y_max),
        ]
    };
    let kinds = std::iter::repeat_n(0u8, radars)
        .chain(std::iter::repeat_n(1u8, missiles))
        .chain(std::iter::repeat_n(2u8, zones));
    for kind in kinds {
        let mut placed = None;
        for _ in 0..retries {
            let c = corridor(&mut rng);
            let threat = match kind {
                0 => Threat::Radar(Radar {
                    center: c,
                    radius: rng.random_range(12.0..22.0),
                    zeta1: params.radar_zeta.0,
                    zeta2: params.radar_zeta.1,
                }),
                1 => Threat::Missile(Missile {
                    center: c,
                    radius: rng.random_range(8.0..15.0),
                }),
                _ => {
                    let hw = rng.random_range(4.0..12.5);
                    let hh = rng.random_range(4.0..12.5);
                    Threat::Nfz(NoFlyZone {
                        x_min: c[0] - hw,
                        x_max: c[0] + hw,
                        y_min: c[1] - hh,
                        y_max: c[1] + hh,
                    })
                }
            };
            if clear_of(&threat, start) && clear_of(&threat, target) {
                placed = Some(threat);
                break;
            }
        }
        threats.push(placed.ok_or_else(|| Error::Placement {
            what: "threat clear of start/target".into(),
            attempts: retries,
        })?);
    }

    let lift = |p: [f64; 2]| Vec3::new(p[0], p[1], terrain.height_clamped(p[0], p[1]) + params.safe_height);
    let scenario = Scenario {
        start: lift(start),
        target: lift(target),
        terrain,
        threats,
        mission_space: ms,
        uav: params.uav,
        safe_height: params.safe_height,
    };
    scenario.validate()?;
    Ok(scenario)
}
