use serde::{Deserialize, Serialize};

/// Ground radar with a maximum detection range and detector constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Radar {
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default = "default_zeta")]
    pub zeta1: f64,
    #[serde(default = "default_zeta")]
    pub zeta2: f64,
}

fn default_zeta() -> f64 {
    1.0
}

/// Missile site with a maximum hit radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Missile {
    pub center: [f64; 2],
    pub radius: f64,
}

/// No-fly zone. Horizontal rectangle, unbounded in altitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoFlyZone {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl NoFlyZone {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        [
            [self.x_min, self.y_min],
            [self.x_max, self.y_min],
            [self.x_max, self.y_max],
            [self.x_min, self.y_max],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Threat {
    Radar(Radar),
    Missile(Missile),
    Nfz(NoFlyZone),
}

impl Threat {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Threat::Radar(_) => "radar",
            Threat::Missile(_) => "missile",
            Threat::Nfz(_) => "nfz",
        }
    }

    /// Describes the first violated invariant as `(field, reason)`.
    pub fn check(&self) -> Option<(&'static str, &'static str)> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        let fin = |c: [f64; 2]| c[0].is_finite() && c[1].is_finite();
        match self {
            Threat::Radar(r) => {
                if !fin(r.center) {
                    Some(("center", "not finite"))
                } else if !pos(r.radius) {
                    Some(("radius", "must be positive"))
                } else if !pos(r.zeta1) {
                    Some(("zeta1", "must be positive"))
                } else if !pos(r.zeta2) {
                    Some(("zeta2", "must be positive"))
                } else {
                    None
                }
            }
            Threat::Missile(m) => {
                if !fin(m.center) {
                    Some(("center", "not finite"))
                } else if !pos(m.radius) {
                    Some(("radius", "must be positive"))
                } else {
                    None
                }
            }
            Threat::Nfz(z) => {
                if ![z.x_min, z.x_max, z.y_min, z.y_max].iter().all(|v| v.is_finite()) {
                    Some(("x_min", "not finite"))
                } else if z.x_min >= z.x_max {
                    Some(("x_max", "rectangle is degenerate"))
                } else if z.y_min >= z.y_max {
                    Some(("y_max", "rectangle is degenerate"))
                } else {
                    None
                }
            }
        }
    }
}
