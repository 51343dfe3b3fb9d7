//! Straightforward recomputation of the objectives and constraints on
//! plain arrays, for cross-checking the library. Ground height comes from
//! an analytic plane rather than the terrain grid.

#![allow(dead_code)]

use std::f64::consts::PI;

pub type P = [f64; 3];

#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub h0: f64,
    pub a: f64,
    pub b: f64,
}

impl Plane {
    pub fn at(&self, x: f64, y: f64) -> f64 {
        self.h0 + self.a * x + self.b * y
    }
}

pub struct World {
    pub ground: Plane,
    /// (x, y, radius, zeta1, zeta2)
    pub radars: Vec<(f64, f64, f64, f64, f64)>,
    /// (x, y, radius)
    pub missiles: Vec<(f64, f64, f64)>,
    /// (x_min, x_max, y_min, y_max)
    pub nfz: Vec<(f64, f64, f64, f64)>,
    /// Ellipsoid semi-axes.
    pub uav: (f64, f64, f64),
    pub safe_height: f64,
}

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn len3(v: P) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn len2(v: P) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

pub fn f1(w: &[P]) -> f64 {
    let mut total = 0.0;
    for i in 1..w.len() {
        total += len3(sub(w[i], w[i - 1]));
    }
    total / len3(sub(w[w.len() - 1], w[0]))
}

pub fn f2(w: &[P], world: &World) -> f64 {
    let m = w.len() as f64;
    let mut s = 0.0;
    for p in &w[1..] {
        let map = world.ground.at(p[0], p[1]);
        if p[2] > map {
            s += (p[2] - map) / m;
        }
    }
    s
}

pub fn rcs(uav: (f64, f64, f64), psi_e: f64, phi_e: f64) -> f64 {
    let (a, b, c) = uav;
    let az = psi_e.sin();
    let bz = psi_e.cos();
    let ap = phi_e.sin();
    let bp = phi_e.cos();
    let inner = a * a * az * az * bp * bp + b * b * az * az * ap * ap + c * c * bz * bz;
    let denom = (inner * inner).max(1e-12);
    PI * a * a * b * b * c * c / denom
}

/// Returns (d, psi_e, phi_e) for a vehicle at `here` coming from `prev`.
pub fn geometry(prev: P, here: P, radar: P) -> (f64, f64, f64) {
    let v = sub(here, prev);
    let los = sub(radar, here);
    let (nv, nl) = (len3(v), len3(los));
    let psi_e = if nv > 0.0 && nl > 0.0 {
        let c = (v[0] * los[0] + v[1] * los[1] + v[2] * los[2]) / (nv * nl);
        c.clamp(-1.0, 1.0).acos()
    } else {
        PI / 2.0
    };
    let mut azimuth = los[1].atan2(los[0]) - v[1].atan2(v[0]);
    while azimuth > PI {
        azimuth -= 2.0 * PI;
    }
    while azimuth <= -PI {
        azimuth += 2.0 * PI;
    }
    let elevation = los[2].atan2(len2(los)) - v[2].atan2(len2(v));
    let r = elevation.tan() / azimuth.sin();
    let phi_e = if r.is_nan() { 0.0 } else { -r.atan() };
    (nl, psi_e, phi_e)
}

pub fn p_radar(d: f64, psi_e: f64, phi_e: f64, radius: f64, zeta1: f64, zeta2: f64, uav: (f64, f64, f64)) -> f64 {
    if d > radius {
        0.0
    } else {
        1.0 / (1.0 + zeta2 * (d.powi(4) / rcs(uav, psi_e, phi_e)).powf(zeta1))
    }
}

pub fn p_missile(d: f64, radius: f64) -> f64 {
    if d <= radius {
        radius.powi(4) / (radius.powi(4) + d.powi(4))
    } else {
        0.0
    }
}

pub fn f3(w: &[P], world: &World) -> f64 {
    let mut s = 0.0;
    for &(x, y, r, z1, z2) in &world.radars {
        let pos = [x, y, world.ground.at(x, y)];
        for j in 1..w.len() {
            let (d, psi, phi) = geometry(w[j - 1], w[j], pos);
            s += p_radar(d, psi, phi, r, z1, z2, world.uav);
        }
    }
    s
}

pub fn f4(w: &[P], world: &World) -> f64 {
    let mut s = 0.0;
    for &(x, y, r) in &world.missiles {
        let pos = [x, y, world.ground.at(x, y)];
        for p in &w[1..] {
            s += p_missile(len3(sub(*p, pos)), r);
        }
    }
    s
}

pub fn f5(w: &[P]) -> f64 {
    let m = w.len();
    let mut s = 0.0;
    for i in 1..m {
        let a = sub(w[i], w[i - 1]);
        let b = sub(w[m - 1], w[i]);
        let (na, nb) = (len2(a), len2(b));
        if na > 0.0 && nb > 0.0 {
            s += ((a[0] * b[0] + a[1] * b[1]) / (na * nb)).clamp(-1.0, 1.0).acos();
        }
    }
    s
}

pub fn alpha(z: f64) -> f64 {
    -1.5377e-10 * z * z - 2.6997e-5 * z + 0.4211
}

pub fn beta(z: f64) -> f64 {
    2.5063e-9 * z * z - 6.3014e-6 * z - 0.3257
}

/// (g1, g2) with the magnitude of the largest operand involved, for
/// tolerance scaling. Waypoints 2..m-1 (1-based) start a constrained
/// segment; a path of two waypoints constrains its only segment.
pub fn g12(w: &[P]) -> (f64, f64, f64) {
    let m = w.len();
    let ks: Vec<usize> = if m <= 2 { vec![0] } else { (1..m - 1).collect() };
    let (mut g1, mut g2, mut scale) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    for k in ks {
        let d = sub(w[k + 1], w[k]);
        let s = d[2] / len2(d);
        let (a, b) = (alpha(w[k][2]), beta(w[k][2]));
        g1 = g1.max(s - a);
        g2 = g2.max(b - s);
        scale = scale.max(s.abs()).max(a.abs()).max(b.abs());
    }
    (g1, g2, scale)
}

pub fn g3(w: &[P], world: &World) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut scale = world.safe_height.abs();
    for p in &w[1..] {
        let map = world.ground.at(p[0], p[1]);
        min = min.min(p[2] - map);
        scale = scale.max(p[2].abs()).max(map.abs());
    }
    (world.safe_height - min, scale)
}

pub fn h1(w: &[P], world: &World) -> usize {
    w.iter()
        .filter(|p| {
            world
                .nfz
                .iter()
                .any(|&(x0, x1, y0, y1)| p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1)
        })
        .count()
}

/// Out-of-range control points given their rotated coordinates, the
/// x windows, the y corridor, the frame (theta, origin) and the mission
/// rectangle.
pub fn h2(
    ctrl: &[P],
    windows: &[(f64, f64)],
    corridor: (f64, f64),
    theta: f64,
    origin: [f64; 2],
    mission: (f64, f64, f64, f64),
) -> usize {
    let tol = 1e-9;
    let mut n = 0;
    for (i, p) in ctrl.iter().enumerate() {
        let (xl, xh) = windows[i];
        let in_window = p[0] >= xl - tol && p[0] <= xh + tol && p[1] >= corridor.0 - tol && p[1] <= corridor.1 + tol;
        let wx = p[0] * theta.cos() - p[1] * theta.sin() + origin[0];
        let wy = p[0] * theta.sin() + p[1] * theta.cos() + origin[1];
        let inside = wx >= mission.0 - tol && wx <= mission.1 + tol && wy >= mission.2 - tol && wy <= mission.3 + tol;
        if !(in_window && inside) {
            n += 1;
        }
    }
    n
}
