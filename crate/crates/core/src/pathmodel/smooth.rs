use serde::{Deserialize, Serialize};

use super::{ControlPath, RotatedFrame, Waypoints};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SmoothMethod {
    Bezier,
    BSpline,
    Rts,
    TangentCircle,
}

impl SmoothMethod {
    pub const ALL: [SmoothMethod; 4] = [
        SmoothMethod::Bezier,
        SmoothMethod::BSpline,
        SmoothMethod::Rts,
        SmoothMethod::TangentCircle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SmoothMethod::Bezier => "bezier",
            SmoothMethod::BSpline => "bspline",
            SmoothMethod::Rts => "rts",
            SmoothMethod::TangentCircle => "tangent-circle",
        }
    }

    fn min_points(self) -> usize {
        match self {
            SmoothMethod::Bezier | SmoothMethod::BSpline => 4,
            SmoothMethod::Rts | SmoothMethod::TangentCircle => 2,
        }
    }
}

/// Tuning knobs of the smoothers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothParams {
    /// Process to measurement noise ratio of the RTS smoother.
    pub rts_ratio: f64,
    /// Fillet radius of the tangent-circle smoother, in units of `Δl`.
    pub fillet_ratio: f64,
}

impl Default for SmoothParams {
    fn default() -> Self {
        Self {
            rts_ratio: 0.1,
            fillet_ratio: 0.5,
        }
    }
}

/// Converts control points into `m` world-frame waypoints. The first and
/// last waypoints are exactly `start` and `target`.
pub fn smooth(
    path: &ControlPath,
    method: SmoothMethod,
    params: &SmoothParams,
    m: usize,
    frame: &RotatedFrame,
    start: Vec3,
    target: Vec3,
) -> Result<Waypoints> {
    let n = path.n();
    if n < method.min_points() {
        return Err(Error::InvalidInput(format!(
            "{} needs at least {} control points, got {n}",
            method.name(),
            method.min_points()
        )));
    }
    if m < n.max(2) {
        return Err(Error::InvalidInput(format!("waypoint count {m} below control point count {n}")));
    }
    let mut q = Vec::with_capacity(n + 2);
    q.push(frame.to_rotated(start));
    q.extend(path.points());
    q.push(frame.to_rotated(target));

    let local = match method {
        SmoothMethod::BSpline => bspline(&q, m),
        SmoothMethod::Bezier => bezier_chain(&q, m),
        SmoothMethod::Rts => rts(&q, m, params.rts_ratio),
        SmoothMethod::TangentCircle => tangent_circle(&q, m, params.fillet_ratio * path.delta_l),
    };
    let mut points: Vec<Vec3> = local.into_iter().map(|p| frame.to_world(p)).collect();
    points[0] = start;
    points[m - 1] = target;
    Ok(Waypoints::new(points))
}

/// Sample locations `(piece, t)` spread over `pieces` unit pieces. Every
/// piece junction is included when `m` allows it.
fn piece_samples(pieces: usize, m: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(m);
    if m > pieces {
        let extra = m - pieces - 1;
        for j in 0..pieces {
            let c = extra / pieces + usize::from(j < extra % pieces);
            out.push((j, 0.0));
            for k in 1..=c {
                out.push((j, k as f64 / (c + 1) as f64));
            }
        }
        out.push((pieces - 1, 1.0));
    } else {
        for i in 0..m {
            let u = pieces as f64 * i as f64 / (m - 1) as f64;
            let j = (u.floor() as usize).min(pieces - 1);
            out.push((j, u - j as f64));
        }
    }
    out
}

fn bspline(q: &[Vec3], m: usize) -> Vec<Vec3> {
    let (s, t) = (q[0], q[q.len() - 1]);
    // Interleave segment midpoints with the interior points so the curve
    // passes through every midpoint, and triple the ends to clamp it.
    let mut a = vec![s, s, s];
    for (k, w) in q.windows(2).enumerate() {
        if k > 0 {
            a.push(w[0]);
        }
        a.push(w[0].midpoint(w[1]));
    }
    a.extend([t, t, t]);
    let segments = a.len() - 3;
    piece_samples(segments, m)
        .into_iter()
        .map(|(j, u)| {
            let u2 = u * u;
            let u3 = u2 * u;
            let b0 = (1.0 - u).powi(3) / 6.0;
            let b1 = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
            let b2 = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
            let b3 = u3 / 6.0;
            a[j] * b0 + a[j + 1] * b1 + a[j + 2] * b2 + a[j + 3] * b3
        })
        .collect()
}

/// Point of the Bezier curve with control polygon `ctrl` at `t ∈ [0, 1]`.
pub fn bezier_point(ctrl: &[Vec3], t: f64) -> Vec3 {
    let mut buf: Vec<Vec3> = ctrl.to_vec();
    for k in (1..buf.len()).rev() {
        for i in 0..k {
            buf[i] = buf[i].lerp(buf[i + 1], t);
        }
    }
    buf[0]
}

fn bezier_chain(q: &[Vec3], m: usize) -> Vec<Vec3> {
    let n = q.len() - 2;
    let mids: Vec<Vec3> = q.windows(2).map(|w| w[0].midpoint(w[1])).collect();
    // Six-order window around each interior point: the two flanking
    // midpoints, the point itself, and the thirds in between.
    let windows: Vec<[Vec3; 7]> = (1..=n)
        .map(|i| {
            let (a, p, b) = (mids[i - 1], q[i], mids[i]);
            [a, a.lerp(p, 1.0 / 3.0), a.lerp(p, 2.0 / 3.0), p, p.lerp(b, 1.0 / 3.0), p.lerp(b, 2.0 / 3.0), b]
        })
        .collect();
    let pieces = n + 2;
    piece_samples(pieces, m)
        .into_iter()
        .map(|(j, u)| match j {
            0 => q[0].lerp(mids[0], u),
            j if j == pieces - 1 => mids[n].lerp(q[n + 1], u),
            j => bezier_point(&windows[j - 1], u),
        })
        .collect()
}

type Mat2 = [[f64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn inverse(a: &Mat2) -> Mat2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

/// Forward Kalman filter and backward Rauch-Tung-Striebel pass under a
/// constant-velocity model with unit time steps. Returns smoothed
/// `(position, velocity)` per measurement.
fn rts_1d(z: &[f64], ratio: f64) -> Vec<(f64, f64)> {
    const F: Mat2 = [[1.0, 1.0], [0.0, 1.0]];
    let q = ratio;
    let qm: Mat2 = [[q / 3.0, q / 2.0], [q / 2.0, q]];
    let r = 1.0;
    let n = z.len();
    let mut xp = vec![[0.0; 2]; n];
    let mut pp = vec![[[0.0; 2]; 2]; n];
    let mut xf = vec![[0.0; 2]; n];
    let mut pf = vec![[[0.0; 2]; 2]; n];
    for k in 0..n {
        let (x, p) = if k == 0 {
            ([z[0], 0.0], [[r, 0.0], [0.0, 1e4]])
        } else {
            let x = [xf[k - 1][0] + xf[k - 1][1], xf[k - 1][1]];
            let mut p = mat_mul(&mat_mul(&F, &pf[k - 1]), &transpose(&F));
            for i in 0..2 {
                for j in 0..2 {
                    p[i][j] += qm[i][j];
                }
            }
            (x, p)
        };
        xp[k] = x;
        pp[k] = p;
        let s = p[0][0] + r;
        let gain = [p[0][0] / s, p[1][0] / s];
        let innov = z[k] - x[0];
        xf[k] = [x[0] + gain[0] * innov, x[1] + gain[1] * innov];
        pf[k] = [
            [(1.0 - gain[0]) * p[0][0], (1.0 - gain[0]) * p[0][1]],
            [p[1][0] - gain[1] * p[0][0], p[1][1] - gain[1] * p[0][1]],
        ];
    }
    let mut xs = xf.clone();
    for k in (0..n - 1).rev() {
        let c = mat_mul(&mat_mul(&pf[k], &transpose(&F)), &inverse(&pp[k + 1]));
        let d = [xs[k + 1][0] - xp[k + 1][0], xs[k + 1][1] - xp[k + 1][1]];
        xs[k] = [
            xf[k][0] + c[0][0] * d[0] + c[0][1] * d[1],
            xf[k][1] + c[1][0] * d[0] + c[1][1] * d[1],
        ];
    }
    xs.into_iter().map(|x| (x[0], x[1])).collect()
}

fn rts(q: &[Vec3], m: usize, ratio: f64) -> Vec<Vec3> {
    let n = q.len();
    let (s, t) = (q[0], q[n - 1]);
    let step = (t - s) * (1.0 / (n - 1) as f64);
    // Filter deviations from the straight chord, so a straight input
    // stays on its line whatever the filter gains are.
    let chord: Vec<Vec3> = (0..n).map(|k| s + step * k as f64).collect();
    let axis = |f: fn(Vec3) -> f64| {
        let dev: Vec<f64> = q.iter().zip(&chord).map(|(p, c)| f(*p - *c)).collect();
        rts_1d(&dev, ratio)
    };
    let (ax, ay, az) = (axis(|v| v.x), axis(|v| v.y), axis(|v| v.z));
    let mut knots = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    for k in 0..n {
        knots.push(chord[k] + Vec3::new(ax[k].0, ay[k].0, az[k].0));
        tangents.push(step + Vec3::new(ax[k].1, ay[k].1, az[k].1));
    }
    knots[0] = s;
    knots[n - 1] = t;
    piece_samples(n - 1, m)
        .into_iter()
        .map(|(j, u)| {
            let u2 = u * u;
            let u3 = u2 * u;
            let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
            let h10 = u3 - 2.0 * u2 + u;
            let h01 = -2.0 * u3 + 3.0 * u2;
            let h11 = u3 - u2;
            knots[j] * h00 + tangents[j] * h10 + knots[j + 1] * h01 + tangents[j + 1] * h11
        })
        .collect()
}

enum Piece {
    Line(Vec3, Vec3),
    Arc {
        center: Vec3,
        normal: Vec3,
        tangent: Vec3,
        radius: f64,
        angle: f64,
    },
}

impl Piece {
    fn length(&self) -> f64 {
        match self {
            Piece::Line(a, b) => a.distance(*b),
            Piece::Arc { radius, angle, .. } => radius * angle,
        }
    }

    fn at(&self, s: f64) -> Vec3 {
        match self {
            Piece::Line(a, b) => {
                let len = a.distance(*b);
                if len > 0.0 {
                    a.lerp(*b, (s / len).clamp(0.0, 1.0))
                } else {
                    *a
                }
            }
            Piece::Arc {
                center,
                normal,
                tangent,
                radius,
                angle,
            } => {
                let phi = (s / radius).clamp(0.0, *angle);
                *center - *normal * (radius * phi.cos()) + *tangent * (radius * phi.sin())
            }
        }
    }
}

fn tangent_circle(q: &[Vec3], m: usize, radius: f64) -> Vec<Vec3> {
    let mut pts: Vec<Vec3> = Vec::with_capacity(q.len());
    for &p in q {
        if pts.last().is_none_or(|l: &Vec3| l.distance(p) > 1e-12) {
            pts.push(p);
        }
    }
    let mut pieces = Vec::new();
    let mut cur = pts[0];
    for k in 1..pts.len().saturating_sub(1) {
        let (prev, v, next) = (pts[k - 1], pts[k], pts[k + 1]);
        let (lin, lout) = (prev.distance(v), v.distance(next));
        let (Some(u), Some(w_out)) = ((v - prev).normalized(), (next - v).normalized()) else {
            continue;
        };
        let delta = u.dot(w_out).clamp(-1.0, 1.0).acos();
        let perp = (w_out - u * u.dot(w_out)).normalized();
        let fillet = match perp {
            Some(perp) if delta > 1e-9 && radius > 0.0 => {
                let t = (radius * (0.5 * delta).tan()).min(0.5 * lin).min(0.5 * lout);
                let r = t / (0.5 * delta).tan();
                (r > 1e-12).then_some((t, r, perp))
            }
            _ => None,
        };
        match fillet {
            Some((t, r, perp)) => {
                let a = v - u * t;
                pieces.push(Piece::Line(cur, a));
                pieces.push(Piece::Arc {
                    center: a + perp * r,
                    normal: perp,
                    tangent: u,
                    radius: r,
                    angle: delta,
                });
                cur = v + w_out * t;
            }
            None => {
                pieces.push(Piece::Line(cur, v));
                cur = v;
            }
        }
    }
    pieces.push(Piece::Line(cur, pts[pts.len() - 1]));

    let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
    let total: f64 = lengths.iter().sum();
    let mut out = Vec::with_capacity(m);
    let (mut idx, mut acc) = (0usize, 0.0);
    for i in 0..m {
        let s = total * i as f64 / (m - 1) as f64;
        while idx + 1 < pieces.len() && s > acc + lengths[idx] {
            acc += lengths[idx];
            idx += 1;
        }
        out.push(pieces[idx].at(s - acc));
    }
    out
}
