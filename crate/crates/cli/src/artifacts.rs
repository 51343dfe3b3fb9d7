//! Files written by the commands. Everything is plain JSON or CSV so it can
//! be plotted by external tools.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use serde::Serialize;

use evoplanner::engine::PlannerRun;
use evoplanner::error::{Error, Result};
use evoplanner::pathmodel::RotatedFrame;
use evoplanner::scenario::{Scenario, Threat};

/// Points on a threat's boundary at ground level.
const CIRCLE_POINTS: usize = 64;

pub fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    write(dir, name, &(serde_json::to_string_pretty(value)? + "\n"))
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct Outline {
    kind: &'static str,
    /// Closed polygon in world x/y.
    polygon: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct TerrainGrid {
    nx: usize,
    ny: usize,
    cell_size: f64,
    /// Row-major node heights, `heights[j * nx + i]` at `(i, j) * cell_size`.
    heights: Vec<f64>,
}

#[derive(Serialize)]
struct PathDump<'a> {
    start: [f64; 3],
    target: [f64; 3],
    waypoints: Vec<[f64; 3]>,
    /// Control points in world coordinates.
    control_points: Vec<[f64; 3]>,
    threats: &'a [Threat],
    outlines: Vec<Outline>,
    terrain: TerrainGrid,
}

fn circle(center: [f64; 2], r: f64) -> Vec<[f64; 2]> {
    (0..=CIRCLE_POINTS)
        .map(|k| {
            let a = TAU * k as f64 / CIRCLE_POINTS as f64;
            [center[0] + r * a.cos(), center[1] + r * a.sin()]
        })
        .collect()
}

fn outline(t: &Threat) -> Outline {
    match t {
        Threat::Radar(r) => Outline {
            kind: "radar",
            polygon: circle(r.center, r.radius),
        },
        Threat::Missile(m) => Outline {
            kind: "missile",
            polygon: circle(m.center, m.radius),
        },
        Threat::Nfz(z) => {
            let mut polygon = z.corners().to_vec();
            polygon.push(polygon[0]);
            Outline { kind: "nfz", polygon }
        }
    }
}

/// Waypoints, control points, threat outlines and the terrain grid of a run.
pub fn path_dump(run: &PlannerRun, s: &Scenario) -> Result<String> {
    let frame = RotatedFrame::between(s.start, s.target);
    let p = |v: evoplanner::Vec3| [v.x, v.y, v.z];
    let dump = PathDump {
        start: p(s.start),
        target: p(s.target),
        waypoints: run.best_path.points.iter().map(|v| p(*v)).collect(),
        control_points: run.best_control.points().into_iter().map(|v| p(frame.to_world(v))).collect(),
        threats: &s.threats,
        outlines: s.threats.iter().map(outline).collect(),
        terrain: TerrainGrid {
            nx: s.terrain.nx(),
            ny: s.terrain.ny(),
            cell_size: s.terrain.cell_size(),
            heights: s.terrain.heights().to_vec(),
        },
    };
    Ok(serde_json::to_string(&dump)? + "\n")
}
