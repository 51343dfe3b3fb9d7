//! Height fields: multi-octave value noise sampled on a regular grid and
//! queried through a fixed triangulation of every grid cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// One layer of value noise. `frequency` is in lattice cells per meter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Octave {
    pub frequency: f64,
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Height added to every sample.
    #[serde(default)]
    pub base: f64,
    pub octaves: Vec<Octave>,
}

/// Axis-aligned rectangle `[0, width] x [0, height]` sampled every
/// `cell_size` meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDomain {
    pub width: f64,
    pub height: f64,
    pub cell_size: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Terrain {
    nx: usize,
    ny: usize,
    cell_size: f64,
    heights: Vec<f64>,
    noise: Option<NoiseSpec>,
}

impl Terrain {
    /// Builds a terrain from explicit node heights, row-major with `nx`
    /// nodes per row.
    pub fn from_grid(nx: usize, ny: usize, cell_size: f64, heights: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::schema("terrain.width", "grid must be at least 2x2"));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::schema("terrain.cell_size", "must be positive"));
        }
        if heights.len() != nx * ny {
            return Err(Error::schema(
                "terrain.heights",
                format!("expected {} samples, found {}", nx * ny, heights.len()),
            ));
        }
        if let Some(i) = heights.iter().position(|h| !h.is_finite()) {
            return Err(Error::schema(format!("terrain.heights[{i}]"), "not finite"));
        }
        Ok(Self {
            nx,
            ny,
            cell_size,
            heights,
            noise: None,
        })
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn noise(&self) -> Option<&NoiseSpec> {
        self.noise.as_ref()
    }

    pub fn width(&self) -> f64 {
        (self.nx - 1) as f64 * self.cell_size
    }

    pub fn depth(&self) -> f64 {
        (self.ny - 1) as f64 * self.cell_size
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.heights[j * self.nx + i]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width()).contains(&x) && (0.0..=self.depth()).contains(&y)
    }

    pub fn min_height(&self) -> f64 {
        self.heights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_height(&self) -> f64 {
        self.heights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Ground height at `(x, y)`. Each cell is split along its
    /// lower-left to upper-right diagonal and the height is linear on
    /// each of the two triangles.
    pub fn height(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::OutOfDomain { x, y });
        }
        Ok(self.interpolate(x, y))
    }

    /// Like [`Terrain::height`], but points outside the domain take the
    /// height of the nearest boundary point.
    pub fn height_clamped(&self, x: f64, y: f64) -> f64 {
        let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, self.width()) };
        let y = if y.is_nan() { 0.0 } else { y.clamp(0.0, self.depth()) };
        self.interpolate(x, y)
    }

    /// Node heights of the triangle containing `(x, y)`, for bound checks.
    pub fn triangle_heights(&self, x: f64, y: f64) -> Result<[f64; 3]> {
        if !self.contains(x, y) {
            return Err(Error::OutOfDomain { x, y });
        }
        let (i, j, fx, fy) = self.locate(x, y);
        let h00 = self.node(i, j);
        let h11 = self.node(i + 1, j + 1);
        Ok(if fx >= fy {
            [h00, self.node(i + 1, j), h11]
        } else {
            [h00, self.node(i, j + 1), h11]
        })
    }

    fn locate(&self, x: f64, y: f64) -> (usize, usize, f64, f64) {
        let gx = x / self.cell_size;
        let gy = y / self.cell_size;
        let i = (gx.floor() as usize).min(self.nx - 2);
        let j = (gy.floor() as usize).min(self.ny - 2);
        (i, j, gx - i as f64, gy - j as f64)
    }

    fn interpolate(&self, x: f64, y: f64) -> f64 {
        let (i, j, fx, fy) = self.locate(x, y);
        let h00 = self.node(i, j);
        let h11 = self.node(i + 1, j + 1);
        if fx >= fy {
            let h10 = self.node(i + 1, j);
            h00 + fx * (h10 - h00) + fy * (h11 - h10)
        } else {
            let h01 = self.node(i, j + 1);
            h00 + fy * (h01 - h00) + fx * (h11 - h01)
        }
    }
}

fn lattice_value(seed: u64, i: i64, j: i64) -> f64 {
    let h = derive_seed(seed, &[i as u64, j as u64]);
    // top 53 bits -> [0, 1) -> [-1, 1)
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Value noise in `[-1, 1]` at `(x, y)` for one octave.
fn value_noise(seed: u64, frequency: f64, x: f64, y: f64) -> f64 {
    let u = x * frequency;
    let v = y * frequency;
    let i = u.floor();
    let j = v.floor();
    let su = smoothstep(u - i);
    let sv = smoothstep(v - j);
    let (i, j) = (i as i64, j as i64);
    let a = lattice_value(seed, i, j);
    let b = lattice_value(seed, i + 1, j);
    let c = lattice_value(seed, i, j + 1);
    let d = lattice_value(seed, i + 1, j + 1);
    let top = a + su * (b - a);
    let bottom = c + su * (d - c);
    top + sv * (bottom - top)
}

/// Samples `spec` on the grid covering `domain`. Heights are the base
/// offset plus the sum of every octave's contribution.
pub fn generate_terrain(seed: u64, domain: GridDomain, spec: &NoiseSpec) -> Result<Terrain> {
    if spec.octaves.is_empty() {
        return Err(Error::InvalidSpec("noise spec has no octaves".into()));
    }
    if !(domain.width > 0.0 && domain.height > 0.0) {
        return Err(Error::InvalidSpec("terrain domain has zero area".into()));
    }
    if !(domain.cell_size > 0.0 && domain.cell_size.is_finite()) {
        return Err(Error::InvalidSpec("cell size must be positive".into()));
    }
    for (k, o) in spec.octaves.iter().enumerate() {
        if !(o.frequency.is_finite() && o.frequency > 0.0 && o.amplitude.is_finite()) {
            return Err(Error::InvalidSpec(format!("octave {k} is malformed")));
        }
    }
    let nx = (domain.width / domain.cell_size).round() as usize + 1;
    let ny = (domain.height / domain.cell_size).round() as usize + 1;
    let seeds: Vec<u64> = spec
        .octaves
        .iter()
        .map(|o| derive_seed(seed, &[o.seed]))
        .collect();
    let mut heights = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = j as f64 * domain.cell_size;
        for i in 0..nx {
            let x = i as f64 * domain.cell_size;
            let h = spec
                .octaves
                .iter()
                .zip(&seeds)
                .fold(spec.base, |acc, (o, &s)| {
                    acc + o.amplitude * value_noise(s, o.frequency, x, y)
                });
            heights.push(h);
        }
    }
    Ok(Terrain::from_grid(nx, ny, domain.cell_size, heights)?.with_noise(spec.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn spec3() -> NoiseSpec {
        NoiseSpec {
            base: 2.0,
            octaves: vec![
                Octave { frequency: 1.0 / 40.0, amplitude: 8.0, seed: 1 },
                Octave { frequency: 1.0 / 15.0, amplitude: 3.0, seed: 2 },
                Octave { frequency: 1.0 / 6.0, amplitude: 1.0, seed: 3 },
            ],
        }
    }

    const DOMAIN: GridDomain = GridDomain { width: 150.0, height: 100.0, cell_size: 1.0 };

    #[test]
    fn generation_is_deterministic() {
        let a = generate_terrain(7, DOMAIN, &spec3()).unwrap();
        let b = generate_terrain(7, DOMAIN, &spec3()).unwrap();
        assert_eq!(a.nx(), 151);
        assert_eq!(a.ny(), 101);
        assert!(a.heights().iter().zip(b.heights()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn different_seeds_give_different_grids() {
        let a = generate_terrain(7, DOMAIN, &spec3()).unwrap();
        let b = generate_terrain(8, DOMAIN, &spec3()).unwrap();
        assert!(a.heights().iter().zip(b.heights()).any(|(x, y)| x != y));
    }

    #[test]
    fn zero_amplitude_gives_flat_base() {
        let spec = NoiseSpec {
            base: 4.5,
            octaves: vec![Octave { frequency: 0.1, amplitude: 0.0, seed: 9 }],
        };
        let t = generate_terrain(3, DOMAIN, &spec).unwrap();
        assert!(t.heights().iter().all(|&h| h == 4.5));
    }

    #[test]
    fn empty_octaves_rejected() {
        let spec = NoiseSpec { base: 0.0, octaves: vec![] };
        assert!(matches!(generate_terrain(1, DOMAIN, &spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn exact_at_nodes() {
        let t = generate_terrain(11, DOMAIN, &spec3()).unwrap();
        for &(i, j) in &[(0, 0), (150, 100), (37, 91), (150, 0), (0, 100), (75, 50)] {
            let h = t.height(i as f64, j as f64).unwrap();
            assert_eq!(h, t.node(i, j));
        }
    }

    #[test]
    fn centroid_of_triangle_is_mean() {
        // lower triangle (00, 10, 11) with heights 0, 3, 6
        let t = Terrain::from_grid(2, 2, 1.0, vec![0.0, 3.0, 9.0, 6.0]).unwrap();
        let h = t.height(2.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((h - 3.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let t = generate_terrain(11, DOMAIN, &spec3()).unwrap();
        assert!(matches!(t.height(-0.1, 5.0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(t.height(3.0, 100.5), Err(Error::OutOfDomain { .. })));
        assert_eq!(t.height_clamped(-3.0, 5.0), t.height(0.0, 5.0).unwrap());
    }

    #[test]
    fn random_queries_stay_within_triangle_bounds() {
        let t = generate_terrain(5, DOMAIN, &spec3()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = rng.random_range(0.0..=150.0);
            let y = rng.random_range(0.0..=100.0);
            let h = t.height(x, y).unwrap();
            let tri = t.triangle_heights(x, y).unwrap();
            let lo = tri.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = tri.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(h >= lo - 1e-12 && h <= hi + 1e-12, "{h} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn continuous_across_triangle_edges() {
        let t = generate_terrain(5, DOMAIN, &spec3()).unwrap();
        let eps = 1e-9;
        for &(i, j) in &[(3usize, 4usize), (10, 10), (149, 99), (0, 0)] {
            let (x0, y0) = (i as f64, j as f64);
            // diagonal midpoint, approached from both triangles
            let (mx, my) = (x0 + 0.5, y0 + 0.5);
            let lower = t.height(mx + eps, my).unwrap();
            let upper = t.height(mx, my + eps).unwrap();
            assert!((lower - upper).abs() <= 1e-6 * (1.0 + lower.abs()));
            // vertical cell edge between cell (i,j) and (i+1,j)
            if i + 1 < 150 {
                let ex = x0 + 1.0;
                let left = t.height(ex - eps, y0 + 0.25).unwrap();
                let right = t.height(ex + eps, y0 + 0.25).unwrap();
                assert!((left - right).abs() <= 1e-6 * (1.0 + left.abs()));
            }
        }
    }
}
