//! Rejection sampling of initial positions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

const ATTEMPTS: usize = 256;

/// Axis-aligned spawn region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x.0 && x <= self.x.1 && y >= self.y.0 && y <= self.y.1
    }
}

/// Discs already placed; new samples keep `clearance` between edges.
#[derive(Debug, Default)]
pub struct Placer {
    discs: Vec<(f64, f64, f64)>,
}

impl Placer {
    pub fn new() -> Self {
        Placer::default()
    }

    pub fn add(&mut self, x: f64, y: f64, radius: f64) {
        self.discs.push((x, y, radius));
    }

    pub fn is_clear(&self, x: f64, y: f64, radius: f64, clearance: f64) -> bool {
        self.discs
            .iter()
            .all(|&(px, py, pr)| (x - px).hypot(y - py) >= pr + radius + clearance)
    }

    /// Samples a clear point in `region` and records it. When no clear point
    /// turns up the last sample is still returned; the caller's overlap check
    /// then rejects the whole frame.
    pub fn place(&mut self, rng: &mut ChaCha8Rng, region: Region, radius: f64, clearance: f64) -> (f64, f64) {
        let mut p = (0.0, 0.0);
        for _ in 0..ATTEMPTS {
            p = (rng.random_range(region.x.0..=region.x.1), rng.random_range(region.y.0..=region.y.1));
            if self.is_clear(p.0, p.1, radius, clearance) {
                break;
            }
        }
        self.add(p.0, p.1, radius);
        p
    }
}

pub fn heading(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..360.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn placements_are_clear_and_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let region = Region { x: (0.0, 2.0), y: (-1.0, 1.0) };
        let mut placer = Placer::new();
        let pts: Vec<_> = (0..8).map(|_| placer.place(&mut rng, region, 0.09, 0.05)).collect();
        for (i, a) in pts.iter().enumerate() {
            assert!(region.contains(a.0, a.1));
            for b in &pts[i + 1..] {
                assert!((a.0 - b.0).hypot(a.1 - b.1) >= 0.23);
            }
        }
    }
}
