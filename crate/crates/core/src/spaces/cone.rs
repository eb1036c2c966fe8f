use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::Serialize;

use super::{MetricSpace, SampleRng};
use crate::{Error, Result};

/// Polar coordinates on a flat cone of total angle `nπ`.
///
/// The angle is stored in `[0, nπ)`; the apex has `r = 0` and `θ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConePoint {
    pub r: f64,
    pub theta: f64,
}

impl ConePoint {
    pub const APEX: ConePoint = ConePoint { r: 0.0, theta: 0.0 };

    pub fn new(r: f64, theta: f64, n: u32) -> Self {
        if r <= 0.0 {
            return Self::APEX;
        }
        let total = f64::from(n) * PI;
        let mut t = theta.rem_euclid(total);
        if t >= total {
            t = 0.0;
        }
        Self { r, theta: t }
    }

    pub fn is_apex(&self) -> bool {
        self.r == 0.0
    }
}

/// Geodesic distance on the cone of total angle `nπ`.
///
/// With `Δ` the angular separation measured inside the total angle, the
/// geodesic is a planar segment when `Δ ≤ π` and otherwise runs through the
/// apex.
pub fn cone_distance(n: u32, p: &ConePoint, q: &ConePoint) -> f64 {
    let total = f64::from(n) * PI;
    let diff = (p.theta - q.theta).abs();
    let delta = diff.min(total - diff);
    if delta <= PI {
        let dr = p.r - q.r;
        let half = (0.5 * delta).sin();
        // (r_p - r_q)² + 4 r_p r_q sin²(Δ/2): the law of cosines without cancellation
        (dr * dr + 4.0 * (p.r * q.r) * half * half).sqrt()
    } else {
        p.r + q.r
    }
}

/// The disk of radius `radius` around the apex of an `n`-prong cone.
#[derive(Clone, Copy, Debug)]
pub struct ConeDisk {
    n: u32,
    radius: f64,
}

impl ConeDisk {
    pub fn new(n: u32, radius: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cone needs n >= 2 prongs, got {n}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("cone radius must be positive, got {radius}")));
        }
        Ok(Self { n, radius })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn total_angle(&self) -> f64 {
        f64::from(self.n) * PI
    }

    pub fn point(&self, r: f64, theta: f64) -> ConePoint {
        ConePoint::new(r, theta, self.n)
    }

    /// The point at offset `(dx, dy)` from a regular point `p`, read in the
    /// flat chart where `p` sits at `(p.r, 0)`. Valid while the offset stays
    /// inside the flat disk of radius `p.r` around `p`.
    pub fn offset(&self, p: &ConePoint, dx: f64, dy: f64) -> ConePoint {
        let (u, v) = (p.r + dx, dy);
        self.point(u.hypot(v), p.theta + v.atan2(u))
    }
}

impl MetricSpace for ConeDisk {
    type Point = ConePoint;

    fn distance(&self, p: &ConePoint, q: &ConePoint) -> f64 {
        cone_distance(self.n, p, q)
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn random_point(&self, rng: &mut SampleRng) -> ConePoint {
        let r = self.radius * rng.gen::<f64>().sqrt();
        self.point(r, self.total_angle() * rng.gen::<f64>())
    }

    fn random_near(&self, p: &ConePoint, radius: f64, rng: &mut SampleRng) -> Option<ConePoint> {
        for _ in 0..32 {
            let rho = radius * rng.gen::<f64>().sqrt();
            let phi = TAU * rng.gen::<f64>();
            let q = if p.is_apex() {
                self.point(rho, self.total_angle() * rng.gen::<f64>())
            } else {
                self.offset(p, rho * phi.cos(), rho * phi.sin())
            };
            if q.r <= self.radius && cone_distance(self.n, p, &q) <= radius {
                return Some(q);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::axioms::check_sampled_triples;
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    #[test]
    fn examples() {
        let c = ConeDisk::new(3, 3.0).unwrap();
        let d = |a: (f64, f64), b: (f64, f64)| c.distance(&c.point(a.0, a.1), &c.point(b.0, b.1));
        assert!((d((1.0, 0.0), (2.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((d((1.0, 0.0), (1.0, PI / 2.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d((1.0, 0.0), (1.0, 1.5 * PI)), 2.0);
    }

    #[test]
    fn two_prong_cone_is_the_plane() {
        let c = ConeDisk::new(2, 1.0).unwrap();
        let mut grid = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    let r = 0.1 * (i as f64 + 0.5);
                    let theta = TAU * (10 * j + k) as f64 / 100.0;
                    grid.push(c.point(r, theta));
                }
            }
        }
        assert_eq!(grid.len(), 1000);
        let planar = |p: &ConePoint| (p.r * p.theta.cos(), p.r * p.theta.sin());
        for (i, p) in grid.iter().enumerate() {
            for q in grid.iter().skip(i % 37).step_by(37) {
                let (a, b) = (planar(p), planar(q));
                let e = (a.0 - b.0).hypot(a.1 - b.1);
                assert!((c.distance(p, q) - e).abs() < 1e-12, "{p:?} {q:?}");
            }
        }
    }

    #[test]
    fn metric_axioms_on_samples() {
        for n in 2..=5 {
            check_sampled_triples(&ConeDisk::new(n, 1.0).unwrap(), 40, u64::from(n));
        }
    }

    #[test]
    fn apex_identifies_all_angles() {
        let a = ConePoint::new(0.0, 2.0, 3);
        assert!(a.is_apex());
        let p = ConePoint::new(0.7, 1.0, 3);
        assert_eq!(cone_distance(3, &a, &p), 0.7);
    }

    #[test]
    fn flat_chart_offsets_keep_their_length() {
        let c = ConeDisk::new(3, 2.0).unwrap();
        let p = c.point(0.5, 9.0);
        for k in 0..16 {
            let phi = TAU * k as f64 / 16.0;
            let q = c.offset(&p, 0.2 * phi.cos(), 0.2 * phi.sin());
            assert!((c.distance(&p, &q) - 0.2).abs() < 1e-14);
        }
    }

    /// Dijkstra over a polar grid; every edge is short, so its length is the
    /// planar chord of a thin wedge. Graph paths are real curves, hence the
    /// result bounds the geodesic distance from above.
    fn grid_geodesic(n: u32, from: (usize, usize), to: (usize, usize), rings: usize, spokes: usize, h: f64) -> f64 {
        #[derive(PartialEq)]
        struct State(f64, usize);
        impl Eq for State {}
        impl PartialOrd for State {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for State {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.partial_cmp(&self.0).unwrap()
            }
        }
        let dtheta = f64::from(n) * PI / spokes as f64;
        let id = |i: usize, j: usize| if i == 0 { 0 } else { 1 + (i - 1) * spokes + j % spokes };
        let count = 1 + rings * spokes;
        let coords = |v: usize| if v == 0 { (0.0, 0.0) } else { let w = v - 1; ((w / spokes + 1) as f64 * h, (w % spokes) as f64 * dtheta) };
        let chord = |a: (f64, f64), b: (f64, f64), dj: f64| {
            let (r1, r2) = (a.0, b.0);
            (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * (dj * dtheta).cos()).max(0.0).sqrt()
        };
        let mut dist = vec![f64::INFINITY; count];
        let start = id(from.0, from.1);
        let goal = id(to.0, to.1);
        dist[start] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(State(0.0, start));
        while let Some(State(d, v)) = heap.pop() {
            if v == goal {
                return d;
            }
            if d > dist[v] {
                continue;
            }
            let (r, _) = coords(v);
            let mut relax = |w: usize, len: f64, heap: &mut BinaryHeap<State>| {
                if d + len < dist[w] {
                    dist[w] = d + len;
                    heap.push(State(d + len, w));
                }
            };
            if v == 0 {
                for j in 0..spokes {
                    relax(id(1, j), h, &mut heap);
                }
                continue;
            }
            let i = (v - 1) / spokes + 1;
            let j = (v - 1) % spokes;
            if i == 1 {
                relax(0, r, &mut heap);
            }
            for di in -2i64..=2 {
                let ni = i as i64 + di;
                if ni < 1 || ni > rings as i64 {
                    continue;
                }
                for dj in -3i64..=3 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let nj = (j as i64 + dj).rem_euclid(spokes as i64) as usize;
                    let w = id(ni as usize, nj);
                    let len = chord((r, 0.0), (ni as f64 * h, 0.0), dj.abs() as f64);
                    relax(w, len, &mut heap);
                }
            }
        }
        f64::INFINITY
    }

    #[test]
    fn apex_routing_matches_grid_shortest_paths() {
        // ring spacing 0.02, 300 spokes over 3π: (1, 0) and (1, 3π/2)
        let (rings, spokes, h) = (60, 300, 0.02);
        let oracle = grid_geodesic(3, (50, 0), (50, 150), rings, spokes, h);
        assert!((oracle - 2.0).abs() < 1e-9, "oracle {oracle}");
        let c = ConeDisk::new(3, 2.0).unwrap();
        let d = c.distance(&c.point(1.0, 0.0), &c.point(1.0, 1.5 * PI));
        assert!((d - oracle).abs() < 1e-9);

        // Δ = π/2: the straight chord; the grid path is slightly longer
        let oracle = grid_geodesic(3, (50, 0), (50, 50), rings, spokes, h);
        let d = c.distance(&c.point(1.0, 0.0), &c.point(1.0, PI / 2.0));
        assert!(oracle >= d - 1e-12 && oracle - d < 3e-2, "oracle {oracle} vs {d}");
    }
}
