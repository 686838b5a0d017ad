//! Uniform bucket grid for nearest-neighbour and range queries.

use std::collections::HashMap;

use crate::geometry::Point2;

#[derive(Debug, Clone)]
pub struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Point2>>,
    len: usize,
    bbox: [f64; 4],
}

impl PointGrid {
    pub fn new(points: &[Point2], cell: f64) -> PointGrid {
        assert!(cell > 0.0 && cell.is_finite());
        let mut g = PointGrid {
            cell,
            buckets: HashMap::new(),
            len: 0,
            bbox: [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
        };
        for p in points {
            g.insert(*p);
        }
        g
    }

    /// Cell size matched to the mean spacing of `points` over `area`.
    pub fn with_density(points: &[Point2], area: f64) -> PointGrid {
        let n = points.len().max(1) as f64;
        PointGrid::new(points, (area / n).sqrt().max(1e-9))
    }

    fn index(&self, p: &Point2) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, p: Point2) {
        let k = self.index(&p);
        self.buckets.entry(k).or_default().push(p);
        self.len += 1;
        self.bbox = [self.bbox[0].min(p.x), self.bbox[1].min(p.y), self.bbox[2].max(p.x), self.bbox[3].max(p.y)];
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Distance from `p` to the nearest stored point (infinite when empty).
    pub fn nearest_dist(&self, p: &Point2) -> f64 {
        if self.len == 0 {
            return f64::INFINITY;
        }
        let (cx, cy) = self.index(p);
        let far = {
            let dx = (self.bbox[0] - p.x).max(p.x - self.bbox[2]).max(0.0);
            let dy = (self.bbox[1] - p.y).max(p.y - self.bbox[3]).max(0.0);
            let span = (self.bbox[2] - self.bbox[0]).max(self.bbox[3] - self.bbox[1]);
            ((dx.max(dy) + span) / self.cell).ceil() as i64 + 1
        };
        let mut best = f64::INFINITY;
        let mut ring: i64 = 0;
        loop {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    if let Some(v) = self.buckets.get(&(cx + dx, cy + dy)) {
                        for q in v {
                            best = best.min(p.dist2(q));
                        }
                    }
                }
            }
            // Points beyond this ring are at least `ring * cell` away.
            let reach = ring as f64 * self.cell;
            if best.is_finite() && reach * reach >= best {
                return best.sqrt();
            }
            if ring > far {
                return best.sqrt();
            }
            ring += 1;
        }
    }

    /// Stored points within distance `r` of `p` (closed ball).
    pub fn within(&self, p: &Point2, r: f64) -> Vec<Point2> {
        let k = (r / self.cell).ceil() as i64;
        let (cx, cy) = self.index(p);
        let mut out = Vec::new();
        for dx in -k..=k {
            for dy in -k..=k {
                if let Some(v) = self.buckets.get(&(cx + dx, cy + dy)) {
                    out.extend(v.iter().filter(|q| p.dist2(q) <= r * r).copied());
                }
            }
        }
        out
    }
}
