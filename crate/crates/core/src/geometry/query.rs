use super::{Point2, Rect, Tile};

/// Whether the open disc `B(c, rho)` meets the open rectangle.
pub fn disc_meets_rect(center: &Point2, rho: f64, r: &Rect) -> bool {
    r.width() > 0.0 && r.height() > 0.0 && r.dist(center) < rho
}

/// Whether the open disc `B(c, rho)` has points outside the open rectangle.
pub fn disc_leaves_rect(center: &Point2, rho: f64, r: &Rect) -> bool {
    center.x - rho < r.x0 || center.x + rho > r.x1 || center.y - rho < r.y0 || center.y + rho > r.y1
}

/// Tiles whose circumdisc meets both `delta` and its complement.
pub fn crossing_tiles<'a, I>(tiles: I, delta: &Rect) -> Vec<Tile>
where
    I: IntoIterator<Item = &'a Tile>,
{
    tiles
        .into_iter()
        .filter(|t| {
            disc_meets_rect(&t.circumcenter, t.circumradius, delta)
                && disc_leaves_rect(&t.circumcenter, t.circumradius, delta)
        })
        .copied()
        .collect()
}

/// Number of tiles whose open circumdisc contains `y`.
pub fn tiles_covering_point<'a, I>(tiles: I, y: &Point2) -> usize
where
    I: IntoIterator<Item = &'a Tile>,
{
    tiles.into_iter().filter(|t| t.circumcenter.dist(y) < t.circumradius).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_rect_relations() {
        let r = Rect::centered_square(1.0);
        assert!(disc_meets_rect(&Point2::new(2.0, 0.0), 1.5, &r));
        assert!(!disc_meets_rect(&Point2::new(2.0, 0.0), 1.0, &r));
        assert!(!disc_leaves_rect(&Point2::new(0.0, 0.0), 0.5, &r));
        assert!(disc_leaves_rect(&Point2::new(0.6, 0.0), 0.5, &r));
        // A disc touching the corner region but not the square.
        assert!(!disc_meets_rect(&Point2::new(2.0, 2.0), 1.4, &r));
        assert!(disc_meets_rect(&Point2::new(2.0, 2.0), 1.5, &r));
    }
}
