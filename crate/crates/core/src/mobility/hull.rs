use crate::geo::FieldPoint;

fn cross(o: FieldPoint, a: FieldPoint, b: FieldPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex hull (monotone chain) without collinear points.
pub fn convex_hull(points: &[FieldPoint]) -> Vec<FieldPoint> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<FieldPoint> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &FieldPoint>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Whether `p` lies in the hull, boundary included, up to `tol` meters.
/// Degenerate hulls (a point or a segment) are handled.
pub fn hull_contains(hull: &[FieldPoint], p: FieldPoint, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].distance(&p) <= tol,
        2 => segment_distance(hull[0], hull[1], p) <= tol,
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            cross(a, b, p) >= -tol * a.distance(&b)
        }),
    }
}

fn segment_distance(a: FieldPoint, b: FieldPoint, p: FieldPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let f = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    p.distance(&FieldPoint::new(a.x + f * dx, a.y + f * dy))
}
