//! Minimal enclosing balls (Welzl recursion) in R^3.

use super::Vec3;
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &Vec3, slack: f64) -> bool {
        (p - self.center).norm() <= self.radius + slack
    }
}

/// Smallest ball whose boundary passes through every point of `support`
/// (the circumball inside their affine hull).
fn circumball(support: &[Vec3]) -> Option<Ball> {
    match support.len() {
        0 => None,
        1 => Some(Ball { center: support[0], radius: 0.0 }),
        _ => {
            let p0 = support[0];
            let k = support.len() - 1;
            let dirs: Vec<Vec3> = support[1..].iter().map(|p| p - p0).collect();
            let mut gram = DMatrix::<f64>::zeros(k, k);
            let mut rhs = nalgebra::DVector::<f64>::zeros(k);
            for i in 0..k {
                for j in 0..k {
                    gram[(i, j)] = 2.0 * dirs[i].dot(&dirs[j]);
                }
                rhs[i] = dirs[i].norm_squared();
            }
            let svd = gram.svd(true, true);
            let lambda = svd.solve(&rhs, 1e-12).ok()?;
            let mut center = p0;
            for i in 0..k {
                center += dirs[i] * lambda[i];
            }
            let radius = support
                .iter()
                .map(|p| (p - center).norm())
                .fold(0.0, f64::max);
            Some(Ball { center, radius })
        }
    }
}

fn welzl(points: &[Vec3], support: &mut Vec<Vec3>) -> Option<Ball> {
    if points.is_empty() || support.len() == 4 {
        return circumball(support);
    }
    let (p, rest) = points.split_last().expect("nonempty");
    if let Some(ball) = welzl(rest, support) {
        if ball.contains(p, 1e-12 * (1.0 + ball.radius)) {
            return Some(ball);
        }
    }
    support.push(*p);
    let ball = welzl(rest, support);
    support.pop();
    ball
}

/// Minimal enclosing ball of a finite point set. Returns `None` when empty.
pub fn min_enclosing_ball(points: &[Vec3]) -> Option<Ball> {
    if points.is_empty() {
        return None;
    }
    // Deterministic order; farthest-first improves the recursion on grids.
    let mut pts = points.to_vec();
    let c = pts.iter().fold(Vec3::zeros(), |a, p| a + p) / pts.len() as f64;
    pts.sort_by(|a, b| {
        (a - c)
            .norm()
            .partial_cmp(&(b - c).norm())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut support = Vec::new();
    let ball = welzl(&pts, &mut support)?;
    // guard against round-off: ensure every point is inside
    let radius = pts
        .iter()
        .map(|p| (p - ball.center).norm())
        .fold(ball.radius, f64::max);
    Some(Ball { center: ball.center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn square_and_cube() {
        let sq = [[0., 0.], [1., 0.], [0., 1.], [1., 1.]].map(|c| point(&c));
        let b = min_enclosing_ball(&sq).unwrap();
        assert!((b.radius - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((b.center - point(&[0.5, 0.5])).norm() < 1e-12);
        let mut cube = Vec::new();
        for i in 0..8 {
            cube.push(point(&[(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]));
        }
        let b = min_enclosing_ball(&cube).unwrap();
        assert!((b.radius - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let t = [[0., 0.], [4., 0.], [2., 0.5]].map(|c| point(&c));
        let b = min_enclosing_ball(&t).unwrap();
        assert!((b.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_and_empty() {
        assert!(min_enclosing_ball(&[]).is_none());
        let b = min_enclosing_ball(&[point(&[3., 4.])]).unwrap();
        assert_eq!(b.radius, 0.0);
    }
}
