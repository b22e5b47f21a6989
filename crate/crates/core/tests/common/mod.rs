//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's numerical code.

#![allow(dead_code)]

use eigencontours::geometry::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_columns(rng: &mut ChaCha8Rng, n: usize, l: usize) -> Vec<Vec<f64>> {
    (0..l)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..10.0)).collect())
        .collect()
}

pub fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// Linear algebra

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and matching eigenvectors as columns.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| v.iter().map(|row| row[i]).collect())
        .collect();
    (values, vectors)
}

/// `A Aᵀ` for `A` given by columns.
pub fn gram_rows(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = columns[0].len();
    let mut g = vec![vec![0.0; n]; n];
    for col in columns {
        for i in 0..n {
            for j in 0..n {
                g[i][j] += col[i] * col[j];
            }
        }
    }
    g
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Least squares `min ‖X c − y‖` through the normal equations.
pub fn normal_equations(design: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let m = design[0].len();
    let mut ata = vec![vec![0.0; m]; m];
    let mut aty = vec![0.0; m];
    for (row, &yi) in design.iter().zip(y) {
        for i in 0..m {
            aty[i] += row[i] * yi;
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    gauss_solve(ata, aty)
}

/// Chebyshev polynomials `T_0..T_{m-1}` at `x` from the cosine form.
pub fn chebyshev_cos(x: f64, m: usize) -> Vec<f64> {
    let t = x.clamp(-1.0, 1.0).acos();
    (0..m).map(|k| (k as f64 * t).cos()).collect()
}

// ---------------------------------------------------------------------------
// Geometry

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let (ex, ey) = (b.x - a.x, b.y - a.y);
    let len2 = ex * ex + ey * ey;
    let t = (((p.x - a.x) * ex + (p.y - a.y) * ey) / len2).clamp(0.0, 1.0);
    let (qx, qy) = (a.x + t * ex, a.y + t * ey);
    ((p.x - qx).powi(2) + (p.y - qy).powi(2)).sqrt()
}

/// Even-odd point-in-polygon test.
pub fn inside(ring: &[Point], p: Point) -> bool {
    let mut c = false;
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            c = !c;
        }
    }
    c
}

pub fn boundary_dist(ring: &[Point], p: Point) -> f64 {
    (0..ring.len())
        .map(|i| seg_dist(p, ring[i], ring[(i + 1) % ring.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Center of the largest inscribed circle by exhaustive search on a grid.
pub fn grid_inner_center(ring: &[Point], step: f64) -> (Point, f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in ring {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let mut best = (Point::new(x0, y0), f64::NEG_INFINITY);
    let nx = ((x1 - x0) / step).ceil() as usize;
    let ny = ((y1 - y0) / step).ceil() as usize;
    for iy in 0..=ny {
        for ix in 0..=nx {
            let p = Point::new(x0 + ix as f64 * step, y0 + iy as f64 * step);
            if !inside(ring, p) {
                continue;
            }
            let d = boundary_dist(ring, p);
            if d > best.1 {
                best = (p, d);
            }
        }
    }
    best
}

/// Farthest intersection of the ray `center + t(cos a, sin a)` with the
/// polygon, from dense segment-by-segment parametric solves.
pub fn farthest_hit(ring: &[Point], center: Point, angle: f64) -> f64 {
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut best: f64 = 0.0;
    for i in 0..ring.len() {
        let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
        let (ex, ey) = (b.x - a.x, b.y - a.y);
        let det = dx * (-ey) - dy * (-ex);
        if det.abs() < 1e-15 {
            continue;
        }
        let (rx, ry) = (a.x - center.x, a.y - center.y);
        let t = (rx * (-ey) - ry * (-ex)) / det;
        let u = (dx * ry - dy * rx) / det;
        if t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            best = best.max(t);
        }
    }
    best
}

fn scaled(points: &[(f64, f64)], s: f64, off: f64) -> Vec<Point> {
    points
        .iter()
        .map(|&(x, y)| Point::new(off + s * x, off + s * y))
        .collect()
}

fn regular(n: usize, r: f64, c: f64, phase: f64) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let a = phase + std::f64::consts::TAU * i as f64 / n as f64;
            Point::new(c + r * a.cos(), c + r * a.sin())
        })
        .collect()
}

/// Ten hand-built polygons whose largest inscribed circle is unique.
pub fn hand_polygons() -> Vec<(&'static str, Vec<Point>)> {
    let star: Vec<Point> = (0..10)
        .map(|i| {
            let r = if i % 2 == 0 { 8.0 } else { 3.5 };
            let a = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * i as f64 / 10.0;
            Point::new(10.0 + r * a.cos(), 10.0 + r * a.sin())
        })
        .collect();
    vec![
        (
            "square",
            scaled(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], 10.0, 3.0),
        ),
        (
            "L",
            scaled(
                &[
                    (0.0, 0.0),
                    (3.0, 0.0),
                    (3.0, 1.0),
                    (1.0, 1.0),
                    (1.0, 3.0),
                    (0.0, 3.0),
                ],
                4.0,
                2.0,
            ),
        ),
        (
            "T",
            scaled(
                &[
                    (0.0, 2.0),
                    (1.0, 2.0),
                    (1.0, 0.0),
                    (2.0, 0.0),
                    (2.0, 2.0),
                    (3.0, 2.0),
                    (3.0, 3.0),
                    (0.0, 3.0),
                ],
                4.0,
                2.0,
            ),
        ),
        (
            "plus",
            scaled(
                &[
                    (1.0, 0.0),
                    (2.0, 0.0),
                    (2.0, 1.0),
                    (3.0, 1.0),
                    (3.0, 2.0),
                    (2.0, 2.0),
                    (2.0, 3.0),
                    (1.0, 3.0),
                    (1.0, 2.0),
                    (0.0, 2.0),
                    (0.0, 1.0),
                    (1.0, 1.0),
                ],
                4.0,
                2.0,
            ),
        ),
        (
            "triangle_3_4_5",
            scaled(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)], 3.0, 1.0),
        ),
        ("hexagon", regular(6, 7.0, 10.0, 0.1)),
        ("star5", star),
        (
            "kite",
            scaled(&[(0.0, 0.0), (2.0, -1.5), (6.0, 0.0), (2.0, 1.5)], 2.5, 5.0),
        ),
        ("pentagon", regular(5, 6.0, 10.0, 0.3)),
        ("64-gon", regular(64, 6.5, 10.0, 0.0)),
    ]
}

// ---------------------------------------------------------------------------
// Matching

/// Maximum bipartite matching by Kuhn's augmenting paths over the dense
/// all-pairs graph `‖p − g‖ ≤ tol`.
pub fn kuhn_matching(pred: &[Point], gt: &[Point], tol: f64) -> usize {
    let adj: Vec<Vec<usize>> = pred
        .iter()
        .map(|p| {
            (0..gt.len())
                .filter(|&j| ((p.x - gt[j].x).powi(2) + (p.y - gt[j].y).powi(2)).sqrt() <= tol)
                .collect()
        })
        .collect();
    let mut owner = vec![usize::MAX; gt.len()];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v] == usize::MAX || augment(owner[v], adj, seen, owner) {
                owner[v] = u;
                return true;
            }
        }
        false
    }
    (0..pred.len())
        .filter(|&u| augment(u, &adj, &mut vec![false; gt.len()], &mut owner))
        .count()
}

pub fn f_from_counts(matched: usize, n_pred: usize, n_gt: usize) -> f64 {
    let p = matched as f64 / n_pred as f64;
    let r = matched as f64 / n_gt as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

// ---------------------------------------------------------------------------
// Clustering

/// Plain Lloyd iteration with a linear-scan assignment, used as a
/// reference for the library's k-means.
pub fn nearest_linear(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    for j in 1..centroids.len() {
        if dist(point, &centroids[j]) < dist(point, &centroids[best]) {
            best = j;
        }
    }
    best
}

/// Sum of squared distances to the mean, summed in index order.
pub fn mean_and_inertia(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let dim = points[0].len();
    let mut sum = vec![0.0; dim];
    for p in points {
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
    }
    let mean: Vec<f64> = sum.into_iter().map(|s| s / points.len() as f64).collect();
    let inertia = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&mean)
                .map(|(x, m)| (x - m) * (x - m))
                .sum::<f64>()
        })
        .sum();
    (mean, inertia)
}
