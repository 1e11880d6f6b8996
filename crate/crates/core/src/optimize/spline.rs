use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};

/// Natural cubic spline through a sequence of keypoints, one scalar spline
/// per coordinate over a shared chord-length parameter.
///
/// On segment `j` each coordinate is
/// `a + b (t - t_j) + c (t - t_j)^2 + d (t - t_j)^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplinePath {
    keypoints: Polyline,
    knots: Vec<f64>,
    /// `coeffs[axis][j] = [a, b, c, d]`
    coeffs: Vec<Vec<[f64; 4]>>,
}

/// Second-order coefficients `c_0..c_{n-1}` of the natural spline through
/// `(t_j, y_j)`, via the Thomas algorithm on the interior rows.
fn natural_c(h: &[f64], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut c = vec![0.0; n];
    if n < 3 {
        return c;
    }
    let m = n - 2;
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for k in 0..m {
        let j = k + 1;
        diag[k] = 2.0 * (h[j - 1] + h[j]);
        upper[k] = h[j];
        rhs[k] = 3.0 / h[j] * (y[j + 1] - y[j]) - 3.0 / h[j - 1] * (y[j] - y[j - 1]);
    }
    // forward sweep; the sub-diagonal entry of row k is h[k]
    for k in 1..m {
        let w = h[k] / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    c[m] = rhs[m - 1] / diag[m - 1];
    for k in (0..m - 1).rev() {
        c[k + 1] = (rhs[k] - upper[k] * c[k + 2]) / diag[k];
    }
    c
}

pub fn fit_cubic_spline(keypoints: &Polyline) -> Result<SplinePath> {
    let pts = &keypoints.points;
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: pts.len(),
        });
    }
    let dim = pts[0].dim();
    if let Some(p) = pts.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        });
    }
    let knots = keypoints.cumulative();
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(j) = h.iter().position(|&hj| hj.is_nan() || hj <= 0.0) {
        return Err(Error::DegenerateKnot(j));
    }
    let coeffs = (0..dim)
        .map(|axis| {
            let y: Vec<f64> = pts.iter().map(|p| p.coord(axis)).collect();
            let c = natural_c(&h, &y);
            (0..h.len())
                .map(|j| {
                    let b = (y[j + 1] - y[j]) / h[j] - h[j] * (2.0 * c[j] + c[j + 1]) / 3.0;
                    let d = (c[j + 1] - c[j]) / (3.0 * h[j]);
                    [y[j], b, c[j], d]
                })
                .collect()
        })
        .collect();
    Ok(SplinePath {
        keypoints: keypoints.clone(),
        knots,
        coeffs,
    })
}

impl SplinePath {
    pub fn keypoints(&self) -> &Polyline {
        &self.keypoints
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn coeffs(&self, axis: usize) -> &[[f64; 4]] {
        &self.coeffs[axis]
    }

    pub fn param_end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Segment containing parameter `t`, clamped to the valid range.
    pub fn segment_of(&self, t: f64) -> usize {
        self.knots
            .partition_point(|&k| k <= t)
            .saturating_sub(1)
            .min(self.segments() - 1)
    }

    fn build(&self, f: impl Fn(&[f64; 4]) -> f64) -> Point {
        let mut p = Point::origin(self.dim());
        for axis in 0..self.dim() {
            p = p.with_coord(axis, f(&self.coeffs[axis][0]));
        }
        p
    }

    fn on_segment(&self, j: usize, dt: f64, order: u8) -> Point {
        let mut p = Point::origin(self.dim());
        for axis in 0..self.dim() {
            let [a, b, c, d] = self.coeffs[axis][j];
            let v = match order {
                0 => a + dt * (b + dt * (c + dt * d)),
                1 => b + dt * (2.0 * c + 3.0 * dt * d),
                _ => 2.0 * c + 6.0 * d * dt,
            };
            p = p.with_coord(axis, v);
        }
        p
    }

    /// Position at parameter `t`. Knot parameters return their keypoint
    /// exactly.
    pub fn eval(&self, t: f64) -> Point {
        if t >= self.param_end() {
            return *self.keypoints.last().unwrap();
        }
        if t <= 0.0 {
            return self.build(|c| c[0]);
        }
        let j = self.segment_of(t);
        self.on_segment(j, t - self.knots[j], 0)
    }

    pub fn derivative(&self, t: f64) -> Point {
        let j = self.segment_of(t);
        self.on_segment(j, t - self.knots[j], 1)
    }

    pub fn second_derivative(&self, t: f64) -> Point {
        let j = self.segment_of(t);
        self.on_segment(j, t - self.knots[j], 2)
    }

    /// Samples `(t, point)` along the curve so consecutive samples are at
    /// most `spacing` apart. Every knot is included.
    pub fn discretize(&self, spacing: f64) -> Vec<(f64, Point)> {
        const PROBES: usize = 32;
        let mut out = Vec::new();
        for j in 0..self.segments() {
            let h = self.knots[j + 1] - self.knots[j];
            let at = |s: f64| if s >= h { self.eval(self.knots[j + 1]) } else { self.on_segment(j, s, 0) };
            let approx: f64 = (0..PROBES)
                .map(|k| at(h * k as f64 / PROBES as f64).dist(&at(h * (k + 1) as f64 / PROBES as f64)))
                .sum();
            let mut m = ((approx / spacing).ceil() as usize).max(1);
            let seg = loop {
                let pts: Vec<(f64, Point)> = (0..=m)
                    .map(|k| {
                        let s = if k == m { h } else { h * k as f64 / m as f64 };
                        (self.knots[j] + s, at(s))
                    })
                    .collect();
                let ok = pts.windows(2).all(|w| w[0].1.dist(&w[1].1) <= spacing);
                if ok || m > 1 << 20 {
                    break pts;
                }
                m *= 2;
            };
            let skip = usize::from(j > 0);
            out.extend(seg.into_iter().skip(skip));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense Gaussian elimination on the full natural-spline system
    /// including the two boundary rows.
    fn oracle_c(t: &[f64], y: &[f64]) -> Vec<f64> {
        let n = y.len();
        let mut a = vec![vec![0.0; n + 1]; n];
        a[0][0] = 1.0;
        a[n - 1][n - 1] = 1.0;
        for j in 1..n - 1 {
            let (h0, h1) = (t[j] - t[j - 1], t[j + 1] - t[j]);
            a[j][j - 1] = h0;
            a[j][j] = 2.0 * (h0 + h1);
            a[j][j + 1] = h1;
            a[j][n] = 3.0 * (y[j + 1] - y[j]) / h1 - 3.0 * (y[j] - y[j - 1]) / h0;
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs())).unwrap();
            a.swap(col, piv);
            for row in 0..n {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for k in col..=n {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn two_points_is_a_line() {
        let s = fit_cubic_spline(&Polyline::new(vec![Point::new2(0.0, 0.0), Point::new2(3.0, 4.0)])).unwrap();
        for axis in 0..2 {
            let [_, _, c, d] = s.coeffs(axis)[0];
            assert_eq!((c, d), (0.0, 0.0));
        }
        let mid = s.eval(2.5);
        assert!((mid.x() - 1.5).abs() < 1e-12 && (mid.y() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_interior_matches_oracle() {
        let kp = Polyline::new(vec![Point::new2(0.0, 0.0), Point::new2(1.0, 1.0), Point::new2(2.0, 0.0)]);
        let s = fit_cubic_spline(&kp).unwrap();
        let t = kp.cumulative();
        for axis in 0..2 {
            let y: Vec<f64> = kp.points.iter().map(|p| p.coord(axis)).collect();
            let want = oracle_c(&t, &y);
            let got: Vec<f64> = s.coeffs(axis).iter().map(|c| c[2]).collect();
            assert!((got[0] - want[0]).abs() < 1e-12);
            assert!((got[1] - want[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn thomas_matches_dense_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let n = rng.gen_range(3..30);
            let mut t = vec![0.0];
            for _ in 1..n {
                let last = *t.last().unwrap();
                t.push(last + rng.gen_range(0.1..5.0));
            }
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
            let got = natural_c(&h, &y);
            let want = oracle_c(&t, &y);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-9 * (1.0 + w.abs()));
            }
        }
    }

    #[test]
    fn knots_are_exact_and_ends_natural() {
        let kp = Polyline::new(vec![
            Point::new3(0.0, 0.0, 0.0),
            Point::new3(1.0, 2.0, 0.5),
            Point::new3(3.0, 2.5, 1.0),
            Point::new3(4.0, 0.0, -1.0),
            Point::new3(6.0, 1.0, 0.0),
        ]);
        let s = fit_cubic_spline(&kp).unwrap();
        for (t, p) in s.knots().iter().zip(&kp.points) {
            assert_eq!(s.eval(*t), *p);
        }
        for t in [0.0, s.param_end()] {
            let dd = s.second_derivative(t);
            assert!(dd.coords().iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn degenerate_knot() {
        let kp = Polyline::new(vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0), Point::new2(1.0, 0.0)]);
        assert!(matches!(fit_cubic_spline(&kp), Err(Error::DegenerateKnot(1))));
    }

    #[test]
    fn discretize_respects_spacing() {
        let kp = Polyline::new(vec![Point::new2(0.0, 0.0), Point::new2(10.0, 10.0), Point::new2(20.0, 0.0)]);
        let s = fit_cubic_spline(&kp).unwrap();
        let d = s.discretize(0.5);
        assert!(d.windows(2).all(|w| w[0].1.dist(&w[1].1) <= 0.5 && w[0].0 < w[1].0));
        assert_eq!(d.first().unwrap().1, kp.points[0]);
        assert_eq!(d.last().unwrap().1, kp.points[2]);
        assert!(d.iter().any(|(_, p)| *p == kp.points[1]));
    }
}
