//! LU factorization of a symmetric banded matrix with partial pivoting,
//! specialized to the shifted solves (H − λI) x = b that inverse iteration
//! needs. Pivoting widens the upper band from `w` to `2w`; everything stays
//! O(n·w²).

/// Factored H − λI for a matrix with half-bandwidth `w`.
pub struct BandLu {
    n: usize,
    w: usize,
    /// Upper bands of U: `upper[d][j]` = U(j, j+d) for d = 0..=2w.
    upper: Vec<Vec<f64>>,
    /// Multipliers: `lower[d][j]` = L(j+d+1, j) for d = 0..w.
    lower: Vec<Vec<f64>>,
    /// Row swapped with row j at step j (j..=j+w).
    pivot: Vec<usize>,
}

impl BandLu {
    /// Factors the banded matrix given by `entry(i, j)` (zero outside
    /// |i−j| ≤ w) shifted by −`shift` on the diagonal. `pivot_floor` replaces
    /// vanishing pivots, capping the growth of a singular-shift solve.
    pub fn factor(
        n: usize,
        w: usize,
        entry: impl Fn(usize, usize) -> f64,
        shift: f64,
        pivot_floor: f64,
    ) -> Self {
        // working band rows: row i holds columns i..=i+2w of the evolving matrix
        let width = 2 * w + 1;
        let mut rows = vec![vec![0.0_f64; width]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (d, slot) in row.iter_mut().enumerate() {
                let j = i + d;
                if j < n && d <= w {
                    *slot = entry(i, j) - if d == 0 { shift } else { 0.0 };
                }
            }
        }
        // entries below the diagonal, row i columns i-w..i
        let mut sub = vec![vec![0.0_f64; w]; n];
        for (i, row) in sub.iter_mut().enumerate() {
            for (d, slot) in row.iter_mut().enumerate() {
                if i > d {
                    *slot = entry(i, i - d - 1);
                }
            }
        }

        let mut upper = vec![vec![0.0_f64; n]; width];
        let mut lower = vec![vec![0.0_f64; n.saturating_sub(1)]; w];
        let mut pivot = vec![0usize; n];

        for j in 0..n {
            // active column j lives in rows j..=j+w; value in row r is
            // sub[r][r-j-1] for r > j, rows[j][0] for r == j
            let col_val = |rows: &Vec<Vec<f64>>, sub: &Vec<Vec<f64>>, r: usize| -> f64 {
                if r == j {
                    rows[j][0]
                } else {
                    sub[r][r - j - 1]
                }
            };
            let r_max = (j + w).min(n - 1);
            let mut p = j;
            let mut best = col_val(&rows, &sub, j).abs();
            for r in j + 1..=r_max {
                let v = col_val(&rows, &sub, r).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            pivot[j] = p;
            if p != j {
                // swap the full remaining rows j and p (columns j..=j+2w)
                for d in 0..width {
                    let c = j + d;
                    if c >= n {
                        break;
                    }
                    let vj = band_get(&rows, &sub, j, c, w);
                    let vp = band_get(&rows, &sub, p, c, w);
                    band_set(&mut rows, &mut sub, j, c, vp, w);
                    band_set(&mut rows, &mut sub, p, c, vj, w);
                }
            }
            let mut pivot_val = rows[j][0];
            if pivot_val.abs() < pivot_floor {
                pivot_val = if pivot_val < 0.0 {
                    -pivot_floor
                } else {
                    pivot_floor
                };
                rows[j][0] = pivot_val;
            }
            for (d, col) in upper.iter_mut().enumerate() {
                col[j] = rows[j][d];
            }
            for r in j + 1..=r_max {
                let m = band_get(&rows, &sub, r, j, w) / pivot_val;
                lower[r - j - 1][j] = m;
                for d in 1..width {
                    let c = j + d;
                    if c >= n {
                        break;
                    }
                    let v = band_get(&rows, &sub, r, c, w) - m * rows[j][d];
                    band_set(&mut rows, &mut sub, r, c, v, w);
                }
            }
        }
        Self {
            n,
            w,
            upper,
            lower,
            pivot,
        }
    }

    /// In-place solve of (H − λI) x = b.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for j in 0..n {
            let p = self.pivot[j];
            if p != j {
                b.swap(j, p);
            }
            let r_max = (j + self.w).min(n - 1);
            for r in j + 1..=r_max {
                b[r] -= self.lower[r - j - 1][j] * b[j];
            }
        }
        for j in (0..n).rev() {
            let mut s = b[j];
            let d_max = (2 * self.w).min(n - 1 - j);
            for d in 1..=d_max {
                s -= self.upper[d][j] * b[j + d];
            }
            b[j] = s / self.upper[0][j];
        }
    }
}

fn band_get(rows: &[Vec<f64>], sub: &[Vec<f64>], r: usize, c: usize, w: usize) -> f64 {
    if c >= r {
        if c - r <= 2 * w {
            rows[r][c - r]
        } else {
            0.0
        }
    } else if r - c <= w {
        sub[r][r - c - 1]
    } else {
        0.0
    }
}

fn band_set(rows: &mut [Vec<f64>], sub: &mut [Vec<f64>], r: usize, c: usize, v: f64, w: usize) {
    if c >= r {
        if c - r <= 2 * w {
            rows[r][c - r] = v;
        }
    } else if r - c <= w {
        sub[r][r - c - 1] = v;
    }
}
