//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! Columns are eliminated left-looking in order of increasing nonzero count,
//! with threshold partial pivoting that prefers sparse rows. Logical columns
//! (negated unit vectors) factor without fill, so the work is proportional to
//! the structural part of the basis.

/// Relative threshold for accepting a pivot candidate against the column max.
const PIVOT_THRESHOLD: f64 = 0.1;
/// Absolute size below which a column is considered dependent.
const SINGULAR_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

/// `B = L U` in pivot order plus a file of column etas for basis changes.
#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    m: usize,
    /// pivot index -> row
    pivot_row: Vec<usize>,
    /// pivot index -> basis position
    pivot_pos: Vec<usize>,
    /// Pivots whose elimination column is non-empty, in pivot order.
    l_pivots: Vec<usize>,
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Off-diagonal entries of U column k as (earlier pivot index, value).
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    etas: Vec<Eta>,
}

/// A basis position whose column was dependent and was replaced by the
/// logical variable of `row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Replacement {
    pub pos: usize,
    pub row: usize,
}

impl BasisFactor {
    /// Factor the basis given its columns by position. Dependent columns are
    /// replaced by logicals of unpivoted rows; the caller must apply the
    /// returned replacements to its basis bookkeeping.
    pub fn factor(m: usize, columns: &[Vec<(usize, f64)>]) -> (BasisFactor, Vec<Replacement>) {
        debug_assert_eq!(columns.len(), m);
        let mut row_count = vec![0usize; m];
        for col in columns {
            for &(i, _) in col {
                row_count[i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (columns[p].len(), p));

        let mut f = BasisFactor {
            m,
            pivot_row: Vec::with_capacity(m),
            pivot_pos: Vec::with_capacity(m),
            l_pivots: Vec::new(),
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
            etas: Vec::new(),
        };
        // row -> pivot index, usize::MAX when unpivoted
        let mut row_pivot = vec![usize::MAX; m];
        let mut work = vec![0.0f64; m];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; m];
        let mut deficient: Vec<usize> = Vec::new();

        for &pos in &order {
            touched.clear();
            for &(i, a) in &columns[pos] {
                if !mark[i] {
                    mark[i] = true;
                    touched.push(i);
                }
                work[i] += a;
            }
            for &k in &f.l_pivots {
                let r = f.pivot_row[k];
                let wr = work[r];
                if wr == 0.0 {
                    continue;
                }
                for &(i, l) in &f.l_cols[k] {
                    if !mark[i] {
                        mark[i] = true;
                        touched.push(i);
                    }
                    work[i] -= l * wr;
                }
            }
            let mut col_max = 0.0f64;
            for &i in &touched {
                if row_pivot[i] == usize::MAX {
                    col_max = col_max.max(work[i].abs());
                }
            }
            if col_max < SINGULAR_TOL {
                deficient.push(pos);
                for &i in &touched {
                    work[i] = 0.0;
                    mark[i] = false;
                }
                continue;
            }
            let mut best: Option<usize> = None;
            for &i in &touched {
                if row_pivot[i] != usize::MAX || work[i].abs() < PIVOT_THRESHOLD * col_max {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if (row_count[i], i) < (row_count[b], b) {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let prow = best.expect("a pivot candidate exists when col_max is positive");
            let diag = work[prow];
            let k = f.pivot_row.len();
            let mut ucol = Vec::new();
            let mut lcol = Vec::new();
            for &i in &touched {
                let w = work[i];
                if i != prow && w.abs() > DROP_TOL {
                    if row_pivot[i] != usize::MAX {
                        ucol.push((row_pivot[i], w));
                    } else {
                        lcol.push((i, w / diag));
                    }
                }
                work[i] = 0.0;
                mark[i] = false;
            }
            row_pivot[prow] = k;
            f.pivot_row.push(prow);
            f.pivot_pos.push(pos);
            f.u_diag.push(diag);
            f.u_cols.push(ucol);
            if !lcol.is_empty() {
                f.l_pivots.push(k);
            }
            f.l_cols.push(lcol);
        }

        let mut replacements = Vec::new();
        if !deficient.is_empty() {
            let free_rows: Vec<usize> = (0..m).filter(|&i| row_pivot[i] == usize::MAX).collect();
            debug_assert_eq!(free_rows.len(), deficient.len());
            for (&pos, &row) in deficient.iter().zip(&free_rows) {
                // logical column is -e_row; after the existing eliminations it
                // stays -e_row on an unpivoted row, so it pivots cleanly.
                let k = f.pivot_row.len();
                row_pivot[row] = k;
                f.pivot_row.push(row);
                f.pivot_pos.push(pos);
                f.u_diag.push(-1.0);
                f.u_cols.push(Vec::new());
                f.l_cols.push(Vec::new());
                replacements.push(Replacement { pos, row });
            }
        }
        (f, replacements)
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solve `B x = a`. `rhs` is row-indexed and is consumed as workspace;
    /// the result is written to `out` indexed by basis position.
    pub fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        for &k in &self.l_pivots {
            let wr = rhs[self.pivot_row[k]];
            if wr == 0.0 {
                continue;
            }
            for &(i, l) in &self.l_cols[k] {
                rhs[i] -= l * wr;
            }
        }
        for k in (0..self.m).rev() {
            let r = self.pivot_row[k];
            let xk = rhs[r] / self.u_diag[k];
            rhs[r] = 0.0;
            out[self.pivot_pos[k]] = xk;
            if xk != 0.0 {
                for &(j, u) in &self.u_cols[k] {
                    rhs[self.pivot_row[j]] -= u * xk;
                }
            }
        }
        for eta in &self.etas {
            let xp = out[eta.pos] / eta.pivot;
            out[eta.pos] = xp;
            if xp != 0.0 {
                for &(i, d) in &eta.entries {
                    out[i] -= d * xp;
                }
            }
        }
    }

    /// Solve `B^T y = c`. `c` is indexed by basis position and is consumed
    /// as workspace; `y` is row-indexed.
    pub fn btran(&self, c: &mut [f64], y: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut s = c[eta.pos];
            for &(i, d) in &eta.entries {
                s -= d * c[i];
            }
            c[eta.pos] = s / eta.pivot;
        }
        for k in 0..self.m {
            let mut s = c[self.pivot_pos[k]];
            for &(j, u) in &self.u_cols[k] {
                s -= u * y[self.pivot_row[j]];
            }
            y[self.pivot_row[k]] = s / self.u_diag[k];
        }
        for &k in self.l_pivots.iter().rev() {
            let mut s = 0.0;
            for &(i, l) in &self.l_cols[k] {
                s += l * y[i];
            }
            if s != 0.0 {
                y[self.pivot_row[k]] -= s;
            }
        }
    }

    /// Record that basis position `pos` was replaced by a column whose FTRAN
    /// image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &d)| i != pos && d.abs() > DROP_TOL)
            .map(|(i, &d)| (i, d))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos],
            entries,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(cols: &[Vec<(usize, f64)>], x: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (p, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                out[i] += a * x[p];
            }
        }
        out
    }

    #[test]
    fn solves_small_system_both_ways() {
        let cols = vec![
            vec![(0, 2.0), (1, 1.0)],
            vec![(0, -1.0)],
            vec![(1, 3.0), (2, 1.0)],
        ];
        let (f, rep) = BasisFactor::factor(3, &cols);
        assert!(rep.is_empty());
        let b = [1.0, 2.0, 3.0];
        let mut rhs = b.to_vec();
        let mut x = vec![0.0; 3];
        f.ftran(&mut rhs, &mut x);
        let back = dense_mul(&cols, &x, 3);
        for i in 0..3 {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }
        // B^T y = c  <=>  col_p . y = c_p
        let c = [4.0, -1.0, 0.5];
        let mut cw = c.to_vec();
        let mut y = vec![0.0; 3];
        f.btran(&mut cw, &mut y);
        for (p, col) in cols.iter().enumerate() {
            let dot: f64 = col.iter().map(|&(i, a)| a * y[i]).sum();
            assert!((dot - c[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn replaces_dependent_columns_with_logicals() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)]];
        let (_, rep) = BasisFactor::factor(2, &cols);
        assert_eq!(rep.len(), 1);
    }

    #[test]
    fn eta_update_matches_refactor() {
        let mut cols = vec![vec![(0, -1.0)], vec![(1, -1.0)], vec![(2, -1.0)]];
        let (mut f, _) = BasisFactor::factor(3, &cols);
        let entering = vec![(0, 1.0), (1, 4.0), (2, -2.0)];
        let mut rhs = vec![1.0, 4.0, -2.0];
        let mut alpha = vec![0.0; 3];
        f.ftran(&mut rhs, &mut alpha);
        f.update(1, &alpha);
        cols[1] = entering;
        let (g, _) = BasisFactor::factor(3, &cols);
        let b = [0.3, -1.2, 2.5];
        let (mut r1, mut r2) = (b.to_vec(), b.to_vec());
        let (mut x1, mut x2) = (vec![0.0; 3], vec![0.0; 3]);
        f.ftran(&mut r1, &mut x1);
        g.ftran(&mut r2, &mut x2);
        for i in 0..3 {
            assert!((x1[i] - x2[i]).abs() < 1e-12);
        }
        let (mut c1, mut c2) = (b.to_vec(), b.to_vec());
        let (mut y1, mut y2) = (vec![0.0; 3], vec![0.0; 3]);
        f.btran(&mut c1, &mut y1);
        g.btran(&mut c2, &mut y2);
        for i in 0..3 {
            assert!((y1[i] - y2[i]).abs() < 1e-12);
        }
    }
}
