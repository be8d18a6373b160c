//! Sparse LU factorisation of simplex bases with product-form updates.
//!
//! Left-looking elimination: each basis column is reduced against the `L`
//! columns produced so far, then a pivot is chosen among the not-yet-pivoted
//! rows by threshold partial pivoting with a row-count tie-break. Columns are
//! processed sparsest first so unit (logical) columns pivot without fill.

use crate::scalar::Scalar;

#[derive(Clone, Debug, Default)]
pub(crate) struct SparseVec<S> {
    pub idx: Vec<usize>,
    pub val: Vec<S>,
}

impl<S: Scalar> SparseVec<S> {
    pub fn new() -> Self {
        Self { idx: Vec::new(), val: Vec::new() }
    }

    pub fn push(&mut self, i: usize, v: S) {
        self.idx.push(i);
        self.val.push(v);
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.idx.iter().copied().zip(self.val.iter().copied())
    }
}

/// Basis positions that could not be pivoted and the rows left without a pivot.
#[derive(Debug)]
pub(crate) struct Singular {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

struct Eta<S> {
    pos: usize,
    pivot: S,
    others: Vec<(usize, S)>,
}

pub(crate) struct BasisFactor<S> {
    m: usize,
    prow: Vec<usize>,
    pcol: Vec<usize>,
    /// Non-empty `L` columns in pivot order: (pivot index, (row, multiplier)).
    l_cols: Vec<(usize, Vec<(usize, S)>)>,
    /// `U` column per pivot index: entries (earlier pivot index, value).
    u_cols: Vec<Vec<(usize, S)>>,
    u_diag: Vec<S>,
    etas: Vec<Eta<S>>,
    work: Vec<S>,
    zk: Vec<S>,
}

const THRESHOLD: f64 = 0.1;

impl<S: Scalar> BasisFactor<S> {
    /// Factor the `m × m` matrix whose column at position `p` is `cols[p]`.
    pub fn factor(m: usize, cols: &[&SparseVec<S>]) -> Result<Self, Singular> {
        assert_eq!(cols.len(), m);
        let mut row_count = vec![0usize; m];
        for c in cols {
            for &i in &c.idx {
                row_count[i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (cols[p].len(), p));

        let threshold = S::of(THRESHOLD);
        let mut row_k = vec![usize::MAX; m];
        let mut prow = Vec::with_capacity(m);
        let mut pcol = Vec::with_capacity(m);
        let mut l_cols: Vec<(usize, Vec<(usize, S)>)> = Vec::new();
        let mut u_cols: Vec<Vec<(usize, S)>> = Vec::with_capacity(m);
        let mut u_diag = Vec::with_capacity(m);
        let mut w = vec![S::zero(); m];
        let mut touched_flag = vec![false; m];
        let mut touched: Vec<usize> = Vec::new();
        let mut singular = Vec::new();

        for &pos in &order {
            for (i, v) in cols[pos].iter() {
                if !touched_flag[i] {
                    touched_flag[i] = true;
                    touched.push(i);
                }
                w[i] += v;
            }
            for (k, lcol) in &l_cols {
                let v = w[prow[*k]];
                if v == S::zero() {
                    continue;
                }
                for &(i, l) in lcol {
                    if !touched_flag[i] {
                        touched_flag[i] = true;
                        touched.push(i);
                    }
                    w[i] -= l * v;
                }
            }

            let mut max_abs = S::zero();
            for &i in &touched {
                if row_k[i] == usize::MAX {
                    max_abs = max_abs.max(w[i].abs());
                }
            }
            let mut piv = usize::MAX;
            if max_abs > S::pivot_tol() {
                let mut best: Option<(usize, S, usize)> = None;
                for &i in &touched {
                    if row_k[i] != usize::MAX {
                        continue;
                    }
                    let a = w[i].abs();
                    if a < threshold * max_abs {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bc, ba, bi)) => {
                            row_count[i] < bc || (row_count[i] == bc && (a > ba || (a == ba && i < bi)))
                        }
                    };
                    if better {
                        best = Some((row_count[i], a, i));
                    }
                }
                piv = best.map(|b| b.2).unwrap_or(usize::MAX);
            }

            if piv == usize::MAX {
                singular.push(pos);
            } else {
                let k = prow.len();
                let d = w[piv];
                let mut ucol = Vec::new();
                let mut lcol = Vec::new();
                for &i in &touched {
                    let v = w[i];
                    if i == piv || v.abs() <= S::drop_tol() {
                        continue;
                    }
                    if row_k[i] != usize::MAX {
                        ucol.push((row_k[i], v));
                    } else {
                        lcol.push((i, v / d));
                    }
                }
                row_k[piv] = k;
                prow.push(piv);
                pcol.push(pos);
                u_cols.push(ucol);
                u_diag.push(d);
                if !lcol.is_empty() {
                    l_cols.push((k, lcol));
                }
            }
            for &i in &touched {
                w[i] = S::zero();
                touched_flag[i] = false;
            }
            touched.clear();
        }

        if !singular.is_empty() {
            let rows = (0..m).filter(|&i| row_k[i] == usize::MAX).collect();
            return Err(Singular { positions: singular, rows });
        }
        Ok(Self {
            m,
            prow,
            pcol,
            l_cols,
            u_cols,
            u_diag,
            etas: Vec::new(),
            work: vec![S::zero(); m],
            zk: vec![S::zero(); m],
        })
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solve `B x = b`. `b` is indexed by row and overwritten with `x` by basis position.
    pub fn ftran(&mut self, b: &mut [S]) {
        debug_assert_eq!(b.len(), self.m);
        for (k, lcol) in &self.l_cols {
            let v = b[self.prow[*k]];
            if v != S::zero() {
                for &(i, l) in lcol {
                    b[i] -= l * v;
                }
            }
        }
        let x = &mut self.work;
        for k in (0..self.m).rev() {
            let z = b[self.prow[k]] / self.u_diag[k];
            x[self.pcol[k]] = z;
            if z != S::zero() {
                for &(kk, u) in &self.u_cols[k] {
                    b[self.prow[kk]] -= u * z;
                }
            }
        }
        b.copy_from_slice(x);
        for eta in &self.etas {
            let xr = b[eta.pos] / eta.pivot;
            b[eta.pos] = xr;
            if xr != S::zero() {
                for &(i, a) in &eta.others {
                    b[i] -= a * xr;
                }
            }
        }
    }

    /// Solve `Bᵀ y = c`. `c` is indexed by basis position and overwritten with `y` by row.
    pub fn btran(&mut self, c: &mut [S]) {
        debug_assert_eq!(c.len(), self.m);
        for eta in self.etas.iter().rev() {
            let mut s = c[eta.pos];
            for &(i, a) in &eta.others {
                s -= a * c[i];
            }
            c[eta.pos] = s / eta.pivot;
        }
        let z = &mut self.zk;
        for k in 0..self.m {
            let mut s = c[self.pcol[k]];
            for &(kk, u) in &self.u_cols[k] {
                s -= u * z[kk];
            }
            z[k] = s / self.u_diag[k];
        }
        let w = &mut self.work;
        for k in 0..self.m {
            w[self.prow[k]] = z[k];
        }
        for (k, lcol) in self.l_cols.iter().rev() {
            let mut s = S::zero();
            for &(i, l) in lcol {
                s += l * w[i];
            }
            w[self.prow[*k]] -= s;
        }
        c.copy_from_slice(w);
    }

    /// Record that basis position `pos` now holds a column whose FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[S]) {
        let others = alpha
            .iter()
            .enumerate()
            .filter(|&(i, a)| i != pos && a.abs() > S::drop_tol())
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta { pos, pivot: alpha[pos], others });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(entries: &[(usize, f64)]) -> SparseVec<f64> {
        let mut v = SparseVec::new();
        for &(i, x) in entries {
            v.push(i, x);
        }
        v
    }

    fn dense_mul(cols: &[SparseVec<f64>], x: &[f64], m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (p, c) in cols.iter().enumerate() {
            for (i, v) in c.iter() {
                out[i] += v * x[p];
            }
        }
        out
    }

    fn sample() -> Vec<SparseVec<f64>> {
        vec![
            col(&[(0, 2.0), (2, 1.0)]),
            col(&[(1, -1.0)]),
            col(&[(0, 1.0), (1, 3.0), (2, 4.0), (3, 1.0)]),
            col(&[(2, 5.0), (3, -2.0)]),
        ]
    }

    #[test]
    fn ftran_and_btran_solve() {
        let cols = sample();
        let refs: Vec<&SparseVec<f64>> = cols.iter().collect();
        let mut f = BasisFactor::factor(4, &refs).unwrap();
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let mut b = dense_mul(&cols, &x_true, 4);
        f.ftran(&mut b);
        for (a, e) in b.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-12);
        }
        // Bᵀ y = c  <=>  c_p = col_p · y.
        let y_true = [0.5, 1.0, -1.0, 2.0];
        let mut c: Vec<f64> = cols.iter().map(|c| c.iter().map(|(i, v)| v * y_true[i]).sum()).collect();
        f.btran(&mut c);
        for (a, e) in c.iter().zip(y_true) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_update_matches_refactor() {
        let mut cols = sample();
        let refs: Vec<&SparseVec<f64>> = cols.iter().collect();
        let mut f = BasisFactor::factor(4, &refs).unwrap();
        let entering = col(&[(1, 1.0), (3, 4.0)]);
        let mut alpha = vec![0.0; 4];
        for (i, v) in entering.iter() {
            alpha[i] = v;
        }
        f.ftran(&mut alpha);
        f.update(1, &alpha);
        cols[1] = entering;
        let x_true = [0.25, 1.0, -3.0, 2.0];
        let mut b = dense_mul(&cols, &x_true, 4);
        f.ftran(&mut b);
        for (a, e) in b.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-12);
        }
        let y_true = [1.0, 2.0, 3.0, 4.0];
        let mut c: Vec<f64> = cols.iter().map(|c| c.iter().map(|(i, v)| v * y_true[i]).sum()).collect();
        f.btran(&mut c);
        for (a, e) in c.iter().zip(y_true) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_singular_columns() {
        let cols = vec![col(&[(0, 1.0), (1, 1.0)]), col(&[(0, 2.0), (1, 2.0)]), col(&[(2, 1.0)])];
        let refs: Vec<&SparseVec<f64>> = cols.iter().collect();
        let err = BasisFactor::factor(3, &refs).err().unwrap();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
