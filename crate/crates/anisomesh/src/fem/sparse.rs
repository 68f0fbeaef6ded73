//! Compressed sparse rows, bandwidth-reducing ordering, and a pivoted
//! banded LU factorization.

use crate::{Error, Result};

/// Square CSR matrix with sorted column indices per row.
#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    /// Build a zero matrix from per-row column sets; each row's columns are
    /// sorted and deduplicated.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut cols in rows {
            cols.sort_unstable();
            cols.dedup();
            col_idx.extend_from_slice(&cols);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    fn entry_index(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    /// Accumulate into an existing entry; the pattern must contain (i, j).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .entry_index(i, j)
            .expect("entry outside the assembled pattern");
        self.values[k] += v;
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn row_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &mut self.values[lo..hi])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            y[i] = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }
}

/// Reverse Cuthill-McKee ordering of an undirected adjacency structure.
/// Returns `perm` with `perm[new] = old`; starts each component from its
/// minimum-degree vertex and visits neighbors by ascending degree.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// LU factorization of a banded matrix with partial pivoting, in the
/// standard banded layout: entry (i, j) lives at row kl + ku + i - j of
/// column j, with kl extra rows on top absorbing pivot fill.
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Factor a matrix given by `entries(j)`, the list of (row, value) pairs
    /// of column j within the band.
    pub fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        columns: impl Fn(usize) -> Vec<(usize, f64)>,
    ) -> Result<Self> {
        let ldab = 2 * kl + ku + 1;
        let mut data = vec![0.0; ldab * n];
        for j in 0..n {
            for (i, v) in columns(j) {
                debug_assert!(i + ku >= j && i <= j + kl, "entry outside declared band");
                data[j * ldab + (kl + ku + i - j)] = v;
            }
        }
        let mut ipiv = vec![0usize; n];
        let at = |j: usize, i: usize| j * ldab + (kl + ku + i - j);
        for j in 0..n {
            let i_max = (j + kl).min(n - 1);
            let mut p = j;
            let mut best = data[at(j, j)].abs();
            for i in (j + 1)..=i_max {
                let v = data[at(j, i)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SolverBreakdown {
                    residual: f64::INFINITY,
                    target: 0.0,
                });
            }
            ipiv[j] = p;
            let k_max = (j + kl + ku).min(n - 1);
            if p != j {
                for k in j..=k_max {
                    data.swap(at(k, j), at(k, p));
                }
            }
            let pivot = data[at(j, j)];
            for i in (j + 1)..=i_max {
                let m = data[at(j, i)] / pivot;
                data[at(j, i)] = m;
                if m != 0.0 {
                    for k in (j + 1)..=k_max {
                        data[at(k, i)] -= m * data[at(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            ldab,
            data,
            ipiv,
        })
    }

    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let at = |j: usize, i: usize| j * self.ldab + (self.kl + self.ku + i - j);
        for j in 0..self.n {
            b.swap(j, self.ipiv[j]);
            let i_max = (j + self.kl).min(self.n - 1);
            let bj = b[j];
            if bj != 0.0 {
                for i in (j + 1)..=i_max {
                    b[i] -= self.data[at(j, i)] * bj;
                }
            }
        }
        for j in (0..self.n).rev() {
            b[j] /= self.data[at(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                let i_min = j.saturating_sub(self.kl + self.ku);
                for i in i_min..j {
                    b[i] -= self.data[at(j, i)] * bj;
                }
            }
        }
    }
}

/// Direct solve of a CSR system through RCM reordering and banded LU, with
/// a hard relative-residual contract of 1e-10.
pub fn solve_system(matrix: &Csr, rhs: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(matrix.n, rhs.len());
    let n = matrix.n;
    let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, _) = matrix.row(i);
        for &j in cols {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let perm = reverse_cuthill_mckee(&adj);
    let mut pinv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        pinv[old] = new;
    }
    let mut bw = 0usize;
    for i in 0..n {
        let (cols, _) = matrix.row(i);
        for &j in cols {
            bw = bw.max(pinv[i].abs_diff(pinv[j]));
        }
    }

    // Permuted columns of the matrix: column j' of PAPᵀ holds A(i, j) at
    // row pinv[i] for j = perm[j'].
    let mut cols_of: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, vals) = matrix.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            cols_of[pinv[j]].push((pinv[i], v));
        }
    }
    let lu = BandedLu::factor(n, bw, bw, |j| cols_of[j].clone())?;
    let mut x_perm: Vec<f64> = perm.iter().map(|&old| rhs[old]).collect();
    lu.solve(&mut x_perm);
    let mut x = vec![0.0; n];
    for (new, &old) in perm.iter().enumerate() {
        x[old] = x_perm[new];
    }

    let mut ax = vec![0.0; n];
    matrix.matvec(&x, &mut ax);
    let residual = ax
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        / norm_b;
    if !(residual <= 1e-10) {
        return Err(Error::SolverBreakdown {
            residual,
            target: 1e-10,
        });
    }
    Ok(x)
}
