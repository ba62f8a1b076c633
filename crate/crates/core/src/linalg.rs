//! Small exact integer linear algebra.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rootsys::Root;

/// Square integer matrix acting on coordinate columns.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        IntMatrix { n, data }
    }

    /// Matrix `P` with `(P v)[c] = v[perm[c]]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut data = vec![0; n * n];
        for (c, &old) in perm.iter().enumerate() {
            data[c * n + old] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        IntMatrix { n, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        IntMatrix { n, data }
    }

    pub fn apply(&self, v: &[i32]) -> Vec<i32> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let s: i64 = (0..self.n)
                    .map(|j| self.data[i * self.n + j] * v[j] as i64)
                    .sum();
                s as i32
            })
            .collect()
    }

    /// Image of a root, made positive if it lands on a negative root.
    pub fn apply_root(&self, root: &Root) -> Root {
        let mut image = self.apply(root.coords());
        if image.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            for c in &mut image {
                *c = -*c;
            }
        }
        Root(image)
    }

    pub fn determinant(&self) -> i64 {
        let rows: Vec<Vec<i64>> = self.rows();
        determinant(&rows)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(rows: &[Vec<i64>]) -> i64 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    (sign * m[n - 1][n - 1]) as i64
}

/// Rank over the rationals of a list of integer vectors.
pub fn rank(vectors: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = vectors
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][c] == 0 {
                continue;
            }
            let (a, b) = (m[rank][c], m[r][c]);
            let mut g = 0i128;
            for k in c..cols {
                m[r][k] = m[r][k] * a - m[rank][k] * b;
                g = num_integer::gcd(g, m[r][k]);
            }
            if g > 1 {
                for k in c..cols {
                    m[r][k] /= g;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Largest absolute value of any square minor of the matrix whose rows are
/// `vectors`, over all minor sizes up to the column count.
pub fn max_abs_minor(vectors: &[Vec<i64>]) -> i64 {
    let Some(cols) = vectors.first().map(|v| v.len()) else {
        return 0;
    };
    let mut best = vectors
        .iter()
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0);
    for size in 2..=cols.min(vectors.len()) {
        let col_sets = combinations(cols, size);
        for_each_combination(vectors.len(), size, |rows| {
            for cset in &col_sets {
                let minor: Vec<Vec<i64>> = rows
                    .iter()
                    .map(|&r| cset.iter().map(|&c| vectors[r][c]).collect())
                    .collect();
                best = best.max(determinant(&minor).abs());
            }
        });
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_combination(n, k, |c| out.push(c.to_vec()));
    out
}

/// Calls `f` on every increasing `k`-subset of `0..n`.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
