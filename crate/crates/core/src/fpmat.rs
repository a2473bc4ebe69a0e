//! Small dense matrices and vectors over a prime field F_p.
//!
//! Everything here is exact arithmetic on u64 residues; dimensions stay tiny
//! (module ranks of abelian feet), so plain Gaussian elimination is all we
//! need.

/// Row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMat {
    p: u64,
    rows: usize,
    cols: usize,
    a: Vec<u64>,
}

impl FpMat {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        FpMat { p, rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = FpMat::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = FpMat::zero(p, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.a[i * self.cols + j] = v % self.p;
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.p, other.p);
        let mut out = FpMat::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let s = self.entry(i, k);
                if s == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.entry(i, j) + s * other.entry(k, j)) % self.p;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j) * v[j] % self.p).sum::<u64>() % self.p)
            .collect()
    }

    /// v^T * M, the covector image under the right action.
    pub fn vec_mat(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| v[i] * self.entry(i, j) % self.p).sum::<u64>() % self.p)
            .collect()
    }

    pub fn transpose(&self) -> FpMat {
        let mut out = FpMat::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.entry(i, j));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rank_of(self.p, (0..self.rows).map(|i| self.row(i).to_vec()).collect())
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Option<FpMat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let p = self.p;
        // Augmented [self | I], reduce to [I | inverse].
        let mut m: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| u64::from(i == j)));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[r][col] != 0)?;
            m.swap(col, pivot);
            let inv = inv_mod(m[col][col], p);
            for v in m[col].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..n {
                if r != col && m[r][col] != 0 {
                    let f = m[r][col];
                    let (head, tail) = if r < col {
                        let (a, b) = m.split_at_mut(col);
                        (&mut a[r], &b[0])
                    } else {
                        let (a, b) = m.split_at_mut(r);
                        (&mut b[0], &a[col])
                    };
                    for (x, y) in head.iter_mut().zip(tail.iter()) {
                        *x = (*x + (p - f) * *y) % p;
                    }
                }
            }
        }
        let mut out = FpMat::zero(p, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, m[i][n + j]);
            }
        }
        Some(out)
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: p prime, a nonzero mod p.
    debug_assert!(a % p != 0);
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rank of a list of vectors over F_p (consumes and reduces in place).
pub fn rank_of(p: u64, mut rows: Vec<Vec<u64>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], p);
        for v in rows[rank].iter_mut() {
            *v = *v % p * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] % p != 0 {
                let f = row[col] % p;
                for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = (*x % p + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Does `v` lie in the span of `basis`?
pub fn in_span(p: u64, basis: &[Vec<u64>], v: &[u64]) -> bool {
    if v.iter().all(|&x| x % p == 0) {
        return true;
    }
    let r0 = rank_of(p, basis.to_vec());
    let mut with = basis.to_vec();
    with.push(v.to_vec());
    rank_of(p, with) == r0
}

pub fn dot(p: u64, a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(&x, &y)| x * y % p).sum::<u64>() % p
}
