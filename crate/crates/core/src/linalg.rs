//! Banded matrices with equal lower and upper bandwidth, with LU (partial
//! pivoting) and LDLᵀ factorizations.

use crate::error::{Error, Result};

/// Square matrix with entries only on `|i - j| ≤ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    b: usize,
    /// Row `i`, column `j` at `i * (2b+1) + (j + b - i)`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, b: usize) -> Self {
        Self {
            n,
            b,
            data: vec![0.0; n * (2 * b + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.b, "({i}, {j}) outside band {}", self.b);
        i * (2 * self.b + 1) + (j + self.b - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.b {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Replaces row and column `i` by those of the identity.
    pub fn pin(&mut self, i: usize) {
        let lo = i.saturating_sub(self.b);
        let hi = (i + self.b).min(self.n - 1);
        for j in lo..=hi {
            let a = self.idx(i, j);
            let c = self.idx(j, i);
            self.data[a] = 0.0;
            self.data[c] = 0.0;
        }
        let d = self.idx(i, i);
        self.data[d] = 1.0;
    }

    /// `self + s * other`; both must share size and bandwidth.
    pub fn add_scaled(&self, s: f64, other: &BandMatrix) -> BandMatrix {
        assert_eq!((self.n, self.b), (other.n, other.b));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect();
        BandMatrix {
            n: self.n,
            b: self.b,
            data,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.b);
                let hi = (i + self.b).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum()
            })
            .collect()
    }

    /// LU factorization with row pivoting inside the band.
    pub fn lu(&self) -> Result<BandLu> {
        let (n, b) = (self.n, self.b);
        // Row i keeps columns i-b ..= i+2b; pivoting widens U by b.
        let w = 3 * b + 1;
        let mut a = vec![0.0; n * w];
        let at = |i: usize, j: usize| i * w + (j + b - i);
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(n - 1);
            for j in lo..=hi {
                a[at(i, j)] = self.get(i, j);
            }
        }
        let mut piv = vec![0; n];
        let mut lower = vec![0.0; n * b.max(1)];
        for k in 0..n {
            let last = (k + b).min(n - 1);
            let p = (k..=last)
                .max_by(|&x, &y| a[at(x, k)].abs().total_cmp(&a[at(y, k)].abs()).then(y.cmp(&x)))
                .unwrap();
            let pivot = a[at(p, k)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Numeric(format!("singular band matrix at column {k}")));
            }
            piv[k] = p;
            let right = (k + 2 * b).min(n - 1);
            if p != k {
                for j in k..=right {
                    a.swap(at(k, j), at(p, j));
                }
            }
            for i in k + 1..=last {
                let l = a[at(i, k)] / pivot;
                lower[k * b + (i - k - 1)] = l;
                a[at(i, k)] = 0.0;
                if l != 0.0 {
                    for j in k + 1..=right {
                        a[at(i, j)] -= l * a[at(k, j)];
                    }
                }
            }
        }
        Ok(BandLu { n, b, w, a, piv, lower })
    }

    /// LDLᵀ factorization of a symmetric matrix without pivoting. Returns
    /// `None` when a pivot is not positive, i.e. the matrix is not
    /// numerically positive definite.
    pub fn ldlt(&self) -> Option<BandLdl> {
        let (n, b) = (self.n, self.b);
        let w = b + 1;
        // Upper triangle: row k, columns k ..= k+b.
        let mut u = vec![0.0; n * w];
        for i in 0..n {
            for j in i..=(i + b).min(n - 1) {
                u[i * w + (j - i)] = self.get(i, j);
            }
        }
        let mut d = vec![0.0; n];
        for k in 0..n {
            let dk = u[k * w];
            if !(dk > 0.0 && dk.is_finite()) {
                return None;
            }
            d[k] = dk;
            let last = (k + b).min(n - 1);
            for i in k + 1..=last {
                let l = u[k * w + (i - k)] / dk;
                if l != 0.0 {
                    for j in i..=last {
                        u[i * w + (j - i)] -= l * u[k * w + (j - k)];
                    }
                }
                u[k * w + (i - k)] = l;
            }
        }
        Some(BandLdl { n, b, w, l: u, d })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    b: usize,
    w: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
    lower: Vec<f64>,
}

impl BandLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, b, w) = (self.n, self.b, self.w);
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..=(k + b).min(n - 1) {
                x[i] -= self.lower[k * b + (i - k - 1)] * xk;
            }
        }
        let at = |i: usize, j: usize| i * w + (j + b - i);
        for k in (0..n).rev() {
            let right = (k + 2 * b).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=right {
                s -= self.a[at(k, j)] * x[j];
            }
            x[k] = s / self.a[at(k, k)];
        }
        x
    }
}

#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    b: usize,
    w: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandLdl {
    /// Smallest over largest pivot.
    pub fn pivot_ratio(&self) -> f64 {
        let lo = self.d.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.d.iter().copied().fold(0.0, f64::max);
        lo / hi
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, b, w) = (self.n, self.b, self.w);
        let mut x = rhs.to_vec();
        for k in 0..n {
            let xk = x[k];
            for i in k + 1..=(k + b).min(n - 1) {
                x[i] -= self.l[k * w + (i - k)] * xk;
            }
        }
        for (xk, dk) in x.iter_mut().zip(&self.d) {
            *xk /= dk;
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for i in k + 1..=(k + b).min(n - 1) {
                s -= self.l[k * w + (i - k)] * x[i];
            }
            x[k] = s;
        }
        x
    }
}
