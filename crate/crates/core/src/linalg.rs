//! Small dense real matrices and the matrix exponential.
//!
//! Only what the Fock oracle needs: products, 1-norm, an LU solve and a
//! scaling-and-squaring Padé(13) exponential.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (p, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let src = &rhs.data[p * n..(p + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| libm::fabs(self[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `Σ_i c_i M_i` over matrices of equal size.
    fn combine(terms: &[(f64, &Matrix)]) -> Matrix {
        let n = terms[0].1.n;
        let mut out = Matrix::zeros(n);
        for (c, m) in terms {
            for (d, x) in out.data.iter_mut().zip(&m.data) {
                *d += c * x;
            }
        }
        out
    }

    fn add(&self, rhs: &Matrix) -> Matrix {
        Matrix::combine(&[(1.0, self), (1.0, rhs)])
    }

    fn sub(&self, rhs: &Matrix) -> Matrix {
        Matrix::combine(&[(1.0, self), (-1.0, rhs)])
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    ///
    /// # Panics
    /// On a singular matrix.
    pub fn solve(&self, rhs: &Matrix) -> Matrix {
        let n = self.n;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| libm::fabs(a[i * n + col]).total_cmp(&libm::fabs(a[j * n + col])))
                .unwrap();
            assert!(a[pivot * n + col] != 0.0, "singular matrix");
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    b.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a[col * n + col];
            for i in col + 1..n {
                let f = a[i * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[i * n + j] -= f * a[col * n + j];
                }
                for j in 0..n {
                    b[i * n + j] -= f * b[col * n + j];
                }
            }
        }
        for i in (0..n).rev() {
            for j in 0..n {
                let mut s = b[i * n + j];
                for p in i + 1..n {
                    s -= a[i * n + p] * b[p * n + j];
                }
                b[i * n + j] = s / a[i * n + i];
            }
        }
        Matrix { n, data: b }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which Padé(13) is accurate to double precision.
const THETA13: f64 = 5.371_920_351_148_152;

/// `exp(A)` by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.dim();
    if n == 0 {
        return Matrix::zeros(0);
    }
    let norm = a.norm1();
    let squarings = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)) as i32
    } else {
        0
    };
    let a = a.scaled(libm::pow(2.0, -squarings as f64));

    let b = &PADE13;
    let eye = Matrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let u_inner = Matrix::combine(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_outer = Matrix::combine(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &eye)]);
    let u = a.matmul(&a6.matmul(&u_inner).add(&u_outer));

    let v_inner = Matrix::combine(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_outer = Matrix::combine(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &eye)]);
    let v = a6.matmul(&v_inner).add(&v_outer);

    let mut r = v.sub(&u).solve(&v.add(&u));
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}
