//! Floating-point matrix backend for randomized identity testing.

use crate::diffcoeff::{FieldSymbol, NCPoly};
use crate::error::{Error, Result};
use num::complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::ops::{Add, Mul, Sub};

/// Dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zero(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zero(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = CMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Entrywise max modulus.
    pub fn inf_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| {
                    a[r1 * n + col]
                        .norm()
                        .partial_cmp(&a[r2 * n + col].norm())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= a[col * n + col];
            for row in col + 1..n {
                let f = a[row * n + col] / a[col * n + col];
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; None when numerically singular.
    pub fn inverse(&self) -> Option<CMatrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| {
                    a[r1 * n + col]
                        .norm()
                        .partial_cmp(&a[r2 * n + col].norm())
                        .unwrap()
                })
                .unwrap();
            if a[pivot * n + col].norm() < 1e-300 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= p;
                inv.data[col * n + j] /= p;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = a[row * n + col];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                    let w = inv.data[col * n + j];
                    inv.data[row * n + j] -= f * w;
                }
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add<&CMatrix> for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        &self + rhs
    }
}

impl Sub<&CMatrix> for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        &self - rhs
    }
}

impl Mul<&CMatrix> for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        &self * rhs
    }
}

/// Standard complex Gaussian entries via Box-Muller.
pub fn random_gaussian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut m = CMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            let th = 2.0 * std::f64::consts::PI * u2;
            m[(i, j)] = Complex64::new(r * th.cos(), r * th.sin());
        }
    }
    m
}

/// Haar-ish unitary: Gram-Schmidt orthonormalization of Gaussian columns.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    loop {
        let g = random_gaussian(n, rng);
        let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
        let mut ok = true;
        for j in 0..n {
            for k in 0..j {
                let dot: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..n {
                    let v = cols[k][i];
                    cols[j][i] -= dot * v;
                }
            }
            let norm: f64 = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for i in 0..n {
                cols[j][i] /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut u = CMatrix::zero(n);
        for j in 0..n {
            for i in 0..n {
                u[(i, j)] = cols[j][i];
            }
        }
        return u;
    }
}

/// Random element of SU(n): unitary with the determinant phase divided out.
pub fn random_special_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let u = random_unitary(n, rng);
    let d = u.det();
    let root = d.powf(1.0 / n as f64);
    u.scale(root.inv())
}

/// Evaluates a noncommutative differential polynomial with matrices
/// substituted for the symbols.
pub fn evaluate_ncpoly(
    p: &NCPoly,
    n: usize,
    assign: &impl Fn(&FieldSymbol) -> Result<CMatrix>,
) -> Result<CMatrix> {
    let mut out = CMatrix::zero(n);
    for (word, c) in p.terms() {
        let mut acc = CMatrix::identity(n);
        for sym in word {
            let m = assign(sym)?;
            if m.n != n {
                return Err(Error::AlgebraMismatch(format!(
                    "matrix size {} != {}",
                    m.n, n
                )));
            }
            acc = &acc * &m;
        }
        let (re, im) = c.to_f64_pair();
        out = &out + &acc.scale(Complex64::new(re, im));
    }
    Ok(out)
}
