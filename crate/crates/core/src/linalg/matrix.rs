use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{common_denominator, Rational};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| Rational::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `yᵀ M`.
    pub fn left_mul(&self, y: &[Rational]) -> Vec<Rational> {
        assert_eq!(y.len(), self.rows, "vector length mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &y[i] * self.get(i, j)).sum())
            .collect()
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut work = self.to_rows();
        eliminate(&mut work, self.cols, None).len()
    }

    /// Some `x` with `M x = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut work: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.push(b[i].clone());
                row
            })
            .collect();
        let pivots = eliminate(&mut work, self.cols, None);
        let rank = pivots.len();
        if work[rank..].iter().any(|row| !row[self.cols].is_zero()) {
            return None;
        }
        // Back substitution on the echelon form.
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = work[r][self.cols].clone();
            for j in pc + 1..self.cols {
                if !work[r][j].is_zero() {
                    acc -= &work[r][j] * &x[j];
                }
            }
            x[pc] = acc / &work[r][pc];
        }
        Some(x)
    }

    /// Basis of `{ y : yᵀ M = 0 }`, each vector scaled to a primitive integer
    /// vector whose first nonzero entry is positive.
    pub fn left_null_basis(&self) -> Vec<Vec<Rational>> {
        let mut work = self.to_rows();
        let mut tracker = Mat::identity(self.rows).to_rows();
        let rank = eliminate(&mut work, self.cols, Some(&mut tracker)).len();
        tracker[rank..].iter().map(|y| primitive_integer(y)).collect()
    }
}

/// Forward elimination with first-nonzero pivoting. Row operations are
/// mirrored onto `tracker` when given. Returns the pivot column of each
/// leading row; rows past the returned length are zero in the first `cols`
/// columns.
fn eliminate(
    work: &mut [Vec<Rational>],
    cols: usize,
    mut tracker: Option<&mut Vec<Vec<Rational>>>,
) -> Vec<usize> {
    let rows = work.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !work[i][c].is_zero()) else {
            continue;
        };
        work.swap(r, p);
        if let Some(t) = tracker.as_deref_mut() {
            t.swap(r, p);
        }
        let pivot = work[r][c].clone();
        for i in r + 1..rows {
            if work[i][c].is_zero() {
                continue;
            }
            let factor = &work[i][c] / &pivot;
            let (top, bottom) = work.split_at_mut(i);
            let src = &top[r];
            for (dst, s) in bottom[0].iter_mut().zip(src).skip(c) {
                if !s.is_zero() {
                    *dst -= &factor * s;
                }
            }
            if let Some(t) = tracker.as_deref_mut() {
                let (ttop, tbottom) = t.split_at_mut(i);
                for (dst, s) in tbottom[0].iter_mut().zip(&ttop[r]) {
                    if !s.is_zero() {
                        *dst -= &factor * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn primitive_integer(y: &[Rational]) -> Vec<Rational> {
    let den = common_denominator(y);
    let ints: Vec<BigInt> = y.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return y.to_vec();
    }
    let sign = match ints.iter().find(|v| !v.is_zero()) {
        Some(v) if v.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|v| Rational::from_int(v / &g * &sign)).collect()
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}
