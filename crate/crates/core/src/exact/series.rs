//! Bivariate polynomials truncated at fixed degrees in `x` (crossings) and
//! `y` (chords), with exact signed coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncated {
    max_x: usize,
    max_y: usize,
    // coeff[y][x]
    coeff: Vec<Vec<BigInt>>,
}

impl Truncated {
    pub fn zero(max_x: usize, max_y: usize) -> Self {
        Truncated {
            max_x,
            max_y,
            coeff: vec![vec![BigInt::zero(); max_x + 1]; max_y + 1],
        }
    }

    pub fn one(max_x: usize, max_y: usize) -> Self {
        let mut p = Self::zero(max_x, max_y);
        p.coeff[0][0] = BigInt::one();
        p
    }

    /// `[x^mx y^my]`, zero outside the truncation window.
    pub fn get(&self, mx: usize, my: usize) -> &BigInt {
        static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
        if mx > self.max_x || my > self.max_y {
            return ZERO.get_or_init(BigInt::zero);
        }
        &self.coeff[my][mx]
    }

    pub fn set(&mut self, mx: usize, my: usize, value: BigInt) {
        if mx <= self.max_x && my <= self.max_y {
            self.coeff[my][mx] = value;
        }
    }

    pub fn mul(&self, other: &Truncated) -> Truncated {
        assert_eq!((self.max_x, self.max_y), (other.max_x, other.max_y));
        let mut out = Truncated::zero(self.max_x, self.max_y);
        for ya in 0..=self.max_y {
            for xa in 0..=self.max_x {
                let a = &self.coeff[ya][xa];
                if a.is_zero() {
                    continue;
                }
                for yb in 0..=self.max_y - ya {
                    let row = &mut out.coeff[ya + yb];
                    for xb in 0..=self.max_x - xa {
                        let b = &other.coeff[yb][xb];
                        if !b.is_zero() {
                            row[xa + xb] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: usize) -> Truncated {
        let mut base = self.clone();
        let mut acc = Truncated::one(self.max_x, self.max_y);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}
