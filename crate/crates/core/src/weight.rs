//! Nonnegative path weights for the sequence-pair dynamic program: exact big
//! integers, or an extended-range float for sizes where big integers are too
//! slow.

use std::cmp::Ordering;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;

use crate::exact::ln_big;

pub trait Weight: Clone + PartialOrd + Send + Sync + std::fmt::Debug + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_to(&mut self, other: &Self);

    /// `out[c] = src[c] + src[c-1] + ... + src[c-len+1]`, with `src` read as
    /// zero outside its bounds.
    fn window_sums(src: &[Self], len: usize, out: &mut [Self]);

    /// A uniform draw from `[0, total)`.
    fn below<R: Rng + ?Sized>(total: &Self, rng: &mut R) -> Self;

    fn ln(&self) -> f64;

    /// Rough heap plus inline footprint, for memory budgeting.
    fn footprint(bits_hint: u64) -> u64;
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_to(&mut self, other: &Self) {
        *self += other;
    }

    fn window_sums(src: &[Self], len: usize, out: &mut [Self]) {
        let mut run = <BigUint as Zero>::zero();
        for c in 0..out.len() {
            if let Some(v) = src.get(c) {
                run += v;
            }
            if c >= len {
                if let Some(v) = src.get(c - len) {
                    run -= v;
                }
            }
            out[c].clone_from(&run);
        }
    }

    fn below<R: Rng + ?Sized>(total: &Self, rng: &mut R) -> Self {
        let mut adapter = RngAdapter(rng);
        adapter.gen_biguint_below(total)
    }

    fn ln(&self) -> f64 {
        ln_big(self)
    }

    fn footprint(bits_hint: u64) -> u64 {
        24 + bits_hint.div_ceil(64) * 8
    }
}

// `RandBigInt` is implemented for sized `Rng`s only.
struct RngAdapter<'a, R: ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> rand::RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

const BAND_BITS: i32 = 512;
const HALF_BAND: f64 = 1.157920892373162e77; // 2^256
const BAND: f64 = 1.3407807929942597e154; // 2^512
const INV_BAND: f64 = 7.458340731200207e-155; // 2^-512
const ZERO_BAND: i32 = i32::MIN / 2;

/// A nonnegative real `mant * 2^(512 * band)` with `mant` in
/// `[2^-256, 2^256)`, or zero. Neighbouring entries of the DP usually share a
/// band, so addition is a plain `f64` add in the common case.
#[derive(Debug, Clone, Copy)]
pub struct Scaled {
    mant: f64,
    band: i32,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mant: 0.0, band: ZERO_BAND };

    pub fn from_f64(v: f64) -> Self {
        assert!(v >= 0.0 && v.is_finite());
        if v == 0.0 {
            return Self::ZERO;
        }
        Scaled { mant: v, band: 0 }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant == 0.0 {
            return Self::ZERO;
        }
        while self.mant >= HALF_BAND {
            self.mant *= INV_BAND;
            self.band += 1;
        }
        while self.mant < 1.0 / HALF_BAND {
            self.mant *= BAND;
            self.band -= 1;
        }
        self
    }

    #[inline]
    pub fn add(self, other: Scaled) -> Scaled {
        let (hi, lo) = if self.band >= other.band { (self, other) } else { (other, self) };
        let mant = match hi.band - lo.band {
            0 => hi.mant + lo.mant,
            1 => hi.mant + lo.mant * INV_BAND,
            _ => return hi,
        };
        if mant >= HALF_BAND {
            Scaled { mant: mant * INV_BAND, band: hi.band + 1 }
        } else {
            Scaled { mant, band: hi.band }
        }
    }

    pub fn scale(self, factor: f64) -> Scaled {
        if self.band == ZERO_BAND || factor == 0.0 {
            return Self::ZERO;
        }
        Scaled { mant: self.mant * factor, band: self.band }.normalized()
    }

    pub fn ln(self) -> f64 {
        if self.band == ZERO_BAND {
            return f64::NEG_INFINITY;
        }
        self.mant.ln() + (self.band as f64) * (BAND_BITS as f64) * std::f64::consts::LN_2
    }

    /// `self / other` as an `f64` (may under- or overflow for distant values).
    pub fn ratio(self, other: Scaled) -> f64 {
        if self.band == ZERO_BAND {
            return 0.0;
        }
        (self.ln() - other.ln()).exp()
    }
}

impl PartialEq for Scaled {
    fn eq(&self, other: &Self) -> bool {
        self.band == other.band && self.mant == other.mant
    }
}

impl PartialOrd for Scaled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.band.cmp(&other.band) {
            Ordering::Equal => self.mant.partial_cmp(&other.mant),
            ord => Some(ord),
        }
    }
}

impl Weight for Scaled {
    fn zero() -> Self {
        Scaled::ZERO
    }

    fn one() -> Self {
        Scaled { mant: 1.0, band: 0 }
    }

    fn is_zero(&self) -> bool {
        self.band == ZERO_BAND
    }

    #[inline]
    fn add_to(&mut self, other: &Self) {
        *self = self.add(*other);
    }

    /// Block prefix/suffix sums (van Herk / Gil–Werman): no subtraction, so
    /// tiny windows next to huge ones keep full relative precision.
    fn window_sums(src: &[Self], len: usize, out: &mut [Self]) {
        let n = out.len();
        let get = |i: usize| src.get(i).copied().unwrap_or(Scaled::ZERO);
        let mut prefix = vec![Scaled::ZERO; n];
        let mut suffix = vec![Scaled::ZERO; n];
        let mut run = Scaled::ZERO;
        for c in 0..n {
            if c % len == 0 {
                run = Scaled::ZERO;
            }
            run = run.add(get(c));
            prefix[c] = run;
        }
        let mut c = n;
        while c > 0 {
            c -= 1;
            if c % len == len - 1 || c == n - 1 {
                run = Scaled::ZERO;
            }
            run = run.add(get(c));
            suffix[c] = run;
        }
        for c in 0..n {
            out[c] = if c < len {
                prefix[c]
            } else {
                let start = c + 1 - len;
                if start % len == 0 {
                    suffix[start]
                } else {
                    suffix[start].add(prefix[c])
                }
            };
        }
    }

    fn below<R: Rng + ?Sized>(total: &Self, rng: &mut R) -> Self {
        let u: f64 = rng.gen();
        total.scale(u)
    }

    fn ln(&self) -> f64 {
        Scaled::ln(*self)
    }

    fn footprint(_bits_hint: u64) -> u64 {
        std::mem::size_of::<Scaled>() as u64
    }
}
