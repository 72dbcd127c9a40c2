//! Exact arbitrary-precision counting.
//!
//! `T(n, m)` is the number of `n`-chord diagrams with `m` crossings. The
//! main evaluation route is the alternating Touchard–Riordan sum; the
//! sequence-pair dynamic program in [`crate::table`] and the brute-force
//! enumerator in [`brute`] are independent cross-checks.

pub mod brute;
pub mod series;

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use brute::{brute_force_connected, brute_force_row, for_each_matching};
use series::Truncated;

/// `J(j) = j (j + 1) / 2`, the exponent attached to the `j`-th term.
pub fn triangular(j: usize) -> usize {
    j * (j + 1) / 2
}

/// Largest crossing number of an `n`-chord diagram.
pub fn max_crossings(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn catalan(n: usize) -> BigUint {
    binomial(2 * n, n) / (n + 1)
}

/// `(2n - 1)!!`, the number of perfect matchings of `2n` points.
pub fn total_diagrams(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 1..=n {
        acc *= 2 * k - 1;
    }
    acc
}

/// Row `(T(n,0), ..., T(n, n(n-1)/2))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingRow {
    n: usize,
    counts: Vec<BigUint>,
}

impl CrossingRow {
    pub fn new(n: usize, counts: Vec<BigUint>) -> Self {
        CrossingRow { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn get(&self, m: usize) -> BigUint {
        self.counts.get(m).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// `T(n, m)` by the Touchard–Riordan alternating sum
///
/// `sum_j (-1)^j C(n+m-1-J(j), n-1) (2j+1)/(n+j+1) C(2n, n-j)`
///
/// over `j <= n` with `J(j) <= m`. Both binomials are carried from one `j`
/// to the next by exact ratio updates.
pub fn touchard_riordan(n: usize, m: usize) -> BigUint {
    if n == 0 {
        return if m == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if m > max_crossings(n) {
        return BigUint::zero();
    }
    let r = n - 1;
    let mut top = n + m - 1;
    let mut lattice = binomial(top, r);
    let mut ballot_base = binomial(2 * n, n);
    let mut sum = BigInt::zero();
    let mut j = 0;
    loop {
        let term = (&ballot_base * (2 * j + 1)) / (n + j + 1) * &lattice;
        if j % 2 == 0 {
            sum += BigInt::from(term);
        } else {
            sum -= BigInt::from(term);
        }
        if j == n || triangular(j + 1) > m {
            break;
        }
        // C(top - (j+1), r) from C(top, r).
        for _ in 0..=j {
            lattice = lattice * (top - r) / top;
            top -= 1;
        }
        ballot_base = ballot_base * (n - j) / (n + j + 1);
        j += 1;
    }
    sum.to_biguint().expect("crossing counts are nonnegative")
}

pub fn crossing_row(n: usize) -> CrossingRow {
    let counts = (0..=max_crossings(n)).map(|m| touchard_riordan(n, m)).collect();
    CrossingRow { n, counts }
}

/// `[x^m y^n] T(x, y)^l` via the multi-index alternating sum: every
/// `(j_1, ..., j_l)` with `sum J(j_v) <= m` and `sum j_v <= n` contributes
/// `prod (-1)^{j_v} C(n+m-1-sum J, n-1) (2j+l)/(2n+l) C(2n+l, n-j)`.
pub fn power_coefficient(n: usize, m: usize, l: usize) -> BigUint {
    assert!(l >= 1, "power must be positive");
    if n == 0 {
        return if m == 0 { BigUint::one() } else { BigUint::zero() };
    }
    // Collapse the multi-index sum onto (sum J, sum j) with signed multiplicities.
    let mut classes: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    fn walk(
        left: usize,
        weight: usize,
        total: usize,
        sign: i64,
        n: usize,
        m: usize,
        classes: &mut BTreeMap<(usize, usize), i64>,
    ) {
        if left == 0 {
            *classes.entry((weight, total)).or_insert(0) += sign;
            return;
        }
        let mut j = 0;
        while total + j <= n && weight + triangular(j) <= m {
            let s = if j % 2 == 0 { sign } else { -sign };
            walk(left - 1, weight + triangular(j), total + j, s, n, m, classes);
            j += 1;
        }
    }
    walk(l, 0, 0, 1, n, m, &mut classes);
    let mut sum = BigInt::zero();
    for (&(weight, j), &mult) in &classes {
        if mult == 0 {
            continue;
        }
        let lattice = binomial(n + m - 1 - weight, n - 1);
        let ballot = binomial(2 * n + l, n - j) * (2 * j + l) / (2 * n + l);
        sum += BigInt::from(lattice * ballot) * mult;
    }
    sum.to_biguint().expect("power coefficients are nonnegative")
}

/// Coefficients of `prod_{j<n} (1 + z + ... + z^j)`: permutations of `n` by
/// inversion count.
pub fn inversion_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for j in 1..n {
        // multiply by 1 + z + ... + z^j via a sliding window of width j+1
        let mut next = vec![BigUint::zero(); row.len() + j];
        let mut window = BigUint::zero();
        for (k, slot) in next.iter_mut().enumerate() {
            if k < row.len() {
                window += &row[k];
            }
            if k > j {
                window -= &row[k - j - 1];
            }
            *slot = window.clone();
        }
        row = next;
    }
    row
}

pub fn inversion_count(n: usize, m: usize) -> BigUint {
    if m > max_crossings(n) {
        return BigUint::zero();
    }
    inversion_row(n).swap_remove(m)
}

/// Connected diagram counts from closed forms: trees (`mu = nu - 1`) and
/// unicyclic (`mu = nu`) intersection graphs.
pub fn connected_count_exact(nu: usize, mu: usize) -> Result<BigUint> {
    if nu >= 1 && mu + 1 == nu {
        return Ok(binomial(3 * nu - 3, nu - 1) / (2 * nu - 1));
    }
    if mu == nu && nu == 3 {
        return Ok(BigUint::one());
    }
    if mu == nu && nu >= 4 {
        return Ok(unicyclic_connected(nu));
    }
    Err(Error::Domain(format!(
        "no closed form for connected counts at (nu, mu) = ({nu}, {mu}); use brute_force_connected"
    )))
}

fn unicyclic_connected(nu: usize) -> BigUint {
    let int = |v: BigUint| BigRational::from_integer(BigInt::from(v));
    let frac = |a: usize, b: usize| BigRational::new(BigInt::from(a), BigInt::from(b));
    let mut sum = BigRational::from_integer(BigInt::from(2));
    for j in 1..=6.min(nu - 3) {
        sum += frac(nu, 3)
            * int(binomial(6, j))
            * frac(j, nu - 3)
            * int(binomial(3 * nu - 9, nu - 3 - j));
    }
    for k in 4..nu {
        for j in 1..=(nu - k).min(2 * k) {
            sum += frac(2 * nu, k)
                * frac(j, nu - k)
                * int(binomial(2 * k, j))
                * int(binomial(3 * nu - 3 * k, nu - k - j));
        }
    }
    assert!(sum.is_integer(), "unicyclic count must be integral");
    sum.to_integer().to_biguint().expect("nonnegative")
}

/// Block multiplicities of a non-crossing partition: `s[j-1]` blocks of `2j`
/// points each (`j` chords).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub s: Vec<usize>,
}

impl BlockProfile {
    pub fn new(s: Vec<usize>) -> Self {
        BlockProfile { s }
    }

    pub fn blocks(&self) -> usize {
        self.s.iter().sum()
    }

    pub fn chords(&self) -> usize {
        self.s.iter().enumerate().map(|(i, &c)| (i + 1) * c).sum()
    }
}

/// Non-crossing partitions of `[2n]` with the given block profile:
/// `(2n)_{k-1} / prod s_j!`.
pub fn kreweras_count(n: usize, profile: &BlockProfile) -> Result<BigUint> {
    if profile.chords() != n {
        return Err(Error::Domain(format!(
            "profile covers {} chords, expected {n}",
            profile.chords()
        )));
    }
    let k = profile.blocks();
    if k == 0 {
        return Err(Error::Domain("profile has no blocks".into()));
    }
    let mut num = BigUint::one();
    for i in 0..k - 1 {
        num *= 2 * n - i;
    }
    let mut den = BigUint::one();
    for &c in &profile.s {
        for f in 2..=c {
            den *= f;
        }
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    Ok(q)
}

/// Largest `n` accepted by [`compatible_allocation_count`].
pub const ALLOCATION_CAP: usize = 12;

/// Number of allocation sequences `y` that pair with `x` to form a valid
/// encoding.
pub fn compatible_allocation_count(x: &[usize]) -> Result<BigUint> {
    let n = x.len();
    if n > ALLOCATION_CAP {
        return Err(Error::CapExceeded {
            what: "compatible_allocation_count",
            cap: ALLOCATION_CAP,
            got: n,
        });
    }
    for (j, &xj) in x.iter().enumerate() {
        if xj > j {
            return Err(Error::ConstraintViolation {
                index: j + 1,
                reason: format!("x = {xj} exceeds {j}"),
            });
        }
    }
    if n == 0 {
        return Ok(BigUint::one());
    }
    // ways[s] = number of prefixes y_1..y_{j-1} with S_{j-1} = s
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[0] = BigUint::one();
    for j in 1..=n {
        let mut next = vec![BigUint::zero(); n + 1];
        let cap = if j == n { n } else { j };
        for s in 0..j {
            if ways[s].is_zero() || x[j - 1] + s > j - 1 {
                continue;
            }
            let lo = if j == n { n } else { s };
            for slot in &mut next[lo..=cap] {
                *slot += &ways[s];
            }
        }
        ways = next;
    }
    Ok(ways[n].clone())
}

/// `E[C(X, k)]` for the number of cuts `X` of a uniform diagram with `n`
/// chords and `m` crossings.
pub fn cut_factorial_moment(n: usize, m: usize, k: usize) -> Result<BigRational> {
    let total = touchard_riordan(n, m);
    if total.is_zero() {
        return Err(Error::EmptySupport { n, m });
    }
    let mut num = BigInt::zero();
    for l in 0..=k + 1 {
        let coeff = if l == 0 {
            if n == 0 && m == 0 {
                BigUint::one()
            } else {
                BigUint::zero()
            }
        } else {
            power_coefficient(n, m, l)
        };
        let term = BigInt::from(binomial(k + 1, l) * coeff);
        if (k + 1 - l) % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    Ok(BigRational::new(num, BigInt::from(total)))
}

/// Largest `n` accepted by [`verify_component_identity`].
pub const COMPONENT_IDENTITY_CAP: usize = 6;

/// Outcome of checking `T(x, y) = C(x, y T(x, y)^2)` coefficientwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub cells_checked: usize,
    /// First `(n, m, expected T, decomposition sum)` that disagreed.
    pub mismatch: Option<(usize, usize, BigUint, BigInt)>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Checks `T(n, m) = sum C(nu, mu) [x^{m-mu} y^{n-nu}] T(x, y)^{2 nu}` for all
/// `n <= n_max`, with connected counts from brute force and `C(0,0) = 1`.
pub fn component_identity_report(n_max: usize) -> Result<IdentityReport> {
    if n_max > COMPONENT_IDENTITY_CAP {
        return Err(Error::CapExceeded {
            what: "verify_component_identity",
            cap: COMPONENT_IDENTITY_CAP,
            got: n_max,
        });
    }
    let connected = brute::connected_table(n_max)?;
    let rows: Vec<CrossingRow> = (0..=n_max).map(crossing_row).collect();
    Ok(component_identity_with(n_max, &rows, &connected))
}

pub(crate) fn component_identity_with(
    n_max: usize,
    rows: &[CrossingRow],
    connected: &[Vec<BigUint>],
) -> IdentityReport {
    let mx = max_crossings(n_max);
    let mut t = Truncated::zero(mx, n_max);
    for (n, row) in rows.iter().enumerate().take(n_max + 1) {
        for (m, c) in row.counts().iter().enumerate() {
            t.set(m, n, BigInt::from(c.clone()));
        }
    }
    let mut sums = Truncated::zero(mx, n_max);
    sums.set(0, 0, BigInt::one());
    let t_sq = t.mul(&t);
    let mut power = Truncated::one(mx, n_max);
    for (nu, row) in connected.iter().enumerate().skip(1).take(n_max) {
        power = power.mul(&t_sq);
        for (mu, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = BigInt::from(c.clone());
            for n in nu..=n_max {
                for m in mu..=mx {
                    let add = power.get(m - mu, n - nu);
                    if !add.is_zero() {
                        let cur = sums.get(m, n).clone();
                        sums.set(m, n, cur + &c * add);
                    }
                }
            }
        }
    }
    let mut cells = 0;
    for (n, row) in rows.iter().enumerate().take(n_max + 1) {
        for m in 0..=mx {
            cells += 1;
            let expected = row.get(m);
            let got = sums.get(m, n).clone();
            if got.sign() == Sign::Minus || got != BigInt::from(expected.clone()) {
                return IdentityReport { cells_checked: cells, mismatch: Some((n, m, expected, got)) };
            }
        }
    }
    IdentityReport { cells_checked: cells, mismatch: None }
}

pub fn verify_component_identity(n_max: usize) -> Result<bool> {
    Ok(component_identity_report(n_max)?.holds())
}

/// Writes `n,m,T` rows in lexicographic `(n, m)` order, counts as decimal
/// strings.
pub fn write_rows_csv<W: Write>(rows: &[CrossingRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "m", "T"])?;
    for row in rows {
        for (m, c) in row.counts().iter().enumerate() {
            w.write_record([row.n().to_string(), m.to_string(), c.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RowCell {
    n: usize,
    m: usize,
    #[serde(rename = "T")]
    t: String,
}

/// JSON lines `{"n":..,"m":..,"T":"<decimal>"}`.
pub fn write_rows_json<W: Write>(rows: &[CrossingRow], mut out: W) -> Result<()> {
    for row in rows {
        for (m, c) in row.counts().iter().enumerate() {
            let cell = RowCell { n: row.n(), m, t: c.to_string() };
            serde_json::to_writer(&mut out, &cell)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Natural log of a big integer, accurate to double precision.
pub fn ln_big(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_ratio(num: &BigUint, den: &BigUint) -> f64 {
    ln_big(num) - ln_big(den)
}

/// A rational as `f64`, through logs so huge numerators and denominators
/// do not overflow.
pub fn rational_to_f64(v: &BigRational) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let sign = if v.is_negative() { -1.0 } else { 1.0 };
    let num = v.numer().abs().to_biguint().expect("abs");
    let den = v.denom().to_biguint().expect("positive");
    sign * ln_ratio(&num, &den).exp()
}
