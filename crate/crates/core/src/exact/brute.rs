//! Exhaustive enumeration of perfect matchings, used as an oracle.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::exact::CrossingRow;

/// Largest `n` accepted by [`brute_force_row`] (17!! is about 3.4e7).
pub const BRUTE_ROW_CAP: usize = 9;
/// Largest `n` accepted by [`brute_force_connected`].
pub const BRUTE_CONNECTED_CAP: usize = 8;

const MAX_POINTS: usize = 2 * BRUTE_ROW_CAP;

/// Calls `visit(partner, crossings)` once for every perfect matching of
/// `0..2n`. Matchings are generated depth first by always pairing the
/// smallest unmatched point; the crossing count is maintained incrementally
/// (a new chord `(a, b)` crosses exactly the earlier chords with an endpoint
/// strictly between `a` and `b`).
pub fn for_each_matching<F>(n: usize, mut visit: F)
where
    F: FnMut(&[usize], u32),
{
    assert!(n <= BRUTE_ROW_CAP, "enumeration capped at n = {BRUTE_ROW_CAP}");
    if n == 0 {
        visit(&[], 0);
        return;
    }
    let size = 2 * n;
    let mut partner = [0usize; MAX_POINTS];
    let mut left = [0usize; BRUTE_ROW_CAP];
    let mut right = [0usize; BRUTE_ROW_CAP];
    let mut cross = [0u32; BRUTE_ROW_CAP + 1];
    let mut matched: u32 = 0;
    let mut level = 0usize;
    left[0] = 0;
    right[0] = 0;
    loop {
        let a = left[level];
        // Undo the previous choice at this level, if any.
        if right[level] > a {
            matched &= !(1 << right[level]);
        } else {
            matched |= 1 << a;
        }
        let mut b = right[level].max(a) + 1;
        while b < size && matched & (1 << b) != 0 {
            b += 1;
        }
        if b >= size {
            matched &= !(1 << a);
            if level == 0 {
                return;
            }
            level -= 1;
            continue;
        }
        right[level] = b;
        let between = ((1u32 << b) - 1) & !((1u32 << (a + 1)) - 1);
        cross[level + 1] = cross[level] + (matched & between).count_ones();
        matched |= 1 << b;
        partner[a] = b;
        partner[b] = a;
        if level + 1 == n {
            visit(&partner[..size], cross[n]);
        } else {
            level += 1;
            let next = (!matched).trailing_zeros() as usize;
            left[level] = next;
            right[level] = next;
        }
    }
}

/// Crossing histogram over all `(2n-1)!!` matchings.
pub fn brute_force_row(n: usize) -> Result<CrossingRow> {
    if n > BRUTE_ROW_CAP {
        return Err(Error::CapExceeded { what: "brute_force_row", cap: BRUTE_ROW_CAP, got: n });
    }
    let max_m = n * n.saturating_sub(1) / 2;
    let mut hist = vec![0u64; max_m + 1];
    for_each_matching(n, |_, c| hist[c as usize] += 1);
    Ok(CrossingRow::new(n, hist.into_iter().map(BigUint::from).collect()))
}

/// True iff the intersection graph of the matching is connected.
pub fn is_connected_matching(partner: &[usize]) -> bool {
    let size = partner.len();
    if size == 0 {
        return false;
    }
    let chords: Vec<(usize, usize)> = (0..size)
        .filter(|&p| partner[p] > p)
        .map(|p| (p, partner[p]))
        .collect();
    let n = chords.len();
    let mut reached: u32 = 1;
    let mut frontier: u32 = 1;
    while frontier != 0 {
        let i = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let (a, b) = chords[i];
        for (j, &(c, d)) in chords.iter().enumerate() {
            if reached & (1 << j) == 0 && ((a < c && c < b && b < d) || (c < a && a < d && d < b)) {
                reached |= 1 << j;
                frontier |= 1 << j;
            }
        }
    }
    reached.count_ones() as usize == n
}

/// Number of connected diagrams with `nu` chords and `mu` crossings.
pub fn brute_force_connected(nu: usize, mu: usize) -> Result<BigUint> {
    if nu > BRUTE_CONNECTED_CAP {
        return Err(Error::CapExceeded {
            what: "brute_force_connected",
            cap: BRUTE_CONNECTED_CAP,
            got: nu,
        });
    }
    if nu == 0 {
        return Ok(BigUint::from(0u32));
    }
    let mut count = 0u64;
    for_each_matching(nu, |partner, c| {
        if c as usize == mu && is_connected_matching(partner) {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// All connected counts `C[nu][mu]` for `nu <= nu_max` in a single pass per
/// size.
pub fn connected_table(nu_max: usize) -> Result<Vec<Vec<BigUint>>> {
    if nu_max > BRUTE_CONNECTED_CAP {
        return Err(Error::CapExceeded {
            what: "connected_table",
            cap: BRUTE_CONNECTED_CAP,
            got: nu_max,
        });
    }
    let mut table = Vec::with_capacity(nu_max + 1);
    table.push(vec![BigUint::from(0u32)]);
    for nu in 1..=nu_max {
        let mut hist = vec![0u64; nu * (nu - 1) / 2 + 1];
        for_each_matching(nu, |partner, c| {
            if is_connected_matching(partner) {
                hist[c as usize] += 1;
            }
        });
        table.push(hist.into_iter().map(BigUint::from).collect());
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::ChordDiagram;

    #[test]
    fn enumerates_every_matching_once() {
        let mut seen = std::collections::HashSet::new();
        for_each_matching(4, |p, c| {
            let d = ChordDiagram::from_partner(p.to_vec()).unwrap();
            assert_eq!(d.crossing_count_naive(), c as u64);
            assert!(seen.insert(d));
        });
        assert_eq!(seen.len(), 105);
    }

    #[test]
    fn small_rows() {
        let row = |n| -> Vec<u64> {
            brute_force_row(n)
                .unwrap()
                .counts()
                .iter()
                .map(|c| c.try_into().unwrap())
                .collect()
        };
        assert_eq!(row(1), vec![1]);
        assert_eq!(row(2), vec![2, 1]);
        assert_eq!(row(3), vec![5, 6, 3, 1]);
        assert!(brute_force_row(10).is_err());
    }

    #[test]
    fn connected_examples() {
        assert_eq!(brute_force_connected(3, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(brute_force_connected(1, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(brute_force_connected(2, 0).unwrap(), BigUint::from(0u32));
        assert_eq!(brute_force_connected(2, 1).unwrap(), BigUint::from(1u32));
        assert!(brute_force_connected(9, 8).is_err());
    }
}
