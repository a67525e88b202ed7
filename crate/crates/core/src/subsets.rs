//! Subset enumeration and counting used by the exhaustive searches.

use crate::error::{Error, Result};

/// Largest number of subsets any exhaustive search will visit.
pub const SUBSET_LIMIT: u128 = 1_000_000;

/// Limit for searches that run an optimiser per subset.
pub const KAPPA_SUBSET_LIMIT: u128 = 10_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of subsets of an `n`-set with at most `k` elements.
pub fn count_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).map(|i| binomial(n, i)).sum()
}

pub(crate) fn guard(count: u128, limit: u128) -> Result<()> {
    if count > limit {
        Err(Error::EnumerationTooLarge { count, limit })
    } else {
        Ok(())
    }
}

/// Calls `f` on every subset of `universe` of size exactly `k`, in
/// lexicographic order of positions.
pub fn for_each_of_size<F: FnMut(&[usize])>(universe: &[usize], k: usize, mut f: F) {
    let m = universe.len();
    if k > m {
        return;
    }
    let mut pos: Vec<usize> = (0..k).collect();
    let mut buf: Vec<usize> = vec![0; k];
    loop {
        for (b, &i) in buf.iter_mut().zip(&pos) {
            *b = universe[i];
        }
        f(&buf);
        let mut i = k;
        while i > 0 && pos[i - 1] == i - 1 + m - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        pos[i - 1] += 1;
        for j in i..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
}

/// Calls `f` on every subset of `universe` with at most `max_k` elements,
/// smallest sizes first.
pub fn for_each_up_to<F: FnMut(&[usize])>(universe: &[usize], max_k: usize, mut f: F) {
    for k in 0..=max_k.min(universe.len()) {
        for_each_of_size(universe, k, &mut f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(count_up_to(4, 4), 16);
    }

    #[test]
    fn enumerates_all_subsets_once() {
        let u = [2, 5, 7, 9, 11];
        for k in 0..=5 {
            let mut seen = Vec::new();
            for_each_of_size(&u, k, |s| seen.push(s.to_vec()));
            assert_eq!(seen.len() as u128, binomial(5, k));
            let mut sorted = seen.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, seen, "lexicographic and unique for k = {k}");
        }
        let mut total = 0;
        for_each_up_to(&u, 5, |_| total += 1);
        assert_eq!(total, 32);
    }
}
