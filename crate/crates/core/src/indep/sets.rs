//! Subsets of a small carrier as 64-bit masks.

pub type Set = u64;

pub const MAX_CARRIER: usize = 64;

pub fn full(n: usize) -> Set {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn singleton(i: usize) -> Set {
    1u64 << i
}

pub fn contains(s: Set, i: usize) -> bool {
    s >> i & 1 == 1
}

pub fn is_subset(a: Set, b: Set) -> bool {
    a & !b == 0
}

pub fn len(s: Set) -> usize {
    s.count_ones() as usize
}

pub fn iter(s: Set) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

/// Every subset of `s`, starting from the empty set.
pub fn subsets(s: Set) -> impl Iterator<Item = Set> {
    let mut cur: Option<Set> = Some(0);
    std::iter::from_fn(move || {
        let out = cur?;
        cur = if out == s { None } else { Some((out.wrapping_sub(s)) & s) };
        Some(out)
    })
}

/// Every superset of `s` inside `within`.
pub fn supersets(s: Set, within: Set) -> impl Iterator<Item = Set> {
    subsets(within & !s).map(move |x| x | s)
}

pub fn from_indices(xs: &[usize]) -> Set {
    xs.iter().fold(0, |acc, &i| acc | singleton(i))
}

pub fn to_indices(s: Set) -> Vec<usize> {
    iter(s).collect()
}

pub fn show(s: Set) -> String {
    let parts: Vec<String> = iter(s).map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        let s = from_indices(&[1, 3, 4]);
        let all: Vec<Set> = subsets(s).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|&x| is_subset(x, s)));
        assert_eq!(supersets(from_indices(&[1]), s).count(), 4);
        assert_eq!(subsets(0).count(), 1);
        assert_eq!(show(s), "{1,3,4}");
    }
}
