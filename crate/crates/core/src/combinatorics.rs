//! Index bookkeeping for a composition `n = (n_1, ..., n_p)`.
//!
//! String entries are grouped into blocks of `|n|` slots; within block `k`
//! family `a` owns `n_a` consecutive slots, so linear index `l` is
//! `k|n| + n_1 + ... + n_{a-1} + r`. The monomial sitting at that slot is
//! `x^{k n_a + r}`. Families are labelled `1..=p` throughout.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
    total: usize,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("no parts".into()));
        }
        if let Some(pos) = parts.iter().position(|&n| n == 0) {
            return Err(Error::InvalidComposition(format!(
                "part {} is zero",
                pos + 1
            )));
        }
        let total = parts.iter().sum();
        Ok(Composition { parts, total })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of families `p`.
    pub fn families(&self) -> usize {
        self.parts.len()
    }

    /// Block length `|n|`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// `n_a` for a 1-based label.
    pub fn part(&self, a: usize) -> usize {
        self.parts[a - 1]
    }

    fn offset(&self, a: usize) -> usize {
        self.parts[..a - 1].iter().sum()
    }

    fn check_family(&self, a: usize) -> Result<()> {
        if a == 0 || a > self.families() {
            return Err(Error::FamilyOutOfRange {
                family: a,
                families: self.families(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockPosition {
    pub k: usize,
    pub a: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub counts: Vec<usize>,
}

impl MultiIndex {
    pub fn zeros(p: usize) -> Self {
        MultiIndex { counts: vec![0; p] }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Count for the 1-based family `a`.
    pub fn get(&self, a: usize) -> usize {
        self.counts[a - 1]
    }

    /// `self + e_a`.
    pub fn plus_unit(&self, a: usize) -> Self {
        let mut c = self.counts.clone();
        c[a - 1] += 1;
        MultiIndex { counts: c }
    }

    /// `self - e_a`, or `None` if that component is already zero.
    pub fn minus_unit(&self, a: usize) -> Option<Self> {
        let mut c = self.counts.clone();
        c[a - 1] = c[a - 1].checked_sub(1)?;
        Some(MultiIndex { counts: c })
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(counts: Vec<usize>) -> Self {
        MultiIndex { counts }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn decompose(n: &Composition, l: usize) -> BlockPosition {
    let k = l / n.total;
    let mut r = l % n.total;
    let mut a = 1;
    while r >= n.part(a) {
        r -= n.part(a);
        a += 1;
    }
    BlockPosition { k, a, r }
}

pub fn compose(n: &Composition, b: BlockPosition) -> Result<usize> {
    n.check_family(b.a)?;
    if b.r >= n.part(b.a) {
        return Err(Error::OffsetOutOfRange {
            family: b.a,
            offset: b.r,
            size: n.part(b.a),
        });
    }
    Ok(b.k * n.total + n.offset(b.a) + b.r)
}

fn compose_unchecked(n: &Composition, k: usize, a: usize, r: usize) -> usize {
    k * n.total + n.offset(a) + r
}

/// Family label of entry `l`.
pub fn family(n: &Composition, l: usize) -> usize {
    decompose(n, l).a
}

/// Exponent of the monomial in string entry `l`.
pub fn exponent(n: &Composition, l: usize) -> usize {
    let b = decompose(n, l);
    b.k * n.part(b.a) + b.r
}

/// The label in `1..=p` congruent to `m`.
pub fn cyclic_reduce(p: usize, m: i64) -> usize {
    assert!(p >= 1, "family count must be positive");
    ((m - 1).rem_euclid(p as i64) + 1) as usize
}

/// Highest exponent of a family-`a` monomial among entries `0..=l`.
pub fn nu_degree(n: &Composition, l: usize, a: usize) -> Option<usize> {
    let b = decompose(n, l);
    let na = n.part(a);
    match a.cmp(&b.a) {
        std::cmp::Ordering::Less => Some((b.k + 1) * na - 1),
        std::cmp::Ordering::Equal => Some(b.k * na + b.r),
        std::cmp::Ordering::Greater => (b.k * na).checked_sub(1),
    }
}

/// Number of family-`a` entries among `0..=l`, per family. `l = -1` gives zeros.
pub fn multi_index(n: &Composition, l: i64) -> MultiIndex {
    if l < 0 {
        return MultiIndex::zeros(n.families());
    }
    let l = l as usize;
    let counts = (1..=n.families())
        .map(|a| nu_degree(n, l, a).map_or(0, |d| d + 1))
        .collect();
    MultiIndex { counts }
}

/// Largest `l' <= l` with family `a`.
pub fn assoc_minus(n: &Composition, l: usize, a: usize) -> Option<usize> {
    let b = decompose(n, l);
    match a.cmp(&b.a) {
        std::cmp::Ordering::Equal => Some(l),
        std::cmp::Ordering::Less => Some(compose_unchecked(n, b.k, a, n.part(a) - 1)),
        std::cmp::Ordering::Greater => {
            if b.k == 0 {
                None
            } else {
                Some(compose_unchecked(n, b.k - 1, a, n.part(a) - 1))
            }
        }
    }
}

/// [`assoc_minus`] for a possibly negative index.
pub fn assoc_minus_signed(n: &Composition, l: i64, a: usize) -> Option<usize> {
    if l < 0 {
        None
    } else {
        assoc_minus(n, l as usize, a)
    }
}

/// Smallest `l' >= l` with family `a`.
pub fn assoc_plus(n: &Composition, l: usize, a: usize) -> usize {
    let b = decompose(n, l);
    match a.cmp(&b.a) {
        std::cmp::Ordering::Equal => l,
        std::cmp::Ordering::Greater => compose_unchecked(n, b.k, a, 0),
        std::cmp::Ordering::Less => compose_unchecked(n, b.k + 1, a, 0),
    }
}

/// Column holding the 1 of row `l` of the shift matrix: `(l+1)_{+,a(l)}`.
pub fn shift_target(n: &Composition, l: usize) -> usize {
    assoc_plus(n, l + 1, family(n, l))
}

/// Truncated 0/1 shift operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftMatrix {
    size: usize,
    targets: Vec<Option<usize>>,
}

impl ShiftMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Column of the single 1 in row `l`, if it lies inside the truncation.
    pub fn target(&self, l: usize) -> Option<usize> {
        self.targets[l]
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        u8::from(self.targets[i] == Some(j))
    }

    pub fn to_matrix<T: Scalar>(&self, ctx: T::Context) -> Matrix<T> {
        Matrix::from_fn(self.size, self.size, |i, j| {
            if self.targets[i] == Some(j) {
                T::one_in(ctx)
            } else {
                T::zero_in(ctx)
            }
        })
    }

    /// Product with a column vector.
    pub fn apply<T: Scalar>(&self, v: &[T], ctx: T::Context) -> Vec<T> {
        self.targets
            .iter()
            .map(|t| t.map_or_else(|| T::zero_in(ctx), |j| v[j].clone()))
            .collect()
    }
}

pub fn shift_matrix(n: &Composition, size: usize) -> ShiftMatrix {
    let targets = (0..size)
        .map(|l| Some(shift_target(n, l)).filter(|&t| t < size))
        .collect();
    ShiftMatrix { size, targets }
}

/// Number of leading rows `i` for which every `shift_target(k)`, `k <= i`, stays below `size`.
pub fn shift_exact_prefix(n: &Composition, size: usize) -> usize {
    let mut reach = 0;
    for l in 0..size {
        reach = reach.max(shift_target(n, l));
        if reach >= size {
            return l;
        }
    }
    size
}

#[cfg(test)]
mod tests {
    use super::*;

    fn staircase() -> Composition {
        Composition::new(vec![4, 3, 2]).unwrap()
    }

    // Walks blocks slot by slot, independently of the closed forms.
    fn oracle_string(n: &Composition, len: usize) -> Vec<(BlockPosition, usize)> {
        let mut out = Vec::new();
        let mut k = 0;
        while out.len() < len {
            for a in 1..=n.families() {
                for r in 0..n.part(a) {
                    out.push((BlockPosition { k, a, r }, k * n.part(a) + r));
                }
            }
            k += 1;
        }
        out.truncate(len);
        out
    }

    #[test]
    fn decompose_examples() {
        let n = staircase();
        assert_eq!(decompose(&n, 12), BlockPosition { k: 1, a: 1, r: 3 });
        assert_eq!(decompose(&n, 7), BlockPosition { k: 0, a: 3, r: 0 });
        let one = Composition::new(vec![1]).unwrap();
        assert_eq!(decompose(&one, 5), BlockPosition { k: 5, a: 1, r: 0 });
    }

    #[test]
    fn compose_examples() {
        let n = staircase();
        assert_eq!(compose(&n, BlockPosition { k: 1, a: 1, r: 3 }), Ok(12));
        assert_eq!(compose(&n, BlockPosition { k: 0, a: 3, r: 0 }), Ok(7));
        let one = Composition::new(vec![1]).unwrap();
        assert_eq!(compose(&one, BlockPosition { k: 5, a: 1, r: 0 }), Ok(5));
        assert!(matches!(
            compose(&n, BlockPosition { k: 0, a: 3, r: 2 }),
            Err(Error::OffsetOutOfRange { .. })
        ));
        assert!(matches!(
            compose(&n, BlockPosition { k: 0, a: 4, r: 0 }),
            Err(Error::FamilyOutOfRange { .. })
        ));
    }

    #[test]
    fn composition_rejects_bad_parts() {
        assert!(Composition::new(vec![]).is_err());
        assert!(Composition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(cyclic_reduce(3, 0), 3);
        assert_eq!(cyclic_reduce(3, 4), 1);
        assert_eq!(cyclic_reduce(2, 2), 2);
        assert_eq!(cyclic_reduce(3, -2), 1);
    }

    #[test]
    fn nu_degree_examples() {
        let n = staircase();
        assert_eq!(nu_degree(&n, 12, 1), Some(7));
        assert_eq!(nu_degree(&n, 12, 2), Some(2));
        assert_eq!(nu_degree(&n, 12, 3), Some(1));
        assert_eq!(nu_degree(&n, 3, 2), None);
    }

    #[test]
    fn multi_index_examples() {
        let n = staircase();
        assert_eq!(multi_index(&n, 12).counts, vec![8, 3, 2]);
        // entries 0..=11 of (3,2): families 1,1,1,2,2,1,1,1,2,2,1,1
        let m = Composition::new(vec![3, 2]).unwrap();
        assert_eq!(multi_index(&m, 11).counts, vec![8, 4]);
        assert_eq!(multi_index(&n, -1).counts, vec![0, 0, 0]);
    }

    #[test]
    fn assoc_examples() {
        let n = staircase();
        assert_eq!(assoc_minus(&n, 12, 2), Some(6));
        assert_eq!(assoc_minus(&n, 12, 1), Some(12));
        assert_eq!(assoc_minus(&n, 5, 3), None);
        assert_eq!(assoc_plus(&n, 12, 2), 13);
        assert_eq!(assoc_plus(&n, 12, 3), 16);
        for l in 0..30 {
            assert_eq!(assoc_plus(&n, l, family(&n, l)), l);
        }
    }

    #[test]
    fn shift_matrix_examples() {
        let one = Composition::new(vec![1]).unwrap();
        let s = shift_matrix(&one, 4);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.entry(i, j), u8::from(j == i + 1));
            }
        }
        let s = shift_matrix(&staircase(), 10);
        assert_eq!(s.entry(3, 9), 1);
        assert_eq!(s.entry(0, 1), 1);
        assert_eq!(s.target(9), None);
    }

    #[test]
    fn closed_forms_match_scan_oracles() {
        for parts in [vec![1], vec![4, 3, 2], vec![3, 2], vec![1, 1], vec![2, 1, 1, 3]] {
            let n = Composition::new(parts).unwrap();
            let len = 10 * n.total();
            let string = oracle_string(&n, len + 3 * n.total());
            for l in 0..len {
                assert_eq!(decompose(&n, l), string[l].0);
                assert_eq!(compose(&n, string[l].0), Ok(l));
                assert_eq!(exponent(&n, l), string[l].1);
                assert_eq!(nu_degree(&n, l, family(&n, l)), Some(exponent(&n, l)));
                let counts = multi_index(&n, l as i64);
                assert_eq!(counts.total(), l + 1);
                for a in 1..=n.families() {
                    let scan_minus = (0..=l).rev().find(|&i| string[i].0.a == a);
                    let scan_plus = (l..).find(|&i| string[i].0.a == a).unwrap();
                    assert_eq!(assoc_minus(&n, l, a), scan_minus);
                    assert_eq!(assoc_plus(&n, l, a), scan_plus);
                    let deg = (0..=l).filter(|&i| string[i].0.a == a).map(|i| string[i].1).max();
                    assert_eq!(nu_degree(&n, l, a), deg);
                    let count = (0..=l).filter(|&i| string[i].0.a == a).count();
                    assert_eq!(counts.get(a), count);
                }
            }
        }
    }

    #[test]
    fn exact_prefix_of_staircase() {
        let n1 = staircase();
        let limit = shift_exact_prefix(&n1, 30);
        assert!((0..limit).all(|l| shift_target(&n1, l) < 30));
        assert!(shift_target(&n1, limit) >= 30);
    }
}
