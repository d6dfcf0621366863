//! Venn-part algebra for a tuple of `k` sets.
//!
//! A Venn part is labelled by a `k`-digit binary number whose `m`-th digit
//! (counted from the most significant end, `m = 1..=k`) says whether the
//! part lies inside the `m`-th set. Labels are stored as integers, so digit
//! `m` lives at bit `k - m` and label order is integer order.

use crate::error::{Error, Result};
use crate::model::{EventTuple, ProblemSpec, VertexSet};

/// Largest tuple size for which a dense `2^k` spectrum is materialized.
pub const MAX_DENSE_K: usize = 24;

/// Bit holding digit `m` (1-based) of a `k`-digit label.
#[inline]
pub fn digit_bit(k: usize, m: usize) -> usize {
    1 << (k - m)
}

/// Label mask with a 1 at every listed digit position.
pub fn positions_mask(k: usize, positions: &[usize]) -> Result<usize> {
    let mut mask = 0;
    for &m in positions {
        if m == 0 || m > k {
            return Err(Error::InvalidArgument(format!(
                "digit position {m} outside 1..={k}"
            )));
        }
        mask |= digit_bit(k, m);
    }
    Ok(mask)
}

fn check_k(k: usize) -> Result<()> {
    if k > MAX_DENSE_K {
        return Err(Error::TooLarge(format!(
            "a {k}-set Venn spectrum has 2^{k} parts"
        )));
    }
    Ok(())
}

/// Cardinalities `Q_B` of the `2^k` Venn parts, indexed by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VennSpectrum {
    k: usize,
    q: Vec<u64>,
}

impl VennSpectrum {
    pub fn new(k: usize, q: Vec<u64>) -> Result<Self> {
        check_k(k)?;
        if q.len() != 1 << k {
            return Err(Error::InvalidArgument(format!(
                "a {k}-set spectrum needs {} entries, got {}",
                1usize << k,
                q.len()
            )));
        }
        Ok(Self { k, q })
    }

    /// Spectrum of a multiset of element labels: `Q_B` is the number of
    /// occurrences of `B`.
    pub fn from_labels(k: usize, labels: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_k(k)?;
        let mut q = vec![0u64; 1 << k];
        for label in labels {
            let slot = q.get_mut(label).ok_or_else(|| {
                Error::InvalidArgument(format!("label {label} has more than {k} digits"))
            })?;
            *slot += 1;
        }
        Ok(Self { k, q })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Entries in label order `B = 0, 1, ..., 2^k - 1`.
    pub fn q(&self) -> &[u64] {
        &self.q
    }

    pub fn get(&self, label: usize) -> u64 {
        self.q[label]
    }

    /// Ambient size `n = sum_B Q_B`.
    pub fn total(&self) -> u64 {
        self.q.iter().sum()
    }

    /// Sum of `Q_B` over labels having a 1 at every digit in `mask`.
    pub fn marginal(&self, mask: usize) -> u64 {
        self.q
            .iter()
            .enumerate()
            .filter(|&(b, _)| b & mask == mask)
            .map(|(_, &v)| v)
            .sum()
    }

    /// `|intersection of the sets at the given positions|`.
    pub fn p_from_q(&self, positions: &[usize]) -> Result<u64> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "intersection needs at least one position".into(),
            ));
        }
        Ok(self.marginal(positions_mask(self.k, positions)?))
    }

    /// Every intersection cardinality at once.
    pub fn intersection_spectrum(&self) -> IntersectionSpectrum {
        let p = (0..1usize << self.k).map(|s| self.marginal(s)).collect();
        IntersectionSpectrum { k: self.k, p }
    }

    /// Spectrum with the digit positions permuted: the set at position `m`
    /// moves to position `perm[m - 1]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let k = self.k;
        let mut seen = vec![false; k + 1];
        if perm.len() != k || perm.iter().any(|&m| m == 0 || m > k || std::mem::replace(&mut seen[m], true)) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 1..={k}"
            )));
        }
        let mut q = vec![0u64; 1 << k];
        for (b, &v) in self.q.iter().enumerate() {
            let mut image = 0;
            for m in 1..=k {
                if b & digit_bit(k, m) != 0 {
                    image |= digit_bit(k, perm[m - 1]);
                }
            }
            q[image] = v;
        }
        Ok(Self { k, q })
    }
}

/// Intersection cardinalities `P_S` for every subset `S` of positions,
/// indexed by label mask; the empty mask holds the ambient size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntersectionSpectrum {
    k: usize,
    p: Vec<u64>,
}

impl IntersectionSpectrum {
    /// `p[mask]` is the intersection size over the positions in `mask`;
    /// `p[0]` is `n`.
    pub fn new(k: usize, p: Vec<u64>) -> Result<Self> {
        check_k(k)?;
        if p.len() != 1 << k {
            return Err(Error::InvalidArgument(format!(
                "a {k}-set intersection spectrum needs {} entries, got {}",
                1usize << k,
                p.len()
            )));
        }
        Ok(Self { k, p })
    }

    pub fn of_sets(sets: &[VertexSet], n: usize) -> Result<Self> {
        Ok(venn_spectrum_of(sets, n)?.intersection_spectrum())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.p[0]
    }

    pub fn get(&self, positions: &[usize]) -> Result<u64> {
        Ok(self.p[positions_mask(self.k, positions)?])
    }

    pub fn by_mask(&self, mask: usize) -> u64 {
        self.p[mask]
    }

    /// Monotone: adding positions never increases an intersection.
    pub fn is_monotone(&self) -> bool {
        (0..self.p.len()).all(|s| {
            (0..self.k).all(|bit| s & (1 << bit) != 0 || self.p[s | (1 << bit)] <= self.p[s])
        })
    }
}

/// Venn part cardinalities of `sets` (listed in position order) inside
/// `1..=n`.
pub fn venn_spectrum_of(sets: &[VertexSet], n: usize) -> Result<VennSpectrum> {
    let k = sets.len();
    check_k(k)?;
    if let Some(bad) = sets.iter().find(|s| s.max_element() as usize > n) {
        return Err(Error::InvalidArgument(format!("{bad} is not inside 1..={n}")));
    }
    let labels = (1..=n as u32).map(|v| {
        sets.iter()
            .enumerate()
            .filter(|(_, s)| s.contains(v))
            .fold(0, |label, (i, _)| label | digit_bit(k, i + 1))
    });
    VennSpectrum::from_labels(k, labels)
}

/// Recovers the Venn spectrum from intersection cardinalities by the
/// alternating sum `Q_B = sum over S containing ones(B) of (-1)^{|S|-|B|} P_S`.
pub fn q_from_p(ispec: &IntersectionSpectrum) -> Result<VennSpectrum> {
    let size = 1usize << ispec.k;
    let full = size - 1;
    let mut q = Vec::with_capacity(size);
    for label in 0..size {
        let free = full & !label;
        let mut value: i128 = 0;
        // Walk every subset `extra` of the positions outside `label`.
        let mut extra = free;
        loop {
            let term = ispec.p[label | extra] as i128;
            if extra.count_ones().is_multiple_of(2) {
                value += term;
            } else {
                value -= term;
            }
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & free;
        }
        if value < 0 {
            return Err(Error::Unrealizable { label, value });
        }
        q.push(value as u64);
    }
    Ok(VennSpectrum { k: ispec.k, q })
}

/// Events per box, `(k_1, ..., k_t)`. Positions `1..=k_1` belong to box 1,
/// the next `k_2` to box 2, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleType(Vec<usize>);

impl TupleType {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn of_tuple(tuple: &EventTuple, t: usize) -> Self {
        let mut counts = vec![0; t];
        for e in tuple.events() {
            counts[e.box_index() - 1] += 1;
        }
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.iter().sum()
    }

    /// Box (1-based) owning each position, in position order.
    pub fn position_boxes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c))
            .collect()
    }

    /// Fits the ambient instance: right number of boxes and no box asks
    /// for more events than exist.
    pub fn fits(&self, prob: &ProblemSpec, n: usize) -> bool {
        self.0.len() == prob.t()
            && self.0.iter().zip(prob.p()).all(|(&c, &pi)| {
                crate::model::binom_u64(n as u64, pi as u64).is_none_or(|avail| c as u64 <= avail)
            })
    }
}

/// No r-subset is demanded by two different boxes: events in distinct
/// boxes share at most `r - 1` vertices. Same-box pairs are unconstrained.
pub fn is_compatible(tuple: &EventTuple, prob: &ProblemSpec) -> bool {
    let events = tuple.events();
    events.iter().enumerate().all(|(a, ea)| {
        events[a + 1..].iter().all(|eb| {
            ea.box_index() == eb.box_index()
                || ea.vertices().intersection_len(eb.vertices()) < prob.r()
        })
    })
}

/// Whether `spectrum` is the Venn spectrum of some compatible tuple of
/// distinct events of type `ty`: parts sum to `n`, each position's marginal
/// is its box's subset size, cross-box pair marginals are at most `r - 1`,
/// and no two same-box positions carry identical sets.
pub fn check_spectrum_constraints(
    spectrum: &VennSpectrum,
    ty: &TupleType,
    prob: &ProblemSpec,
    n: usize,
) -> bool {
    let k = spectrum.k();
    if ty.k() != k || ty.counts().len() != prob.t() {
        return false;
    }
    if spectrum.total() != n as u64 {
        return false;
    }
    let boxes = ty.position_boxes();
    for m in 1..=k {
        if spectrum.marginal(digit_bit(k, m)) != prob.p_of(boxes[m - 1]) as u64 {
            return false;
        }
    }
    for mu in 1..=k {
        for nu in mu + 1..=k {
            let (bm, bn) = (digit_bit(k, mu), digit_bit(k, nu));
            if boxes[mu - 1] != boxes[nu - 1] {
                if spectrum.marginal(bm | bn) >= prob.r() as u64 {
                    return false;
                }
            } else {
                let differing: u64 = spectrum
                    .q()
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| ((b & bm) != 0) != ((b & bn) != 0))
                    .map(|(_, &v)| v)
                    .sum();
                if differing == 0 {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{subsets, Event};

    fn vs(v: &[u32]) -> VertexSet {
        VertexSet::new(v.to_vec()).unwrap()
    }

    /// Spectrum from `(Q_11, Q_10, Q_01, Q_00)` as written left to right.
    fn spectrum2(q11: u64, q10: u64, q01: u64, q00: u64) -> VennSpectrum {
        VennSpectrum::new(2, vec![q00, q01, q10, q11]).unwrap()
    }

    #[test]
    fn spectrum_of_explicit_sets() {
        let s = venn_spectrum_of(&[vs(&[1, 2, 3]), vs(&[3, 4, 5])], 6).unwrap();
        assert_eq!(s, spectrum2(1, 2, 2, 1));
        let s = venn_spectrum_of(&[vs(&[1, 2, 3])], 5).unwrap();
        assert_eq!(s.q(), &[2, 3]);
        let s = venn_spectrum_of(&[vs(&[1, 2]), vs(&[1, 2])], 3).unwrap();
        assert_eq!(s, spectrum2(2, 0, 0, 1));
        assert!(venn_spectrum_of(&[vs(&[1, 7])], 6).is_err());
    }

    #[test]
    fn digit_convention() {
        // Digit 1 is the most significant.
        assert_eq!(digit_bit(3, 1), 0b100);
        assert_eq!(digit_bit(3, 3), 0b001);
        let s = venn_spectrum_of(&[vs(&[1]), vs(&[2]), vs(&[3])], 4).unwrap();
        assert_eq!(s.get(0b100), 1);
        assert_eq!(s.get(0b010), 1);
        assert_eq!(s.get(0b001), 1);
        assert_eq!(s.get(0), 1);
    }

    #[test]
    fn p_from_q_examples() {
        let s = spectrum2(1, 2, 2, 1);
        assert_eq!(s.p_from_q(&[1, 2]).unwrap(), 1);
        assert_eq!(s.p_from_q(&[1]).unwrap(), 3);
        assert_eq!(s.p_from_q(&[2]).unwrap(), 3);
        assert!(s.p_from_q(&[]).is_err());
        assert!(s.p_from_q(&[3]).is_err());
        let s3 = VennSpectrum::new(3, vec![4, 1, 0, 2, 5, 1, 3, 7]).unwrap();
        assert_eq!(s3.p_from_q(&[1, 2, 3]).unwrap(), s3.get(0b111));
    }

    #[test]
    fn q_from_p_examples() {
        // Masks: {1} -> 0b10, {2} -> 0b01, {1,2} -> 0b11.
        let ispec = IntersectionSpectrum::new(2, vec![6, 3, 3, 1]).unwrap();
        assert_eq!(q_from_p(&ispec).unwrap(), spectrum2(1, 2, 2, 1));
        let ispec = IntersectionSpectrum::new(1, vec![5, 3]).unwrap();
        assert_eq!(q_from_p(&ispec).unwrap().q(), &[2, 3]);
        let ispec = IntersectionSpectrum::new(2, vec![3, 3, 3, 0]).unwrap();
        assert!(matches!(
            q_from_p(&ispec),
            Err(Error::Unrealizable { label: 0, value: -3 })
        ));
    }

    #[test]
    fn roundtrip_and_direct_intersections_exhaustive() {
        // Every ordered tuple of up to three subsets of 1..=n, n <= 5
        // (n = 6 runs in the acceptance suite).
        for n in 0..=5usize {
            let all: Vec<VertexSet> = (0..=n).flat_map(|size| subsets(n, size)).collect();
            let check = |sets: &[VertexSet]| {
                let spectrum = venn_spectrum_of(sets, n).unwrap();
                assert_eq!(spectrum.total(), n as u64);
                let ispec = spectrum.intersection_spectrum();
                assert!(ispec.is_monotone());
                for mask in 1..1usize << sets.len() {
                    let direct = (1..=n as u32)
                        .filter(|&v| {
                            (0..sets.len()).all(|i| {
                                mask & digit_bit(sets.len(), i + 1) == 0 || sets[i].contains(v)
                            })
                        })
                        .count();
                    assert_eq!(ispec.by_mask(mask), direct as u64);
                }
                assert_eq!(q_from_p(&ispec).unwrap(), spectrum);
            };
            for a in &all {
                check(std::slice::from_ref(a));
                for b in &all {
                    check(&[a.clone(), b.clone()]);
                    if n <= 4 {
                        for c in &all {
                            check(&[a.clone(), b.clone(), c.clone()]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn permutation_covariance() {
        let sets = [vs(&[1, 2, 3]), vs(&[2, 4]), vs(&[1, 4, 5, 6])];
        let base = venn_spectrum_of(&sets, 7).unwrap();
        // Cyclic relabelling 1 -> 3 -> 2 -> 1 of the tuple positions.
        let perm = [3, 1, 2];
        let mut moved = vec![vs(&[]); 3];
        for (m, s) in sets.iter().enumerate() {
            moved[perm[m] - 1] = s.clone();
        }
        let direct = venn_spectrum_of(&moved, 7).unwrap();
        assert_eq!(base.permuted(&perm).unwrap(), direct);
        let mut a = base.q().to_vec();
        let mut b = direct.q().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(base.permuted(&[1, 1, 2]).is_err());
    }

    #[test]
    fn compatibility() {
        let prob = ProblemSpec::new(2, 2, vec![3, 3]).unwrap();
        let e = |b, v: &[u32]| Event::new(&prob, b, vs(v)).unwrap();
        let tuple = |es: Vec<Event>| EventTuple::from_unsorted(es).unwrap();
        assert!(!is_compatible(&tuple(vec![e(1, &[1, 2, 3]), e(2, &[1, 2, 4])]), &prob));
        assert!(is_compatible(&tuple(vec![e(1, &[1, 2, 3]), e(2, &[1, 4, 5])]), &prob));
        assert!(is_compatible(&tuple(vec![e(1, &[1, 2, 3]), e(1, &[1, 2, 4])]), &prob));
        assert!(!is_compatible(&tuple(vec![e(1, &[1, 2, 3]), e(2, &[1, 2, 3])]), &prob));
    }

    #[test]
    fn spectrum_constraint_examples() {
        let prob = ProblemSpec::new(2, 2, vec![3, 3]).unwrap();
        let one_each = TupleType::new(vec![1, 1]);
        assert!(check_spectrum_constraints(&spectrum2(1, 2, 2, 0), &one_each, &prob, 5));
        assert!(!check_spectrum_constraints(&spectrum2(2, 1, 1, 1), &one_each, &prob, 5));
        // Wrong ambient size, wrong marginals.
        assert!(!check_spectrum_constraints(&spectrum2(1, 2, 2, 0), &one_each, &prob, 6));
        assert!(!check_spectrum_constraints(&spectrum2(1, 1, 2, 1), &one_each, &prob, 5));
        let two_in_box1 = TupleType::new(vec![2, 0]);
        assert!(!check_spectrum_constraints(&spectrum2(3, 0, 0, 0), &two_in_box1, &prob, 3));
        assert!(check_spectrum_constraints(&spectrum2(2, 1, 1, 0), &two_in_box1, &prob, 4));
    }

    #[test]
    fn tuple_type_positions() {
        let ty = TupleType::new(vec![2, 0, 1]);
        assert_eq!(ty.k(), 3);
        assert_eq!(ty.position_boxes(), vec![1, 1, 3]);
        let prob = ProblemSpec::new(3, 1, vec![2, 2, 2]).unwrap();
        assert!(ty.fits(&prob, 3));
        assert!(!TupleType::new(vec![4, 0, 0]).fits(&prob, 3));
    }
}
