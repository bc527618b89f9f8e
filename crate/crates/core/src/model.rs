//! Sign sequences and the hopping matrices built from them.
//!
//! A sign sequence `b ∈ {±1}^len` doubles as an integer through the bitmask
//! codec: bit `j` is set iff `b_{j+1} = −1`. Every enumeration order,
//! checkpoint record and argmin report in this workspace uses that codec.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{CMatrix, TridiagC};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid sign character {0:?} (expected '+' or '-')")]
    BadSign(char),
    #[error("bitmask {mask} does not fit in {len} signs")]
    MaskTooWide { mask: u64, len: usize },
    #[error("sequences longer than 64 have no bitmask form (len {0})")]
    TooLongForMask(usize),
    #[error("expected a sign sequence of length {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("matrix order must be at least 1")]
    ZeroOrder,
    #[error("|alpha| = {0} is not 1")]
    NotUnimodular(f64),
    #[error("probability {0} must lie strictly between 0 and 1")]
    Probability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    #[inline]
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Finite `±1` sequence.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SignSeq {
    signs: Vec<Sign>,
}

impl SignSeq {
    pub fn new(signs: Vec<Sign>) -> Self {
        SignSeq { signs }
    }

    pub fn ones(len: usize) -> Self {
        SignSeq {
            signs: vec![Sign::Plus; len],
        }
    }

    pub fn from_bitmask(mask: u64, len: usize) -> Result<Self, ModelError> {
        if len > 64 {
            return Err(ModelError::TooLongForMask(len));
        }
        if len < 64 && mask >> len != 0 {
            return Err(ModelError::MaskTooWide { mask, len });
        }
        Ok(SignSeq {
            signs: (0..len)
                .map(|j| if mask >> j & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect(),
        })
    }

    /// Bitmask form; `None` for sequences longer than 64.
    pub fn bitmask(&self) -> Option<u64> {
        if self.signs.len() > 64 {
            return None;
        }
        Some(
            self.signs
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == Sign::Minus)
                .fold(0u64, |m, (j, _)| m | 1 << j),
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.signs.iter().map(|s| s.value())
    }

    /// Entrywise product, e.g. `bc` in the two-diagonal reduction.
    pub fn product(&self, other: &SignSeq) -> Result<SignSeq, ModelError> {
        if self.len() != other.len() {
            return Err(ModelError::Length {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(SignSeq {
            signs: self.signs.iter().zip(&other.signs).map(|(a, b)| a.times(*b)).collect(),
        })
    }

    pub fn negated(&self) -> SignSeq {
        SignSeq {
            signs: self.signs.iter().map(|s| s.flip()).collect(),
        }
    }

    pub fn reversed(&self) -> SignSeq {
        SignSeq {
            signs: self.signs.iter().rev().copied().collect(),
        }
    }

    /// First `len` entries.
    pub fn prefix(&self, len: usize) -> SignSeq {
        SignSeq {
            signs: self.signs[..len.min(self.len())].to_vec(),
        }
    }
}

impl fmt::Display for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignSeq(\"{self}\")")
    }
}

impl FromStr for SignSeq {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        s.chars()
            .map(|ch| match ch {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(ModelError::BadSign(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SignSeq::new)
    }
}

impl From<SignSeq> for String {
    fn from(s: SignSeq) -> String {
        alloc::format!("{s}")
    }
}

/// Symbolic `A_n^{b,c}`: sub-diagonal signs `sub` (the `b_j`), super-diagonal
/// signs `sup` (the `c_j`), zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoppingSpec {
    n: usize,
    sub: SignSeq,
    sup: SignSeq,
}

impl HoppingSpec {
    pub fn new(n: usize, sub: SignSeq, sup: SignSeq) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroOrder);
        }
        for s in [&sub, &sup] {
            if s.len() != n - 1 {
                return Err(ModelError::Length {
                    expected: n - 1,
                    got: s.len(),
                });
            }
        }
        Ok(HoppingSpec { n, sub, sup })
    }

    /// `A_n^b`: super-diagonal all ones.
    pub fn single(sub: SignSeq) -> Self {
        let n = sub.len() + 1;
        HoppingSpec {
            n,
            sup: SignSeq::ones(n - 1),
            sub,
        }
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroOrder);
        }
        Ok(Self::single(SignSeq::from_bitmask(mask, n - 1)?))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn sub(&self) -> &SignSeq {
        &self.sub
    }

    pub fn sup(&self) -> &SignSeq {
        &self.sup
    }

    /// The single-diagonal form `A_n^{bc}`; it shares the spectrum and every
    /// `p`-norm pseudospectrum of `A_n^{b,c}` (signature similarity).
    pub fn normalized(&self) -> HoppingSpec {
        HoppingSpec::single(self.sub.product(&self.sup).expect("lengths checked at construction"))
    }
}

/// `A_n^{b,c} − shift·I` as a tridiagonal matrix.
pub fn assemble(spec: &HoppingSpec, shift: C64) -> TridiagC {
    TridiagC {
        sub: spec.sub.values().map(|v| C64::new(v, 0.0)).collect(),
        diag: vec![-shift; spec.n],
        sup: spec.sup.values().map(|v| C64::new(v, 0.0)).collect(),
    }
}

/// `A_n^c − shift·I` for the sub-diagonal given in bitmask form, written into `t`.
/// The hot path of the brute-force minimum; `t` must have order `n`.
#[inline]
pub fn assemble_mask_into(t: &mut TridiagC, mask: u64, shift: C64) {
    let n = t.order();
    for d in t.diag.iter_mut() {
        *d = -shift;
    }
    for j in 0..n - 1 {
        t.sub[j] = C64::new(if mask >> j & 1 == 1 { -1.0 } else { 1.0 }, 0.0);
        t.sup[j] = C64::new(1.0, 0.0);
    }
}

/// Tolerance on `|α| = 1` for periodized matrices.
pub const UNIMODULAR_TOL: f64 = 1e-15;

/// One period `(b, c)` of a periodic operator together with a Floquet phase `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodizedSpec {
    b: SignSeq,
    c: SignSeq,
    alpha: C64,
}

impl PeriodizedSpec {
    pub fn new(b: SignSeq, c: SignSeq, alpha: C64) -> Result<Self, ModelError> {
        if b.is_empty() {
            return Err(ModelError::ZeroOrder);
        }
        if c.len() != b.len() {
            return Err(ModelError::Length {
                expected: b.len(),
                got: c.len(),
            });
        }
        let modulus = alpha.norm();
        if !((modulus - 1.0).abs() <= UNIMODULAR_TOL) {
            return Err(ModelError::NotUnimodular(modulus));
        }
        Ok(PeriodizedSpec { b, c, alpha })
    }

    pub fn single(b: SignSeq, alpha: C64) -> Result<Self, ModelError> {
        let c = SignSeq::ones(b.len());
        Self::new(b, c, alpha)
    }

    pub fn period(&self) -> usize {
        self.b.len()
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }
}

/// `A_n^{b,c} + B_{n,α}^{b,c}`: the finite section plus corner entries
/// `(n,1) += α·c_n` and `(1,n) += α⁻¹·b_n`.
pub fn assemble_periodized(p: &PeriodizedSpec) -> CMatrix {
    let n = p.period();
    let bv: Vec<f64> = p.b.values().collect();
    let cv: Vec<f64> = p.c.values().collect();
    let mut m = CMatrix::zeros(n);
    for i in 0..n - 1 {
        m[(i + 1, i)] = C64::new(bv[i], 0.0);
        m[(i, i + 1)] = C64::new(cv[i], 0.0);
    }
    // for |α| = 1, α⁻¹ = conj(α)
    m[(n - 1, 0)] += p.alpha * cv[n - 1];
    m[(0, n - 1)] += p.alpha.conj() * bv[n - 1];
    m
}

/// Periodized single-diagonal matrix for a period given as a bitmask, written into `m`.
pub fn assemble_periodized_mask_into(m: &mut CMatrix, mask: u64, alpha: C64) {
    let n = m.order();
    let sign = |j: usize| if mask >> j & 1 == 1 { -1.0 } else { 1.0 };
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    for i in 0..n - 1 {
        m[(i + 1, i)] = C64::new(sign(i), 0.0);
        m[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    m[(n - 1, 0)] += alpha;
    m[(0, n - 1)] += alpha.conj() * sign(n - 1);
}

/// The `len`-bit reversal of `mask` (maps a sequence to its reversal).
#[inline]
pub fn reverse_mask(mask: u64, len: usize) -> u64 {
    if len == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - len)
    }
}

/// Whether `mask` is the smaller-bitmask member of its reversal class.
#[inline]
pub fn is_reversal_canonical(mask: u64, len: usize) -> bool {
    mask <= reverse_mask(mask, len)
}

/// Number of reversal classes of `{±1}^len`: `(2^len + 2^⌈len/2⌉) / 2`.
pub fn reversal_class_count(len: usize) -> u64 {
    ((1u64 << len) + (1u64 << len.div_ceil(2))) / 2
}

/// Gray code of `i`.
#[inline]
pub fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Iterator over a range of Gray-code indices.
///
/// Index `i` visits the sequence with bitmask `gray(i)`. With `quotient` on,
/// only reversal-canonical masks are yielded. The flip index reports the bit
/// position that differs from the previously *yielded* mask, when exactly one
/// bit differs.
#[derive(Debug, Clone)]
pub struct EnumCursor {
    len: usize,
    position: u64,
    end: u64,
    quotient: bool,
    last: Option<u64>,
}

impl EnumCursor {
    pub fn new(len: usize, quotient: bool) -> Self {
        assert!(len < 64, "enumeration supports at most 63 signs");
        Self::range(len, 0, 1u64 << len, quotient)
    }

    /// Indices `start..end` only; disjoint ranges can be processed independently.
    pub fn range(len: usize, start: u64, end: u64, quotient: bool) -> Self {
        assert!(len < 64, "enumeration supports at most 63 signs");
        let total = 1u64 << len;
        EnumCursor {
            len,
            position: start.min(total),
            end: end.min(total),
            quotient,
            last: None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn is_quotient(&self) -> bool {
        self.quotient
    }

    /// Next `(bitmask, flip)` pair.
    #[inline]
    pub fn next_mask(&mut self) -> Option<(u64, Option<usize>)> {
        while self.position < self.end {
            let mask = gray(self.position);
            self.position += 1;
            if self.quotient && !is_reversal_canonical(mask, self.len) {
                continue;
            }
            let flip = self.last.and_then(|prev| {
                let diff = prev ^ mask;
                (diff.count_ones() == 1).then(|| diff.trailing_zeros() as usize)
            });
            self.last = Some(mask);
            return Some((mask, flip));
        }
        None
    }
}

impl Iterator for EnumCursor {
    type Item = (SignSeq, Option<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        let len = self.len;
        self.next_mask()
            .map(|(mask, flip)| (SignSeq::from_bitmask(mask, len).expect("mask < 2^len"), flip))
    }
}

/// All sequences of length `len` (reversal representatives if `quotient`).
pub fn enumerate(len: usize, quotient: bool) -> EnumCursor {
    EnumCursor::new(len, quotient)
}

/// Rotate an `n`-bit mask right by one position (cyclic shift of a period).
#[inline]
pub fn rotate_mask(mask: u64, n: usize) -> u64 {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    ((mask >> 1) | ((mask & 1) << (n - 1))) & full
}

/// Smallest mask among all cyclic shifts of `mask`.
pub fn necklace_canonical(mask: u64, n: usize) -> u64 {
    let mut best = mask;
    let mut m = mask;
    for _ in 1..n {
        m = rotate_mask(m, n);
        best = best.min(m);
    }
    best
}

/// One representative per cyclic-shift class of `{±1}^n`, ascending.
pub fn necklace_representatives(n: usize) -> Vec<u64> {
    assert!((1..32).contains(&n), "period out of range");
    (0..1u64 << n).filter(|&m| necklace_canonical(m, n) == m).collect()
}

/// True iff every one of the `2^k` patterns of length `k` occurs as a
/// consecutive block of `b`.
pub fn is_pseudo_ergodic_window(b: &SignSeq, k: usize) -> bool {
    assert!(k >= 1, "window length must be positive");
    let len = b.len();
    if k > len || k >= 40 {
        return false;
    }
    let patterns = 1usize << k;
    if len - k + 1 < patterns {
        return false;
    }
    let mut seen = vec![false; patterns];
    let mut remaining = patterns;
    let window = patterns - 1;
    let mut code = 0usize;
    for (j, s) in b.signs().iter().enumerate() {
        code = ((code << 1) | (*s == Sign::Minus) as usize) & window;
        if j + 1 >= k && !seen[code] {
            seen[code] = true;
            remaining -= 1;
            if remaining == 0 {
                return true;
            }
        }
    }
    false
}

/// iid signs with `P(+1) = p_plus`, reproducible from `seed`.
pub fn sample_iid(len: usize, p_plus: f64, seed: u64) -> Result<SignSeq, ModelError> {
    if !(p_plus > 0.0 && p_plus < 1.0) {
        return Err(ModelError::Probability(p_plus));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SignSeq::new(
        (0..len)
            .map(|_| if rng.gen_bool(p_plus) { Sign::Plus } else { Sign::Minus })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_dense;
    use crate::float::{cis, sqrt};
    use proptest::prelude::*;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| {
            (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap()
        });
        v
    }

    /// Greedy multiset match. Eigenvalues inside a cluster (another eigenvalue
    /// within 1e-3) are only determined to about u^(1/k) for a defective
    /// k-fold root, so they get a looser tolerance.
    fn multiset_close(a: &[C64], b: &[C64], tol: f64) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let mut used = vec![false; b.len()];
        a.iter().enumerate().all(|(i, x)| {
            let clustered = a.iter().enumerate().any(|(j, y)| j != i && (x - y).norm() < 1e-3);
            let tol = if clustered { 1e-4 } else { tol };
            match (0..b.len()).filter(|&j| !used[j]).min_by(|&i, &j| {
                (b[i] - x).norm().partial_cmp(&(b[j] - x).norm()).unwrap()
            }) {
                Some(j) if (b[j] - x).norm() <= tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
    }

    fn eig_of(spec: &HoppingSpec) -> Vec<C64> {
        eig_dense(&assemble(spec, C64::new(0.0, 0.0)).to_dense()).unwrap()
    }

    #[test]
    fn text_and_mask_codecs() {
        let s: SignSeq = "++-+".parse().unwrap();
        assert_eq!(s.bitmask(), Some(0b0100));
        assert_eq!(SignSeq::from_bitmask(0b0100, 4).unwrap(), s);
        assert_eq!(alloc::format!("{s}"), "++-+");
        assert!(matches!("+x".parse::<SignSeq>(), Err(ModelError::BadSign('x'))));
        assert!(matches!(SignSeq::from_bitmask(8, 3), Err(ModelError::MaskTooWide { .. })));
    }

    #[test]
    fn assemble_examples() {
        let spec = HoppingSpec::single("+".parse().unwrap());
        assert_eq!(
            assemble(&spec, C64::new(0.0, 0.0)).to_dense(),
            CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
        );
        let lam = C64::new(0.5, -2.0);
        let t = assemble(&HoppingSpec::single(SignSeq::default()), lam);
        assert_eq!(t.diag, vec![-lam]);
        let spec = HoppingSpec::single("+-".parse().unwrap());
        assert_eq!(
            assemble(&spec, C64::new(0.0, 0.0)).to_dense(),
            CMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, -1.0, 0.0]])
                .unwrap()
        );
    }

    #[test]
    fn mask_assembly_matches_symbolic() {
        let mut t = assemble(&HoppingSpec::from_mask(6, 0).unwrap(), C64::new(0.0, 0.0));
        let lam = C64::new(0.1, 0.7);
        assemble_mask_into(&mut t, 0b10110, lam);
        assert_eq!(t, assemble(&HoppingSpec::from_mask(6, 0b10110).unwrap(), lam));
    }

    #[test]
    fn spec_rejects_bad_lengths() {
        assert!(matches!(
            HoppingSpec::new(3, SignSeq::ones(2), SignSeq::ones(1)),
            Err(ModelError::Length { .. })
        ));
        assert!(matches!(
            HoppingSpec::new(0, SignSeq::ones(0), SignSeq::ones(0)),
            Err(ModelError::ZeroOrder)
        ));
    }

    #[test]
    fn periodized_scalar() {
        let theta = 0.7;
        let p = PeriodizedSpec::single(SignSeq::ones(1), cis(theta)).unwrap();
        let m = assemble_periodized(&p);
        assert!((m[(0, 0)] - C64::new(2.0 * crate::float::cos(theta), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn periodized_order_three_matrix() {
        let theta = 1.1;
        let a = cis(theta);
        let p = PeriodizedSpec::single("++-".parse().unwrap(), a).unwrap();
        let m = assemble_periodized(&p);
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let want = CMatrix::from_row_major(vec![
            zero, one, -a.conj(), //
            one, zero, one, //
            a, one, zero,
        ])
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[(i, j)] - want[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn periodized_order_two_mixed_signs_square_to_imaginary() {
        // b = (1, -1): eigenvalues satisfy λ² = 2i sinθ
        for k in 0..16 {
            let theta = k as f64 * 0.4;
            let p = PeriodizedSpec::single("+-".parse().unwrap(), cis(theta)).unwrap();
            for z in eig_dense(&assemble_periodized(&p)).unwrap() {
                let want = C64::new(0.0, 2.0 * crate::float::sin(theta));
                assert!((z * z - want).norm() < 1e-12, "{z}");
            }
        }
    }

    #[test]
    fn periodized_rejects_non_unit_phase() {
        assert!(matches!(
            PeriodizedSpec::single(SignSeq::ones(2), C64::new(1.0, 1e-3)),
            Err(ModelError::NotUnimodular(_))
        ));
    }

    #[test]
    fn periodized_mask_matches_symbolic() {
        let a = cis(2.3);
        let mut m = CMatrix::zeros(5);
        assemble_periodized_mask_into(&mut m, 0b01101, a);
        let p = PeriodizedSpec::single(SignSeq::from_bitmask(0b01101, 5).unwrap(), a).unwrap();
        assert_eq!(m, assemble_periodized(&p));
    }

    #[test]
    fn gray_order_examples() {
        let masks: Vec<u64> = enumerate(2, false).map(|(s, _)| s.bitmask().unwrap()).collect();
        assert_eq!(masks, vec![0b00, 0b01, 0b11, 0b10]);
        let flips: Vec<Option<usize>> = enumerate(2, false).map(|(_, f)| f).collect();
        assert_eq!(flips, vec![None, Some(0), Some(1), Some(0)]);
        assert_eq!(enumerate(3, true).count(), 6);
        let empty: Vec<_> = enumerate(0, false).collect();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].0.is_empty());
    }

    #[test]
    fn reversal_classes_counted_by_brute_force() {
        for len in 0..12usize {
            // oracle: collect canonical forms min(m, rev(m)) by direct reversal of the sign vector
            let mut classes = alloc::collections::BTreeSet::new();
            for m in 0..1u64 << len {
                let s = SignSeq::from_bitmask(m, len).unwrap();
                let r = s.reversed().bitmask().unwrap();
                classes.insert(m.min(r));
            }
            assert_eq!(classes.len() as u64, reversal_class_count(len));
            let visited: Vec<u64> = enumerate(len, true).map(|(s, _)| s.bitmask().unwrap()).collect();
            assert_eq!(visited.len(), classes.len());
            for m in visited {
                assert!(classes.contains(&m));
            }
        }
    }

    #[test]
    fn necklaces_cover_all_rotations() {
        for n in 1..10usize {
            let reps = necklace_representatives(n);
            let mut covered = alloc::collections::BTreeSet::new();
            for &r in &reps {
                let mut m = r;
                for _ in 0..n {
                    covered.insert(m);
                    m = rotate_mask(m, n);
                }
            }
            assert_eq!(covered.len(), 1 << n);
        }
        // known necklace counts (OEIS A000031)
        let counts: Vec<usize> = (1..=8).map(|n| necklace_representatives(n).len()).collect();
        assert_eq!(counts, vec![2, 3, 4, 6, 8, 14, 20, 36]);
    }

    #[test]
    fn pseudo_ergodic_windows() {
        assert!(is_pseudo_ergodic_window(&"+-".parse().unwrap(), 1));
        assert!(!is_pseudo_ergodic_window(&"++++".parse().unwrap(), 2));
        assert!(is_pseudo_ergodic_window(&"++--+-++".parse().unwrap(), 2));
        assert!(!is_pseudo_ergodic_window(&"+-".parse().unwrap(), 3));
        // linearised de Bruijn sequence B(2,3): all 8 patterns in 10 signs
        assert!(is_pseudo_ergodic_window(&"+++-+---++".parse().unwrap(), 3));
        assert!(!is_pseudo_ergodic_window(&"+++-+---+".parse().unwrap(), 3));
        let s = sample_iid(4000, 0.5, 3).unwrap();
        assert!(is_pseudo_ergodic_window(&s, 6));
    }

    #[test]
    fn iid_sampling() {
        assert!(sample_iid(0, 0.5, 1).unwrap().is_empty());
        assert_eq!(sample_iid(100, 0.3, 9).unwrap(), sample_iid(100, 0.3, 9).unwrap());
        assert!(matches!(sample_iid(5, 0.0, 1), Err(ModelError::Probability(_))));
        assert!(matches!(sample_iid(5, 1.0, 1), Err(ModelError::Probability(_))));
        let n = 1_000_000;
        let s = sample_iid(n, 0.5, 20_240_901).unwrap();
        let mean: f64 = s.values().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / sqrt(n as f64), "mean {mean}");
    }

    fn arb_mask(len: usize) -> impl Strategy<Value = u64> {
        0..(1u64 << len)
    }

    proptest! {
        #[test]
        fn bitmask_roundtrip(len in 0usize..40, raw in any::<u64>()) {
            let mask = if len == 0 { 0 } else { raw >> (64 - len) };
            let s = SignSeq::from_bitmask(mask, len).unwrap();
            prop_assert_eq!(s.bitmask(), Some(mask));
            let text: String = s.clone().into();
            prop_assert_eq!(text.parse::<SignSeq>().unwrap(), s);
        }

        #[test]
        fn gray_steps_flip_one_bit(len in 1usize..14) {
            let all: Vec<(u64, Option<usize>)> = {
                let mut c = EnumCursor::new(len, false);
                core::iter::from_fn(|| c.next_mask()).collect()
            };
            prop_assert_eq!(all.len(), 1 << len);
            let mut seen = vec![false; 1 << len];
            for w in all.windows(2) {
                prop_assert_eq!((w[0].0 ^ w[1].0).count_ones(), 1);
                prop_assert_eq!(w[1].1, Some((w[0].0 ^ w[1].0).trailing_zeros() as usize));
            }
            for (m, _) in all {
                prop_assert!(!seen[m as usize]);
                seen[m as usize] = true;
            }
        }

        #[test]
        fn reversal_preserves_spectrum(mask in arb_mask(9)) {
            let spec = HoppingSpec::from_mask(10, mask).unwrap();
            let rev = HoppingSpec::single(spec.sub().reversed());
            prop_assert!(multiset_close(&sorted(eig_of(&spec)), &sorted(eig_of(&rev)), 1e-10));
        }

        #[test]
        fn signature_similarity(a_mask in arb_mask(8), b_mask in arb_mask(7), c_mask in arb_mask(7)) {
            let n = 8;
            let a = SignSeq::from_bitmask(a_mask, n).unwrap();
            let b = SignSeq::from_bitmask(b_mask, n - 1).unwrap();
            let c = SignSeq::from_bitmask(c_mask, n - 1).unwrap();
            let spec = HoppingSpec::new(n, b.clone(), c.clone()).unwrap();
            // D A D entrywise
            let dense = assemble(&spec, C64::new(0.0, 0.0)).to_dense();
            let av: Vec<f64> = a.values().collect();
            let conj = CMatrix::from_fn(n, |i, j| dense[(i, j)] * av[i] * av[j]);
            let d = SignSeq::new((0..n - 1).map(|k| a.signs()[k].times(a.signs()[k + 1])).collect());
            let target = HoppingSpec::new(n, b.product(&d).unwrap(), c.product(&d).unwrap()).unwrap();
            prop_assert_eq!(&conj, &assemble(&target, C64::new(0.0, 0.0)).to_dense());
            prop_assert!(multiset_close(&sorted(eig_dense(&conj).unwrap()), &sorted(eig_of(&target)), 1e-10));
        }

        #[test]
        fn two_diagonal_reduction(b_mask in arb_mask(7), c_mask in arb_mask(7)) {
            let n = 8;
            let spec = HoppingSpec::new(
                n,
                SignSeq::from_bitmask(b_mask, n - 1).unwrap(),
                SignSeq::from_bitmask(c_mask, n - 1).unwrap(),
            ).unwrap();
            prop_assert!(multiset_close(
                &sorted(eig_of(&spec)),
                &sorted(eig_of(&spec.normalized())),
                1e-9
            ));
        }

        #[test]
        fn negation_rotates_by_i(mask in arb_mask(8)) {
            let spec = HoppingSpec::from_mask(9, mask).unwrap();
            let neg = HoppingSpec::single(spec.sub().negated());
            let rotated: Vec<C64> = eig_of(&spec).into_iter().map(|z| z * C64::new(0.0, 1.0)).collect();
            prop_assert!(multiset_close(&sorted(eig_of(&neg)), &sorted(rotated), 1e-9));
        }

        #[test]
        fn cyclic_shift_keeps_floquet_spectrum(mask in arb_mask(6), k in 0usize..64) {
            let n = 6;
            let alpha = cis(k as f64 * core::f64::consts::TAU / 64.0);
            let mut m1 = CMatrix::zeros(n);
            let mut m2 = CMatrix::zeros(n);
            assemble_periodized_mask_into(&mut m1, mask, alpha);
            assemble_periodized_mask_into(&mut m2, rotate_mask(mask, n), alpha);
            prop_assert!(multiset_close(
                &sorted(eig_dense(&m1).unwrap()),
                &sorted(eig_dense(&m2).unwrap()),
                1e-9
            ));
        }
    }
}
