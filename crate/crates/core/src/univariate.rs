//! Dense univariate polynomials over the rationals: Euclidean algorithms,
//! squarefree parts, Sturm sequences and real-root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients are stored lowest degree first; the leading coefficient is
/// never zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("t")?,
                (1, false) => write!(f, "{a}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{a}*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `t - c`
    pub fn linear_root(c: &BigRational) -> Self {
        Self::new(vec![-c.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, rhs: &UniPoly) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &UniPoly) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &UniPoly) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc_inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = &r[k] * &lc_inv;
            for (i, dc) in d.coeffs.iter().enumerate() {
                let v = &c * dc;
                r[k - dd + i] -= v;
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, rhs: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*rhs = g`, `g` the monic gcd.
    pub fn xgcd(&self, rhs: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading_coefficient().cloned() {
            None => (Self::zero(), s0, t0),
            Some(lc) => {
                let inv = lc.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn derivative(&self) -> UniPoly {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// `u / gcd(u, u')`, made monic.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Multiplicity of `c` as a root.
    pub fn root_multiplicity(&self, c: &BigRational) -> usize {
        if self.is_zero() {
            return 0;
        }
        let lin = Self::linear_root(c);
        let mut k = 0;
        let mut u = self.clone();
        loop {
            let (q, r) = u.div_rem(&lin);
            if !r.is_zero() {
                return k;
            }
            k += 1;
            u = q;
        }
    }

    /// Primitive integer polynomial, a positive multiple of `self`.
    pub fn to_integer_primitive(&self) -> Vec<BigInt> {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Bound `B` with every complex root of modulus `< B` (Cauchy).
    pub fn root_bound(&self) -> BigRational {
        let n = self.degree().expect("root bound of zero polynomial");
        let lc = self.coeffs[n].abs();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..n] {
            let v = c.abs() / &lc;
            if v > m {
                m = v;
            }
        }
        m + BigRational::one()
    }

    /// Enclosure of the values taken on `[lo, hi]`, via interval Horner.
    pub fn eval_interval(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        let mut acc = (BigRational::zero(), BigRational::zero());
        for c in self.coeffs.iter().rev() {
            let prods = [&acc.0 * lo, &acc.0 * hi, &acc.1 * lo, &acc.1 * hi];
            let mn = prods.iter().min().unwrap().clone();
            let mx = prods.iter().max().unwrap().clone();
            acc = (mn + c, mx + c);
        }
        acc
    }
}

/// Sign of an integer polynomial at `x = a/b` (`b > 0`), from the homogenized
/// value `Σ c_i a^i b^(n-i)`, which has the sign of `p(x)`.
fn integer_sign_at(coeffs: &[BigInt], x: &BigRational) -> i8 {
    let (a, b) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    for c in coeffs.iter().rev() {
        acc = acc * a + c * &bpow;
        bpow *= b;
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm sequence `p, p', -rem(...)...` of a nonzero polynomial, every member
/// rescaled by a positive constant to a primitive integer polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<Vec<BigInt>>,
}

fn sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl SturmSequence {
    pub fn new(p: &UniPoly) -> Self {
        assert!(!p.is_zero(), "Sturm sequence of zero polynomial");
        let to_ints = |u: &UniPoly| u.to_integer_primitive();
        let from_ints = |c: &[BigInt]| UniPoly::new(c.iter().cloned().map(BigRational::from_integer).collect());
        let mut seq = vec![to_ints(p)];
        let d = p.derivative();
        if !d.is_zero() {
            seq.push(to_ints(&d));
            loop {
                let n = seq.len();
                let r = from_ints(&seq[n - 2]).rem(&from_ints(&seq[n - 1]));
                if r.is_zero() {
                    break;
                }
                seq.push(to_ints(&r.scale(&BigRational::from_integer((-1).into()))));
            }
        }
        SturmSequence { seq }
    }

    pub fn sign_variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.seq {
            let s = integer_sign_at(p, x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sign_variations(a) - self.sign_variations(b)
    }
}

/// Open interval `(lo, hi)` holding exactly one root of a squarefree
/// polynomial, or the degenerate `lo == hi` when the root is that rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }
}

/// Isolate all real roots of a squarefree polynomial, sorted increasingly.
pub fn isolate_real_roots(p: &UniPoly) -> Vec<RootInterval> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sturm = SturmSequence::new(p);
    // A power of two keeps every bisection point dyadic.
    let bound = p.root_bound();
    let mut b = BigRational::one();
    while b < bound {
        b *= BigRational::from_integer(2.into());
    }
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count_roots(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            if p.eval(&hi).is_zero() {
                out.push(RootInterval { lo: hi.clone(), hi });
            } else {
                out.push(RootInterval { lo, hi });
            }
            continue;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(2.into());
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Halve an isolating interval, keeping the root inside (squarefree `p`).
pub fn bisect_root(p: &UniPoly, iv: &RootInterval) -> RootInterval {
    if iv.is_exact() {
        return iv.clone();
    }
    let mid = iv.midpoint();
    let fm = p.eval(&mid);
    if fm.is_zero() {
        return RootInterval { lo: mid.clone(), hi: mid };
    }
    // `hi` is never a root of a non-degenerate isolating interval, while `lo`
    // may be a neighbouring root.
    let fhi = p.eval(&iv.hi);
    if sign(&fhi) != sign(&fm) {
        RootInterval { lo: mid, hi: iv.hi.clone() }
    } else {
        RootInterval { lo: iv.lo.clone(), hi: mid }
    }
}

/// Refine an isolating interval until it is narrower than `width`.
pub fn refine_root(p: &UniPoly, iv: &RootInterval, width: &BigRational) -> RootInterval {
    let mut cur = iv.clone();
    // The open-interval root may sit at `hi` only for the initial half-open
    // Sturm count; normalize that case first.
    if !cur.is_exact() && p.eval(&cur.hi).is_zero() {
        return RootInterval { lo: cur.hi.clone(), hi: cur.hi };
    }
    while !cur.is_exact() && &cur.width() >= width {
        cur = bisect_root(p, &cur);
    }
    cur
}

/// Sign of `q` at the root of the squarefree polynomial `mu` isolated by
/// `iv`. Interval evaluation on bisected intervals settles nonzero signs
/// quickly; if it has not after `INTERVAL_STEPS` bisections the sign is
/// decided exactly: zero iff the root is shared with `q`, otherwise the
/// interval is refined until `q` has no root on it.
pub fn sign_at_root(mu: &UniPoly, iv: &RootInterval, q: &UniPoly) -> (i8, RootInterval) {
    const INTERVAL_STEPS: usize = 256;
    let ints = q.to_integer_primitive();
    let mut cur = iv.clone();
    for _ in 0..INTERVAL_STEPS {
        if cur.is_exact() {
            return (integer_sign_at(&ints, &cur.lo), cur);
        }
        let (lo, hi) = q.eval_interval(&cur.lo, &cur.hi);
        if lo.is_positive() {
            return (1, cur);
        }
        if hi.is_negative() {
            return (-1, cur);
        }
        cur = bisect_root(mu, &cur);
    }
    let g = mu.gcd(q);
    // `hi` is not a root of `mu`, so a root of `g` in `(lo, hi]` is the isolated one.
    if g.degree().unwrap_or(0) > 0 && SturmSequence::new(&g).count_roots(&cur.lo, &cur.hi) > 0 {
        return (0, cur);
    }
    let sturm = SturmSequence::new(q);
    loop {
        if cur.is_exact() {
            return (integer_sign_at(&ints, &cur.lo), cur);
        }
        if integer_sign_at(&ints, &cur.lo) != 0 && sturm.count_roots(&cur.lo, &cur.hi) == 0 {
            return (integer_sign_at(&ints, &cur.hi), cur);
        }
        cur = bisect_root(mu, &cur);
    }
}

/// All rational roots of a nonzero polynomial.
///
/// A rational root `p/q` in lowest terms of a primitive integer polynomial has
/// `q | a_n`, so every rational root is an integer multiple of `1/a_n`;
/// refining each isolating interval below width `1/a_n` leaves at most two
/// candidates.
pub fn rational_roots(p: &UniPoly) -> Vec<BigRational> {
    let sf = p.squarefree_part();
    if sf.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let ints = UniPoly::new(sf.to_integer_primitive().into_iter().map(BigRational::from_integer).collect());
    let an = ints.leading_coefficient().unwrap().abs().to_integer();
    let step = BigRational::new(BigInt::one(), an.clone());
    let mut out = Vec::new();
    for iv in isolate_real_roots(&ints) {
        let iv = refine_root(&ints, &iv, &step);
        if iv.is_exact() {
            out.push(iv.lo);
            continue;
        }
        let an_r = BigRational::from_integer(an.clone());
        let k_lo = (&iv.lo * &an_r).ceil().to_integer();
        let k_hi = (&iv.hi * &an_r).floor().to_integer();
        let mut k = k_lo;
        while k <= k_hi {
            let cand = BigRational::new(k.clone(), an.clone());
            if ints.eval(&cand).is_zero() {
                out.push(cand);
            }
            k += 1;
        }
    }
    out
}

/// Evaluate `p(M)·v` by Horner's scheme for a square matrix `M`.
pub fn eval_on_vector(
    p: &UniPoly,
    m: &crate::linalg::RatMatrix,
    v: &[BigRational],
) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); v.len()];
    for c in p.coeffs().iter().rev() {
        acc = m.mul_vec(&acc);
        for (a, b) in acc.iter_mut().zip(v) {
            if !c.is_zero() && !b.is_zero() {
                *a += c * b;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};
    use proptest::prelude::*;

    #[test]
    fn sign_at_irrational_root() {
        let mu = UniPoly::from_i64(&[-2, 0, 1]);
        let roots = isolate_real_roots(&mu);
        let pos = roots.iter().find(|iv| iv.lo >= rat(0)).unwrap();
        let near = UniPoly::new(vec![ratio(-141421, 100000), rat(1)]);
        assert_eq!(sign_at_root(&mu, pos, &near).0, 1);
        assert_eq!(sign_at_root(&mu, pos, &UniPoly::new(vec![ratio(-3, 2), rat(1)])).0, -1);
        // shares the root: decided by the exact fallback
        let shared = mu.mul(&UniPoly::from_i64(&[5, 1]));
        assert_eq!(sign_at_root(&mu, pos, &shared).0, 0);
        let neg = roots.iter().find(|iv| iv.hi <= rat(0)).unwrap();
        assert_eq!(sign_at_root(&mu, neg, &UniPoly::from_i64(&[0, 1])).0, -1);
    }

    #[test]
    fn gcd_and_xgcd() {
        // (t-1)(t-2) and (t-1)(t+3)
        let a = UniPoly::from_i64(&[2, -3, 1]);
        let b = UniPoly::from_i64(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), UniPoly::from_i64(&[-1, 1]));
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn squarefree_part_removes_repeats() {
        // (t-1)^3 (t+2)
        let u = UniPoly::from_i64(&[-1, 1]).pow(3).mul(&UniPoly::from_i64(&[2, 1]));
        let sf = u.squarefree_part();
        assert_eq!(sf, UniPoly::from_i64(&[-1, 1]).mul(&UniPoly::from_i64(&[2, 1])));
        assert_eq!(sf.gcd(&sf.derivative()), UniPoly::one());
        assert_eq!(u.root_multiplicity(&rat(1)), 3);
        assert_eq!(u.root_multiplicity(&rat(5)), 0);
    }

    #[test]
    fn sturm_counts() {
        // t^3 - 2t has roots -sqrt2, 0, sqrt2
        let p = UniPoly::from_i64(&[0, -2, 0, 1]);
        let s = SturmSequence::new(&p);
        assert_eq!(s.count_roots(&rat(-10), &rat(10)), 3);
        assert_eq!(s.count_roots(&rat(0), &rat(10)), 1);
        assert_eq!(s.count_roots(&rat(-1), &rat(0)), 1);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|r| r.is_exact() && r.lo == rat(0)));
    }

    #[test]
    fn rational_roots_found() {
        // (2t - 3)(t + 5)(t^2 - 2)
        let p = UniPoly::from_i64(&[-3, 2]).mul(&UniPoly::from_i64(&[5, 1])).mul(&UniPoly::from_i64(&[-2, 0, 1]));
        let mut r = rational_roots(&p);
        r.sort();
        assert_eq!(r, vec![rat(-5), ratio(3, 2)]);
        assert!(rational_roots(&UniPoly::from_i64(&[1, 0, 1])).is_empty());
    }

    #[test]
    fn refine_narrows() {
        let p = UniPoly::from_i64(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p);
        let iv = refine_root(&p, &roots[1], &ratio(1, 1000));
        assert!(iv.width() < ratio(1, 1000));
        assert!(iv.lo < ratio(1415, 1000) && iv.hi > ratio(1414, 1000));
    }

    #[test]
    fn interval_eval_encloses() {
        let p = UniPoly::from_i64(&[1, -3, 1]);
        let (lo, hi) = p.eval_interval(&rat(0), &rat(1));
        for k in 0..=10 {
            let v = p.eval(&ratio(k, 10));
            assert!(lo <= v && v <= hi);
        }
    }

    proptest! {
        #[test]
        fn isolated_roots_match_sturm(cs in prop::collection::vec(-6i64..7, 2..7)) {
            let p = UniPoly::from_i64(&cs);
            prop_assume!(p.degree().unwrap_or(0) >= 1);
            let sf = p.squarefree_part();
            let roots = isolate_real_roots(&sf);
            let b = sf.root_bound();
            prop_assert_eq!(roots.len(), SturmSequence::new(&sf).count_roots(&-b.clone(), &b));
            for iv in &roots {
                if !iv.is_exact() {
                    prop_assert_eq!(SturmSequence::new(&sf).count_roots(&iv.lo, &iv.hi), 1);
                } else {
                    prop_assert!(sf.eval(&iv.lo).is_zero());
                }
            }
        }

        #[test]
        fn xgcd_identity(a in prop::collection::vec(-5i64..6, 1..6), b in prop::collection::vec(-5i64..6, 1..6)) {
            let (a, b) = (UniPoly::from_i64(&a), UniPoly::from_i64(&b));
            prop_assume!(!a.is_zero() || !b.is_zero());
            let (g, s, t) = a.xgcd(&b);
            prop_assert_eq!(s.mul(&a).add(&t.mul(&b)), g.clone());
            prop_assert_eq!(g, a.gcd(&b));
        }
    }
}
