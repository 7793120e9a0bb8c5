//! Buchberger's algorithm and the ideal-level operations built on it.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{unit_vector, RatMatrix};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};
use crate::univariate::UniPoly;

/// Reduced Gröbner basis: monic generators sorted by increasing leading
/// monomial, no leading monomial dividing another, tails fully reduced.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis {
    ring: Arc<Ring>,
    generators: Vec<Polynomial>,
}

/// Full reduction of `p` by `basis` (no term of the result is divisible by a
/// leading monomial of `basis`).
pub fn reduce(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let lms: Vec<(Monomial, &Polynomial)> =
        basis.iter().filter_map(|g| g.leading_monomial().map(|m| (m, g))).collect();
    let mut rest = p.clone();
    let mut remainder: Vec<(Monomial, BigRational)> = Vec::new();
    while let Some((m, c)) = rest.leading_term().cloned() {
        match lms.iter().find(|(lm, _)| lm.divides(&m)) {
            Some((lm, g)) => {
                let q = lm.quotient_of(&m).expect("divides");
                let factor = &c / g.leading_coefficient().expect("nonzero");
                rest = rest.sub_scaled(&factor, &q, g);
            }
            None => {
                rest.pop_leading_term();
                remainder.push((m, c));
            }
        }
    }
    Polynomial::from_sorted_terms(p.ring(), remainder)
}

/// The S-polynomial of two nonzero polynomials.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (mf, cf) = f.leading_term().expect("nonzero").clone();
    let (mg, cg) = g.leading_term().expect("nonzero").clone();
    let l = mf.lcm(&mg);
    let a = f.mul_term(&mf.quotient_of(&l).unwrap(), &cf.recip());
    let b = g.mul_term(&mg.quotient_of(&l).unwrap(), &cg.recip());
    &a - &b
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Builder {
    order: MonomialOrder,
    polys: Vec<Polynomial>,
    lms: Vec<Monomial>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl Builder {
    fn active_basis(&self) -> Vec<Polynomial> {
        self.polys
            .iter()
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Gebauer-Moeller installation of a new basis element.
    fn update(&mut self, h: Polynomial) {
        let hm = h.leading_monomial().expect("nonzero");
        let hi = self.polys.len();
        self.polys.push(h);
        self.lms.push(hm);
        self.active.push(false);

        let mut c: Vec<usize> = (0..hi).filter(|&k| self.active[k]).collect();
        let mut d: Vec<usize> = Vec::new();
        while let Some(g1) = c.pop() {
            let l1 = hm.lcm(&self.lms[g1]);
            let keep = hm.is_coprime(&self.lms[g1])
                || (!c.iter().any(|&g2| hm.lcm(&self.lms[g2]).divides(&l1))
                    && !d.iter().any(|&g2| hm.lcm(&self.lms[g2]).divides(&l1)));
            if keep {
                d.push(g1);
            }
        }
        let new_pairs: Vec<Pair> = d
            .into_iter()
            .filter(|&g| !hm.is_coprime(&self.lms[g]))
            .map(|g| Pair { i: g, j: hi, lcm: hm.lcm(&self.lms[g]) })
            .collect();

        let lms = &self.lms;
        self.pairs.retain(|p| {
            let strike = hm.divides(&p.lcm)
                && lms[p.i].lcm(&hm) != p.lcm
                && hm.lcm(&lms[p.j]) != p.lcm;
            !strike
        });
        self.pairs.extend(new_pairs);

        for k in 0..hi {
            if self.active[k] && hm.divides(&self.lms[k]) {
                self.active[k] = false;
            }
        }
        self.active[hi] = true;
    }

    /// Normal selection strategy: smallest lcm under the order.
    fn next_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.order;
        let mut best = 0;
        for k in 1..self.pairs.len() {
            let (a, b) = (&self.pairs[k].lcm, &self.pairs[best].lcm);
            if a.degree() < b.degree() || (a.degree() == b.degree() && order.cmp(a, b).is_lt()) {
                best = k;
            }
        }
        Some(self.pairs.swap_remove(best))
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` under `order`.
pub fn buchberger(gens: &[Polynomial], order: MonomialOrder) -> GroebnerBasis {
    assert!(!gens.is_empty(), "need at least one generator to fix the ring");
    let ring = gens[0].ring().with_order(order);
    let mut inputs: Vec<Polynomial> =
        gens.iter().filter(|g| !g.is_zero()).map(|g| g.with_ring(&ring).primitive()).collect();
    inputs.sort_by(|a, b| order.cmp(&a.leading_monomial().unwrap(), &b.leading_monomial().unwrap()));

    let mut b = Builder { order, polys: Vec::new(), lms: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    let unit = |ring: &Arc<Ring>| GroebnerBasis { ring: ring.clone(), generators: vec![Polynomial::one(ring)] };

    for f in inputs {
        let h = reduce(&f, &b.active_basis());
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return unit(&ring);
        }
        b.update(h.monic());
    }

    let mut reductions = 0usize;
    while let Some(pair) = b.next_pair() {
        let s = s_polynomial(&b.polys[pair.i], &b.polys[pair.j]);
        let h = reduce(&s, &b.active_basis());
        reductions += 1;
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return unit(&ring);
        }
        b.update(h.monic());
    }
    log::debug!("buchberger: {} pair reductions, {} polynomials", reductions, b.polys.len());

    let minimal = b.active_basis();
    let mut reduced: Vec<Polynomial> = (0..minimal.len())
        .map(|k| {
            let others: Vec<Polynomial> =
                minimal.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, p)| p.clone()).collect();
            reduce(&minimal[k], &others).monic()
        })
        .collect();
    reduced.sort_by(|a, b| order.cmp(&a.leading_monomial().unwrap(), &b.leading_monomial().unwrap()));
    GroebnerBasis { ring, generators: reduced }
}

impl GroebnerBasis {
    /// Wrap generators already known to form a Gröbner basis, e.g. the union
    /// of bases living in disjoint variable blocks.
    pub fn from_trusted(ring: &Arc<Ring>, generators: Vec<Polynomial>) -> Self {
        GroebnerBasis { ring: ring.clone(), generators }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators.iter().filter_map(Polynomial::leading_monomial).collect()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        reduce(&p.with_ring(&self.ring), &self.generators)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_one()
    }

    /// Every variable has a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        if self.is_unit_ideal() {
            return true;
        }
        let mut seen = vec![false; self.ring.nvars()];
        for m in self.leading_monomials() {
            if let Some(v) = m.pure_power_var() {
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Monomials outside the leading-monomial ideal, increasing under the order.
    pub fn standard_monomials(&self) -> Result<Vec<Monomial>> {
        if !self.is_zero_dimensional() {
            return Err(Error::NotZeroDimensional);
        }
        if self.is_unit_ideal() {
            return Ok(Vec::new());
        }
        let lms = self.leading_monomials();
        let n = self.ring.nvars();
        let mut seen: HashSet<Monomial> = HashSet::new();
        let mut queue = vec![Monomial::one()];
        seen.insert(Monomial::one());
        let mut out = Vec::new();
        while let Some(m) = queue.pop() {
            out.push(m);
            for v in 0..n {
                let next = m.mul(&Monomial::var(v));
                if !seen.contains(&next) && !lms.iter().any(|l| l.divides(&next)) {
                    seen.insert(next);
                    queue.push(next);
                }
            }
        }
        let order = self.order();
        out.sort_by(|a, b| order.cmp(a, b));
        Ok(out)
    }

    /// Matrix of `a ↦ NF(g·a)` in the standard-monomial basis.
    pub fn multiplication_matrix(&self, g: &Polynomial) -> Result<RatMatrix> {
        let basis = self.standard_monomials()?;
        let index: HashMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let d = basis.len();
        let g = g.with_ring(&self.ring);
        let mut mat = RatMatrix::zeros(d, d);
        for (j, e) in basis.iter().enumerate() {
            let nf = self.normal_form(&g.mul_term(e, &BigRational::one()));
            for (m, c) in nf.terms() {
                mat[(index[m], j)] = c.clone();
            }
        }
        Ok(mat)
    }

    /// Monic minimal polynomial of multiplication by `g`.
    pub fn minimal_polynomial(&self, g: &Polynomial) -> Result<UniPoly> {
        let m = self.multiplication_matrix(g)?;
        Ok(minimal_polynomial_of_matrix(&m))
    }

    /// Radical of a zero-dimensional ideal: adjoin the squarefree part of the
    /// minimal polynomial of every variable.
    pub fn radical_zero_dim(&self) -> Result<GroebnerBasis> {
        if !self.is_zero_dimensional() {
            return Err(Error::NotZeroDimensional);
        }
        if self.is_unit_ideal() {
            return Ok(self.clone());
        }
        let mut gens = self.generators.clone();
        for v in 0..self.ring.nvars() {
            let mu = self.minimal_polynomial(&Polynomial::var(&self.ring, v))?;
            let sf = mu.squarefree_part();
            gens.push(univariate_in_var(&sf, &self.ring, v));
        }
        Ok(buchberger(&gens, self.order()))
    }

    /// Dimension of the quotient (number of standard monomials).
    pub fn quotient_dimension(&self) -> Result<usize> {
        Ok(self.standard_monomials()?.len())
    }
}

/// `u(x_v)` as a multivariate polynomial.
pub fn univariate_in_var(u: &UniPoly, ring: &Arc<Ring>, v: usize) -> Polynomial {
    Polynomial::from_terms(
        ring,
        u.coeffs().iter().enumerate().map(|(k, c)| {
            let mut e = [0u16; crate::poly::MAX_VARS];
            e[v] = k as u16;
            (Monomial::from_exponents(&e), c.clone())
        }),
    )
}

/// Monic minimal polynomial of a multiplication matrix of a commutative
/// algebra whose basis starts with the identity element `1`.
///
/// `q(M_g) = 0` iff `q(g) = 0` in the algebra iff `q(M_g)·1 = 0`, so the
/// minimal polynomial of the matrix equals the annihilator of the first unit
/// vector, found as the first linear dependence among `1, M·1, M²·1, ...`.
pub fn minimal_polynomial_of_matrix(m: &RatMatrix) -> UniPoly {
    let d = m.rows();
    if d == 0 {
        return UniPoly::one();
    }
    // Echelon rows (pivot, reduced vector, combination of Krylov vectors),
    // each reduced against the earlier ones.
    let mut rows: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    let mut v = unit_vector(d, 0);
    for k in 0..=d {
        let mut w = v.clone();
        let mut comb = vec![BigRational::zero(); k + 1];
        comb[k] = BigRational::one();
        for (piv, r, c) in &rows {
            if w[*piv].is_zero() {
                continue;
            }
            let f = w[*piv].clone();
            for (a, b) in w.iter_mut().zip(r) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
            for (a, b) in comb.iter_mut().zip(c) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => return UniPoly::new(comb),
            Some(piv) => {
                let inv = w[piv].recip();
                let w: Vec<BigRational> = w.iter().map(|x| x * &inv).collect();
                let comb: Vec<BigRational> = comb.iter().map(|x| x * &inv).collect();
                rows.push((piv, w, comb));
            }
        }
        v = m.mul_vec(&v);
    }
    unreachable!("Krylov sequence longer than the dimension")
}

/// Check the Buchberger criterion: every S-polynomial reduces to zero.
pub fn satisfies_buchberger_criterion(gb: &GroebnerBasis) -> bool {
    let g = gb.generators();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if !reduce(&s_polynomial(&g[i], &g[j]), g).is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
fn is_monic_and_reduced(gb: &GroebnerBasis) -> bool {
    let g = gb.generators();
    let lms = gb.leading_monomials();
    g.iter().enumerate().all(|(i, p)| {
        p.leading_coefficient().is_some_and(|c| c.is_one())
            && p.terms().iter().all(|(m, _)| lms.iter().enumerate().all(|(j, l)| j == i || !l.divides(m)))
    })
}
