//! Divided-difference tensor `T ∈ A⊗A`, the functional it determines, and the
//! symmetric bilinear form `(a, b) ↦ φ(ab)` with its inertia.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::groebner::GroebnerBasis;
use crate::linalg::RatMatrix;
use crate::matrix::PolyMatrix;
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring, MAX_VARS};
use crate::quotient::{AlgebraElement, QuotientAlgebra};

/// Element `Σ c_ij e_i⊗e_j` of `A⊗A`, stored as the `d×d` matrix `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    pub coeffs: RatMatrix,
}

impl TensorElement {
    pub fn dim(&self) -> usize {
        self.coeffs.rows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub null: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.pos as i64 - self.neg as i64
    }

    pub fn rank(&self) -> usize {
        self.pos + self.neg
    }
}

#[derive(Clone, Debug)]
pub struct GramForm {
    pub matrix: RatMatrix,
    pub inertia: Inertia,
}

impl GramForm {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        let inertia = inertia(&matrix)?;
        Ok(GramForm { matrix, inertia })
    }

    pub fn signature(&self) -> i64 {
        self.inertia.signature()
    }
}

/// Split a doubled-ring monomial into its unprimed and primed halves.
fn split(m: &Monomial, n: usize) -> (Monomial, Monomial) {
    let e = m.exponents();
    let mut a = [0u16; MAX_VARS];
    let mut b = [0u16; MAX_VARS];
    a[..n].copy_from_slice(&e[..n]);
    b[..n].copy_from_slice(&e[n..2 * n]);
    (Monomial::from_exponents(&a), Monomial::from_exponents(&b))
}

/// `[h(x'_1..x'_{j-1}, x_j, x_{j+1}..x_n) - h(x'_1..x'_j, x_{j+1}..x_n)] / (x_j - x'_j)`
/// as a polynomial in `doubled` (unprimed variables first, then primed).
pub fn divided_difference(h: &Polynomial, j: usize, doubled: &Arc<Ring>) -> Polynomial {
    let n = h.ring().nvars();
    assert_eq!(doubled.nvars(), 2 * n, "doubled ring has the wrong number of variables");
    assert!(j < n);
    let mut terms = Vec::new();
    for (m, c) in h.terms() {
        let a = m.exponent(j);
        if a == 0 {
            continue;
        }
        let mut base = [0u16; MAX_VARS];
        for k in 0..n {
            if k < j {
                base[n + k] = m.exponent(k);
            } else if k > j {
                base[k] = m.exponent(k);
            }
        }
        // (x^a - x'^a)/(x - x') = Σ_s x^s x'^(a-1-s)
        for s in 0..a {
            let mut e = base;
            e[j] += s;
            e[n + j] += a - 1 - s;
            terms.push((Monomial::from_exponents(&e), c.clone()));
        }
    }
    Polynomial::from_terms(doubled, terms)
}

/// The `n×n` matrix of divided differences `T_ij` of the components `h_i`.
pub fn divided_difference_matrix(h: &[Polynomial]) -> PolyMatrix {
    let ring = h[0].ring().clone();
    let n = ring.nvars();
    assert_eq!(h.len(), n, "need one component per variable");
    let doubled = ring.doubled();
    let entries = h
        .iter()
        .flat_map(|hi| (0..n).map(|j| divided_difference(hi, j, &doubled)).collect::<Vec<_>>())
        .collect();
    PolyMatrix::from_entries(entries)
}

/// Multiplication matrices of monomials in `A`, built lazily from the
/// variable matrices.
struct MonomialMatrices<'a> {
    algebra: &'a QuotientAlgebra,
    cache: HashMap<Monomial, RatMatrix>,
}

impl<'a> MonomialMatrices<'a> {
    fn new(algebra: &'a QuotientAlgebra) -> Self {
        let mut cache = HashMap::new();
        cache.insert(Monomial::one(), RatMatrix::identity(algebra.dim()));
        MonomialMatrices { algebra, cache }
    }

    fn get(&mut self, m: &Monomial) -> RatMatrix {
        if let Some(mat) = self.cache.get(m) {
            return mat.clone();
        }
        let v = (0..self.algebra.nvars()).find(|&v| m.exponent(v) > 0).expect("non-constant monomial");
        let lower = Monomial::var(v).quotient_of(m).expect("divisible");
        let mat = self.algebra.var_matrix(v).mul(&self.get(&lower));
        self.cache.insert(*m, mat.clone());
        mat
    }

    /// `P · C` for a doubled-ring polynomial `P`: each term `c x^α x'^β`
    /// maps `C` to `c · M_α C M_βᵀ`.
    fn apply(&mut self, p: &Polynomial, c: &RatMatrix) -> RatMatrix {
        let n = self.algebra.nvars();
        let d = self.algebra.dim();
        let mut groups: Vec<(Monomial, RatMatrix)> = Vec::new();
        let mut slot: HashMap<Monomial, usize> = HashMap::new();
        for (m, coef) in p.terms() {
            let (alpha, beta) = split(m, n);
            let i = *slot.entry(beta).or_insert_with(|| {
                groups.push((beta, RatMatrix::zeros(d, d)));
                groups.len() - 1
            });
            let ma = self.get(&alpha);
            groups[i].1.add_scaled_assign(coef, &ma);
        }
        let mut out = RatMatrix::zeros(d, d);
        for (beta, left) in groups {
            let mb = self.get(&beta);
            let term = left.mul(c).mul(&mb.transpose());
            out.add_scaled_assign(&BigRational::from_integer(1.into()), &term);
        }
        out
    }
}

/// Image of `det[T_ij]` in `A⊗A`, computed by Laplace expansion along the
/// rows from the bottom up, acting on `A⊗A` through multiplication matrices.
pub fn build_t(h: &[Polynomial], algebra: &QuotientAlgebra) -> Result<TensorElement> {
    let n = algebra.nvars();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    let t = divided_difference_matrix(h);
    let d = algebra.dim();
    let mut mats = MonomialMatrices::new(algebra);
    let mut unit = RatMatrix::zeros(d, d);
    unit[(0, 0)] = BigRational::from_integer(1.into());
    // minors[cols] = image of the minor on the last |cols| rows and columns `cols`
    let mut minors: HashMap<Vec<usize>, RatMatrix> = HashMap::new();
    minors.insert(Vec::new(), unit);
    for k in 1..=n {
        let row = n - k;
        let mut next = HashMap::new();
        for cols in crate::matrix::index_subsets(n, k) {
            let mut acc = RatMatrix::zeros(d, d);
            for (pos, &c) in cols.iter().enumerate() {
                let entry = t[(row, c)].clone();
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let sub = &minors[&rest];
                if sub.is_zero() {
                    continue;
                }
                let prod = mats.apply(&entry, sub);
                if pos % 2 == 0 {
                    acc = acc.add(&prod);
                } else {
                    acc = acc.sub(&prod);
                }
            }
            next.insert(cols, acc);
        }
        minors = next;
    }
    let full: Vec<usize> = (0..n).collect();
    Ok(TensorElement { coeffs: minors.remove(&full).expect("full minor") })
}

/// Same tensor computed literally: the determinant is expanded in the doubled
/// ring and every partial product is reduced modulo the union basis `G ∪ G'`.
/// Requires a degree-reverse-lexicographic basis. Slow; meant as a cross-check.
pub fn build_t_union_basis(h: &[Polynomial], algebra: &QuotientAlgebra) -> Result<TensorElement> {
    let gb = algebra.groebner_basis();
    if gb.order() != MonomialOrder::DegRevLex {
        return Err(Error::InvalidArgument("union-basis reduction needs a degrevlex basis".into()));
    }
    let n = algebra.nvars();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    let doubled = gb.ring().doubled();
    let left: Vec<usize> = (0..n).collect();
    let right: Vec<usize> = (n..2 * n).collect();
    let mut union: Vec<Polynomial> = gb.generators().iter().map(|g| g.map_variables(&doubled, &left)).collect();
    union.extend(gb.generators().iter().map(|g| g.map_variables(&doubled, &right)));
    let union = GroebnerBasis::from_trusted(&doubled, union);
    let t = divided_difference_matrix(h);
    let det = t.det_with(&|p| union.normal_form(&p));
    let d = algebra.dim();
    let mut coeffs = RatMatrix::zeros(d, d);
    for (m, c) in det.terms() {
        let (alpha, beta) = split(m, n);
        let i = algebra.index_of(&alpha).ok_or(Error::SingularTensor)?;
        let j = algebra.index_of(&beta).ok_or(Error::SingularTensor)?;
        coeffs[(i, j)] = c.clone();
    }
    Ok(TensorElement { coeffs })
}

/// Coordinates `φ_k = φ(e_k)` of the functional with `Σ_i φ(e_i) ê_i = 1`,
/// where `ê_i = Σ_j t_ij e_j`.
pub fn functional_phi(algebra: &QuotientAlgebra, t: &TensorElement) -> Result<Vec<BigRational>> {
    if t.dim() != algebra.dim() {
        return Err(Error::DimensionMismatch { expected: algebra.dim(), found: t.dim() });
    }
    t.coeffs.transpose().solve(algebra.one().coords()).ok_or(Error::SingularTensor)
}

pub fn apply_functional(phi: &[BigRational], a: &AlgebraElement) -> BigRational {
    crate::linalg::dot(phi, a.coords())
}

/// Gram matrix `[φ(e_i e_j)]` over the standard basis.
pub fn gram_matrix(algebra: &QuotientAlgebra, phi: &[BigRational]) -> RatMatrix {
    let d = algebra.dim();
    // φ(e_i e_j) = Σ_k φ_k (M_{e_i})_{kj}
    let rows = (0..d)
        .map(|i| {
            let m = algebra.basis_matrix(i);
            (0..d)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for (k, p) in phi.iter().enumerate() {
                        let v = &m[(k, j)];
                        if !p.is_zero() && !v.is_zero() {
                            s += p * v;
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    RatMatrix::from_rows(rows)
}

/// Inertia of a symmetric matrix by symmetric Gaussian elimination
/// (congruence diagonalization).
pub fn inertia(m: &RatMatrix) -> Result<Inertia> {
    if !m.is_square() || !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut out = Inertia { pos: 0, neg: 0, null: 0 };
    let swap = |a: &mut Vec<Vec<BigRational>>, i: usize, j: usize| {
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                swap(&mut a, k, i);
            } else {
                let off = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = off else {
                    out.null += n - k;
                    break;
                };
                // row_i += row_j, col_i += col_j gives a_ii = 2 a_ij (both diagonals are zero)
                let rj = a[j].clone();
                for (x, y) in a[i].iter_mut().zip(&rj) {
                    *x += y;
                }
                for row in a.iter_mut() {
                    let y = row[j].clone();
                    row[i] += y;
                }
                swap(&mut a, k, i);
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            out.pos += 1;
        } else {
            out.neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k + 1..n {
                if !a[k][j].is_zero() {
                    let delta = &f * &a[k][j];
                    a[i][j] -= delta;
                }
            }
        }
        for i in k + 1..n {
            a[i][k] = BigRational::zero();
            a[k][i] = BigRational::zero();
        }
    }
    Ok(out)
}

/// The form `(a, b) ↦ φ(ab)` restricted to the span of `vectors`.
pub fn restricted_gram(gram: &RatMatrix, vectors: &[AlgebraElement]) -> RatMatrix {
    let cols: Vec<Vec<BigRational>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    if cols.is_empty() {
        return RatMatrix::zeros(0, 0);
    }
    RatMatrix::from_columns(&cols).congruence(gram)
}
