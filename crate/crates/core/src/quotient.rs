//! The finite-dimensional algebra `A = K[x]/I` of a zero-dimensional ideal:
//! standard-monomial basis, multiplication, idempotent splitting at rational
//! points and local dimensions.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groebner::{minimal_polynomial_of_matrix, GroebnerBasis};
use crate::linalg::{unit_vector, RatMatrix};
use crate::parser::render_rational;
use crate::poly::{rat, Monomial, Polynomial};
use crate::univariate::{eval_on_vector, rational_roots, UniPoly};

/// Coordinates over the standard-monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement(pub Vec<BigRational>);

impl AlgebraElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &BigRational) -> AlgebraElement {
        AlgebraElement(self.0.iter().map(|a| a * c).collect())
    }
}

pub struct QuotientAlgebra {
    gb: GroebnerBasis,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    var_matrices: Vec<RatMatrix>,
    basis_matrices: Vec<RatMatrix>,
    radical_dim: OnceLock<usize>,
}

impl std::fmt::Debug for QuotientAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuotientAlgebra").field("dim", &self.dim()).field("basis", &self.basis).finish()
    }
}

/// A linear form `c·x` chosen to take distinct values on the points of the variety.
#[derive(Clone, Debug)]
pub struct SeparatingForm {
    pub coefficients: Vec<i64>,
    pub form: Polynomial,
    /// Minimal polynomial of multiplication by the form.
    pub minimal_polynomial: UniPoly,
    pub attempts: usize,
}

impl SeparatingForm {
    pub fn value_at(&self, p: &[BigRational]) -> BigRational {
        self.form.evaluate(p)
    }
}

/// Coordinates of the points of a radical algebra as polynomials in a
/// separating form: `x_v = coords[v](t)` at every root `t` of `minimal_polynomial`.
#[derive(Clone, Debug)]
pub struct UnivariateRepresentation {
    pub separating: SeparatingForm,
    pub coords: Vec<UniPoly>,
    krylov_inverse: RatMatrix,
}

impl UnivariateRepresentation {
    pub fn minimal_polynomial(&self) -> &UniPoly {
        &self.separating.minimal_polynomial
    }

    /// Polynomial `q` with `a = q(ℓ)` in the algebra.
    pub fn express(&self, a: &AlgebraElement) -> UniPoly {
        UniPoly::new(self.krylov_inverse.mul_vec(a.coords()))
    }

    pub fn point_at(&self, t: &BigRational) -> Vec<BigRational> {
        self.coords.iter().map(|g| g.eval(t)).collect()
    }
}

impl QuotientAlgebra {
    pub fn new(gb: GroebnerBasis) -> Result<Self> {
        let basis = gb.standard_monomials()?;
        if basis.is_empty() {
            // Unit ideal: the zero algebra has no points; treat as not usable.
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let index: HashMap<Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let ring = gb.ring().clone();
        let var_matrices: Vec<RatMatrix> = (0..ring.nvars())
            .map(|v| gb.multiplication_matrix(&Polynomial::var(&ring, v)))
            .collect::<Result<_>>()?;
        let d = basis.len();
        let mut basis_matrices: Vec<RatMatrix> = Vec::with_capacity(d);
        for m in &basis {
            if m.is_one() {
                basis_matrices.push(RatMatrix::identity(d));
                continue;
            }
            let v = (0..ring.nvars()).find(|&v| m.exponent(v) > 0).expect("non-constant");
            let lower = Monomial::var(v).quotient_of(m).expect("divisible");
            // Standard monomials form an order ideal and are sorted, so the
            // divisor was handled earlier.
            let j = index[&lower];
            let mat = var_matrices[v].mul(&basis_matrices[j]);
            basis_matrices.push(mat);
        }
        Ok(QuotientAlgebra { gb, basis, index, var_matrices, basis_matrices, radical_dim: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn nvars(&self) -> usize {
        self.gb.ring().nvars()
    }

    pub fn var_matrix(&self, v: usize) -> &RatMatrix {
        &self.var_matrices[v]
    }

    /// Multiplication matrix of the basis element `e_i`.
    pub fn basis_matrix(&self, i: usize) -> &RatMatrix {
        &self.basis_matrices[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement(unit_vector(self.dim(), 0))
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement(vec![BigRational::zero(); self.dim()])
    }

    /// Image of a polynomial (its normal form in coordinates).
    pub fn element_of(&self, p: &Polynomial) -> AlgebraElement {
        let nf = self.gb.normal_form(p);
        let mut v = vec![BigRational::zero(); self.dim()];
        for (m, c) in nf.terms() {
            v[self.index[m]] = c.clone();
        }
        AlgebraElement(v)
    }

    fn check_len(&self, a: &AlgebraElement) -> Result<()> {
        if a.0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.0.len() });
        }
        Ok(())
    }

    /// Matrix of multiplication by `a`.
    pub fn mult_matrix(&self, a: &AlgebraElement) -> RatMatrix {
        let d = self.dim();
        let mut m = RatMatrix::zeros(d, d);
        for (i, c) in a.0.iter().enumerate() {
            m.add_scaled_assign(c, &self.basis_matrices[i]);
        }
        m
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_len(a)?;
        self.check_len(b)?;
        let mut out = vec![BigRational::zero(); self.dim()];
        for (i, c) in a.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let col = self.basis_matrices[i].mul_vec(&b.0);
            for (o, v) in out.iter_mut().zip(col) {
                *o += c * v;
            }
        }
        Ok(AlgebraElement(out))
    }

    pub fn minimal_polynomial(&self, a: &AlgebraElement) -> UniPoly {
        minimal_polynomial_of_matrix(&self.mult_matrix(a))
    }

    /// Number of distinct complex points: the dimension modulo the radical.
    pub fn radical_dimension(&self) -> Result<usize> {
        if let Some(d) = self.radical_dim.get() {
            return Ok(*d);
        }
        let d = self.gb.radical_zero_dim()?.quotient_dimension()?;
        Ok(*self.radical_dim.get_or_init(|| d))
    }

    pub fn is_reduced(&self) -> Result<bool> {
        Ok(self.radical_dimension()? == self.dim())
    }

    /// Random integer linear form whose squarefree minimal polynomial has as
    /// many roots as there are points. Coefficients come from `[-B, B]`, `B`
    /// starting at 3 and doubling after each failed attempt.
    pub fn separating_form(&self, seed: u64, max_attempts: usize) -> Result<SeparatingForm> {
        let target = self.radical_dimension()?;
        let ring = self.gb.ring().clone();
        let n = ring.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bound: i64 = 3;
        for attempt in 1..=max_attempts {
            let coefficients: Vec<i64> = loop {
                let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
                if c.iter().any(|&x| x != 0) {
                    break c;
                }
            };
            let form = Polynomial::from_terms(
                &ring,
                coefficients.iter().enumerate().map(|(v, &c)| (Monomial::var(v), rat(c))),
            );
            let mu = self.minimal_polynomial(&self.element_of(&form));
            if mu.squarefree_part().degree() == Some(target) {
                log::debug!("separating form {} after {} attempts", form, attempt);
                return Ok(SeparatingForm { coefficients, form, minimal_polynomial: mu, attempts: attempt });
            }
            bound = bound.saturating_mul(2);
        }
        Err(Error::SeparationFailed { attempts: max_attempts })
    }

    pub fn contains_point(&self, p: &[BigRational]) -> bool {
        self.gb.generators().iter().all(|g| g.evaluate(p).is_zero())
    }

    /// Idempotent projecting onto the local factor at the rational point `p`.
    pub fn idempotent_at_point(&self, sep: &SeparatingForm, p: &[BigRational]) -> Result<AlgebraElement> {
        if p.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), found: p.len() });
        }
        if !self.contains_point(p) {
            return Err(Error::PointNotOnVariety { point: render_point(p) });
        }
        let c = sep.value_at(p);
        let mu = &sep.minimal_polynomial;
        let k = mu.root_multiplicity(&c);
        if k == 0 {
            // ℓ(p) must be an eigenvalue when p is on the variety.
            return Err(Error::SeparationFailed { attempts: sep.attempts });
        }
        let local = UniPoly::linear_root(&c).pow(k);
        let cofactor = mu.div_rem(&local).0;
        let (g, _u, v) = local.xgcd(&cofactor);
        debug_assert!(g == UniPoly::one());
        let e_poly = v.mul(&cofactor).rem(mu);
        let ell = self.mult_matrix(&self.element_of(&sep.form));
        let e = AlgebraElement(eval_on_vector(&e_poly, &ell, &self.one().0));
        if self.multiply(&e, &e)? != e {
            return Err(Error::NotIdempotent);
        }
        Ok(e)
    }

    /// Rank of multiplication by an idempotent, the dimension of its local factor.
    pub fn local_dimension(&self, e: &AlgebraElement) -> Result<usize> {
        self.check_len(e)?;
        if self.multiply(e, e)? != *e {
            return Err(Error::NotIdempotent);
        }
        Ok(self.mult_matrix(e).rank())
    }

    /// Basis of the image `e·A` as algebra elements.
    pub fn image_basis(&self, e: &AlgebraElement) -> Vec<AlgebraElement> {
        let m = self.mult_matrix(e);
        m.independent_columns().into_iter().map(|j| AlgebraElement(m.column(j))).collect()
    }

    /// Univariate representation of a reduced algebra (one point per basis vector).
    pub fn univariate_representation(&self, seed: u64, max_attempts: usize) -> Result<UnivariateRepresentation> {
        if !self.is_reduced()? {
            return Err(Error::NotRadical);
        }
        let sep = self.separating_form(seed, max_attempts)?;
        let d = self.dim();
        let ell = self.mult_matrix(&self.element_of(&sep.form));
        let mut cols = vec![self.one().0];
        for _ in 1..d {
            let next = ell.mul_vec(cols.last().unwrap());
            cols.push(next);
        }
        let krylov = RatMatrix::from_columns(&cols);
        let krylov_inverse = krylov.inverse().ok_or(Error::SeparationFailed { attempts: sep.attempts })?;
        let ring = self.gb.ring().clone();
        let coords = (0..ring.nvars())
            .map(|v| UniPoly::new(krylov_inverse.mul_vec(&self.element_of(&Polynomial::var(&ring, v)).0)))
            .collect();
        Ok(UnivariateRepresentation { separating: sep, coords, krylov_inverse })
    }

    /// All points of the variety with rational coordinates. Each coordinate of
    /// such a point is a rational root of the minimal polynomial of its
    /// variable, so the candidates are finite and checked exactly.
    pub fn rational_points(&self) -> Result<Vec<Vec<BigRational>>> {
        let ring = self.gb.ring().clone();
        let mut candidates: Vec<Vec<BigRational>> = vec![Vec::new()];
        for v in 0..ring.nvars() {
            let roots = rational_roots(&self.minimal_polynomial(&self.element_of(&Polynomial::var(&ring, v))));
            if roots.is_empty() {
                return Ok(Vec::new());
            }
            candidates = candidates
                .into_iter()
                .flat_map(|prefix| {
                    roots.iter().map(move |r| {
                        let mut p = prefix.clone();
                        p.push(r.clone());
                        p
                    })
                })
                .collect();
        }
        let mut pts: Vec<Vec<BigRational>> = candidates.into_iter().filter(|p| self.contains_point(p)).collect();
        pts.sort();
        Ok(pts)
    }
}

pub fn render_point(p: &[BigRational]) -> String {
    format!("({})", p.iter().map(render_rational).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
fn is_one_element(a: &AlgebraElement) -> bool {
    use num_traits::One;
    a.0.first().is_some_and(One::is_one) && a.0.iter().skip(1).all(Zero::is_zero)
}
