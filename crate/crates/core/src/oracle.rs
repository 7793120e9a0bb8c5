//! Brute-force local degrees for cross-checking: exact real solutions of a
//! perturbed system, counted with the signs of their Jacobian determinants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groebner::buchberger;
use crate::matrix::jacobian;
use crate::poly::{rat, MonomialOrder, Polynomial};
use crate::quotient::{QuotientAlgebra, UnivariateRepresentation};
use crate::univariate::{bisect_root, isolate_real_roots, sign_at_root, RootInterval, UniPoly};

const SEPARATION_ATTEMPTS: usize = 16;
/// Bisections allowed while deciding a sign or a ball membership.
const MAX_REFINEMENTS: usize = 2000;
const SPHERE_SAMPLES: usize = 200;
const PERTURBATION_SAMPLES: usize = 3;
const MAX_RESAMPLES: usize = 20;

/// Target width of the boxes returned by [`real_solutions`].
fn box_width() -> BigRational {
    BigRational::new(1.into(), BigInt::from(1u64 << 20))
}

/// Rational box around one real solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingBox {
    pub coords: Vec<(BigRational, BigRational)>,
    /// Isolating interval of the separating form's value at the solution.
    pub root: RootInterval,
    /// Sign of the Jacobian determinant of the system at the solution.
    pub jacobian_sign: i8,
}

impl IsolatingBox {
    pub fn width(&self) -> BigRational {
        self.coords.iter().map(|(lo, hi)| hi - lo).max().unwrap_or_else(BigRational::zero)
    }
}

/// Real points of a reduced zero-dimensional algebra, refinable on demand.
struct RealPoints {
    algebra: QuotientAlgebra,
    rep: UnivariateRepresentation,
    roots: Vec<RootInterval>,
}

impl RealPoints {
    fn new(algebra: QuotientAlgebra, seed: u64) -> Result<Self> {
        let rep = algebra.univariate_representation(seed, SEPARATION_ATTEMPTS)?;
        let roots = isolate_real_roots(rep.minimal_polynomial());
        Ok(RealPoints { algebra, rep, roots })
    }

    /// `g` as a polynomial in the separating form.
    fn express(&self, g: &Polynomial) -> UniPoly {
        self.rep.express(&self.algebra.element_of(g))
    }

    /// `Σ (x_i - p_i)² - r2` as a polynomial in the separating form.
    fn ball_polynomial(&self, p: &[BigRational], r2: &BigRational) -> UniPoly {
        let ring = self.algebra.groebner_basis().ring().clone();
        let mut d = Polynomial::constant(&ring, -r2.clone());
        for (v, c) in p.iter().enumerate() {
            let diff = &Polynomial::var(&ring, v) - &Polynomial::constant(&ring, c.clone());
            d = &d + &(&diff * &diff);
        }
        self.express(&d)
    }

    fn coord_box(&self, iv: &RootInterval) -> Vec<(BigRational, BigRational)> {
        self.rep
            .coords
            .iter()
            .map(|g| {
                if iv.is_exact() {
                    let v = g.eval(&iv.lo);
                    (v.clone(), v)
                } else {
                    g.eval_interval(&iv.lo, &iv.hi)
                }
            })
            .collect()
    }

    fn refine(&self, iv: &RootInterval) -> RootInterval {
        bisect_root(self.rep.minimal_polynomial(), iv)
    }

    /// Sign of `q(t)` at the root in `iv`, leaving `iv` refined.
    fn sign_at_root(&self, q: &UniPoly, iv: &mut RootInterval) -> i8 {
        if q.is_zero() {
            return 0;
        }
        let (sign, refined) = sign_at_root(self.rep.minimal_polynomial(), iv, q);
        *iv = refined;
        sign
    }
}

/// `None` when the system has no complex solutions.
fn reduced_algebra(system: &[Polynomial]) -> Result<Option<QuotientAlgebra>> {
    let gb = buchberger(system, MonomialOrder::DegRevLex);
    if gb.is_unit_ideal() {
        return Ok(None);
    }
    if !gb.is_zero_dimensional() {
        return Err(Error::NotZeroDimensional);
    }
    let algebra = QuotientAlgebra::new(gb)?;
    if !algebra.is_reduced()? {
        return Err(Error::NotRadical);
    }
    Ok(Some(algebra))
}

/// Real points of the system and the Jacobian determinant as a polynomial in
/// the separating form.
fn solve(system: &[Polynomial], seed: u64) -> Result<Option<(RealPoints, UniPoly)>> {
    let Some(algebra) = reduced_algebra(system)? else {
        return Ok(None);
    };
    let points = RealPoints::new(algebra, seed)?;
    let q = points.express(&jacobian(system).det());
    Ok(Some((points, q)))
}

/// Every real solution of a radical zero-dimensional square system, with the
/// sign of its Jacobian determinant.
pub fn real_solutions(system: &[Polynomial]) -> Result<Vec<IsolatingBox>> {
    let Some((points, q)) = solve(system, 0)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for root in &points.roots {
        let mut iv = root.clone();
        let s = points.sign_at_root(&q, &mut iv);
        if s == 0 {
            return Err(Error::NotRadical);
        }
        let mut coords = points.coord_box(&iv);
        for _ in 0..MAX_REFINEMENTS {
            if coords.iter().all(|(lo, hi)| hi - lo <= box_width()) {
                break;
            }
            iv = points.refine(&iv);
            coords = points.coord_box(&iv);
        }
        out.push(IsolatingBox { coords, root: iv, jacobian_sign: s });
    }
    Ok(out)
}

/// Exact rational point on the sphere of radius `r` around `p`, from the
/// inverse stereographic image of a random rational point of R³.
fn sphere_point(rng: &mut ChaCha8Rng, p: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    let u: Vec<BigRational> = (0..3).map(|_| BigRational::new(rng.gen_range(-64i64..=64).into(), 16.into())).collect();
    let n2: BigRational = u.iter().map(|c| c * c).sum();
    let den = &n2 + rat(1);
    let mut dir: Vec<BigRational> = u.iter().map(|c| c * rat(2) / &den).collect();
    dir.push((&n2 - rat(1)) / &den);
    dir.iter().zip(p).map(|(d, q)| q + d * r).collect()
}

fn max_norm(v: &[BigRational]) -> BigRational {
    v.iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
}

/// Check that the closed ball of radius `radius` around `p` meets
/// `H⁻¹(H(p))` only at `p`. Returns `false` (after logging) when the fibre
/// is not finite and the check cannot be carried out.
fn verify_isolation(shifted: &[Polynomial], p: &[BigRational], radius: &BigRational, seed: u64) -> Result<bool> {
    let gb = buchberger(shifted, MonomialOrder::DegRevLex);
    if !gb.is_zero_dimensional() {
        log::warn!("the fibre through the point is not finite; skipping the isolation check");
        return Ok(false);
    }
    let radical = QuotientAlgebra::new(gb.radical_zero_dim()?)?;
    let points = RealPoints::new(radical, seed)?;
    let at_p = points.rep.separating.value_at(p);
    let ball = points.ball_polynomial(p, &(radius * radius));
    for root in &points.roots {
        let holds_p = if root.is_exact() { root.lo == at_p } else { root.lo < at_p && at_p < root.hi };
        if holds_p {
            continue;
        }
        // points strictly outside the closed ball are fine
        if points.sign_at_root(&ball, &mut root.clone()) <= 0 {
            return Err(Error::InvalidArgument(format!(
                "another solution of H = H(p) lies within radius {}",
                crate::parser::render_rational(radius)
            )));
        }
    }
    Ok(true)
}

/// Local degree of `h` at `p`: the signed count of solutions of
/// `h = h(p) + v` inside the ball of radius `radius`, for three small random
/// rational `v` that must agree.
pub fn local_degree_bruteforce(h: &[Polynomial], p: &[BigRational], radius: &BigRational, seed: u64) -> Result<i64> {
    let n = h.len();
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    if !radius.is_positive() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let value: Vec<BigRational> = h.iter().map(|hi| hi.evaluate(p)).collect();
    let ring = h[0].ring().clone();
    let shifted: Vec<Polynomial> = h.iter().zip(&value).map(|(hi, c)| hi - &Polynomial::constant(&ring, c.clone())).collect();
    verify_isolation(&shifted, p, radius, seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_on_sphere = (0..SPHERE_SAMPLES)
        .map(|_| {
            let q = sphere_point(&mut rng, p, radius);
            max_norm(&shifted.iter().map(|s| s.evaluate(&q)).collect::<Vec<_>>())
        })
        .min()
        .expect("samples");
    if min_on_sphere.is_zero() {
        return Err(Error::InvalidArgument("h takes the value h(p) on the sphere; change the radius".into()));
    }
    let delta = &min_on_sphere / rat(64);
    log::debug!("perturbation size {}", crate::parser::render_rational(&delta));
    let r2 = radius * radius;

    let mut degrees = Vec::new();
    let mut resamples = 0;
    while degrees.len() < PERTURBATION_SAMPLES {
        let v: Vec<BigRational> =
            (0..n).map(|_| &delta * BigRational::new(BigInt::from(rng.gen_range(-1000i64..=1000)), 1000.into())).collect();
        let system: Vec<Polynomial> =
            shifted.iter().zip(&v).map(|(s, c)| s - &Polynomial::constant(&ring, c.clone())).collect();
        let sample_seed: u64 = rng.gen();
        let (points, q) = match solve(&system, sample_seed) {
            Ok(Some(s)) => s,
            Ok(None) => {
                degrees.push(0);
                continue;
            }
            Err(e @ (Error::NotRadical | Error::NotZeroDimensional | Error::SeparationFailed { .. })) => {
                resamples += 1;
                log::info!("degenerate perturbation ({e}); resampling, seed {seed}, sample {resamples}");
                if resamples > MAX_RESAMPLES {
                    return Err(e);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let ball = points.ball_polynomial(p, &r2);
        let mut degree = 0i64;
        for root in &points.roots {
            let mut iv = root.clone();
            match points.sign_at_root(&ball, &mut iv) {
                0 => return Err(Error::InvalidArgument("a solution lies on the sphere; change the radius".into())),
                s if s > 0 => continue,
                _ => {}
            }
            let s = points.sign_at_root(&q, &mut iv);
            if s == 0 {
                return Err(Error::NotRadical);
            }
            degree += i64::from(s);
        }
        log::debug!("perturbed sample {} has degree {degree}", degrees.len());
        degrees.push(degree);
    }
    if degrees.iter().any(|d| *d != degrees[0]) {
        return Err(Error::InconsistentSamples { degrees });
    }
    Ok(degrees[0])
}
