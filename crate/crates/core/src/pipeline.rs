//! End-to-end computations: hypothesis checks, regularization, the signed
//! count of rank-two points, local indices and topological degrees.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bilinear::{build_t, functional_phi, gram_matrix, restricted_gram, GramForm, Inertia};
use crate::error::{Error, Result};
use crate::groebner::{buchberger, GroebnerBasis};
use crate::linalg::RatMatrix;
use crate::matrix::{jacobian, sandwich, PolyMatrix};
use crate::parser::{Mode, ProblemSpec};
use crate::poly::{MonomialOrder, Polynomial};
use crate::quotient::{render_point, QuotientAlgebra};

/// Attempts allowed when searching for a separating linear form.
const SEPARATION_ATTEMPTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularization {
    pub l1: RatMatrix,
    pub l2: RatMatrix,
    /// Number of random pairs tried; zero when no change was needed.
    pub attempts: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    /// The 2×2 minors generate the unit ideal.
    pub p_is_unit: bool,
    /// The 3×3 minors cut out a finite set.
    pub zero_dimensional: bool,
    pub dim_a: Option<usize>,
    /// `S + ⟨det A⟩` is the unit ideal (after regularization, if any).
    pub s_plus_det_a_unit: bool,
    pub regularization: Option<Regularization>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.p_is_unit && self.zero_dimensional && self.s_plus_det_a_unit
    }

    pub fn failure_summary(&self) -> String {
        let mut out = Vec::new();
        if !self.p_is_unit {
            out.push("the 2x2 minors do not generate the unit ideal (m has rank below 2 somewhere)");
        }
        if !self.zero_dimensional {
            out.push("variety of S is not finite (the 3x3 minors are not zero-dimensional)");
        }
        if !self.s_plus_det_a_unit {
            out.push("det A vanishes somewhere on the variety of S");
        }
        if out.is_empty() {
            "none".to_string()
        } else {
            out.join("; ")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointResult {
    pub point: Vec<BigRational>,
    pub index: i64,
    pub local_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeResult {
    pub degree: i64,
    pub inertia: Inertia,
    pub dim: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: CheckReport,
    pub sigma2: Option<i64>,
    pub signature: Option<i64>,
    pub inertia: Option<Inertia>,
    pub points: Vec<PointResult>,
    pub degree: Option<DegreeResult>,
    pub timings: Vec<(String, Duration)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum PointSelection {
    #[default]
    None,
    Given(Vec<Vec<BigRational>>),
    /// Every point of the variety of `S` with rational coordinates.
    AllRational,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub max_retries: usize,
    /// Apply a random `(L1, L2)` even when the unregularized matrix passes.
    pub force_regularization: bool,
    pub sigma2: bool,
    pub degree: bool,
    pub points: PointSelection,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            max_retries: 8,
            force_regularization: false,
            sigma2: false,
            degree: false,
            points: PointSelection::None,
        }
    }
}

struct Timer(Vec<(String, Duration)>);

impl Timer {
    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        log::info!("{label}: {:.1} ms", elapsed.as_secs_f64() * 1e3);
        self.0.push((label.to_string(), elapsed));
        out
    }
}

fn det_a_unit(s: &GroebnerBasis, m: &PolyMatrix) -> bool {
    let mut gens = s.generators().to_vec();
    gens.push(m.block_a().det());
    buchberger(&gens, MonomialOrder::DegRevLex).is_unit_ideal()
}

/// Checks plus the basis of `S` when it is usable.
fn analyze(m: &PolyMatrix) -> (CheckReport, GroebnerBasis) {
    let p = buchberger(&m.minors(2), MonomialOrder::DegRevLex);
    let s = buchberger(&m.minors(3), MonomialOrder::DegRevLex);
    let zero_dimensional = !s.is_unit_ideal() && s.is_zero_dimensional();
    let dim_a = if zero_dimensional { s.quotient_dimension().ok() } else { None };
    let report = CheckReport {
        p_is_unit: p.is_unit_ideal(),
        zero_dimensional,
        dim_a,
        s_plus_det_a_unit: det_a_unit(&s, m),
        regularization: None,
    };
    (report, s)
}

pub fn check_assumptions(m: &PolyMatrix) -> CheckReport {
    analyze(m).0
}

fn random_positive_matrix(rng: &mut ChaCha8Rng, bound: i64) -> RatMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        let l = RatMatrix::from_i64(&rows);
        if l.det().is_positive() {
            return l;
        }
    }
}

fn regularize_with(
    m: &PolyMatrix,
    s: &GroebnerBasis,
    seed: u64,
    max_retries: usize,
    force: bool,
) -> Result<(PolyMatrix, Regularization)> {
    if !force && det_a_unit(s, m) {
        let id = RatMatrix::identity(4);
        return Ok((m.clone(), Regularization { l1: id.clone(), l2: id, attempts: 0, seed }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bound: i64 = 3;
    for attempt in 1..=max_retries {
        let l1 = random_positive_matrix(&mut rng, bound);
        let l2 = random_positive_matrix(&mut rng, bound);
        let candidate = sandwich(&l1, m, &l2);
        if det_a_unit(s, &candidate) {
            log::debug!("regularized after {attempt} attempts");
            return Ok((candidate, Regularization { l1, l2, attempts: attempt, seed }));
        }
        bound = bound.saturating_mul(2);
    }
    Err(Error::RegularizationFailed { attempts: max_retries, seed })
}

/// Random `m' = L1·m·L2` (`det L1, det L2 > 0`) with `S + ⟨det A(m')⟩` the unit
/// ideal. Returns `m` itself with identity factors when it already qualifies.
pub fn regularize(m: &PolyMatrix, seed: u64, max_retries: usize) -> Result<(PolyMatrix, Regularization)> {
    let s = buchberger(&m.minors(3), MonomialOrder::DegRevLex);
    regularize_with(m, &s, seed, max_retries, false)
}

/// The non-degenerate form `Φ` attached to `h` on `A`.
fn signature_form(h: &[Polynomial], algebra: &QuotientAlgebra, timer: &mut Timer) -> Result<GramForm> {
    let t = timer.time("tensor", || build_t(h, algebra))?;
    let phi = functional_phi(algebra, &t)?;
    let gram = timer.time("form", || GramForm::new(gram_matrix(algebra, &phi)))?;
    let Inertia { pos, neg, null } = gram.inertia;
    if null != 0 {
        return Err(Error::DegenerateForm { pos, neg, null });
    }
    Ok(gram)
}

fn local_result(
    algebra: &QuotientAlgebra,
    gram: &GramForm,
    p: &[BigRational],
    seed: u64,
) -> Result<PointResult> {
    let sep = algebra.separating_form(seed, SEPARATION_ATTEMPTS)?;
    let e = algebra.idempotent_at_point(&sep, p)?;
    let block = algebra.image_basis(&e);
    let local = crate::bilinear::inertia(&restricted_gram(&gram.matrix, &block))?;
    if local.null != 0 {
        return Err(Error::DegenerateForm { pos: local.pos, neg: local.neg, null: local.null });
    }
    Ok(PointResult { point: p.to_vec(), index: local.signature(), local_dim: block.len() })
}

fn count(m: &PolyMatrix, options: &Options, timer: &mut Timer) -> Result<Report> {
    let (mut checks, s) = timer.time("checks", || analyze(m));
    if !checks.p_is_unit || !checks.zero_dimensional {
        return Err(Error::ChecksFailed(Box::new(checks)));
    }
    let regularized = timer.time("regularize", || {
        regularize_with(m, &s, options.seed, options.max_retries, options.force_regularization)
    });
    let (m_reg, reg) = match regularized {
        Ok(r) => r,
        Err(e) => {
            log::warn!("{e}");
            return Err(Error::ChecksFailed(Box::new(checks)));
        }
    };
    checks.s_plus_det_a_unit = true;
    checks.regularization = Some(reg);
    let algebra = timer.time("quotient", || QuotientAlgebra::new(s))?;
    let h = m_reg.corner_minors();
    let gram = signature_form(&h, &algebra, timer)?;
    let sig = gram.signature();
    let points = match &options.points {
        PointSelection::None => Vec::new(),
        PointSelection::Given(ps) => ps.clone(),
        PointSelection::AllRational => timer.time("points", || algebra.rational_points())?,
    };
    let mut results = Vec::new();
    for p in &points {
        if p.len() != algebra.nvars() {
            return Err(Error::DimensionMismatch { expected: algebra.nvars(), found: p.len() });
        }
        if !algebra.contains_point(p) {
            return Err(Error::PointNotOnVariety { point: render_point(p) });
        }
        results.push(timer.time("local", || local_result(&algebra, &gram, p, options.seed))?);
    }
    Ok(Report {
        checks,
        sigma2: Some(sig),
        signature: Some(sig),
        inertia: Some(gram.inertia),
        points: results,
        ..Report::default()
    })
}

/// Signed count of the points where `m` drops to rank two.
pub fn sigma2_count(m: &PolyMatrix, options: &Options) -> Result<Report> {
    let mut timer = Timer(Vec::new());
    let mut report = count(m, options, &mut timer)?;
    report.timings = timer.0;
    Ok(report)
}

/// `(index, local dimension)` of `m` at a rational point of the variety of `S`.
pub fn local_index(m: &PolyMatrix, p: &[BigRational], options: &Options) -> Result<(i64, usize)> {
    let opts = Options { points: PointSelection::Given(vec![p.to_vec()]), ..options.clone() };
    let report = sigma2_count(m, &opts)?;
    let r = &report.points[0];
    Ok((r.index, r.local_dim))
}

fn degree_with(f: &[Polynomial], timer: &mut Timer) -> Result<DegreeResult> {
    let gb = timer.time("degree basis", || buchberger(f, MonomialOrder::DegRevLex));
    if gb.is_unit_ideal() {
        // no zeros at all
        return Ok(DegreeResult { degree: 0, inertia: Inertia { pos: 0, neg: 0, null: 0 }, dim: 0 });
    }
    if !gb.is_zero_dimensional() {
        return Err(Error::NotZeroDimensional);
    }
    let algebra = QuotientAlgebra::new(gb)?;
    let gram = signature_form(f, &algebra, timer)?;
    Ok(DegreeResult { degree: gram.signature(), inertia: gram.inertia, dim: algebra.dim() })
}

/// Sum of local degrees of `f` over its real zeros; the degree of
/// `x ↦ f(x)/|f(x)|` on a large sphere when `f` is proper.
pub fn topological_degree(f: &[Polynomial]) -> Result<DegreeResult> {
    degree_with(f, &mut Timer(Vec::new()))
}

/// Run the computations requested in `options` on a parsed problem.
pub fn run(problem: &ProblemSpec, options: &Options) -> Result<Report> {
    let mut timer = Timer(Vec::new());
    let m = match problem.mode {
        Mode::Map => jacobian(&problem.entries),
        Mode::Matrix => PolyMatrix::from_entries(problem.entries.clone()),
    };
    if options.degree && problem.mode != Mode::Map {
        return Err(Error::InvalidArgument("the degree needs a map, not a matrix".into()));
    }
    let wants_count = options.sigma2 || options.points != PointSelection::None;
    let mut report = if wants_count {
        count(&m, options, &mut timer)?
    } else {
        let checks = timer.time("checks", || check_assumptions(&m));
        Report { checks, ..Report::default() }
    };
    if options.degree {
        report.degree = Some(degree_with(&problem.entries, &mut timer)?);
    }
    report.timings = timer.0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_polynomial;
    use crate::poly::{rat, Ring};

    fn polys(ss: &[&str]) -> Vec<Polynomial> {
        let r = Ring::xyzw();
        ss.iter().map(|s| parse_polynomial(s, &r).unwrap()).collect()
    }

    fn matrix(ss: &[&str]) -> PolyMatrix {
        PolyMatrix::from_entries(polys(ss))
    }

    #[test]
    fn zero_matrix_fails_rank_check() {
        let m = matrix(&["0"; 16]);
        let c = check_assumptions(&m);
        assert!(!c.p_is_unit);
        assert!(!c.zero_dimensional);
        assert_eq!(c.dim_a, None);
        assert!(matches!(sigma2_count(&m, &Options::default()), Err(Error::ChecksFailed(_))));
    }

    #[test]
    fn identity_degree() {
        let d = topological_degree(&polys(&["x", "y", "z", "w"])).unwrap();
        assert_eq!(d.degree, 1);
        let d = topological_degree(&polys(&["x", "y", "z", "-w"])).unwrap();
        assert_eq!(d.degree, -1);
        let d = topological_degree(&polys(&["x^3", "y", "z", "w"])).unwrap();
        assert_eq!(d.degree, 1);
        assert_eq!(d.dim, 3);
        let d = topological_degree(&polys(&["x^2", "y", "z", "w"])).unwrap();
        assert_eq!(d.degree, 0);
    }

    #[test]
    fn degree_of_system_without_zeros() {
        let d = topological_degree(&polys(&["x^2 + 1", "y", "z", "w"])).unwrap();
        assert_eq!(d.degree, 0);
        assert!(matches!(topological_degree(&polys(&["x", "y", "z", "0"])), Err(Error::NotZeroDimensional)));
    }

    #[test]
    fn regularization_is_identity_when_not_needed() {
        let f = polys(&["x", "y", "z^2 - w^2 + x*z + y*w", "z*w"]);
        let (m2, reg) = regularize(&jacobian(&f), 0, 8).unwrap();
        assert_eq!(reg.attempts, 0);
        assert_eq!(reg.l1, RatMatrix::identity(4));
        assert_eq!(m2, jacobian(&f));
    }

    #[test]
    fn failure_summary_lists_checks() {
        let c = CheckReport { p_is_unit: true, ..CheckReport::default() };
        let s = c.failure_summary();
        assert!(s.contains("variety of S is not finite"));
        assert!(s.contains("det A"));
        assert!(!s.contains("2x2"));
    }

    #[test]
    fn point_off_variety_rejected() {
        let f = polys(&["x", "y", "z^2 - w^2 + x*z + y*w", "z*w"]);
        let p = vec![rat(1), rat(0), rat(0), rat(0)];
        let r = local_index(&jacobian(&f), &p, &Options::default());
        assert!(matches!(r, Err(Error::PointNotOnVariety { .. })));
    }
}
