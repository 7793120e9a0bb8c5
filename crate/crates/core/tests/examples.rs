use rank2count::bilinear::{build_t, build_t_union_basis};
use rank2count::groebner::buchberger;
use rank2count::matrix::{jacobian, PolyMatrix};
use rank2count::oracle::local_degree_bruteforce;
use rank2count::parser::parse_polynomial;
use rank2count::pipeline::{check_assumptions, sigma2_count, topological_degree, Options, PointSelection};
use rank2count::poly::{rat, ratio, MonomialOrder, Polynomial, Ring};
use rank2count::quotient::QuotientAlgebra;
use rank2count::Error;

fn polys(ss: &[&str]) -> Vec<Polynomial> {
    let r = Ring::xyzw();
    ss.iter().map(|s| parse_polynomial(s, &r).unwrap()).collect()
}

fn all_points() -> Options {
    Options { sigma2: true, points: PointSelection::AllRational, ..Options::default() }
}

fn fold_map(sign: &str, w2: &str) -> Vec<Polynomial> {
    polys(&["x", "y", &format!("z^2 {w2} w^2 {sign} x*z + y*w"), &format!("{sign}z*w")])
}

#[test]
fn saddle_family_counts_and_degrees() {
    for (sign, sigma, deg) in [("+", -1, 2), ("-", 1, -2)] {
        let f = fold_map(sign, "-");
        let r = sigma2_count(&jacobian(&f), &all_points()).unwrap();
        assert_eq!(r.sigma2, Some(sigma));
        assert_eq!(r.points.iter().map(|p| p.index).sum::<i64>(), sigma);
        assert_eq!(topological_degree(&f).unwrap().degree, deg);
    }
}

#[test]
fn elliptic_family_counts_and_degrees() {
    for (sign, sigma) in [("+", -1), ("-", 1)] {
        let f = fold_map(sign, "+");
        let r = sigma2_count(&jacobian(&f), &all_points()).unwrap();
        assert_eq!(r.sigma2, Some(sigma));
        assert_eq!(topological_degree(&f).unwrap().degree, 0);
    }
}

#[test]
fn tensor_routes_agree_on_small_maps() {
    for (sign, w2) in [("+", "-"), ("-", "-"), ("+", "+"), ("-", "+")] {
        let m = jacobian(&fold_map(sign, w2));
        let algebra = QuotientAlgebra::new(buchberger(&m.minors(3), MonomialOrder::DegRevLex)).unwrap();
        let h = m.corner_minors();
        assert_eq!(build_t(&h, &algebra).unwrap(), build_t_union_basis(&h, &algebra).unwrap());
    }
}

#[test]
fn thirty_four_dimensional_map() {
    let f = polys(&["x - 2*y^2 + z*w", "y - x^2*w + 4*z^3", "z*w + 3*w + x^2", "x*z + y*w - 4*y"]);
    let r = sigma2_count(&jacobian(&f), &Options { sigma2: true, ..Options::default() }).unwrap();
    assert_eq!(r.checks.dim_a, Some(34));
    assert_eq!(r.sigma2, Some(2));
    assert_eq!(r.inertia.unwrap().null, 0);
}

#[test]
fn map_with_rank_two_line_is_rejected() {
    // Df has rank two along the whole x-axis.
    let f = polys(&["x - z^3", "y - x*z*w", "x^3 - y*z + y*w", "x^2 + y^2 + z*w"]);
    let m = jacobian(&f);
    for t in 1..4 {
        assert_eq!(m.evaluate(&[rat(t), rat(0), rat(0), rat(0)]).rank(), 2);
    }
    let c = check_assumptions(&m);
    assert!(c.p_is_unit);
    assert!(!c.zero_dimensional);
    assert!(matches!(sigma2_count(&m, &all_points()), Err(Error::ChecksFailed(_))));
}

#[test]
fn oracle_matches_local_index_on_small_maps() {
    for (sign, w2) in [("+", "-"), ("-", "-"), ("+", "+"), ("-", "+")] {
        let m = jacobian(&fold_map(sign, w2));
        let r = sigma2_count(&m, &all_points()).unwrap();
        assert_eq!(r.points.len(), 1);
        let h = m.corner_minors();
        let d = local_degree_bruteforce(&h, &r.points[0].point, &rat(1), 7).unwrap();
        assert_eq!(d, r.points[0].index);
    }
}

#[test]
fn permuted_matrix_has_degree_one_at_origin() {
    let m = PolyMatrix::from_entries(polys(&[
        "1-x", "y", "0", "0", "0", "1-z", "w", "0", "z", "0", "x", "y", "0", "0", "z^3", "w",
    ]));
    let h = m.corner_minors();
    assert_eq!(h[0], polys(&["(1-x)*(1-z)*x + y*z*w"])[0]);
    let d = local_degree_bruteforce(&h, &[rat(0), rat(0), rat(0), rat(0)], &ratio(1, 2), 0).unwrap();
    assert_eq!(d, 1);
}
