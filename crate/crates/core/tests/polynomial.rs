use dessin::polynomial::DEFAULT_CLUSTER_TOL;
use dessin::Poly;

mod common;
use common::*;

#[test]
fn evaluation() {
    let sq = Poly::from_real(&[0.0, 0.0, 1.0]);
    assert!((sq.eval(c(1.0, 1.0)) - c(0.0, 2.0)).norm() < 1e-15);
    assert!((six_edge().eval(c(1.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-14);
    assert!((six_edge().eval(c(-1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn derivatives() {
    let sq = Poly::from_real(&[0.0, 0.0, 1.0]);
    assert_eq!(sq.derivative(), Poly::from_real(&[0.0, 2.0]));
    let p = six_edge();
    assert_eq!(p.derivative().degree(), p.degree() - 1);

    let q = five_edge_3();
    let h = c(-0.5, 0.0);
    assert!((q.eval(h) - c(1.0, 0.0)).norm() < 1e-13);
    assert!(q.derivative().eval(h).norm() < 1e-13);
    assert!(q.nth_derivative(2).eval(h).norm() < 1e-12);
    assert!(q.nth_derivative(3).eval(h).norm() > 1.0);
}

#[test]
fn simple_roots() {
    let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
    let mut r = p.roots(DEFAULT_CLUSTER_TOL).unwrap();
    r.sort_by(|a, b| a.location.re.total_cmp(&b.location.re));
    assert_eq!(r.len(), 2);
    assert!((r[0].location - c(-1.0, 0.0)).norm() < 1e-12);
    assert!((r[1].location - c(1.0, 0.0)).norm() < 1e-12);
    assert!(r.iter().all(|x| x.multiplicity == 1));
}

#[test]
fn triple_root() {
    let p = Poly::from_real(&[-8.0, 12.0, -6.0, 1.0]);
    let r = p.roots(DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].multiplicity, 3);
    assert!((r[0].location - c(2.0, 0.0)).norm() < 1e-9);
}

#[test]
fn five_edge_one_white_clusters() {
    let p = five_edge_1().add_constant(c(-1.0, 0.0));
    let mut r = p.roots(DEFAULT_CLUSTER_TOL).unwrap();
    r.sort_by(|a, b| a.location.re.total_cmp(&b.location.re));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0].multiplicity, 4);
    assert!((r[0].location - c(-1.0 / 3.0, 0.0)).norm() < 1e-9);
    assert_eq!(r[1].multiplicity, 1);
    assert!((r[1].location - c(4.0 / 3.0, 0.0)).norm() < 1e-12);
}

#[test]
fn critical_data_examples() {
    let sq = Poly::from_real(&[0.0, 0.0, 1.0]);
    let cd = sq.critical_data(DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(cd.len(), 1);
    assert!(cd[0].point.norm() < 1e-15 && cd[0].value.norm() < 1e-15);
    assert_eq!(cd[0].local_degree, 2);

    let cheb = Poly::from_real(&[-1.0, 0.0, 2.0]);
    let cd = cheb.critical_data(DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(cd.len(), 1);
    assert!((cd[0].value - c(-1.0, 0.0)).norm() < 1e-15);

    let cd = six_edge().critical_data(DEFAULT_CLUSTER_TOL).unwrap();
    let degree_sum: usize = cd.iter().map(|p| p.local_degree - 1).sum();
    assert_eq!(degree_sum, 5);
    for p in cd {
        let off = (p.value - c(1.0, 0.0)).norm().min((p.value + c(1.0, 0.0)).norm());
        assert!(off < 1e-9, "critical value {}", p.value);
    }
}

#[test]
fn shabat_predicate() {
    assert!(!Poly::from_real(&[-1.0, 0.0, 2.0]).is_shabat(1e-9));
    assert!(five_edge_5().is_shabat(1e-9));
    assert!(!Poly::from_real(&[0.0, 0.0, 0.0, 1.0]).is_shabat(1e-9));
    assert!(six_edge().is_shabat(1e-9));
    assert!(five_edge_1().is_shabat(1e-9));
}

#[test]
fn parses_text_format() {
    let p: Poly = "1/2, 0, -3+2i, 4i".parse().unwrap();
    assert_eq!(p.coeffs(), &[c(0.5, 0.0), c(0.0, 0.0), c(-3.0, 2.0), c(0.0, 4.0)]);
    assert!("1,,2".parse::<Poly>().is_err());
    assert!("".parse::<Poly>().is_err());
}
