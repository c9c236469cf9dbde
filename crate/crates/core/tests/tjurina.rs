use curvetau_core::{
    all_partitions, colength_truncation, dimca_check, tjurina_formula, truncation_oracle, Analysis, Branch, Curve,
    Field, GeneratingFamily, PartitionAnalyses, Poly, Rational, Series, Settings,
};

fn exact(terms: &[(i64, i64)]) -> Series {
    Series::from_terms(terms.iter().map(|&(e, c)| (e, Rational::from_int(c))), None)
}

fn branch(f: &str, x: &[(i64, i64)], y: &[(i64, i64)]) -> Branch<Rational> {
    Branch::new(0, Poly::parse(f).unwrap(), exact(x), exact(y))
}

fn line(c: i64) -> Branch<Rational> {
    // Y = c X
    let f = match c {
        0 => "Y".to_string(),
        c if c > 0 => format!("Y - {c}*X"),
        c => format!("Y + {}*X", -c),
    };
    branch(&f, &[(1, 1)], &[(1, c)])
}

#[test]
fn monomial_branches_are_quasihomogeneous() {
    // tau = mu = (n-1)(m-1) for Y^n = X^m with gcd(n, m) = 1
    let s = Settings::default();
    for (n, m) in [(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)] {
        let c = Curve::new(vec![branch(&format!("Y^{n} - X^{m}"), &[(n, 1)], &[(m, 1)])]).unwrap();
        let t = tjurina_formula(&Analysis::new(&c, &s).unwrap()).unwrap();
        let mu = (n - 1) * (m - 1);
        assert_eq!((t.tau, t.milnor), (mu, (mu, mu)), "Y^{n} - X^{m}");
    }
}

#[test]
fn concurrent_lines_are_sharp() {
    // r lines: homogeneous, so tau = mu = (r-1)^2 and every split attains the bound
    let s = Settings::default();
    let c = Curve::new(vec![
        branch("X", &[], &[(1, 1)]),
        line(0),
        line(1),
        line(-1),
    ])
    .unwrap();
    let a = Analysis::new(&c, &s).unwrap();
    let t = tjurina_formula(&a).unwrap();
    assert_eq!((t.tau, t.milnor), (9, (9, 9)));
    for j in all_partitions(4) {
        let (rep, v) = dimca_check(&PartitionAnalyses::new(&c, &j, &s).unwrap()).unwrap();
        assert_eq!(rep.total, 9);
        assert_eq!(v.slack, 0, "split {j:?}");
        assert!(v.holds());
    }
}

#[test]
fn tau_is_invariant_under_relabelling() {
    let s = Settings::default();
    let c = Curve::new(vec![
        branch("Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
        branch("Y - X^2", &[(1, 1)], &[(2, 1)]),
        branch("X", &[], &[(1, 1)]),
    ])
    .unwrap();
    let base = tjurina_formula(&Analysis::new(&c, &s).unwrap()).unwrap();
    for order in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
        let p = c.subcurve(&order).unwrap();
        let t = tjurina_formula(&Analysis::new(&p, &s).unwrap()).unwrap();
        assert_eq!((t.tau, t.milnor), (base.tau, base.milnor));
        let mut taus = t.branch_tau.clone();
        let mut base_taus = base.branch_tau.clone();
        taus.sort_unstable();
        base_taus.sort_unstable();
        assert_eq!(taus, base_taus);
    }
}

#[test]
fn truncation_lengths_match_linear_algebra() {
    let s = Settings::default();
    let c = Curve::new(vec![
        branch("Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
        branch("Y^2 - 2*X^3", &[(2, 2)], &[(3, 4)]),
    ])
    .unwrap();
    let a = Analysis::new(&c, &s).unwrap();
    let gamma = &a.semigroup.gamma.value_set;
    let fam = GeneratingFamily::local_ring(&c);
    for g in [[8, 8], [9, 8], [10, 13], [15, 9]] {
        let formula = colength_truncation(gamma, &g).unwrap();
        assert_eq!(formula, truncation_oracle(&fam, &g, &s).unwrap() as i64, "{g:?}");
    }
    let delta = a.jacobian.value_set();
    let jac = GeneratingFamily::jacobian(&c);
    for g in [[15, 15], [16, 18]] {
        let formula = colength_truncation(delta, &g).unwrap();
        assert_eq!(formula, truncation_oracle(&jac, &g, &s).unwrap() as i64, "{g:?}");
    }
}
