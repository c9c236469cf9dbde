use std::collections::BTreeSet;

use curvetau_core::{
    branch_semigroup, semigroup, value_set, Branch, ConductorBound, Curve, Field, GeneratingFamily, Poly,
    Rational, Series, Settings,
};

fn exact(terms: &[(i64, i64)]) -> Series {
    Series::from_terms(terms.iter().map(|&(e, c)| (e, Rational::from_int(c))), None)
}

fn branch(f: &str, x: &[(i64, i64)], y: &[(i64, i64)]) -> Branch<Rational> {
    Branch::new(0, Poly::parse(f).unwrap(), exact(x), exact(y))
}

/// Closure of `gens` under addition, below `limit`.
fn numerical_semigroup(gens: &[i64], limit: i64) -> BTreeSet<i64> {
    let mut reach = vec![false; limit as usize];
    reach[0] = true;
    for v in 1..limit {
        reach[v as usize] = gens.iter().any(|&g| g <= v && reach[(v - g) as usize]);
    }
    (0..limit).filter(|&v| reach[v as usize]).collect()
}

#[test]
fn branch_semigroups_match_generator_closure() {
    let s = Settings::default();
    let cases: Vec<(Branch<Rational>, Vec<i64>)> = vec![
        (branch("Y^2 - X^3", &[(2, 1)], &[(3, 1)]), vec![2, 3]),
        (branch("Y^3 - X^4", &[(3, 1)], &[(4, 1)]), vec![3, 4]),
        (branch("Y^2 - X^5", &[(2, 1)], &[(5, 1)]), vec![2, 5]),
        (branch("Y^3 - X^5", &[(3, 1)], &[(5, 1)]), vec![3, 5]),
        (
            branch("Y^4 - 2*X^3*Y^2 + X^6 - 4*X^5*Y - X^7", &[(4, 1)], &[(6, 1), (7, 1)]),
            vec![4, 6, 13],
        ),
    ];
    for (b, gens) in cases {
        let curve = Curve::new(vec![b]).unwrap();
        let g = branch_semigroup(&curve, 0, &s).unwrap();
        let limit = 60;
        let expected = numerical_semigroup(&gens, limit);
        let got: BTreeSet<i64> = (0..limit).filter(|&v| g.contains(&[v])).collect();
        assert_eq!(got, expected, "generators {gens:?}");
        let conductor = (0..limit).rev().find(|v| !expected.contains(v)).map_or(0, |v| v + 1);
        assert_eq!(g.conductor(), &[conductor]);
    }
}

#[test]
fn transversal_smooth_branches() {
    // two smooth transversal branches: O = {f : f(0)=a} has values 0 and everything >= (1,1)
    let c = Curve::new(vec![branch("Y - X^2", &[(1, 1)], &[(2, 1)]), branch("X", &[], &[(1, 1)])]).unwrap();
    let data = semigroup(&c, &Settings::default()).unwrap();
    let g = &data.gamma.value_set;
    assert_eq!(g.conductor(), &[1, 1]);
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(g.contains(&[a, b]), (a == 0 && b == 0) || (a > 0 && b > 0), "({a},{b})");
        }
    }
}

#[test]
fn tangent_smooth_branches() {
    // I = 2, so Gamma = {0, (1,1)} ∪ ((2,2) + N^2)
    let c = Curve::new(vec![
        branch("Y - X^2", &[(1, 1)], &[(2, 1)]),
        branch("Y + X^2", &[(1, 1)], &[(2, -1)]),
    ])
    .unwrap();
    let data = semigroup(&c, &Settings::default()).unwrap();
    let g = &data.gamma.value_set;
    assert_eq!(g.conductor(), &[2, 2]);
    // X has value (1,1); Y - X^2 has (inf, 2); Y + X^2 has (2, inf)
    let members: Vec<(i64, i64)> = (0..5)
        .flat_map(|a| (0..5).map(move |b| (a, b)))
        .filter(|&(a, b)| g.contains(&[a, b]))
        .collect();
    let expected: Vec<(i64, i64)> = (0..5)
        .flat_map(|a| (0..5).map(move |b| (a, b)))
        .filter(|&(a, b)| (a, b) == (0, 0) || (a, b) == (1, 1) || (a >= 2 && b >= 2))
        .collect();
    assert_eq!(members, expected);
}

#[test]
fn conductor_search_agrees_with_certified_bound() {
    let c = Curve::new(vec![
        branch("Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
        branch("Y^2 - 2*X^3", &[(2, 2)], &[(3, 4)]),
    ])
    .unwrap();
    let s = Settings::default();
    let fam = GeneratingFamily::local_ring(&c);
    let certified = value_set(&fam, &ConductorBound::Certified(vec![8, 8]), &s).unwrap();
    let searched = value_set(&fam, &ConductorBound::Search(vec![1, 1]), &s).unwrap();
    assert_eq!(certified.value_set, searched.value_set);
}

#[test]
fn permuting_branches_permutes_the_value_set() {
    let b = vec![
        branch("Y^2 - X^3", &[(2, 1)], &[(3, 1)]),
        branch("X", &[], &[(1, 1)]),
        branch("Y", &[(1, 1)], &[]),
    ];
    let s = Settings::default();
    let c = Curve::new(b).unwrap();
    let g = semigroup(&c, &s).unwrap().gamma.value_set;
    let order = [2, 0, 1];
    let p = semigroup(&c.subcurve(&order).unwrap(), &s).unwrap().gamma.value_set;
    for alpha in g.box_points() {
        let beta: Vec<i64> = order.iter().map(|&k| alpha[k]).collect();
        assert_eq!(g.contains(&alpha), p.contains(&beta), "{alpha:?}");
    }
}
