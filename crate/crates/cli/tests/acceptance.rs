//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use curvetau::document::{CurveDocument, SettingsRecord};
use curvetau::report::canonical_json;
use curvetau::{dimca_report, invariants_report};
use curvetau_core::{
    all_partitions, colength_from_sets, delorme_check, dimca_check, lemma_tec_check, tjurina_formula, Analysis,
    BivariatePoly, Curve, GeneratingFamily, PartitionAnalyses, Poly, Rational, Settings,
};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(name: &str) -> CurveDocument {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.json"))).expect("corpus file");
    CurveDocument::parse(&text).expect("corpus document parses")
}

fn corpus() -> Vec<(String, CurveDocument)> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "json").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load(&n))).collect()
}

struct Check {
    count: usize,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            count: 0,
            failures: Vec::new(),
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: impl std::fmt::Display, got: T, want: T) {
        self.count += 1;
        if got != want {
            self.failures.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    }

    fn holds(&mut self, what: impl std::fmt::Display, ok: bool) {
        self.count += 1;
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn fail(&mut self, what: impl std::fmt::Display) {
        self.count += 1;
        self.failures.push(what.to_string());
    }
}

fn analysis(doc: &CurveDocument) -> (Curve<Rational>, Settings, Analysis<Rational>) {
    let curve = doc.curve().unwrap();
    curve.validate().unwrap();
    let settings = doc.settings().unwrap();
    let a = Analysis::new(&curve, &settings).unwrap();
    (curve, settings, a)
}

fn slacks(curve: &Curve<Rational>, settings: &Settings) -> Vec<i64> {
    all_partitions(curve.r())
        .iter()
        .map(|j| dimca_check(&PartitionAnalyses::new(curve, j, settings).unwrap()).unwrap().1.slack)
        .collect()
}

fn criterion_1(c: &mut Check) {
    for name in ["node", "cusp", "saito2"] {
        let start = Instant::now();
        let doc = load(name);
        let (curve, settings, a) = analysis(&doc);
        let t = tjurina_formula(&a).unwrap();
        match name {
            "node" => {
                c.eq("node tau", t.tau, 1);
                c.eq("node mu", t.milnor, (1, 1));
                c.eq("node slacks", slacks(&curve, &settings), vec![0]);
            }
            "cusp" => {
                let g = &a.semigroup.branches[0];
                let members: Vec<i64> = (0..8).filter(|&v| g.contains(&[v])).collect();
                c.eq("cusp semigroup below 8", members, vec![0, 2, 3, 4, 5, 6, 7]);
                c.eq("cusp conductor", a.semigroup.mu[0], 2);
                c.eq("cusp tau, mu", (t.tau, t.milnor.0), (2, 2));
            }
            _ => {
                c.eq("saito2 tau", (t.tau, t.tau_oracle), (15, 15));
                c.eq("saito2 mu", t.milnor, (15, 15));
                c.eq("saito2 I", t.intersections[0][1], 6);
                c.eq("saito2 decomposition", (t.branch_tau.clone(), t.corrections.clone()), (vec![2, 2], vec![0, 5]));
                c.eq("saito2 slacks", slacks(&curve, &settings), vec![0]);
            }
        }
        let took = start.elapsed();
        c.holds(format!("{name} took {took:?}"), took < Duration::from_secs(10));
    }
}

fn criterion_2(c: &mut Check) {
    let start = Instant::now();
    let (curve, settings, a) = analysis(&load("saito3"));
    let t = tjurina_formula(&a).unwrap();
    let pairs: i64 = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| t.intersections[i][j]).sum();
    let milnor_arith = t.branch_mu.iter().sum::<i64>() + 2 * pairs - 3 + 1;
    c.eq("saito3 Milnor arithmetic", milnor_arith, 40);
    c.eq("saito3 tau", (t.tau, t.tau_oracle), (40, 40));
    c.eq("saito3 mu", t.milnor, (40, 40));
    c.eq("saito3 slacks", slacks(&curve, &settings), vec![0, 0, 0]);
    let took = start.elapsed();
    c.holds(format!("saito3 took {took:?}"), took < Duration::from_secs(120));
}

fn criterion_3(c: &mut Check, docs: &[(String, CurveDocument)]) {
    let start = Instant::now();
    c.holds(format!("corpus has {} curves", docs.len()), docs.len() >= 10);
    for (name, doc) in docs {
        let (curve, settings, a) = analysis(doc);
        match tjurina_formula(&a) {
            Ok(t) => {
                c.eq(format!("{name} tau"), t.tau, t.tau_oracle);
                c.eq(format!("{name} mu"), t.milnor.0, t.milnor.1);
            }
            Err(e) => c.fail(format!("{name}: {e}")),
        }
        for j in all_partitions(curve.r()) {
            let p = PartitionAnalyses::new(&curve, &j, &settings).unwrap();
            match curvetau_core::tjurina_partition(&p) {
                Ok(rep) => c.eq(format!("{name} split {j:?}"), rep.total, a.tau_oracle()),
                Err(e) => c.fail(format!("{name} split {j:?}: {e}")),
            }
        }
    }
    let took = start.elapsed();
    c.holds(format!("corpus took {took:?}"), took < Duration::from_secs(600));
}

fn criterion_4(c: &mut Check, docs: &[(String, CurveDocument)]) {
    for (name, doc) in docs {
        let (_, _, a) = analysis(doc);
        for (label, set) in [("Gamma", &a.semigroup.gamma.value_set), ("Delta", a.jacobian.value_set())] {
            c.eq(
                format!("{name} Theta({label})"),
                set.theta_via_rm().values,
                set.theta_via_fiber().values,
            );
        }
    }
}

fn criterion_5(c: &mut Check, docs: &[(String, CurveDocument)]) {
    let hs: Vec<Poly> = ["X", "Y", "X + Y"].iter().map(|s| BivariatePoly::parse(s).unwrap()).collect();
    for (name, doc) in docs {
        let (curve, settings, a) = analysis(doc);
        for (label, comp) in [("Gamma", &a.semigroup.gamma), ("Delta", &a.jacobian.delta)] {
            match comp.check_structure() {
                Ok(rep) => c.holds(format!("{name} {label} sampled no points"), rep.box_out_points > 0),
                Err(e) => c.fail(format!("{name} {label} structure: {e}")),
            }
        }
        let theta = a.semigroup.gamma.value_set.theta_via_rm().values;
        let r = curve.r();
        let pairs: i64 = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).map(|(i, j)| a.intersections()[i][j]).sum();
        c.eq(format!("{name} sum Theta_i(Gamma)"), theta.iter().skip(1).sum::<usize>() as i64, pairs);
        let forms = colength_from_sets(a.jacobian.value_set(), &a.semigroup.gamma.value_set);
        c.eq(
            format!("{name} colength forms of O/J"),
            (forms.dimensionf, forms.codim, forms.quotient),
            (a.tau_oracle(), a.tau_oracle(), a.tau_oracle()),
        );
        for i in 0..r {
            let sub = curve.subcurve(&[i]).unwrap();
            let o = GeneratingFamily::local_ring(&sub);
            let jac = GeneratingFamily::jacobian(&sub);
            let mu = [a.semigroup.mu[i]];
            let jb = a.branch_jacobians[i].bound.clone();
            for h in &hs {
                if sub.nu_poly(h)[0].finite().is_none() {
                    continue;
                }
                for (label, inner, bound) in [("O", &o, &mu[..]), ("J", &jac, &jb[..])] {
                    match lemma_tec_check(h, &o, &mu, inner, bound, &settings) {
                        Ok((lhs, rhs)) => c.eq(format!("{name} branch {i} h={h} L={label} length shift"), lhs, rhs),
                        Err(e) => c.fail(format!("{name} branch {i} h={h}: {e}")),
                    }
                }
            }
            if a.semigroup.mu[i] > 0 {
                for h in &hs[..2] {
                    match delorme_check(&curve, i, h, &settings) {
                        Ok((lhs, rhs)) => c.eq(format!("{name} branch {i} h={h} Jacobian determinant"), lhs, rhs),
                        Err(e) => c.fail(format!("{name} branch {i} h={h}: {e}")),
                    }
                }
            }
        }
    }
}

fn criterion_6(c: &mut Check, docs: &[(String, CurveDocument)]) {
    for (name, doc) in docs {
        let (curve, settings, _) = analysis(doc);
        for j in all_partitions(curve.r()) {
            let (_, v) = dimca_check(&PartitionAnalyses::new(&curve, &j, &settings).unwrap()).unwrap();
            c.holds(format!("{name} split {j:?} first term {:?}", v.estimate), v.estimate.0 <= v.estimate.1);
            for (t, b) in &v.later_terms {
                c.holds(format!("{name} split {j:?} later term {t} > {b}"), t <= b);
            }
            c.holds(format!("{name} split {j:?} slack {}", v.slack), v.slack >= 0);
            c.holds(format!("{name} corollary {:?}", v.corollary), v.corollary.0 <= v.corollary.1);
        }
    }
}

/// The same curve with truncated coordinates lifted to twice their
/// precision, a doubled precision cap, and doubled value windows.
fn doubled(doc: &CurveDocument) -> CurveDocument {
    let curve = doc.curve().unwrap();
    let base = doc.settings().unwrap();
    let lifted: Vec<_> = curve
        .branches()
        .iter()
        .map(|b| match b.precision() {
            Some(p) => b.lifted(2 * p).unwrap(),
            None => b.clone(),
        })
        .collect();
    let settings = SettingsRecord {
        precision_cap: Some(2 * base.precision_cap),
        degree_cap: Some(2 * base.degree_cap),
        bound_multiplier: Some(2 * base.bound_multiplier),
    };
    CurveDocument::from_curve(&Curve::new(lifted).unwrap(), Some(settings)).unwrap()
}

fn criterion_7(c: &mut Check, docs: &[(String, CurveDocument)]) {
    for (name, doc) in docs {
        let wide = doubled(doc);
        let a = canonical_json(&invariants_report(doc).unwrap().canonical);
        let b = canonical_json(&invariants_report(&wide).unwrap().canonical);
        c.holds(format!("{name} invariants changed under doubling"), a == b);
        if doc.branches.len() > 1 {
            let a = canonical_json(&dimca_report(doc, None).unwrap().canonical);
            let b = canonical_json(&dimca_report(&wide, None).unwrap().canonical);
            c.holds(format!("{name} splits changed under doubling"), a == b);
        }
    }
}

fn main() {
    let docs = corpus();
    let criteria: Vec<(&str, Box<dyn Fn(&mut Check)>)> = vec![
        ("golden curves", Box::new(criterion_1)),
        ("three-branch quasihomogeneous family", Box::new(criterion_2)),
        ("formulas vs oracles on the corpus", Box::new(|c| criterion_3(c, &docs))),
        ("Theta two ways", Box::new(|c| criterion_4(c, &docs))),
        ("structure identities", Box::new(|c| criterion_5(c, &docs))),
        ("bound certificates", Box::new(|c| criterion_6(c, &docs))),
        ("stability under doubling", Box::new(|c| criterion_7(c, &docs))),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let mut check = Check::new();
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&mut check)));
        if let Err(p) = outcome {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            check.fail(format!("panicked: {msg}"));
        }
        let status = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {status} {title} ({} checks, {:.2?})",
            k + 1,
            check.count,
            start.elapsed()
        );
        for f in &check.failures {
            println!("    {f}");
        }
        failed += usize::from(!check.failures.is_empty());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
