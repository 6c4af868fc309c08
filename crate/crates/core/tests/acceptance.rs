//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Desk-scale bounds: exhaustive enumeration uses terms of at most 5 or
//! 6 nodes at scopes up to 2 or 3; "all unscoped terms of <= 6 nodes"
//! means all trees with free indices below 6, which is every shape a
//! 6-node term can take.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bindsig::models::{
    broken_subst_model, check_fold_morphism, check_model_laws, fold, swap_model, syntax_model,
    LawCheckOptions, Model,
};
use bindsig::scoped::{enumerate_terms, random_subst, random_term, ScopedTerm, Subst};
use bindsig::signature::{
    check_morphism, lc_signature, nat_ty, pcf_signature, pcf_type_grammar, retype_signature,
    star_ty, ulc_signature, ulc_type_grammar, BindingSignature, SigMorphism, TypeExpr,
    TypedLabel, TypeMap,
};
use bindsig::typed::pcf::{
    beta_normalize, church_if, church_nat, church_true, pcf_star_shape, pcf_to_ulc,
    random_pcf_context, random_pcf_subst, random_pcf_term, random_pcf_type, y_combinator,
    DEFAULT_BETA_FUEL,
};
use bindsig::typed::{typecheck, Context, TypedTerm, TypedTermExpr};
use bindsig::unscoped::{
    probe_support, transport_scoped_model, transport_unscoped_model, ufold,
    unscoped_syntax_model, intersectionality_check, TransportOptions,
    UnscopedTerm,
};

/// Every substitution `m -> n` whose entries are enumerated terms of at
/// most `entry_nodes` nodes.
fn all_substs(sig: &BindingSignature, m: usize, n: usize, entry_nodes: usize) -> Vec<Subst> {
    let entries = enumerate_terms(sig, n, entry_nodes);
    if m == 0 {
        return vec![Subst::new(Vec::new(), n).unwrap()];
    }
    if entries.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let chosen: Vec<ScopedTerm> = idx.iter().map(|&i| entries[i].clone()).collect();
        out.push(Subst::new(chosen, n).unwrap());
        let mut pos = m;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < entries.len() {
                break;
            }
            idx[pos] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    out
}

/// All unscoped terms of at most `max_nodes` nodes with free indices
/// below `max_nodes`: enumerate at the widest scope and erase (erasure
/// at a fixed scope is injective).
fn all_unscoped(sig: &BindingSignature, max_nodes: usize) -> Vec<UnscopedTerm> {
    enumerate_terms(sig, max_nodes, max_nodes)
        .iter()
        .map(ScopedTerm::to_unscoped)
        .collect()
}

fn random_law_cases(sig: &BindingSignature, seed: u64, cases: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut produced = 0;
    let mut attempts = 0;
    while produced < cases && attempts < cases * 30 {
        attempts += 1;
        let m = rng.random_range(0..=2usize);
        let n = rng.random_range(0..=2usize);
        let p = rng.random_range(0..=2usize);
        let (Some(term), Some(sigma), Some(delta)) = (
            random_term(sig, m, 5, &mut rng),
            random_subst(sig, m, n, 3, &mut rng),
            random_subst(sig, n, p, 3, &mut rng),
        ) else {
            continue;
        };
        let assoc_lhs = term.substitute(&sigma).unwrap().substitute(&delta).unwrap();
        let assoc_rhs = term.substitute(&sigma.compose(&delta).unwrap()).unwrap();
        if assoc_lhs != assoc_rhs {
            failures += 1;
        }
        if term.substitute(&Subst::identity(m)).unwrap() != term {
            failures += 1;
        }
        for i in 0..m {
            let var = ScopedTerm::var(i, m).unwrap();
            if &var.substitute(&sigma).unwrap() != sigma.entry(i).unwrap() {
                failures += 1;
            }
        }
        produced += 1;
    }
    assert_eq!(produced, cases, "random case generation starved");
    failures
}

#[test]
fn c01_substitution_monoid_laws() {
    let start = Instant::now();
    let sig = lc_signature();
    let mut failures = 0usize;

    for m in 0..=2usize {
        let terms = enumerate_terms(&sig, m, 5);
        // Right unit.
        for term in &terms {
            if term.substitute(&Subst::identity(m)).unwrap() != *term {
                failures += 1;
            }
        }
        for n in 0..=2usize {
            let sigmas = all_substs(&sig, m, n, 3);
            // Left unit: var(i)[sigma] = sigma(i).
            for sigma in &sigmas {
                for i in 0..m {
                    let var = ScopedTerm::var(i, m).unwrap();
                    if &var.substitute(sigma).unwrap() != sigma.entry(i).unwrap() {
                        failures += 1;
                    }
                }
            }
            for p in 0..=2usize {
                let deltas = all_substs(&sig, n, p, 3);
                let composites: Vec<Vec<Subst>> = sigmas
                    .iter()
                    .map(|s| deltas.iter().map(|d| s.compose(d).unwrap()).collect())
                    .collect();
                for term in &terms {
                    for (si, sigma) in sigmas.iter().enumerate() {
                        let once = term.substitute(sigma).unwrap();
                        for (di, delta) in deltas.iter().enumerate() {
                            let lhs = once.substitute(delta).unwrap();
                            let rhs = term.substitute(&composites[si][di]).unwrap();
                            if lhs != rhs {
                                failures += 1;
                            }
                        }
                    }
                }
            }
        }
    }

    failures += random_law_cases(&sig, 42, 1000);
    failures += random_law_cases(&pcf_star_shape(), 42, 1000);

    let elapsed = start.elapsed();
    assert_eq!(failures, 0);
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget is 60s");
    println!("ACCEPTANCE C1 substitution-monoid-laws: PASS ({elapsed:?})");
}

#[test]
fn c02_fold_is_a_morphism() {
    let sig = lc_signature();

    fn exhaustive_fold_morphism<M: Model>(sig: &BindingSignature, model: &M) -> usize {
        let mut failures = 0;
        for m in 0..=2usize {
            let terms = enumerate_terms(sig, m, 5);
            for n in 0..=2usize {
                for sigma in all_substs(sig, m, n, 3) {
                    let env: Vec<M::Value> = sigma
                        .entries()
                        .iter()
                        .map(|e| fold(model, e).unwrap())
                        .collect();
                    for term in &terms {
                        let lhs = fold(model, &term.substitute(&sigma).unwrap()).unwrap();
                        let rhs = model.subst(&fold(model, term).unwrap(), &env, m, n);
                        if lhs != rhs {
                            failures += 1;
                        }
                    }
                }
            }
            for i in 0..m {
                let var = ScopedTerm::var(i, m).unwrap();
                if fold(model, &var).unwrap() != model.var(i, m) {
                    failures += 1;
                }
            }
        }
        failures
    }

    assert_eq!(exhaustive_fold_morphism(&sig, &syntax_model(&sig)), 0);
    assert_eq!(exhaustive_fold_morphism(&sig, &swap_model(&sig).unwrap()), 0);

    // The broken model must be caught with a small witness.
    let broken = broken_subst_model(&sig);
    let opts = LawCheckOptions { samples: 0, seed: 42, max_nodes: 5, max_scope: 2 };
    let report = check_fold_morphism(&broken, &sig, &opts);
    assert!(!report.passed(), "broken model escaped the harness");
    assert!(!report.failures.is_empty());
    let compat = check_model_laws(&broken, &sig, &opts)
        .into_iter()
        .find(|r| r.law == "op-subst-compat")
        .unwrap();
    assert!(!compat.passed());

    println!("ACCEPTANCE C2 fold-is-a-morphism: PASS");
}

#[test]
fn c03_representation_roundtrips() {
    let sig = lc_signature();

    // to_unscoped . to_scoped = id on all unscoped terms of <= 6 nodes.
    let unscoped = all_unscoped(&sig, 6);
    assert!(unscoped.len() > 4000, "enumeration bound unexpectedly small");
    for u in &unscoped {
        assert_eq!(u.to_scoped().to_unscoped(), *u);
    }

    // to_scoped . to_unscoped = id on minimal-scope terms of <= 6 nodes.
    for scope in 0..=3usize {
        for term in enumerate_terms(&sig, scope, 6) {
            let u = term.to_unscoped();
            if u.support() == scope {
                assert_eq!(u.to_scoped(), term);
            }
        }
    }

    // Transported models round-trip to bijections on enumerated syntax.
    let opts = TransportOptions::default();
    let scoped_side =
        transport_unscoped_model(unscoped_syntax_model(&sig), &sig, &opts).unwrap();
    for scope in 0..=3usize {
        for term in enumerate_terms(&sig, scope, 6) {
            // Fold into the transported model, then back by restriction.
            let image = fold(&scoped_side, &term).unwrap();
            assert_eq!(image, term.to_unscoped());
            assert_eq!(image.to_scoped_at(scope).unwrap(), term);
        }
    }
    let unscoped_side = transport_scoped_model(syntax_model(&sig), &sig, &opts).unwrap();
    for u in all_unscoped(&sig, 6) {
        let class = ufold(&unscoped_side, &u).unwrap();
        assert_eq!(class.value(), &u.to_scoped());
        assert_eq!(class.value().to_unscoped(), u);
    }
    // Round trip through both transports.
    let both = transport_scoped_model(
        transport_unscoped_model(unscoped_syntax_model(&sig), &sig, &opts).unwrap(),
        &sig,
        &opts,
    )
    .unwrap();
    for u in all_unscoped(&sig, 6) {
        assert_eq!(ufold(&both, &u).unwrap().value(), &u);
    }

    println!("ACCEPTANCE C3 representation-roundtrips: PASS");
}

#[test]
fn c04_transports_preserve_the_initial_model() {
    let sig = lc_signature();
    let opts = TransportOptions::default();

    // Unscoped syntax transported to the scoped side, against scoped
    // syntax: phi erases the scope, psi restores it. Mutual inverses and
    // substitution-compatibility exhibit the isomorphism.
    let transported =
        transport_unscoped_model(unscoped_syntax_model(&sig), &sig, &opts).unwrap();
    for scope in 0..=3usize {
        for term in enumerate_terms(&sig, scope, 6) {
            let phi = term.to_unscoped();
            assert_eq!(phi.to_scoped_at(scope).unwrap(), term);
            assert_eq!(fold(&transported, &term).unwrap(), phi);
        }
    }
    for m in 0..=2usize {
        for term in enumerate_terms(&sig, m, 4) {
            for sigma in all_substs(&sig, m, 1, 2) {
                let phi_env: Vec<UnscopedTerm> =
                    sigma.entries().iter().map(ScopedTerm::to_unscoped).collect();
                let lhs = transported.subst(&term.to_unscoped(), &phi_env, m, 1);
                let rhs = term.substitute(&sigma).unwrap().to_unscoped();
                assert_eq!(lhs, rhs);
            }
        }
    }

    // Scoped syntax transported to the unscoped side, against unscoped
    // syntax: phi takes the representative's tree, psi re-scopes at the
    // support.
    let transported = transport_scoped_model(syntax_model(&sig), &sig, &opts).unwrap();
    let reference = unscoped_syntax_model(&sig);
    for u in all_unscoped(&sig, 6) {
        let class = ufold(&transported, &u).unwrap();
        let phi = class.value().to_unscoped();
        assert_eq!(phi, ufold(&reference, &u).unwrap());
        let psi = transported.class_of(phi.support(), phi.to_scoped());
        assert_eq!(psi, class);
    }

    println!("ACCEPTANCE C4 transports-preserve-initial-model: PASS");
}

#[test]
fn c05_support_oracle_agreement() {
    let sig = lc_signature();
    let mut checked = 0;
    for u in all_unscoped(&sig, 6) {
        assert_eq!(probe_support(&u), u.support(), "disagreement on {u}");
        checked += 1;
    }
    assert!(checked > 4000);
    println!("ACCEPTANCE C5 support-oracle-agreement: PASS (n={checked})");
}

#[test]
fn c06_intersectionality() {
    // The lambda calculus and the untyped shape of the star-typed
    // lambda calculus.
    let lc = lc_signature();
    let ulc = ulc_signature();
    let ulc_shape = BindingSignature::new(
        ulc.families()
            .iter()
            .map(|(name, _)| {
                let arity = ulc.arity_of(&TypedLabel::simple(name.clone())).unwrap();
                let binders: Vec<usize> =
                    arity.args.iter().map(|a| a.bound.len()).collect();
                (name.clone(), binders.into())
            })
            .collect(),
    )
    .unwrap();

    for sig in [&lc, &ulc_shape] {
        let report = intersectionality_check(sig, 6);
        assert!(report.passed(), "{report}");
        assert!(report.per_size.iter().any(|&(_, closed, _)| closed > 0));
    }

    let binary = bindsig::signature::parse_signature("(sig (bin 0 0))").unwrap();
    let report = intersectionality_check(&binary, 6);
    assert!(report.passed(), "{report}");
    for (size, closed, equalizer) in &report.per_size {
        assert_eq!((*closed, *equalizer), (0, 0), "size {size} should be empty");
    }

    println!("ACCEPTANCE C6 intersectionality: PASS");
}

#[test]
fn c07_signature_morphism_compatibility() {
    let pcf = pcf_signature();
    let collapse = TypeMap::constant(pcf_type_grammar(), ulc_type_grammar(), star_ty());
    let target = retype_signature(&collapse, &pcf);

    let good = SigMorphism::new(collapse.clone(), |l| l.clone());
    let report = check_morphism(&good, &pcf, &target, 3).unwrap();
    assert!(report.passed(), "{report}");
    assert!(report.checked > 1000, "depth 3 should enumerate many instances");

    let bad = SigMorphism::new(collapse, |l| {
        let name = match l.name.as_str() {
            "app" => "abs",
            "abs" => "app",
            other => other,
        };
        TypedLabel::new(name, l.params.clone())
    });
    let report = check_morphism(&bad, &pcf, &target, 2).unwrap();
    assert!(!report.passed());
    assert!(!report.violations.is_empty());

    println!("ACCEPTANCE C7 signature-morphism-compatibility: PASS");
}

#[test]
fn c08_pcf_to_ulc_goldens() {
    let pcf = pcf_signature();
    let empty = Context::empty();
    let parse = |text: &str, ctx: &Context| TypedTerm::parse(&pcf, text, ctx).unwrap();

    // Constants translate to their Church encodings.
    assert_eq!(pcf_to_ulc(&parse("(op true ())", &empty)).unwrap(), church_true());
    assert_eq!(pcf_to_ulc(&parse("(op if_nat ())", &empty)).unwrap(), church_if());
    assert_eq!(pcf_to_ulc(&parse("(op if_bool ())", &empty)).unwrap(), church_if());

    // The conditional behaves as λb.λt.λf. b t f: applying it picks the
    // right branch.
    let lc = lc_signature();
    let app2 = |f: UnscopedTerm, x: UnscopedTerm| UnscopedTerm::op(&lc, "app", vec![f, x]).unwrap();
    let picked = beta_normalize(
        &app2(app2(app2(church_if(), church_true()), church_nat(2)), church_nat(5)),
        DEFAULT_BETA_FUEL,
    )
    .unwrap();
    assert_eq!(picked, church_nat(2));

    // fix u translates to (Y u).
    let inner = "(op abs (nat nat) (var 0))";
    let fixed = parse(&format!("(op fix (nat) {inner})"), &empty);
    let expected = app2(y_combinator(), pcf_to_ulc(&parse(inner, &empty)).unwrap());
    assert_eq!(pcf_to_ulc(&fixed).unwrap(), expected);

    // if_nat true 0 (succ 0) normalizes to the numeral 0 within the
    // default fuel.
    let conditional = "(op app (nat nat) \
                         (op app ((=> nat nat) nat) \
                           (op app ((=> nat (=> nat nat)) bool) (op if_nat ()) (op true ())) \
                           (op zero ())) \
                         (op app (nat nat) (op succ ()) (op zero ())))";
    let image = pcf_to_ulc(&parse(conditional, &empty)).unwrap();
    assert_eq!(beta_normalize(&image, DEFAULT_BETA_FUEL).unwrap(), church_nat(0));

    // Translating under Γ = [nat, bool] never invents variables.
    let ctx = Context::new(vec![nat_ty(), TypeExpr::base("bool")]);
    let with_vars = parse(
        "(op app (nat nat) (op succ ()) (op app (nat nat) (op pred ()) (var 0)))",
        &ctx,
    );
    assert!(pcf_to_ulc(&with_vars).unwrap().support() <= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let ty = random_pcf_type(2, &mut rng);
        let term = random_pcf_term(&pcf, &ctx, &ty, 2, &mut rng);
        assert!(pcf_to_ulc(&term).unwrap().support() <= 2, "{term}");
    }

    println!("ACCEPTANCE C8 pcf-to-ulc-goldens: PASS");
}

#[test]
fn c09_typed_subject_substitution() {
    let pcf = pcf_signature();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut failures = 0;
    for _ in 0..1000 {
        let src = random_pcf_context(rng.random_range(0..3), 2, &mut rng);
        let tgt = random_pcf_context(rng.random_range(0..3), 2, &mut rng);
        let ty = random_pcf_type(2, &mut rng);
        let term = random_pcf_term(&pcf, &src, &ty, 2, &mut rng);
        let subst = random_pcf_subst(&pcf, &src, &tgt, 2, &mut rng);
        let result = term.substitute(&subst).unwrap();
        if result.ty() != term.ty() || result.ctx() != &tgt {
            failures += 1;
            continue;
        }
        // Independent re-typecheck from the printed tree.
        let expr = TypedTermExpr::parse(&result.to_string()).unwrap();
        match typecheck(&pcf, &tgt, &expr) {
            Ok(rechecked) if rechecked.ty() == term.ty() => {}
            _ => failures += 1,
        }
    }
    assert_eq!(failures, 0);
    println!("ACCEPTANCE C9 typed-subject-substitution: PASS (n=1000)");
}
