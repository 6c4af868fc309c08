//! Line-oriented law suites over a binding signature.
//!
//! Three suites run back to back: the substitution laws on raw terms,
//! the same laws through the model interface (plus the fold-morphism
//! property), and the unscoped-representation laws with the round-trips
//! and support agreement. Reports render as
//! `LAW <name> PASS|FAIL n=<samples>` lines followed by counterexamples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::{
    check_fold_morphism, check_model_laws, syntax_model, LawCheckOptions, LawReport,
};
use crate::scoped::{enumerate_terms, random_subst, random_term, ScopedTerm, Subst};
use crate::signature::BindingSignature;
use crate::unscoped::{embed_subst, probe_support, UnscopedSubst, UnscopedTerm};

#[derive(Debug, Clone)]
pub struct LawSuiteOptions {
    pub samples: usize,
    pub seed: u64,
    pub max_nodes: usize,
}

impl Default for LawSuiteOptions {
    fn default() -> Self {
        LawSuiteOptions { samples: 1000, seed: 42, max_nodes: 5 }
    }
}

struct Recorder {
    report: LawReport,
}

impl Recorder {
    fn new(law: &str) -> Self {
        Recorder {
            report: LawReport { law: law.to_string(), samples: 0, failures: Vec::new() },
        }
    }

    fn check<L: std::fmt::Debug + PartialEq>(&mut self, inputs: impl Fn() -> String, lhs: L, rhs: L) {
        self.report.samples += 1;
        if lhs != rhs && self.report.failures.len() < 5 {
            self.report.failures.push(crate::models::LawFailure {
                inputs: inputs(),
                lhs: format!("{lhs:?}"),
                rhs: format!("{rhs:?}"),
            });
        }
    }
}

fn term_level_suite(sig: &BindingSignature, opts: &LawSuiteOptions) -> Vec<LawReport> {
    let mut assoc = Recorder::new("subst-assoc");
    let mut left_unit = Recorder::new("subst-left-unit");
    let mut right_unit = Recorder::new("subst-right-unit");
    let mut rename_as_subst = Recorder::new("rename-as-subst");
    let mut compat = Recorder::new("op-subst-compat");

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut run_case = |term: &ScopedTerm, sigma: &Subst, delta: &Subst| {
        let m = term.scope();
        // Associativity.
        let lhs = term.substitute(sigma).unwrap().substitute(delta).unwrap();
        let rhs = term.substitute(&sigma.compose(delta).unwrap()).unwrap();
        assoc.check(|| format!("(term {term:?}) (sigma {sigma:?}) (delta {delta:?})"), lhs, rhs);
        // Left unit.
        for i in 0..m {
            let var = ScopedTerm::var(i, m).unwrap();
            left_unit.check(
                || format!("(var {i} @{m}) (sigma {sigma:?})"),
                var.substitute(sigma).unwrap(),
                sigma.entry(i).unwrap().clone(),
            );
        }
        // Right unit.
        right_unit.check(
            || format!("(term {term:?})"),
            term.substitute(&Subst::identity(m)).unwrap(),
            term.clone(),
        );
        // Op compatibility: substitute the whole node vs. lifted
        // substitution of each argument. Exercised through the public
        // lift operation so the two routes are genuinely distinct.
        if let Some((label, rebuilt)) = rebuild_via_lift(sig, term, sigma) {
            compat.check(
                || format!("(label {label}) (term {term:?}) (sigma {sigma:?})"),
                term.substitute(sigma).unwrap(),
                rebuilt,
            );
        }
    };

    // Enumerated part.
    for m in 0..=2usize {
        let terms = enumerate_terms(sig, m, opts.max_nodes.min(4));
        for n in 0..=2usize {
            let sigmas = exhaustive_substs(sig, m, n, 2);
            for p in 0..=2usize {
                let deltas = exhaustive_substs(sig, n, p, 2);
                for term in &terms {
                    for sigma in &sigmas {
                        for delta in &deltas {
                            run_case(term, sigma, delta);
                        }
                    }
                }
            }
        }
    }
    // Random part.
    let mut produced = 0;
    let mut attempts = 0;
    while produced < opts.samples && attempts < opts.samples * 20 {
        attempts += 1;
        let m = rng.random_range(0..=2usize);
        let n = rng.random_range(0..=2usize);
        let p = rng.random_range(0..=2usize);
        let (Some(term), Some(sigma), Some(delta)) = (
            random_term(sig, m, opts.max_nodes, &mut rng),
            random_subst(sig, m, n, 3, &mut rng),
            random_subst(sig, n, p, 3, &mut rng),
        ) else {
            continue;
        };
        run_case(&term, &sigma, &delta);
        produced += 1;
    }

    // Renaming as a special substitution, over enumerated renamings.
    for m in 0..=2usize {
        for term in enumerate_terms(sig, m, opts.max_nodes.min(4)) {
            for rho in all_renamings(m, 2) {
                let target = 2;
                let entries = rho
                    .iter()
                    .map(|&i| ScopedTerm::var(i, target).unwrap())
                    .collect();
                let as_subst = Subst::new(entries, target).unwrap();
                rename_as_subst.check(
                    || format!("(term {term:?}) (rho {rho:?})"),
                    term.rename(&rho, target).unwrap(),
                    term.substitute(&as_subst).unwrap(),
                );
            }
        }
    }

    let mut reports = vec![
        assoc.report,
        left_unit.report,
        right_unit.report,
        rename_as_subst.report,
    ];
    if !sig.is_empty() {
        reports.push(compat.report);
    }
    reports
}

/// Rebuilds `op(args)[σ]` argumentwise through `Subst::lift`, when the
/// term is an op node.
fn rebuild_via_lift(
    sig: &BindingSignature,
    term: &ScopedTerm,
    sigma: &Subst,
) -> Option<(String, ScopedTerm)> {
    let (label, args) = term.destructure()?;
    let binders = sig.arity(&label)?.binders().to_vec();
    let new_args: Vec<ScopedTerm> = args
        .iter()
        .zip(&binders)
        .map(|(a, &k)| a.substitute(&sigma.lift(k)).unwrap())
        .collect();
    let rebuilt = ScopedTerm::op(sig, &label, new_args, sigma.target()).unwrap();
    Some((label, rebuilt))
}

/// All substitutions `m -> n` with entries from the enumerated terms of
/// at most `entry_nodes` nodes.
fn exhaustive_substs(
    sig: &BindingSignature,
    m: usize,
    n: usize,
    entry_nodes: usize,
) -> Vec<Subst> {
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

fn all_renamings(m: usize, target: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut rho = vec![0usize; m];
    loop {
        out.push(rho.clone());
        let mut pos = m;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            rho[pos] += 1;
            if rho[pos] < target {
                break;
            }
            rho[pos] = 0;
        }
        if rho.iter().all(|&i| i == 0) {
            break;
        }
    }
    out
}

fn representation_suite(sig: &BindingSignature, opts: &LawSuiteOptions) -> Vec<LawReport> {
    let mut assoc = Recorder::new("debruijn-assoc");
    let mut left_unit = Recorder::new("debruijn-left-unit");
    let mut right_unit = Recorder::new("debruijn-right-unit");
    let mut round_unscoped = Recorder::new("roundtrip-to-unscoped");
    let mut round_scoped = Recorder::new("roundtrip-to-scoped");
    let mut support_agree = Recorder::new("support-probe-agreement");
    let mut translation = Recorder::new("subst-translation-agreement");

    // Round-trips and support on enumerated terms.
    for scope in 0..=3usize {
        for term in enumerate_terms(sig, scope, opts.max_nodes) {
            let unscoped = term.to_unscoped();
            round_unscoped.check(
                || format!("{unscoped}"),
                unscoped.to_scoped().to_unscoped(),
                unscoped.clone(),
            );
            if unscoped.support() == scope {
                round_scoped.check(|| format!("{term:?}"), unscoped.to_scoped(), term.clone());
            }
            support_agree.check(
                || format!("{unscoped}"),
                probe_support(&unscoped),
                unscoped.support(),
            );
        }
    }

    // De Bruijn substitution laws: enumerated core plus random samples.
    let base_entries: Vec<UnscopedTerm> = enumerate_terms(sig, 1, 2)
        .into_iter()
        .map(|t| t.to_unscoped())
        .collect();
    let mut base_substs = vec![UnscopedSubst::var_unit()];
    for shift in 0..=2usize {
        base_substs.push(UnscopedSubst::shift_by(shift));
        for e in base_entries.iter().take(3) {
            base_substs.push(UnscopedSubst::new(vec![e.clone()], shift));
        }
    }
    for scope in 0..=2usize {
        for term in enumerate_terms(sig, scope, opts.max_nodes.min(4)) {
            let t = term.to_unscoped();
            left_unit.check(
                || format!("{t}"),
                t.subst(&UnscopedSubst::var_unit()),
                t.clone(),
            );
            for f in &base_substs {
                for g in &base_substs {
                    assoc.check(
                        || format!("(term {t}) (f {f:?}) (g {g:?})"),
                        t.subst(f).subst(g),
                        t.subst(&f.compose(g)),
                    );
                }
                for i in 0..f.prefix().len() + 2 {
                    right_unit.check(
                        || format!("(var {i}) (f {f:?})"),
                        UnscopedTerm::var(i).subst(f),
                        f.denote(i),
                    );
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let mut produced = 0;
    let mut attempts = 0;
    while produced < opts.samples && attempts < opts.samples * 20 {
        attempts += 1;
        let scope = rng.random_range(0..=2usize);
        let Some(term) = random_term(sig, scope, opts.max_nodes, &mut rng) else { continue };
        let t = term.to_unscoped();
        let mk = |rng: &mut ChaCha8Rng| -> Option<UnscopedSubst> {
            let len = rng.random_range(0..=3usize);
            let entry_scope = rng.random_range(0..=2usize);
            let prefix = (0..len)
                .map(|_| random_term(sig, entry_scope, 3, rng).map(|t| t.to_unscoped()))
                .collect::<Option<Vec<_>>>()?;
            Some(UnscopedSubst::new(prefix, rng.random_range(0..=3)))
        };
        let (Some(f), Some(g)) = (mk(&mut rng), mk(&mut rng)) else { continue };
        assoc.check(
            || format!("(term {t}) (f {f:?}) (g {g:?})"),
            t.subst(&f).subst(&g),
            t.subst(&f.compose(&g)),
        );
        produced += 1;
    }

    // Agreement of the two substitution routes through the embeddings.
    for term in enumerate_terms(sig, 2, opts.max_nodes.min(4)) {
        for sigma in exhaustive_substs(sig, 2, 1, 2) {
            translation.check(
                || format!("(term {term:?}) (sigma {sigma:?})"),
                term.substitute(&sigma).unwrap().to_unscoped(),
                term.to_unscoped().subst(&embed_subst(&sigma)),
            );
        }
    }

    vec![
        assoc.report,
        left_unit.report,
        right_unit.report,
        round_unscoped.report,
        round_scoped.report,
        support_agree.report,
        translation.report,
    ]
}

/// Runs every law suite over a signature and collects the reports; the
/// syntax model drives the model-level suite.
pub fn run_law_suites(sig: &BindingSignature, opts: &LawSuiteOptions) -> Vec<LawReport> {
    let mut reports = term_level_suite(sig, opts);

    let model_opts = LawCheckOptions {
        samples: opts.samples,
        seed: opts.seed,
        max_nodes: opts.max_nodes.min(4),
        max_scope: 2,
    };
    let model = syntax_model(sig);
    for mut report in check_model_laws(&model, sig, &model_opts) {
        report.law = format!("model-{}", report.law);
        reports.push(report);
    }
    reports.push(check_fold_morphism(&model, sig, &model_opts));

    reports.extend(representation_suite(sig, opts));
    reports
}
