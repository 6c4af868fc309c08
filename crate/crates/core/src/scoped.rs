//! Well-scoped de Bruijn terms and simultaneous substitution.
//!
//! A [`ScopedTerm`] pairs a term tree with the number of free-variable
//! slots it may use; construction validates eagerly, so every value in
//! circulation is well-scoped. Substitutions are dense vectors: a
//! [`Subst`] from scope `m` to scope `n` has `m` entries, each a term at
//! scope `n`. Together with [`ScopedTerm::substitute`] and
//! [`Subst::identity`] this is the monoid structure of the syntax, and
//! the substitution laws are checked over enumerated and random inputs
//! by the law suites.
//!
//! Structural equality on terms is α-equivalence: de Bruijn indices make
//! bound-variable names irrelevant.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;

use crate::node::Node;
pub use crate::node::TermError;
use crate::signature::BindingSignature;

/// A term tree together with its scope (number of free-variable slots).
/// Index 0 refers to the most recently bound variable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScopedTerm {
    scope: usize,
    pub(crate) node: Node,
}

impl ScopedTerm {
    /// The variable `i` at scope `n`; requires `i < n`.
    pub fn var(index: usize, scope: usize) -> Result<Self, TermError> {
        if index >= scope {
            return Err(TermError::OutOfScope { index, scope });
        }
        Ok(ScopedTerm { scope, node: Node::Var(index) })
    }

    /// A constructor node at scope `n`. The j-th argument must be at
    /// scope `n + binders[j]`.
    pub fn op(
        sig: &BindingSignature,
        label: &str,
        args: Vec<ScopedTerm>,
        scope: usize,
    ) -> Result<Self, TermError> {
        let arity = sig
            .arity(label)
            .ok_or_else(|| TermError::UnknownLabel(label.to_string()))?;
        if args.len() != arity.len() {
            return Err(TermError::ArityMismatch {
                label: label.to_string(),
                expected: arity.len(),
                got: args.len(),
            });
        }
        for (j, (arg, k)) in args.iter().zip(arity.binders()).enumerate() {
            if arg.scope != scope + k {
                return Err(TermError::ArgScopeMismatch {
                    label: label.to_string(),
                    arg: j,
                    expected: scope + k,
                    got: arg.scope,
                });
            }
        }
        Ok(ScopedTerm {
            scope,
            node: Node::Op {
                label: label.to_string(),
                binders: arity.binders().to_vec(),
                args: args.into_iter().map(|a| a.node).collect(),
            },
        })
    }

    pub(crate) fn from_node(node: Node, scope: usize) -> Result<Self, TermError> {
        node.check_scope(scope)?;
        Ok(ScopedTerm { scope, node })
    }

    pub fn scope(&self) -> usize {
        self.scope
    }

    /// Number of variable and constructor nodes.
    pub fn size(&self) -> usize {
        self.node.size()
    }

    /// Applies a total renaming `rho` of the free variables; `rho` must
    /// have one entry per scope slot, each below `target`. Bound
    /// variables are untouched; under `k` binders the renaming is lifted
    /// to fix indices `0..k` and act shifted by `k` above them.
    pub fn rename(&self, rho: &[usize], target: usize) -> Result<ScopedTerm, TermError> {
        if rho.len() != self.scope {
            return Err(TermError::RenamingLengthMismatch {
                expected: self.scope,
                got: rho.len(),
            });
        }
        for (i, &v) in rho.iter().enumerate() {
            if v >= target {
                return Err(TermError::RenamingOutOfRange { index: i, value: v, target });
            }
        }
        Ok(ScopedTerm { scope: target, node: self.node.rename_free(&|i| rho[i]) })
    }

    /// Widens the scope by `k` without touching any index.
    pub fn weaken(&self, k: usize) -> ScopedTerm {
        ScopedTerm { scope: self.scope + k, node: self.node.clone() }
    }

    /// Adds `k` to every free index, targeting scope `n + k`.
    pub fn shift(&self, k: usize) -> ScopedTerm {
        ScopedTerm { scope: self.scope + k, node: self.node.shift_free(k) }
    }

    /// Simultaneous substitution: each free `Var(i)` becomes the i-th
    /// entry; under binders the substitution is lifted, so capture is
    /// impossible by construction.
    pub fn substitute(&self, subst: &Subst) -> Result<ScopedTerm, TermError> {
        if subst.source() != self.scope {
            return Err(TermError::SubstLengthMismatch {
                expected: self.scope,
                got: subst.source(),
            });
        }
        fn go(node: &Node, subst: &Subst) -> Node {
            match node {
                Node::Var(i) => subst.entries[*i].node.clone(),
                Node::Op { label, binders, args } => Node::Op {
                    label: label.clone(),
                    binders: binders.clone(),
                    args: args
                        .iter()
                        .zip(binders)
                        .map(|(a, &k)| {
                            if k == 0 {
                                go(a, subst)
                            } else {
                                go(a, &subst.lift(k))
                            }
                        })
                        .collect(),
                },
            }
        }
        Ok(ScopedTerm { scope: subst.target(), node: go(&self.node, subst) })
    }

    /// The label and arguments of a constructor node, each argument at
    /// its extended scope; `None` for variables.
    pub fn destructure(&self) -> Option<(String, Vec<ScopedTerm>)> {
        match &self.node {
            Node::Var(_) => None,
            Node::Op { label, binders, args } => Some((
                label.clone(),
                args.iter()
                    .zip(binders)
                    .map(|(a, k)| ScopedTerm { scope: self.scope + k, node: a.clone() })
                    .collect(),
            )),
        }
    }

    /// Reads a term from its s-expression form and validates it at the
    /// given scope.
    pub fn parse(sig: &BindingSignature, text: &str, scope: usize) -> Result<Self, TermError> {
        ScopedTerm::from_node(Node::parse_str(sig, text)?, scope)
    }
}

impl fmt::Display for ScopedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.node)
    }
}

impl fmt::Debug for ScopedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @{}", self.node, self.scope)
    }
}

/// A substitution from scope `m` (entry count) to scope `n` (the common
/// scope of all entries).
#[derive(Clone, PartialEq, Eq)]
pub struct Subst {
    target: usize,
    entries: Vec<ScopedTerm>,
}

impl Subst {
    pub fn new(entries: Vec<ScopedTerm>, target: usize) -> Result<Self, TermError> {
        for (i, e) in entries.iter().enumerate() {
            if e.scope != target {
                return Err(TermError::SubstEntryScope {
                    entry: i,
                    expected: target,
                    got: e.scope,
                });
            }
        }
        Ok(Subst { target, entries })
    }

    /// `[Var 0, …, Var n-1]`, the unit of substitution.
    pub fn identity(n: usize) -> Subst {
        Subst {
            target: n,
            entries: (0..n)
                .map(|i| ScopedTerm::var(i, n).expect("identity entry in scope"))
                .collect(),
        }
    }

    pub fn source(&self) -> usize {
        self.entries.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn entries(&self) -> &[ScopedTerm] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> Option<&ScopedTerm> {
        self.entries.get(i)
    }

    /// Lifts under `k` binders: the first `k` entries are the fresh
    /// variables, the old entries follow with their free indices shifted
    /// by `k`.
    pub fn lift(&self, k: usize) -> Subst {
        if k == 0 {
            return self.clone();
        }
        let target = self.target + k;
        let mut entries = Vec::with_capacity(k + self.entries.len());
        for i in 0..k {
            entries.push(ScopedTerm::var(i, target).expect("fresh var in scope"));
        }
        for e in &self.entries {
            entries.push(e.shift(k));
        }
        Subst { target, entries }
    }

    /// Kleisli composition: entrywise substitution of `other` into `self`.
    pub fn compose(&self, other: &Subst) -> Result<Subst, TermError> {
        if other.source() != self.target {
            return Err(TermError::ScopeMismatch {
                expected: self.target,
                got: other.source(),
            });
        }
        let entries = self
            .entries
            .iter()
            .map(|e| e.substitute(other))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Subst { target: other.target, entries })
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e.node)?;
        }
        write!(f, "] -> @{}", self.target)
    }
}

// ---------------------------------------------------------------------------
// Enumeration and random generation
// ---------------------------------------------------------------------------

/// All well-scoped terms with at most `max_nodes` nodes, smallest first;
/// within a size, variables come before constructors, constructors in
/// signature order, argument tuples in lexicographic order. The order is
/// deterministic, and the output is duplicate-free.
pub fn enumerate_terms(
    sig: &BindingSignature,
    scope: usize,
    max_nodes: usize,
) -> Vec<ScopedTerm> {
    let mut enumerator = Enumerator { sig, memo: HashMap::new() };
    let mut out = Vec::new();
    for size in 1..=max_nodes {
        for node in enumerator.of_size(scope, size) {
            out.push(ScopedTerm { scope, node });
        }
    }
    out
}

struct Enumerator<'a> {
    sig: &'a BindingSignature,
    memo: HashMap<(usize, usize), Vec<Node>>,
}

impl Enumerator<'_> {
    fn of_size(&mut self, scope: usize, size: usize) -> Vec<Node> {
        if let Some(cached) = self.memo.get(&(scope, size)) {
            return cached.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            for i in 0..scope {
                out.push(Node::Var(i));
            }
        }
        let labels: Vec<(String, Vec<usize>)> = self
            .sig
            .labels()
            .map(|(l, a)| (l.to_string(), a.binders().to_vec()))
            .collect();
        for (label, binders) in labels {
            if binders.is_empty() {
                if size == 1 {
                    out.push(Node::Op { label, binders, args: Vec::new() });
                }
                continue;
            }
            if size < 1 + binders.len() {
                continue;
            }
            for split in compositions(size - 1, binders.len()) {
                let per_arg: Vec<Vec<Node>> = split
                    .iter()
                    .zip(&binders)
                    .map(|(&s, &k)| self.of_size(scope + k, s))
                    .collect();
                if per_arg.iter().any(Vec::is_empty) {
                    continue;
                }
                let mut idx = vec![0usize; per_arg.len()];
                loop {
                    let args: Vec<Node> = idx
                        .iter()
                        .zip(&per_arg)
                        .map(|(&i, choices)| choices[i].clone())
                        .collect();
                    out.push(Node::Op {
                        label: label.clone(),
                        binders: binders.clone(),
                        args,
                    });
                    let mut pos = idx.len();
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < per_arg[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                    if idx.iter().all(|&i| i == 0) {
                        break;
                    }
                }
            }
        }
        self.memo.insert((scope, size), out.clone());
        out
    }
}

/// All ways to write `total` as an ordered sum of `parts` positive
/// numbers, lexicographically.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Least node count of any closed term, if one exists within `cap`.
fn min_closed_size(sig: &BindingSignature, cap: usize) -> Option<usize> {
    // Fixpoint over the self-referential scope-0 minimum; binder
    // arguments bottom out at 1 because any non-empty scope has a
    // variable.
    let mut best: Option<usize> = None;
    loop {
        let mut improved = false;
        for (_, arity) in sig.labels() {
            let mut total = 1usize;
            let mut feasible = true;
            for &k in arity.binders() {
                if k > 0 {
                    total += 1;
                } else {
                    match best {
                        Some(b) => total += b,
                        None => {
                            feasible = false;
                            break;
                        }
                    }
                }
            }
            if feasible && total <= cap && best.is_none_or(|b| total < b) {
                best = Some(total);
                improved = true;
            }
        }
        if !improved {
            return best;
        }
    }
}

fn min_size(sig: &BindingSignature, scope: usize, cap: usize) -> Option<usize> {
    if scope > 0 {
        Some(1)
    } else {
        min_closed_size(sig, cap)
    }
}

/// Draws a uniform-ish random term with at most `max_nodes` nodes, or
/// `None` when the scope admits no term that small.
pub fn random_term<R: Rng>(
    sig: &BindingSignature,
    scope: usize,
    max_nodes: usize,
    rng: &mut R,
) -> Option<ScopedTerm> {
    let node = random_node(sig, scope, max_nodes, rng)?;
    Some(ScopedTerm { scope, node })
}

fn random_node<R: Rng>(
    sig: &BindingSignature,
    scope: usize,
    budget: usize,
    rng: &mut R,
) -> Option<Node> {
    if budget == 0 {
        return None;
    }
    enum Choice {
        Var,
        Label(String, Vec<usize>),
    }
    let mut choices = Vec::new();
    if scope > 0 {
        choices.push(Choice::Var);
    }
    for (label, arity) in sig.labels() {
        let min_total = arity
            .binders()
            .iter()
            .map(|&k| min_size(sig, scope + k, budget).unwrap_or(usize::MAX))
            .fold(1usize, usize::saturating_add);
        if min_total <= budget {
            choices.push(Choice::Label(label.to_string(), arity.binders().to_vec()));
        }
    }
    if choices.is_empty() {
        return None;
    }
    match &choices[rng.random_range(0..choices.len())] {
        Choice::Var => Some(Node::Var(rng.random_range(0..scope))),
        Choice::Label(label, binders) => {
            let mins: Vec<usize> = binders
                .iter()
                .map(|&k| min_size(sig, scope + k, budget).unwrap_or(usize::MAX))
                .collect();
            let mut remaining = budget - 1;
            let mut args = Vec::with_capacity(binders.len());
            for (j, &k) in binders.iter().enumerate() {
                let reserve: usize = mins[j + 1..].iter().sum();
                let hi = remaining - reserve;
                let lo = mins[j];
                let alloc = if lo >= hi { lo } else { rng.random_range(lo..=hi) };
                let arg = random_node(sig, scope + k, alloc, rng)?;
                remaining -= arg.size();
                args.push(arg);
            }
            Some(Node::Op { label: label.clone(), binders: binders.clone(), args })
        }
    }
}

/// Draws a random substitution `source -> target` with entries of at
/// most `max_nodes` nodes each.
pub fn random_subst<R: Rng>(
    sig: &BindingSignature,
    source: usize,
    target: usize,
    max_nodes: usize,
    rng: &mut R,
) -> Option<Subst> {
    let entries = (0..source)
        .map(|_| random_term(sig, target, max_nodes, rng))
        .collect::<Option<Vec<_>>>()?;
    Some(Subst { target, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::NamedOracle;
    use crate::signature::lc_signature;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lc() -> BindingSignature {
        lc_signature()
    }

    fn t(text: &str, scope: usize) -> ScopedTerm {
        ScopedTerm::parse(&lc(), text, scope).unwrap()
    }

    #[test]
    fn mk_var_in_scope() {
        assert_eq!(ScopedTerm::var(0, 1).unwrap().to_string(), "(var 0)");
        assert_eq!(ScopedTerm::var(2, 3).unwrap().scope(), 3);
    }

    #[test]
    fn mk_var_out_of_scope() {
        assert!(matches!(
            ScopedTerm::var(3, 3),
            Err(TermError::OutOfScope { index: 3, scope: 3 })
        ));
    }

    #[test]
    fn mk_op_checks_arg_scopes() {
        let sig = lc();
        let v01 = ScopedTerm::var(0, 1).unwrap();
        let app = ScopedTerm::op(&sig, "app", vec![v01.clone(), v01.clone()], 1).unwrap();
        assert_eq!(app.to_string(), "(app (var 0) (var 0))");

        // A binder adds one to the argument scope: abs of a scope-1 body
        // is closed.
        let id = ScopedTerm::op(&sig, "abs", vec![v01.clone()], 0).unwrap();
        assert_eq!(id.scope(), 0);

        assert!(matches!(
            ScopedTerm::op(&sig, "abs", vec![v01], 1),
            Err(TermError::ArgScopeMismatch { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn mk_op_rejects_unknown_label_and_bad_arity() {
        let sig = lc();
        assert!(matches!(
            ScopedTerm::op(&sig, "mystery", vec![], 0),
            Err(TermError::UnknownLabel(_))
        ));
        assert!(matches!(
            ScopedTerm::op(&sig, "abs", vec![], 0),
            Err(TermError::ArityMismatch { expected: 1, got: 0, .. })
        ));
    }

    #[test]
    fn rename_examples() {
        let v = ScopedTerm::var(0, 1).unwrap();
        assert_eq!(v.rename(&[2], 3).unwrap(), ScopedTerm::var(2, 3).unwrap());

        // Bound variables are untouched.
        let id = t("(abs (var 0))", 1);
        assert_eq!(id.rename(&[0], 1).unwrap(), id);

        let swapped = t("(app (var 0) (var 1))", 2).rename(&[1, 0], 2).unwrap();
        assert_eq!(swapped, t("(app (var 1) (var 0))", 2));
    }

    #[test]
    fn rename_validates_entries() {
        let v = ScopedTerm::var(0, 1).unwrap();
        assert!(matches!(
            v.rename(&[3], 3),
            Err(TermError::RenamingOutOfRange { value: 3, .. })
        ));
        assert!(matches!(
            v.rename(&[0, 1], 2),
            Err(TermError::RenamingLengthMismatch { .. })
        ));
    }

    #[test]
    fn weaken_examples() {
        let v = ScopedTerm::var(0, 1).unwrap();
        assert_eq!(v.weaken(2), ScopedTerm::var(0, 3).unwrap());
        let id = t("(abs (var 0))", 0);
        let w = id.weaken(5);
        assert_eq!(w.scope(), 5);
        assert_eq!(w.to_string(), id.to_string());
        assert_eq!(id.weaken(0), id);
    }

    #[test]
    fn lift_examples() {
        let sig = lc();
        let u = t("(abs (var 0))", 0);
        let single = Subst::new(vec![u.clone()], 0).unwrap();
        let lifted = single.lift(1);
        assert_eq!(lifted.entry(0).unwrap(), &ScopedTerm::var(0, 1).unwrap());
        assert_eq!(lifted.entry(1).unwrap(), &u.shift(1));

        for n in 0..4 {
            for k in 0..3 {
                assert_eq!(Subst::identity(n).lift(k), Subst::identity(n + k));
            }
        }

        // lift(lift(σ,1),1) = lift(σ,2) over enumerated substitutions.
        for e0 in enumerate_terms(&sig, 1, 3) {
            for e1 in enumerate_terms(&sig, 1, 3) {
                let sigma = Subst::new(vec![e0.clone(), e1], 1).unwrap();
                assert_eq!(sigma.lift(1).lift(1), sigma.lift(2));
            }
        }
    }

    #[test]
    fn substitute_identity_is_neutral() {
        for term in enumerate_terms(&lc(), 2, 5) {
            assert_eq!(term.substitute(&Subst::identity(2)).unwrap(), term);
        }
    }

    #[test]
    fn substitute_worked_example() {
        // app(Var 0, abs(Var 0)) @1 with [abs(Var 0) @0].
        let term = t("(app (var 0) (abs (var 0)))", 1);
        let sigma = Subst::new(vec![t("(abs (var 0))", 0)], 0).unwrap();
        let expected = t("(app (abs (var 0)) (abs (var 0)))", 0);
        let got = term.substitute(&sigma).unwrap();
        assert_eq!(got, expected);
        assert_eq!(got, NamedOracle::substitute(&term, &sigma));
    }

    #[test]
    fn substitute_lifts_under_binders() {
        // abs(Var 1) @1 with [u @0] must shift u past the binder.
        let term = t("(abs (var 1))", 1);
        let u = t("(abs (var 0))", 0);
        let sigma = Subst::new(vec![u.clone()], 0).unwrap();
        let got = term.substitute(&sigma).unwrap();
        let expected = ScopedTerm::op(&lc(), "abs", vec![u.shift(1)], 0).unwrap();
        assert_eq!(got, expected);
        assert_eq!(got, NamedOracle::substitute(&term, &sigma));
    }

    #[test]
    fn substitute_agrees_with_named_oracle_on_enumerated_inputs() {
        let sig = lc();
        for term in enumerate_terms(&sig, 2, 4) {
            for e0 in enumerate_terms(&sig, 1, 2) {
                for e1 in enumerate_terms(&sig, 1, 2) {
                    let sigma = Subst::new(vec![e0.clone(), e1], 1).unwrap();
                    assert_eq!(
                        term.substitute(&sigma).unwrap(),
                        NamedOracle::substitute(&term, &sigma),
                        "term {term:?} sigma {sigma:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn substitute_rejects_wrong_length() {
        let term = t("(var 0)", 1);
        assert!(matches!(
            term.substitute(&Subst::identity(2)),
            Err(TermError::SubstLengthMismatch { .. })
        ));
    }

    #[test]
    fn identity_subst_shape() {
        assert_eq!(Subst::identity(0).entries().len(), 0);
        let id2 = Subst::identity(2);
        assert_eq!(id2.entry(0).unwrap(), &ScopedTerm::var(0, 2).unwrap());
        assert_eq!(id2.entry(1).unwrap(), &ScopedTerm::var(1, 2).unwrap());
    }

    #[test]
    fn substituting_a_variable_picks_the_entry() {
        let sigma = Subst::new(vec![t("(abs (var 0))", 0), t("(abs (abs (var 1)))", 0)], 0).unwrap();
        for i in 0..2 {
            let var = ScopedTerm::var(i, 2).unwrap();
            assert_eq!(&var.substitute(&sigma).unwrap(), sigma.entry(i).unwrap());
        }
    }

    #[test]
    fn compose_units() {
        let sigma = Subst::new(vec![t("(abs (var 0))", 1), t("(var 0)", 1)], 1).unwrap();
        assert_eq!(sigma.compose(&Subst::identity(1)).unwrap(), sigma);
        assert_eq!(Subst::identity(2).compose(&sigma).unwrap(), sigma);
    }

    #[test]
    fn compose_rejects_scope_mismatch() {
        let sigma = Subst::identity(2);
        let delta = Subst::identity(3);
        assert!(sigma.compose(&delta).is_err());
    }

    #[test]
    fn substitution_is_associative_on_random_triples() {
        let sig = lc();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 1000 {
            let m = rng.random_range(0..3usize);
            let n = rng.random_range(0..3usize);
            let p = rng.random_range(0..3usize);
            let (Some(term), Some(sigma), Some(delta)) = (
                random_term(&sig, m, 6, &mut rng),
                random_subst(&sig, m, n, 4, &mut rng),
                random_subst(&sig, n, p, 4, &mut rng),
            ) else {
                continue;
            };
            let lhs = term.substitute(&sigma).unwrap().substitute(&delta).unwrap();
            let rhs = term.substitute(&sigma.compose(&delta).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "term {term:?} sigma {sigma:?} delta {delta:?}");
            checked += 1;
        }
    }

    #[test]
    fn enumerate_hand_checked_examples() {
        let sig = lc();
        assert!(enumerate_terms(&sig, 0, 1).is_empty());
        assert_eq!(
            enumerate_terms(&sig, 1, 1),
            vec![ScopedTerm::var(0, 1).unwrap()]
        );
        assert_eq!(enumerate_terms(&sig, 0, 2), vec![t("(abs (var 0))", 0)]);
    }

    #[test]
    fn enumerate_is_duplicate_free_and_well_scoped() {
        let sig = lc();
        for scope in 0..3 {
            let terms = enumerate_terms(&sig, scope, 5);
            let unique: std::collections::HashSet<_> = terms.iter().cloned().collect();
            assert_eq!(unique.len(), terms.len());
            for term in &terms {
                assert!(term.node.check_scope(scope).is_ok());
                assert!(term.size() <= 5);
            }
        }
    }

    #[test]
    fn enumerate_respects_constants() {
        let sig = crate::signature::parse_signature("(sig (c) (pair 0 0))").unwrap();
        let terms = enumerate_terms(&sig, 0, 3);
        assert_eq!(terms[0].to_string(), "(c)");
        assert!(terms.iter().any(|t| t.to_string() == "(pair (c) (c))"));
    }

    #[test]
    fn rename_agrees_with_named_oracle() {
        let sig = lc();
        let renamings: [&[usize]; 4] = [&[0, 0], &[0, 1], &[1, 0], &[1, 1]];
        for term in enumerate_terms(&sig, 2, 4) {
            for rho in renamings {
                assert_eq!(
                    term.rename(rho, 2).unwrap(),
                    NamedOracle::rename(&term, rho, 2)
                );
            }
        }
    }

    #[test]
    fn renaming_is_a_special_substitution() {
        let sig = lc();
        let renamings: [&[usize]; 4] = [&[0, 0], &[0, 1], &[1, 0], &[1, 1]];
        for term in enumerate_terms(&sig, 2, 4) {
            for rho in renamings {
                let by_rename = term.rename(rho, 2).unwrap();
                let entries = rho
                    .iter()
                    .map(|&i| ScopedTerm::var(i, 2).unwrap())
                    .collect();
                let by_subst = term
                    .substitute(&Subst::new(entries, 2).unwrap())
                    .unwrap();
                assert_eq!(by_rename, by_subst);
            }
        }
    }

    #[test]
    fn module_compatibility_of_constructors() {
        // Substituting an op node equals rebuilding it from lifted
        // substitutions of the arguments.
        let sig = lc();
        let sigma = Subst::new(vec![t("(abs (var 0))", 1), t("(var 0)", 1)], 1).unwrap();
        for body in enumerate_terms(&sig, 3, 3) {
            let term = ScopedTerm::op(&sig, "abs", vec![body.clone()], 2).unwrap();
            let direct = term.substitute(&sigma).unwrap();
            let rebuilt = ScopedTerm::op(
                &sig,
                "abs",
                vec![body.substitute(&sigma.lift(1)).unwrap()],
                1,
            )
            .unwrap();
            assert_eq!(direct, rebuilt);
        }
    }

    #[test]
    fn parse_print_roundtrip() {
        let text = "(app (abs (app (var 0) (var 1))) (var 0))";
        assert_eq!(t(text, 1).to_string(), text);
    }

    proptest! {
        #[test]
        fn prop_subst_associativity(seed in 0u64..500) {
            let sig = lc();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = rng.random_range(0..3usize);
            let n = rng.random_range(0..3usize);
            let p = rng.random_range(0..3usize);
            if let (Some(term), Some(sigma), Some(delta)) = (
                random_term(&sig, m, 6, &mut rng),
                random_subst(&sig, m, n, 4, &mut rng),
                random_subst(&sig, n, p, 4, &mut rng),
            ) {
                let lhs = term.substitute(&sigma).unwrap().substitute(&delta).unwrap();
                let rhs = term.substitute(&sigma.compose(&delta).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn prop_right_unit(seed in 0u64..500) {
            let sig = lc();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(0..4usize);
            if let Some(term) = random_term(&sig, n, 8, &mut rng) {
                prop_assert_eq!(term.substitute(&Subst::identity(n)).unwrap(), term);
            }
        }
    }
}
