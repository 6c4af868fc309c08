//! The unscoped de Bruijn presentation and the functors relating it to
//! well-scoped syntax.
//!
//! An [`UnscopedTerm`] is the same tree as a [`ScopedTerm`] with no bound
//! on free indices; substitutions are total functions `ℕ → term`,
//! represented finitely as a prefix of terms plus an affine tail
//! ([`UnscopedSubst`]). Every syntax term has a finite support, which is
//! what makes the two presentations interchangeable:
//! [`UnscopedTerm::to_scoped`] restricts a term to its minimal scope,
//! [`ScopedTerm::to_unscoped`] erases the scope, and
//! [`transport_unscoped_model`] / [`transport_scoped_model`] move whole
//! models across, checking the required laws on samples and rejecting
//! with a witness on violation.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::{Model, ModelError, RenamingModel};
use crate::node::Node;
use crate::scoped::{enumerate_terms, random_term, ScopedTerm, Subst, TermError};
use crate::signature::BindingSignature;

/// A de Bruijn term with unbounded free indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnscopedTerm {
    pub(crate) node: Node,
}

impl UnscopedTerm {
    pub fn var(index: usize) -> Self {
        UnscopedTerm { node: Node::Var(index) }
    }

    pub fn op(
        sig: &BindingSignature,
        label: &str,
        args: Vec<UnscopedTerm>,
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
        Ok(UnscopedTerm {
            node: Node::Op {
                label: label.to_string(),
                binders: arity.binders().to_vec(),
                args: args.into_iter().map(|a| a.node).collect(),
            },
        })
    }

    pub fn parse(sig: &BindingSignature, text: &str) -> Result<Self, TermError> {
        Ok(UnscopedTerm { node: Node::parse_str(sig, text)? })
    }

    pub fn size(&self) -> usize {
        self.node.size()
    }

    /// Least `n` such that every free index is below `n`; 0 for closed
    /// terms.
    pub fn support(&self) -> usize {
        self.node.support()
    }

    /// Applies a substitution; under `k` binders the first `k` indices
    /// are fixed and the images are shifted by `k`, so capture is
    /// impossible.
    pub fn subst(&self, f: &UnscopedSubst) -> UnscopedTerm {
        UnscopedTerm { node: self.node.map_free(&mut |i| f.denote(i).node) }
    }

    /// Functorial renaming along an arbitrary index map.
    pub fn rename(&self, f: &dyn Fn(usize) -> usize) -> UnscopedTerm {
        UnscopedTerm { node: self.node.rename_free(f) }
    }

    /// The same tree at its minimal scope.
    pub fn to_scoped(&self) -> ScopedTerm {
        ScopedTerm::from_node(self.node.clone(), self.support())
            .expect("support bounds every free index")
    }

    /// The same tree at a caller-chosen scope, which must cover the
    /// support.
    pub fn to_scoped_at(&self, scope: usize) -> Result<ScopedTerm, TermError> {
        let support = self.support();
        if scope < support {
            return Err(TermError::ScopeBelowSupport { support, requested: scope });
        }
        Ok(ScopedTerm::from_node(self.node.clone(), scope).expect("scope covers support"))
    }
}

impl ScopedTerm {
    /// Erases the scope; the tree is unchanged and the result's support
    /// is at most the original scope.
    pub fn to_unscoped(&self) -> UnscopedTerm {
        UnscopedTerm { node: self.node.clone() }
    }
}

impl fmt::Display for UnscopedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.node)
    }
}

impl fmt::Debug for UnscopedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.node)
    }
}

/// A total substitution `ℕ → term` in prefix-plus-shift form: index `i`
/// maps to `prefix[i]` when in range and to
/// `Var(i - prefix.len() + shift)` beyond it.
///
/// Equality is denotational: two substitutions are equal when they agree
/// on indices up to one past the longer prefix, which also pins the
/// affine tails.
#[derive(Clone, Eq)]
pub struct UnscopedSubst {
    prefix: Vec<UnscopedTerm>,
    shift: usize,
}

impl UnscopedSubst {
    pub fn new(prefix: Vec<UnscopedTerm>, shift: usize) -> Self {
        UnscopedSubst { prefix, shift }
    }

    /// The variable function η: every index to itself.
    pub fn var_unit() -> Self {
        UnscopedSubst { prefix: Vec::new(), shift: 0 }
    }

    /// `i ↦ Var(i + k)`.
    pub fn shift_by(k: usize) -> Self {
        UnscopedSubst { prefix: Vec::new(), shift: k }
    }

    pub fn prefix(&self) -> &[UnscopedTerm] {
        &self.prefix
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    /// The image of index `i`.
    pub fn denote(&self, i: usize) -> UnscopedTerm {
        match self.prefix.get(i) {
            Some(t) => t.clone(),
            None => UnscopedTerm::var(i - self.prefix.len() + self.shift),
        }
    }

    /// Lifting under `k` binders: fresh variables first, then the old
    /// images shifted by `k`.
    pub fn lift(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        let mut prefix = Vec::with_capacity(k + self.prefix.len());
        for i in 0..k {
            prefix.push(UnscopedTerm::var(i));
        }
        for t in &self.prefix {
            prefix.push(UnscopedTerm { node: t.node.shift_free(k) });
        }
        UnscopedSubst { prefix, shift: self.shift + k }
    }

    /// Kleisli composition, denoting `i ↦ self(i)[g]`. The prefix is
    /// extended far enough for the tail to be affine again.
    pub fn compose(&self, g: &UnscopedSubst) -> UnscopedSubst {
        let own = self.prefix.len();
        let len = own.max((own + g.prefix.len()).saturating_sub(self.shift));
        let prefix: Vec<UnscopedTerm> = (0..len).map(|i| self.denote(i).subst(g)).collect();
        // Beyond `len`, self lands in g's affine tail.
        let shift = (len - own + self.shift) - g.prefix.len() + g.shift;
        UnscopedSubst { prefix, shift }.canonical()
    }

    /// Trims prefix entries already described by the affine tail.
    pub fn canonical(&self) -> UnscopedSubst {
        let mut prefix = self.prefix.clone();
        let mut shift = self.shift;
        while let Some(last) = prefix.last() {
            if shift >= 1 && last.node == Node::Var(shift - 1) {
                prefix.pop();
                shift -= 1;
            } else {
                break;
            }
        }
        UnscopedSubst { prefix, shift }
    }
}

impl PartialEq for UnscopedSubst {
    fn eq(&self, other: &Self) -> bool {
        let probe = self.prefix.len().max(other.prefix.len()) + 1;
        (0..=probe).all(|i| self.denote(i) == other.denote(i))
    }
}

impl fmt::Debug for UnscopedSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "]+{}", self.shift)
    }
}

/// Views a dense scoped substitution `m -> n` as a total index function,
/// sending indices at and above `m` into the fresh part of the target.
pub fn embed_subst(subst: &Subst) -> UnscopedSubst {
    UnscopedSubst {
        prefix: subst.entries().iter().map(ScopedTerm::to_unscoped).collect(),
        shift: subst.target(),
    }
}

/// Brute-force support oracle: the least `n` such that every probe
/// renaming fixing indices below `n` fixes the term. The probe family is
/// the shift-at-k maps and the adjacent transpositions up to the direct
/// support plus two; on syntax trees it separates every free index.
pub fn probe_support(term: &UnscopedTerm) -> usize {
    let bound = term.support() + 2;
    'candidate: for n in 0..=bound {
        for k in n..=bound {
            let shifted = term.rename(&|i| if i < k { i } else { i + 1 });
            if shifted != *term {
                continue 'candidate;
            }
        }
        for j in n..=bound {
            let swapped = term.rename(&|i| {
                if i == j {
                    j + 1
                } else if i == j + 1 {
                    j
                } else {
                    i
                }
            });
            if swapped != *term {
                continue 'candidate;
            }
        }
        return n;
    }
    bound
}

// ---------------------------------------------------------------------------
// Intersectionality
// ---------------------------------------------------------------------------

/// Per-size comparison of closed terms against the equalizer of the two
/// injections of scope 1 into scope 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionalityReport {
    pub max_nodes: usize,
    /// (size, closed-term count, equalizer count)
    pub per_size: Vec<(usize, usize, usize)>,
}

impl IntersectionalityReport {
    pub fn passed(&self) -> bool {
        self.per_size.iter().all(|(_, closed, eq)| closed == eq)
    }
}

impl fmt::Display for IntersectionalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "INTERSECTIONALITY {} max-nodes={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.max_nodes
        )?;
        for (size, closed, eq) in &self.per_size {
            writeln!(f, "size {size}: closed={closed} equalizer={eq}")?;
        }
        Ok(())
    }
}

/// Counts, at every size up to `max_nodes`, the closed terms and the
/// scope-1 terms on which the two injections into scope 2 agree. The
/// counts coincide exactly when evaluation at scope 0 is the equalizer
/// of the two injections.
pub fn intersectionality_check(
    sig: &BindingSignature,
    max_nodes: usize,
) -> IntersectionalityReport {
    let mut per_size = Vec::new();
    for size in 1..=max_nodes {
        let closed = enumerate_terms(sig, 0, size)
            .into_iter()
            .filter(|t| t.size() == size)
            .count();
        let equalizer = enumerate_terms(sig, 1, size)
            .into_iter()
            .filter(|t| t.size() == size)
            .filter(|t| {
                let left = t.rename(&[0], 2).expect("total renaming");
                let right = t.rename(&[1], 2).expect("total renaming");
                left == right
            })
            .count();
        per_size.push((size, closed, equalizer));
    }
    IntersectionalityReport { max_nodes, per_size }
}

// ---------------------------------------------------------------------------
// De Bruijn models and transports
// ---------------------------------------------------------------------------

/// A finitely-represented substitution on model values: `i` maps to
/// `prefix[i]` when in range, and to the variable `i - prefix.len() +
/// shift` beyond it.
#[derive(Debug, Clone)]
pub struct ValueSubst<V> {
    pub prefix: Vec<V>,
    pub shift: usize,
}

impl<V: Clone> ValueSubst<V> {
    pub fn unit() -> Self {
        ValueSubst { prefix: Vec::new(), shift: 0 }
    }

    pub fn denote(&self, i: usize, var: impl Fn(usize) -> V) -> V {
        match self.prefix.get(i) {
            Some(v) => v.clone(),
            None => var(i - self.prefix.len() + self.shift),
        }
    }
}

/// A model in the unscoped style: one carrier, a variable function on
/// all of ℕ, a substitution action by total index functions, and a
/// support oracle singling out the finitely-supported part.
pub trait DeBruijnModel {
    type Value: Clone + PartialEq + fmt::Debug;

    fn var(&self, index: usize) -> Self::Value;

    fn op(&self, label: &str, args: Vec<Self::Value>) -> Result<Self::Value, ModelError>;

    fn subst(&self, value: &Self::Value, f: &ValueSubst<Self::Value>) -> Self::Value;

    /// An upper bound `n` such that renamings fixing indices below `n`
    /// fix the value. Soundness is sampled by the transports.
    fn support(&self, value: &Self::Value) -> usize;
}

/// Folds an unscoped term into a De Bruijn-style model.
pub fn ufold<M: DeBruijnModel>(model: &M, term: &UnscopedTerm) -> Result<M::Value, ModelError> {
    fn go<M: DeBruijnModel>(model: &M, node: &Node) -> Result<M::Value, ModelError> {
        match node {
            Node::Var(i) => Ok(model.var(*i)),
            Node::Op { label, args, .. } => {
                let values = args.iter().map(|a| go(model, a)).collect::<Result<_, _>>()?;
                model.op(label, values)
            }
        }
    }
    go(model, &term.node)
}

/// The unscoped syntax as a model of itself.
pub struct UnscopedSyntaxModel {
    sig: BindingSignature,
}

pub fn unscoped_syntax_model(sig: &BindingSignature) -> UnscopedSyntaxModel {
    UnscopedSyntaxModel { sig: sig.clone() }
}

impl DeBruijnModel for UnscopedSyntaxModel {
    type Value = UnscopedTerm;

    fn var(&self, index: usize) -> UnscopedTerm {
        UnscopedTerm::var(index)
    }

    fn op(&self, label: &str, args: Vec<UnscopedTerm>) -> Result<UnscopedTerm, ModelError> {
        UnscopedTerm::op(&self.sig, label, args).map_err(|e| match e {
            TermError::UnknownLabel(l) => ModelError::UnknownLabel(l),
            other => ModelError::Invalid(other.to_string()),
        })
    }

    fn subst(&self, value: &UnscopedTerm, f: &ValueSubst<UnscopedTerm>) -> UnscopedTerm {
        value.subst(&UnscopedSubst { prefix: f.prefix.clone(), shift: f.shift })
    }

    fn support(&self, value: &UnscopedTerm) -> usize {
        value.support()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("transport rejected: {law} fails on {witness}")]
pub struct TransportRejection {
    pub law: String,
    pub witness: String,
}

/// What to do when the signature has no closed terms, so the scope-0
/// carrier of the transported model is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyPolicy {
    #[default]
    Warn,
    Reject,
}

#[derive(Debug, Clone)]
pub struct TransportOptions {
    pub samples: usize,
    pub seed: u64,
    pub max_nodes: usize,
    pub max_scope: usize,
    pub empty_policy: EmptyPolicy,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions {
            samples: 200,
            seed: 42,
            max_nodes: 4,
            max_scope: 3,
            empty_policy: EmptyPolicy::Warn,
        }
    }
}

/// A scoped model built over a De Bruijn-style one: the carrier at scope
/// `n` is the set of values of support at most `n`, with all structure
/// inherited.
pub struct ScopedFromDeBruijn<M: DeBruijnModel> {
    inner: M,
    pub warnings: Vec<String>,
}

impl<M: DeBruijnModel> ScopedFromDeBruijn<M> {
    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: DeBruijnModel> Model for ScopedFromDeBruijn<M> {
    type Value = M::Value;

    fn var(&self, index: usize, _scope: usize) -> M::Value {
        self.inner.var(index)
    }

    fn op(&self, label: &str, args: Vec<M::Value>, _scope: usize)
        -> Result<M::Value, ModelError>
    {
        self.inner.op(label, args)
    }

    fn subst(
        &self,
        value: &M::Value,
        env: &[M::Value],
        _src_scope: usize,
        tgt_scope: usize,
    ) -> M::Value {
        self.inner
            .subst(value, &ValueSubst { prefix: env.to_vec(), shift: tgt_scope })
    }
}

impl<M: DeBruijnModel> RenamingModel for ScopedFromDeBruijn<M> {
    fn rename(
        &self,
        value: &M::Value,
        _src_scope: usize,
        rho: &[usize],
        _tgt_scope: usize,
    ) -> M::Value {
        let prefix: Vec<M::Value> = rho.iter().map(|&i| self.inner.var(i)).collect();
        self.inner.subst(value, &ValueSubst { prefix, shift: 0 })
    }
}

fn sampled_unscoped_terms(
    sig: &BindingSignature,
    opts: &TransportOptions,
) -> Vec<UnscopedTerm> {
    let mut out = Vec::new();
    for scope in 0..=opts.max_scope {
        for term in enumerate_terms(sig, scope, opts.max_nodes.min(4)) {
            let u = term.to_unscoped();
            if !out.contains(&u) {
                out.push(u);
            }
        }
    }
    out
}

/// The pointwise composite `i ↦ f(i)[g]` in prefix-plus-shift form.
fn compose_value_substs<M: DeBruijnModel>(
    model: &M,
    f: &ValueSubst<M::Value>,
    g: &ValueSubst<M::Value>,
) -> ValueSubst<M::Value> {
    let own = f.prefix.len();
    let len = own.max((own + g.prefix.len()).saturating_sub(f.shift));
    let prefix = (0..len)
        .map(|i| model.subst(&f.denote(i, |j| model.var(j)), g))
        .collect();
    let shift = (len - own + f.shift) - g.prefix.len() + g.shift;
    ValueSubst { prefix, shift }
}

/// Checks the substitution laws and the support oracle of `model` on
/// samples, then wraps it as a scoped model. A sampled violation causes
/// rejection with a witness; an empty closed fragment warns or rejects
/// depending on `opts.empty_policy`.
pub fn transport_unscoped_model<M: DeBruijnModel>(
    model: M,
    sig: &BindingSignature,
    opts: &TransportOptions,
) -> Result<ScopedFromDeBruijn<M>, TransportRejection> {
    let mut warnings = Vec::new();
    if enumerate_terms(sig, 0, opts.max_nodes.max(4)).is_empty() {
        let message = format!(
            "signature has no closed terms up to {} nodes; the scope-0 carrier is empty",
            opts.max_nodes.max(4)
        );
        match opts.empty_policy {
            EmptyPolicy::Warn => warnings.push(message),
            EmptyPolicy::Reject => {
                return Err(TransportRejection { law: "non-empty".to_string(), witness: message })
            }
        }
    }

    // Unit law and support soundness on every enumerated term.
    for term in &sampled_unscoped_terms(sig, opts) {
        let value = match ufold(&model, term) {
            Ok(v) => v,
            Err(_) => continue,
        };

        if model.subst(&value, &ValueSubst::unit()) != value {
            return Err(TransportRejection {
                law: "left-unit (x[var] = x)".to_string(),
                witness: format!("{term}"),
            });
        }

        let support = model.support(&value);
        for k in support..support + 3 {
            // Renaming that fixes indices below k and shifts the rest;
            // must fix any value of support <= k.
            let probe = ValueSubst {
                prefix: (0..k).map(|i| model.var(i)).collect(),
                shift: k + 1,
            };
            if model.subst(&value, &probe) != value {
                return Err(TransportRejection {
                    law: "support oracle soundness".to_string(),
                    witness: format!("{term} claims support {support} but moves under shift-at-{k}"),
                });
            }
        }
    }

    // Associativity and variable laws on seeded random substitutions.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let make_subst = |model: &M, rng: &mut ChaCha8Rng| -> Option<ValueSubst<M::Value>> {
        let len = rng.random_range(0..=3usize);
        let scope = rng.random_range(0..=opts.max_scope);
        let mut prefix = Vec::with_capacity(len);
        for _ in 0..len {
            let t = random_term(sig, scope, opts.max_nodes, rng)?;
            prefix.push(ufold(model, &t.to_unscoped()).ok()?);
        }
        Some(ValueSubst { prefix, shift: rng.random_range(0..=3usize) })
    };
    let mut checked = 0;
    let mut attempts = 0;
    while checked < opts.samples && attempts < opts.samples * 20 {
        attempts += 1;
        let scope = rng.random_range(0..=opts.max_scope);
        let Some(term) = random_term(sig, scope, opts.max_nodes, &mut rng) else { continue };
        let u = term.to_unscoped();
        let Ok(value) = ufold(&model, &u) else { continue };
        let (Some(f), Some(g)) = (make_subst(&model, &mut rng), make_subst(&model, &mut rng))
        else {
            continue;
        };

        let lhs = model.subst(&model.subst(&value, &f), &g);
        let rhs = model.subst(&value, &compose_value_substs(&model, &f, &g));
        if lhs != rhs {
            return Err(TransportRejection {
                law: "associativity (x[f][g] = x[f[g]])".to_string(),
                witness: format!("{u}"),
            });
        }

        for i in 0..f.prefix.len() + 2 {
            let lhs = model.subst(&model.var(i), &f);
            let rhs = f.denote(i, |j| model.var(j));
            if lhs != rhs {
                return Err(TransportRejection {
                    law: "right-unit (var(i)[f] = f(i))".to_string(),
                    witness: format!("(var {i})"),
                });
            }
        }
        checked += 1;
    }

    Ok(ScopedFromDeBruijn { inner: model, warnings })
}

/// A value of the transported unscoped model: a representative at some
/// scope, identified with all of its weakenings. Equality weakens both
/// sides to the larger scope and compares there.
#[derive(Clone)]
pub struct DeBruijnValue<V> {
    scope: usize,
    value: V,
    weaken: Arc<dyn Fn(&V, usize, usize) -> V + Send + Sync>,
}

impl<V> DeBruijnValue<V> {
    pub fn scope(&self) -> usize {
        self.scope
    }

    pub fn value(&self) -> &V {
        &self.value
    }

    /// The representative at `scope`, which must be at least the class's.
    pub fn at_scope(&self, scope: usize) -> V
    where
        V: Clone,
    {
        assert!(scope >= self.scope, "cannot restrict a representative");
        (self.weaken)(&self.value, self.scope, scope - self.scope)
    }
}

impl<V: Clone + PartialEq> PartialEq for DeBruijnValue<V> {
    fn eq(&self, other: &Self) -> bool {
        let common = self.scope.max(other.scope);
        self.at_scope(common) == other.at_scope(common)
    }
}

impl<V: fmt::Debug> fmt::Debug for DeBruijnValue<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ~@{}", self.value, self.scope)
    }
}

/// A De Bruijn-style model built over a scoped one: values are
/// representatives modulo weakening, living in the colimit of the
/// scope-indexed carriers.
pub struct DeBruijnFromScoped<M: RenamingModel + Send + Sync + 'static> {
    inner: Arc<M>,
    sig: BindingSignature,
}

impl<M: RenamingModel + Send + Sync + 'static> DeBruijnFromScoped<M> {
    fn class(&self, scope: usize, value: M::Value) -> DeBruijnValue<M::Value> {
        let inner = Arc::clone(&self.inner);
        DeBruijnValue {
            scope,
            value,
            weaken: Arc::new(move |v, from, k| inner.weaken(v, from, k)),
        }
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    /// Wraps a value known to live at `scope`.
    pub fn class_of(&self, scope: usize, value: M::Value) -> DeBruijnValue<M::Value> {
        self.class(scope, value)
    }

    /// Whether a renaming moving index `j` changes the representative.
    fn uses_index(&self, value: &DeBruijnValue<M::Value>, j: usize) -> bool {
        let n = value.scope;
        let rho: Vec<usize> = (0..n).map(|i| if i == j { n } else { i }).collect();
        let moved = self.inner.rename(&value.value, n, &rho, n + 1);
        moved != self.inner.weaken(&value.value, n, 1)
    }
}

impl<M: RenamingModel + Send + Sync + 'static> DeBruijnModel for DeBruijnFromScoped<M> {
    type Value = DeBruijnValue<M::Value>;

    fn var(&self, index: usize) -> Self::Value {
        self.class(index + 1, self.inner.var(index, index + 1))
    }

    fn op(&self, label: &str, args: Vec<Self::Value>) -> Result<Self::Value, ModelError> {
        let arity = self
            .sig
            .arity(label)
            .ok_or_else(|| ModelError::UnknownLabel(label.to_string()))?;
        if args.len() != arity.len() {
            return Err(ModelError::Invalid(format!(
                "label `{label}` takes {} arguments, got {}",
                arity.len(),
                args.len()
            )));
        }
        // Least ambient scope accommodating every argument class.
        let ambient = args
            .iter()
            .zip(arity.binders())
            .map(|(a, &k)| a.scope.saturating_sub(k))
            .max()
            .unwrap_or(0);
        let lifted: Vec<M::Value> = args
            .iter()
            .zip(arity.binders())
            .map(|(a, &k)| a.at_scope(ambient + k))
            .collect();
        let value = self.inner.op(label, lifted, ambient)?;
        Ok(self.class(ambient, value))
    }

    fn subst(&self, value: &Self::Value, f: &ValueSubst<Self::Value>) -> Self::Value {
        let m = value.scope;
        let entries: Vec<DeBruijnValue<M::Value>> =
            (0..m).map(|i| f.denote(i, |j| self.var(j))).collect();
        let target = entries.iter().map(|e| e.scope).max().unwrap_or(0);
        let env: Vec<M::Value> = entries.iter().map(|e| e.at_scope(target)).collect();
        self.class(target, self.inner.subst(&value.value, &env, m, target))
    }

    fn support(&self, value: &Self::Value) -> usize {
        let mut s = value.scope;
        while s > 0 && !self.uses_index(value, s - 1) {
            s -= 1;
        }
        s
    }
}

/// Checks on samples that the model's renaming action agrees with its
/// substitution on variable images, then wraps it as a De Bruijn-style
/// model over the colimit of its scopes.
pub fn transport_scoped_model<M: RenamingModel + Send + Sync + 'static>(
    model: M,
    sig: &BindingSignature,
    opts: &TransportOptions,
) -> Result<DeBruijnFromScoped<M>, TransportRejection> {
    if enumerate_terms(sig, 0, opts.max_nodes.max(4)).is_empty()
        && opts.empty_policy == EmptyPolicy::Reject
    {
        return Err(TransportRejection {
            law: "non-empty".to_string(),
            witness: format!(
                "signature has no closed terms up to {} nodes; the scope-0 carrier is empty",
                opts.max_nodes.max(4)
            ),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < opts.samples && attempts < opts.samples * 20 {
        attempts += 1;
        let m = rng.random_range(0..=opts.max_scope);
        let n = rng.random_range(1..=opts.max_scope.max(1));
        let Some(term) = random_term(sig, m, opts.max_nodes, &mut rng) else { continue };
        let Ok(value) = crate::models::fold(&model, &term) else { continue };
        let rho: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
        let by_rename = model.rename(&value, m, &rho, n);
        let env: Vec<M::Value> = rho.iter().map(|&i| model.var(i, n)).collect();
        let by_subst = model.subst(&value, &env, m, n);
        if by_rename != by_subst {
            return Err(TransportRejection {
                law: "renaming agrees with substitution on variables".to_string(),
                witness: format!("(term {term:?}) (rho {rho:?})"),
            });
        }
        checked += 1;
    }
    Ok(DeBruijnFromScoped { inner: Arc::new(model), sig: sig.clone() })
}
