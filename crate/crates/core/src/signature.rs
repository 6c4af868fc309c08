//! Binding signatures: the specification of a language with binders.
//!
//! An untyped [`BindingSignature`] lists, for each constructor, how many
//! variables each argument binds. The typed layer ([`TypedSignature`])
//! adds a type grammar, type-parametrized constructor families, retyping
//! along type translations, and signature morphisms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::sexpr::{self, ParseError, Pos, Sexpr};

/// Per-argument binder counts of one constructor.
///
/// The i-th entry is the number of variables bound in the i-th argument;
/// an empty list is a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BindingArity(Vec<usize>);

impl BindingArity {
    pub fn new(binders: Vec<usize>) -> Self {
        BindingArity(binders)
    }

    pub fn binders(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for BindingArity {
    fn from(v: Vec<usize>) -> Self {
        BindingArity(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: duplicate label `{label}`")]
    DuplicateLabel { label: String, pos: Pos },
    #[error("{pos}: negative binder count `{text}`")]
    NegativeBinderCount { text: String, pos: Pos },
    #[error("{pos}: {msg}")]
    Malformed { msg: String, pos: Pos },
    #[error("label `{0}` is reserved")]
    ReservedLabel(String),
    #[error("type `{0}` is not well-formed over the grammar")]
    IllFormedType(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{label}`: {msg}")]
    InvalidLabelParams { label: String, msg: String },
}

fn malformed(msg: impl Into<String>, pos: Pos) -> SigError {
    SigError::Malformed { msg: msg.into(), pos }
}

/// An ordered family of labelled binding arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingSignature {
    entries: Vec<(String, BindingArity)>,
    index: BTreeMap<String, usize>,
}

impl BindingSignature {
    /// Builds a signature from labelled arities, keeping the given order.
    pub fn new(entries: Vec<(String, BindingArity)>) -> Result<Self, SigError> {
        let mut index = BTreeMap::new();
        for (i, (label, _)) in entries.iter().enumerate() {
            if label == "var" {
                return Err(SigError::ReservedLabel(label.clone()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(SigError::DuplicateLabel {
                    label: label.clone(),
                    pos: Pos { line: 0, col: 0 },
                });
            }
        }
        Ok(BindingSignature { entries, index })
    }

    pub fn empty() -> Self {
        BindingSignature { entries: Vec::new(), index: BTreeMap::new() }
    }

    pub fn arity(&self, label: &str) -> Option<&BindingArity> {
        self.index.get(label).map(|&i| &self.entries[i].1)
    }

    /// Labels with their arities, in signature order.
    pub fn labels(&self) -> impl Iterator<Item = (&str, &BindingArity)> {
        self.entries.iter().map(|(l, a)| (l.as_str(), a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for BindingSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(sig")?;
        for (label, arity) in &self.entries {
            write!(f, " ({label}")?;
            for n in arity.binders() {
                write!(f, " {n}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(")")
    }
}

/// Reads a signature from its `(sig (<label> <n>...) ...)` form.
pub fn parse_signature(text: &str) -> Result<BindingSignature, SigError> {
    let expr = sexpr::parse(text)?;
    let items = expr
        .as_list()
        .ok_or_else(|| malformed("expected `(sig ...)`", expr.pos()))?;
    match items.first() {
        Some(head) if head.as_atom() == Some("sig") => {}
        _ => return Err(malformed("expected `(sig ...)`", expr.pos())),
    }
    let mut entries = Vec::new();
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    for item in &items[1..] {
        let parts = item
            .as_list()
            .ok_or_else(|| malformed("expected `(<label> <n>...)`", item.pos()))?;
        let (head, counts) = parts
            .split_first()
            .ok_or_else(|| malformed("empty constructor entry", item.pos()))?;
        let label = head
            .as_atom()
            .ok_or_else(|| malformed("constructor label must be an atom", head.pos()))?;
        if label == "var" {
            return Err(SigError::ReservedLabel(label.to_string()));
        }
        if seen.insert(label.to_string(), ()).is_some() {
            return Err(SigError::DuplicateLabel { label: label.to_string(), pos: head.pos() });
        }
        let mut binders = Vec::new();
        for c in counts {
            let atom = c
                .as_atom()
                .ok_or_else(|| malformed("binder count must be a number", c.pos()))?;
            if atom.starts_with('-') {
                return Err(SigError::NegativeBinderCount { text: atom.to_string(), pos: c.pos() });
            }
            let n: usize = atom
                .parse()
                .map_err(|_| malformed(format!("invalid binder count `{atom}`"), c.pos()))?;
            binders.push(n);
        }
        entries.push((label.to_string(), BindingArity::new(binders)));
    }
    BindingSignature::new(entries)
}

/// The untyped lambda calculus: `app` with two plain arguments, `abs`
/// binding one variable.
pub fn lc_signature() -> BindingSignature {
    BindingSignature::new(vec![
        ("app".to_string(), BindingArity::new(vec![0, 0])),
        ("abs".to_string(), BindingArity::new(vec![1])),
    ])
    .expect("lc signature is well-formed")
}

// ---------------------------------------------------------------------------
// Simply-typed signatures
// ---------------------------------------------------------------------------

/// A finite type expression: a base type or a constructor applied to
/// argument types.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Base(String),
    Con(String, Vec<TypeExpr>),
}

impl TypeExpr {
    pub fn base(name: impl Into<String>) -> Self {
        TypeExpr::Base(name.into())
    }

    /// `a ⇒ b`, written `(=> a b)`.
    pub fn arrow(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::Con("=>".to_string(), vec![a, b])
    }

    /// Tree height, used to bound type enumeration.
    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::Base(_) => 1,
            TypeExpr::Con(_, args) => {
                1 + args.iter().map(TypeExpr::depth).max().unwrap_or(0)
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Base(name) => f.write_str(name),
            TypeExpr::Con(name, args) => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn bool_ty() -> TypeExpr {
    TypeExpr::base("bool")
}

pub fn nat_ty() -> TypeExpr {
    TypeExpr::base("nat")
}

pub fn star_ty() -> TypeExpr {
    TypeExpr::base("star")
}

/// The grammar a set of types is generated from: base-type names plus
/// type constructors with fixed arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeGrammar {
    bases: Vec<String>,
    cons: BTreeMap<String, usize>,
}

impl TypeGrammar {
    pub fn new(bases: Vec<String>, cons: Vec<(String, usize)>) -> Self {
        TypeGrammar { bases, cons: cons.into_iter().collect() }
    }

    pub fn bases(&self) -> &[String] {
        &self.bases
    }

    pub fn check(&self, t: &TypeExpr) -> Result<(), SigError> {
        match t {
            TypeExpr::Base(name) => {
                if self.bases.iter().any(|b| b == name) {
                    Ok(())
                } else {
                    Err(SigError::IllFormedType(t.to_string()))
                }
            }
            TypeExpr::Con(name, args) => {
                match self.cons.get(name) {
                    Some(&arity) if arity == args.len() => {}
                    _ => return Err(SigError::IllFormedType(t.to_string())),
                }
                for a in args {
                    self.check(a)?;
                }
                Ok(())
            }
        }
    }

    /// All types of height at most `depth`, ordered by height and then
    /// lexicographically; deterministic.
    pub fn enumerate(&self, depth: usize) -> Vec<TypeExpr> {
        let mut by_depth: Vec<Vec<TypeExpr>> = vec![Vec::new()];
        for d in 1..=depth {
            let mut level = Vec::new();
            if d == 1 {
                for b in &self.bases {
                    level.push(TypeExpr::Base(b.clone()));
                }
            } else {
                // Exactly height d: at least one argument of height d-1.
                let smaller: Vec<TypeExpr> =
                    by_depth.iter().flatten().cloned().collect();
                for (name, &arity) in &self.cons {
                    let mut tuple = vec![0usize; arity];
                    if arity == 0 {
                        continue;
                    }
                    loop {
                        let args: Vec<TypeExpr> =
                            tuple.iter().map(|&i| smaller[i].clone()).collect();
                        if args.iter().map(TypeExpr::depth).max().unwrap_or(0) == d - 1 {
                            level.push(TypeExpr::Con(name.clone(), args));
                        }
                        // Advance the index tuple.
                        let mut pos = arity;
                        loop {
                            if pos == 0 {
                                break;
                            }
                            pos -= 1;
                            tuple[pos] += 1;
                            if tuple[pos] < smaller.len() {
                                break;
                            }
                            tuple[pos] = 0;
                        }
                        if tuple.iter().all(|&i| i == 0) {
                            break;
                        }
                    }
                }
            }
            by_depth.push(level);
        }
        by_depth.into_iter().flatten().collect()
    }
}

/// One argument slot of a typed arity: the types of the variables it
/// binds, and the argument's own type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundArg {
    pub bound: Vec<TypeExpr>,
    pub ty: TypeExpr,
}

impl BoundArg {
    pub fn plain(ty: TypeExpr) -> Self {
        BoundArg { bound: Vec::new(), ty }
    }

    pub fn binding(bound: Vec<TypeExpr>, ty: TypeExpr) -> Self {
        BoundArg { bound, ty }
    }
}

/// A simply-typed binding arity `t1^(u⃗1) × … × tn^(u⃗n) → τ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedArity {
    pub args: Vec<BoundArg>,
    pub result: TypeExpr,
}

impl TypedArity {
    pub fn new(args: Vec<BoundArg>, result: TypeExpr) -> Self {
        TypedArity { args, result }
    }

    pub fn constant(result: TypeExpr) -> Self {
        TypedArity { args: Vec::new(), result }
    }
}

impl fmt::Display for TypedArity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for arg in &self.args {
            f.write_str("(arg (")?;
            for (i, b) in arg.bound.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{b}")?;
            }
            write!(f, ") {}) ", arg.ty)?;
        }
        write!(f, "-> {})", self.result)
    }
}

/// A constructor label instance: a family name plus its type parameters,
/// e.g. `app` at `(s, t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedLabel {
    pub name: String,
    pub params: Vec<TypeExpr>,
}

impl TypedLabel {
    pub fn new(name: impl Into<String>, params: Vec<TypeExpr>) -> Self {
        TypedLabel { name: name.into(), params }
    }

    pub fn simple(name: impl Into<String>) -> Self {
        TypedLabel { name: name.into(), params: Vec::new() }
    }
}

impl fmt::Display for TypedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (", self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

type ArityFn = Arc<dyn Fn(&TypedLabel) -> Result<TypedArity, SigError> + Send + Sync>;

/// A simply-typed binding signature: a type grammar plus a family of
/// (possibly type-parametrized) labels with a computable arity map.
///
/// The type set may be infinite (e.g. closed under `=>`), so arities are
/// computed on demand rather than tabulated. Label parameters keep the
/// grammar they were born with even after retyping, which is why the
/// parameter grammar is tracked separately from the arity grammar.
#[derive(Clone)]
pub struct TypedSignature {
    type_grammar: TypeGrammar,
    param_grammar: TypeGrammar,
    families: Vec<(String, usize)>,
    arity_fn: ArityFn,
}

impl fmt::Debug for TypedSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypedSignature")
            .field("type_grammar", &self.type_grammar)
            .field("families", &self.families)
            .finish_non_exhaustive()
    }
}

impl TypedSignature {
    pub fn new(
        type_grammar: TypeGrammar,
        param_grammar: TypeGrammar,
        families: Vec<(String, usize)>,
        arity_fn: ArityFn,
    ) -> Self {
        TypedSignature { type_grammar, param_grammar, families, arity_fn }
    }

    pub fn type_grammar(&self) -> &TypeGrammar {
        &self.type_grammar
    }

    pub fn param_grammar(&self) -> &TypeGrammar {
        &self.param_grammar
    }

    /// Family names with their parameter counts, in signature order.
    pub fn families(&self) -> &[(String, usize)] {
        &self.families
    }

    pub fn has_family(&self, name: &str) -> bool {
        self.families.iter().any(|(n, _)| n == name)
    }

    /// The arity of a label instance. Fails on unknown family names,
    /// wrong parameter counts, or parameters outside the family's domain.
    pub fn arity_of(&self, label: &TypedLabel) -> Result<TypedArity, SigError> {
        let family = self
            .families
            .iter()
            .find(|(n, _)| n == &label.name)
            .ok_or_else(|| SigError::UnknownLabel(label.name.clone()))?;
        if family.1 != label.params.len() {
            return Err(SigError::InvalidLabelParams {
                label: label.name.clone(),
                msg: format!("expected {} type parameters, got {}", family.1, label.params.len()),
            });
        }
        for p in &label.params {
            self.param_grammar.check(p)?;
        }
        (self.arity_fn)(label)
    }

    /// Enumerates well-formed label instances whose parameters all have
    /// height at most `depth`.
    pub fn enumerate_labels(&self, depth: usize) -> Vec<TypedLabel> {
        let types = self.param_grammar.enumerate(depth);
        let mut out = Vec::new();
        for (name, count) in &self.families {
            let mut tuple = vec![0usize; *count];
            loop {
                let params: Vec<TypeExpr> = tuple.iter().map(|&i| types[i].clone()).collect();
                let label = TypedLabel::new(name.clone(), params);
                if self.arity_of(&label).is_ok() {
                    out.push(label);
                }
                if *count == 0 || types.is_empty() {
                    break;
                }
                let mut pos = *count;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    tuple[pos] += 1;
                    if tuple[pos] < types.len() {
                        break;
                    }
                    tuple[pos] = 0;
                }
                if tuple.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        out
    }
}

/// A computable translation between type grammars.
#[derive(Clone)]
pub struct TypeMap {
    source: TypeGrammar,
    target: TypeGrammar,
    map: Arc<dyn Fn(&TypeExpr) -> TypeExpr + Send + Sync>,
}

impl TypeMap {
    pub fn new(
        source: TypeGrammar,
        target: TypeGrammar,
        map: impl Fn(&TypeExpr) -> TypeExpr + Send + Sync + 'static,
    ) -> Self {
        TypeMap { source, target, map: Arc::new(map) }
    }

    pub fn identity(grammar: TypeGrammar) -> Self {
        TypeMap::new(grammar.clone(), grammar, |t| t.clone())
    }

    /// The constant translation collapsing every source type to `target_ty`.
    pub fn constant(source: TypeGrammar, target: TypeGrammar, target_ty: TypeExpr) -> Self {
        TypeMap::new(source, target, move |_| target_ty.clone())
    }

    pub fn source(&self) -> &TypeGrammar {
        &self.source
    }

    pub fn target(&self) -> &TypeGrammar {
        &self.target
    }

    /// Applies the translation, first checking the input against the
    /// source grammar.
    pub fn apply(&self, t: &TypeExpr) -> Result<TypeExpr, SigError> {
        self.source.check(t)?;
        Ok((self.map)(t))
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &TypeMap) -> TypeMap {
        let first = self.clone();
        let second = then.clone();
        TypeMap::new(self.source.clone(), then.target.clone(), move |t| {
            (second.map)(&(first.map)(t))
        })
    }
}

impl fmt::Debug for TypeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypeMap").finish_non_exhaustive()
    }
}

/// Applies a type translation to every type occurring in an arity.
pub fn retype_arity(g: &TypeMap, arity: &TypedArity) -> Result<TypedArity, SigError> {
    let mut args = Vec::with_capacity(arity.args.len());
    for arg in &arity.args {
        let bound = arg.bound.iter().map(|t| g.apply(t)).collect::<Result<_, _>>()?;
        args.push(BoundArg { bound, ty: g.apply(&arg.ty)? });
    }
    Ok(TypedArity { args, result: g.apply(&arity.result)? })
}

/// Retypes a whole signature: same labels, every arity pushed through
/// `g`. Label parameters are untouched, so the result's parameter grammar
/// is the source signature's.
pub fn retype_signature(g: &TypeMap, sig: &TypedSignature) -> TypedSignature {
    let inner = sig.clone();
    let g = g.clone();
    TypedSignature {
        type_grammar: g.target.clone(),
        param_grammar: sig.param_grammar.clone(),
        families: sig.families.clone(),
        arity_fn: Arc::new(move |label| {
            let arity = inner.arity_of(label)?;
            retype_arity(&g, &arity)
        }),
    }
}

type LabelFn = Arc<dyn Fn(&TypedLabel) -> TypedLabel + Send + Sync>;

/// A morphism of simply-typed signatures: a type translation plus a
/// label translation, required to be compatible with the arities.
#[derive(Clone)]
pub struct SigMorphism {
    pub type_map: TypeMap,
    label_map: LabelFn,
}

impl SigMorphism {
    pub fn new(
        type_map: TypeMap,
        label_map: impl Fn(&TypedLabel) -> TypedLabel + Send + Sync + 'static,
    ) -> Self {
        SigMorphism { type_map, label_map: Arc::new(label_map) }
    }

    pub fn identity(grammar: TypeGrammar) -> Self {
        SigMorphism::new(TypeMap::identity(grammar), |l| l.clone())
    }

    pub fn map_label(&self, label: &TypedLabel) -> TypedLabel {
        (self.label_map)(label)
    }

    pub fn map_type(&self, t: &TypeExpr) -> Result<TypeExpr, SigError> {
        self.type_map.apply(t)
    }
}

impl fmt::Debug for SigMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigMorphism").finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismViolation {
    pub label: TypedLabel,
    pub detail: String,
}

/// Outcome of a bounded arity-compatibility check. The universally
/// quantified condition is sampled on every label instance enumerable
/// within `type_depth`; an empty violation list means every checked
/// instance passed.
#[derive(Debug, Clone)]
pub struct MorphismReport {
    pub type_depth: usize,
    pub checked: usize,
    pub violations: Vec<MorphismViolation>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MorphismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "MORPHISM {} depth={} checked={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.type_depth,
            self.checked
        )?;
        for v in &self.violations {
            writeln!(f, "  violation at ({}): {}", v.label, v.detail)?;
        }
        Ok(())
    }
}

/// Verifies `arity'(h(i)) = g*(arity(i))` for every label of `source`
/// enumerable within `type_depth`.
pub fn check_morphism(
    m: &SigMorphism,
    source: &TypedSignature,
    target: &TypedSignature,
    type_depth: usize,
) -> Result<MorphismReport, SigError> {
    let mut report =
        MorphismReport { type_depth, checked: 0, violations: Vec::new() };
    for label in source.enumerate_labels(type_depth) {
        let arity = source.arity_of(&label)?;
        let expected = retype_arity(&m.type_map, &arity)?;
        let image = m.map_label(&label);
        let found = target.arity_of(&image)?;
        report.checked += 1;
        if found != expected {
            report.violations.push(MorphismViolation {
                label: label.clone(),
                detail: format!(
                    "arity of image ({image}) is {found}, retyping gives {expected}"
                ),
            });
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Built-in typed signatures
// ---------------------------------------------------------------------------

pub fn pcf_type_grammar() -> TypeGrammar {
    TypeGrammar::new(
        vec!["bool".to_string(), "nat".to_string()],
        vec![("=>".to_string(), 2)],
    )
}

pub fn ulc_type_grammar() -> TypeGrammar {
    TypeGrammar::new(vec!["star".to_string()], Vec::new())
}

/// PCF: simply-typed lambda calculus over `bool` and `nat`, with the
/// usual constants, a conditional per base type, and a fixpoint operator
/// per type.
pub fn pcf_signature() -> TypedSignature {
    let grammar = pcf_type_grammar();
    let families = vec![
        ("app".to_string(), 2),
        ("abs".to_string(), 2),
        ("true".to_string(), 0),
        ("false".to_string(), 0),
        ("zero".to_string(), 0),
        ("succ".to_string(), 0),
        ("pred".to_string(), 0),
        ("fix".to_string(), 1),
        ("if".to_string(), 1),
    ];
    let arity_fn: ArityFn = Arc::new(|label: &TypedLabel| {
        let p = &label.params;
        match label.name.as_str() {
            // app at (s, t): (t => s) × t -> s
            "app" => Ok(TypedArity::new(
                vec![
                    BoundArg::plain(TypeExpr::arrow(p[1].clone(), p[0].clone())),
                    BoundArg::plain(p[1].clone()),
                ],
                p[0].clone(),
            )),
            // abs at (s, t): s^(t) -> (t => s)
            "abs" => Ok(TypedArity::new(
                vec![BoundArg::binding(vec![p[1].clone()], p[0].clone())],
                TypeExpr::arrow(p[1].clone(), p[0].clone()),
            )),
            "true" | "false" => Ok(TypedArity::constant(bool_ty())),
            "zero" => Ok(TypedArity::constant(nat_ty())),
            "succ" | "pred" => {
                Ok(TypedArity::constant(TypeExpr::arrow(nat_ty(), nat_ty())))
            }
            // fix at τ: (τ => τ) -> τ
            "fix" => Ok(TypedArity::new(
                vec![BoundArg::plain(TypeExpr::arrow(p[0].clone(), p[0].clone()))],
                p[0].clone(),
            )),
            // if at ι ∈ {bool, nat}: () -> bool => ι => ι => ι
            "if" => {
                let iota = p[0].clone();
                if iota != bool_ty() && iota != nat_ty() {
                    return Err(SigError::InvalidLabelParams {
                        label: "if".to_string(),
                        msg: format!("parameter must be a base type, got {iota}"),
                    });
                }
                Ok(TypedArity::constant(TypeExpr::arrow(
                    bool_ty(),
                    TypeExpr::arrow(
                        iota.clone(),
                        TypeExpr::arrow(iota.clone(), iota),
                    ),
                )))
            }
            other => Err(SigError::UnknownLabel(other.to_string())),
        }
    });
    TypedSignature::new(grammar.clone(), grammar, families, arity_fn)
}

/// The untyped lambda calculus presented over the single type `star`.
pub fn ulc_signature() -> TypedSignature {
    let grammar = ulc_type_grammar();
    let families = vec![("app".to_string(), 0), ("abs".to_string(), 0)];
    let arity_fn: ArityFn = Arc::new(|label: &TypedLabel| match label.name.as_str() {
        "app" => Ok(TypedArity::new(
            vec![BoundArg::plain(star_ty()), BoundArg::plain(star_ty())],
            star_ty(),
        )),
        "abs" => Ok(TypedArity::new(
            vec![BoundArg::binding(vec![star_ty()], star_ty())],
            star_ty(),
        )),
        other => Err(SigError::UnknownLabel(other.to_string())),
    });
    TypedSignature::new(grammar.clone(), grammar, families, arity_fn)
}

/// Looks up a built-in typed signature by name.
pub fn builtin_typed(name: &str) -> Option<TypedSignature> {
    match name {
        "pcf" => Some(pcf_signature()),
        "ulc" => Some(ulc_signature()),
        _ => None,
    }
}

/// The three built-in signatures.
#[derive(Clone)]
pub struct BuiltinSignatures {
    pub lc: BindingSignature,
    pub pcf: TypedSignature,
    pub ulc: TypedSignature,
}

pub fn builtin_signatures() -> BuiltinSignatures {
    BuiltinSignatures { lc: lc_signature(), pcf: pcf_signature(), ulc: ulc_signature() }
}

/// Parses a type from its s-expression form (`bool`, `nat`, `star`,
/// `(=> <t> <t>)`, or any declared constructor application).
pub fn parse_type(expr: &Sexpr) -> Result<TypeExpr, SigError> {
    match expr {
        Sexpr::Atom(name, _) => Ok(TypeExpr::Base(name.clone())),
        Sexpr::List(items, pos) => {
            let (head, args) = items
                .split_first()
                .ok_or_else(|| malformed("empty type expression", *pos))?;
            let name = head
                .as_atom()
                .ok_or_else(|| malformed("type constructor must be an atom", head.pos()))?;
            let args = args.iter().map(parse_type).collect::<Result<Vec<_>, _>>()?;
            Ok(TypeExpr::Con(name.to_string(), args))
        }
    }
}

pub fn parse_type_str(text: &str) -> Result<TypeExpr, SigError> {
    parse_type(&sexpr::parse(text)?)
}

/// Parses a custom finite-type typed signature:
/// `(tysig (types <t>...) (op <label> (arg (<boundTy>...) <argTy>)... <resTy>) ...)`.
pub fn parse_typed_signature(text: &str) -> Result<TypedSignature, SigError> {
    let expr = sexpr::parse(text)?;
    let items = expr
        .as_list()
        .ok_or_else(|| malformed("expected `(tysig ...)`", expr.pos()))?;
    match items.first() {
        Some(head) if head.as_atom() == Some("tysig") => {}
        _ => return Err(malformed("expected `(tysig ...)`", expr.pos())),
    }
    let types_form = items
        .get(1)
        .and_then(|e| e.as_list())
        .ok_or_else(|| malformed("expected `(types <t>...)`", expr.pos()))?;
    if types_form.first().and_then(Sexpr::as_atom) != Some("types") {
        return Err(malformed("expected `(types <t>...)`", items[1].pos()));
    }
    let mut bases = Vec::new();
    for t in &types_form[1..] {
        let name = t
            .as_atom()
            .ok_or_else(|| malformed("base type must be an atom", t.pos()))?;
        bases.push(name.to_string());
    }
    let grammar = TypeGrammar::new(bases, Vec::new());

    let mut table: BTreeMap<String, TypedArity> = BTreeMap::new();
    let mut families = Vec::new();
    for op in &items[2..] {
        let parts = op
            .as_list()
            .ok_or_else(|| malformed("expected `(op ...)`", op.pos()))?;
        if parts.first().and_then(Sexpr::as_atom) != Some("op") {
            return Err(malformed("expected `(op ...)`", op.pos()));
        }
        if parts.len() < 3 {
            return Err(malformed("expected `(op <label> <arg>... <resTy>)`", op.pos()));
        }
        let label = parts[1]
            .as_atom()
            .ok_or_else(|| malformed("label must be an atom", parts[1].pos()))?;
        let mut args = Vec::new();
        for arg in &parts[2..parts.len() - 1] {
            let arg_parts = arg
                .as_list()
                .ok_or_else(|| malformed("expected `(arg (<boundTy>...) <argTy>)`", arg.pos()))?;
            if arg_parts.len() != 3 || arg_parts[0].as_atom() != Some("arg") {
                return Err(malformed("expected `(arg (<boundTy>...) <argTy>)`", arg.pos()));
            }
            let bound_list = arg_parts[1]
                .as_list()
                .ok_or_else(|| malformed("bound types must be a list", arg_parts[1].pos()))?;
            let mut bound = Vec::new();
            for b in bound_list {
                let ty = parse_type(b)?;
                grammar.check(&ty)?;
                bound.push(ty);
            }
            let ty = parse_type(&arg_parts[2])?;
            grammar.check(&ty)?;
            args.push(BoundArg { bound, ty });
        }
        let result = parse_type(parts.last().unwrap())?;
        grammar.check(&result)?;
        if table
            .insert(label.to_string(), TypedArity::new(args, result))
            .is_some()
        {
            return Err(SigError::DuplicateLabel { label: label.to_string(), pos: parts[1].pos() });
        }
        families.push((label.to_string(), 0));
    }
    let arity_fn: ArityFn = Arc::new(move |label: &TypedLabel| {
        table
            .get(&label.name)
            .cloned()
            .ok_or_else(|| SigError::UnknownLabel(label.name.clone()))
    });
    Ok(TypedSignature::new(grammar.clone(), grammar, families, arity_fn))
}
