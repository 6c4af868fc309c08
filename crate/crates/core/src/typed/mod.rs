//! Intrinsically typed syntax over a simply-typed signature, typed
//! substitution and fold, pullback of models along signature morphisms,
//! and extended models for cross-type-system translation.
//!
//! A [`TypedTerm`] carries its context and result type; construction
//! typechecks eagerly, so every value in circulation is well-typed.
//! Contexts use the same convention as scopes: index 0 is the most
//! recently bound variable.

pub mod pcf;

use std::fmt;

use crate::models::ModelError;
use crate::sexpr::{self, ParseError, Sexpr};
use crate::signature::{
    check_morphism, parse_type, MorphismReport, SigError, SigMorphism, TypeExpr, TypedArity,
    TypedLabel, TypedSignature,
};

/// An ordered list of types; index 0 is the innermost binding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Context(Vec<TypeExpr>);

impl Context {
    pub fn new(types: Vec<TypeExpr>) -> Self {
        Context(types)
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&TypeExpr> {
        self.0.get(index)
    }

    pub fn types(&self) -> &[TypeExpr] {
        &self.0
    }

    /// The context extended by newly bound types (which become the
    /// lowest indices).
    pub fn extend(&self, bound: &[TypeExpr]) -> Context {
        let mut types = bound.to_vec();
        types.extend(self.0.iter().cloned());
        Context(types)
    }

    /// Applies a type translation entrywise.
    pub fn map_types(&self, g: &crate::signature::TypeMap) -> Result<Context, SigError> {
        Ok(Context(self.0.iter().map(|t| g.apply(t)).collect::<Result<_, _>>()?))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundIndex { index: usize, ctx_len: usize },
    Signature(SigError),
    ArgCount { label: String, expected: usize, got: usize },
    ArgTypeMismatch { label: String, arg: usize, expected: TypeExpr, found: TypeExpr },
    ArgContextMismatch { label: String, arg: usize, expected: Context, found: Context },
    EntryMismatch { entry: usize, detail: String },
    SourceMismatch { expected: Context, found: Context },
    Parse(ParseError),
}

/// A typing error, located by the path of argument positions from the
/// root.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct TypeError {
    pub path: Vec<usize>,
    pub kind: TypeErrorKind,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("at ")?;
        if self.path.is_empty() {
            f.write_str("root")?;
        } else {
            for (i, p) in self.path.iter().enumerate() {
                if i > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{p}")?;
            }
        }
        f.write_str(": ")?;
        match &self.kind {
            TypeErrorKind::UnboundIndex { index, ctx_len } => {
                write!(f, "variable {index} unbound in context of length {ctx_len}")
            }
            TypeErrorKind::Signature(e) => write!(f, "{e}"),
            TypeErrorKind::ArgCount { label, expected, got } => {
                write!(f, "label `{label}` takes {expected} arguments, got {got}")
            }
            TypeErrorKind::ArgTypeMismatch { label, arg, expected, found } => write!(
                f,
                "argument {arg} of `{label}` must have type {expected}, found {found}"
            ),
            TypeErrorKind::ArgContextMismatch { label, arg, expected, found } => write!(
                f,
                "argument {arg} of `{label}` must live in context {expected}, found {found}"
            ),
            TypeErrorKind::EntryMismatch { entry, detail } => {
                write!(f, "substitution entry {entry}: {detail}")
            }
            TypeErrorKind::SourceMismatch { expected, found } => {
                write!(f, "substitution source {found} does not match context {expected}")
            }
            TypeErrorKind::Parse(e) => write!(f, "{e}"),
        }
    }
}

fn err_here(kind: TypeErrorKind) -> TypeError {
    TypeError { path: Vec::new(), kind }
}

fn push_path(mut e: TypeError, index: usize) -> TypeError {
    e.path.insert(0, index);
    e
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum TypedNode {
    Var(usize),
    Op(TypedLabel, Vec<TypedTerm>),
}

/// A well-typed term: context, result type, and the tree. Arguments of a
/// constructor are full typed terms in their extended contexts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedTerm {
    ctx: Context,
    ty: TypeExpr,
    node: TypedNode,
}

impl TypedTerm {
    pub fn var(ctx: &Context, index: usize) -> Result<Self, TypeError> {
        let ty = ctx.get(index).ok_or_else(|| {
            err_here(TypeErrorKind::UnboundIndex { index, ctx_len: ctx.len() })
        })?;
        Ok(TypedTerm { ctx: ctx.clone(), ty: ty.clone(), node: TypedNode::Var(index) })
    }

    pub fn op(
        sig: &TypedSignature,
        label: TypedLabel,
        args: Vec<TypedTerm>,
        ctx: &Context,
    ) -> Result<Self, TypeError> {
        let arity = sig
            .arity_of(&label)
            .map_err(|e| err_here(TypeErrorKind::Signature(e)))?;
        check_op_shape(&label, &arity, &args, ctx)?;
        Ok(TypedTerm {
            ctx: ctx.clone(),
            ty: arity.result,
            node: TypedNode::Op(label, args),
        })
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn ty(&self) -> &TypeExpr {
        &self.ty
    }

    pub fn size(&self) -> usize {
        match &self.node {
            TypedNode::Var(_) => 1,
            TypedNode::Op(_, args) => 1 + args.iter().map(TypedTerm::size).sum::<usize>(),
        }
    }

    /// Inserts `inserted` into the context at depth `at`, shifting the
    /// indices at and above `at`.
    fn insert_ctx(&self, at: usize, inserted: &[TypeExpr]) -> TypedTerm {
        let mut types = self.ctx.0.clone();
        for (offset, t) in inserted.iter().enumerate() {
            types.insert(at + offset, t.clone());
        }
        let ctx = Context(types);
        let node = match &self.node {
            TypedNode::Var(i) => {
                TypedNode::Var(if *i < at { *i } else { *i + inserted.len() })
            }
            TypedNode::Op(label, args) => TypedNode::Op(
                label.clone(),
                args.iter()
                    .map(|a| {
                        let bound = a.ctx.len() - self.ctx.len();
                        a.insert_ctx(at + bound, inserted)
                    })
                    .collect(),
            ),
        };
        TypedTerm { ctx, ty: self.ty.clone(), node }
    }

    /// Weakens by newly bound types: context `Γ` becomes `bound ++ Γ`
    /// with free indices shifted past the new entries.
    pub fn shift_under(&self, bound: &[TypeExpr]) -> TypedTerm {
        if bound.is_empty() {
            return self.clone();
        }
        self.insert_ctx(0, bound)
    }

    /// Capture-avoiding simultaneous substitution; under binders the
    /// substitution is lifted with fresh typed variables.
    pub fn substitute(&self, subst: &TypedSubst) -> Result<TypedTerm, TypeError> {
        if subst.source != self.ctx {
            return Err(err_here(TypeErrorKind::SourceMismatch {
                expected: self.ctx.clone(),
                found: subst.source.clone(),
            }));
        }
        Ok(self.substitute_unchecked(subst))
    }

    fn substitute_unchecked(&self, subst: &TypedSubst) -> TypedTerm {
        match &self.node {
            TypedNode::Var(i) => subst.entries[*i].clone(),
            TypedNode::Op(label, args) => {
                let new_args: Vec<TypedTerm> = args
                    .iter()
                    .map(|a| {
                        let bound_len = a.ctx.len() - self.ctx.len();
                        let bound: Vec<TypeExpr> = a.ctx.0[..bound_len].to_vec();
                        a.substitute_unchecked(&subst.lift(&bound))
                    })
                    .collect();
                TypedTerm {
                    ctx: subst.target.clone(),
                    ty: self.ty.clone(),
                    node: TypedNode::Op(label.clone(), new_args),
                }
            }
        }
    }

    /// Reads and typechecks a term.
    pub fn parse(
        sig: &TypedSignature,
        text: &str,
        ctx: &Context,
    ) -> Result<Self, TypeError> {
        let expr = TypedTermExpr::parse(text)?;
        typecheck(sig, ctx, &expr)
    }
}

impl fmt::Display for TypedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            TypedNode::Var(i) => write!(f, "(var {i})"),
            TypedNode::Op(label, args) => {
                write!(f, "(op {} (", label.name)?;
                for (i, p) in label.params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn check_op_shape(
    label: &TypedLabel,
    arity: &TypedArity,
    args: &[TypedTerm],
    ctx: &Context,
) -> Result<(), TypeError> {
    if args.len() != arity.args.len() {
        return Err(err_here(TypeErrorKind::ArgCount {
            label: label.name.clone(),
            expected: arity.args.len(),
            got: args.len(),
        }));
    }
    for (j, (arg, spec)) in args.iter().zip(&arity.args).enumerate() {
        let expected_ctx = ctx.extend(&spec.bound);
        if arg.ctx != expected_ctx {
            return Err(err_here(TypeErrorKind::ArgContextMismatch {
                label: label.name.clone(),
                arg: j,
                expected: expected_ctx,
                found: arg.ctx.clone(),
            }));
        }
        if arg.ty != spec.ty {
            return Err(err_here(TypeErrorKind::ArgTypeMismatch {
                label: label.name.clone(),
                arg: j,
                expected: spec.ty.clone(),
                found: arg.ty.clone(),
            }));
        }
    }
    Ok(())
}

/// An unchecked typed-term tree, as parsed from
/// `(var <i>)` / `(op <name> (<type>...) <arg>...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypedTermExpr {
    Var(usize),
    Op(String, Vec<TypeExpr>, Vec<TypedTermExpr>),
}

impl TypedTermExpr {
    pub fn parse(text: &str) -> Result<Self, TypeError> {
        let expr = sexpr::parse(text)
            .map_err(|e| err_here(TypeErrorKind::Parse(e)))?;
        Self::from_sexpr(&expr)
    }

    pub fn from_sexpr(expr: &Sexpr) -> Result<Self, TypeError> {
        let parse_err = |pos, msg: &str| {
            err_here(TypeErrorKind::Parse(ParseError { pos, msg: msg.to_string() }))
        };
        let items = expr
            .as_list()
            .ok_or_else(|| parse_err(expr.pos(), "expected `(var <i>)` or `(op ...)`"))?;
        match items.first().and_then(Sexpr::as_atom) {
            Some("var") => {
                let index = items
                    .get(1)
                    .and_then(Sexpr::as_atom)
                    .and_then(|a| a.parse().ok())
                    .filter(|_| items.len() == 2)
                    .ok_or_else(|| parse_err(expr.pos(), "expected `(var <i>)`"))?;
                Ok(TypedTermExpr::Var(index))
            }
            Some("op") => {
                if items.len() < 3 {
                    return Err(parse_err(
                        expr.pos(),
                        "expected `(op <name> (<type>...) <arg>...)`",
                    ));
                }
                let name = items[1]
                    .as_atom()
                    .ok_or_else(|| parse_err(items[1].pos(), "label must be an atom"))?;
                let params_list = items[2]
                    .as_list()
                    .ok_or_else(|| parse_err(items[2].pos(), "type parameters must be a list"))?;
                let mut params = params_list
                    .iter()
                    .map(|p| parse_type(p).map_err(|e| err_here(TypeErrorKind::Signature(e))))
                    .collect::<Result<Vec<_>, _>>()?;
                // `if_nat` / `if_bool` sugar for the conditional family.
                let name = match name {
                    "if_nat" if params.is_empty() => {
                        params = vec![crate::signature::nat_ty()];
                        "if"
                    }
                    "if_bool" if params.is_empty() => {
                        params = vec![crate::signature::bool_ty()];
                        "if"
                    }
                    other => other,
                };
                let args = items[3..]
                    .iter()
                    .enumerate()
                    .map(|(j, a)| Self::from_sexpr(a).map_err(|e| push_path(e, j)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TypedTermExpr::Op(name.to_string(), params, args))
            }
            _ => Err(parse_err(expr.pos(), "expected `(var <i>)` or `(op ...)`")),
        }
    }
}

/// Typechecks an unchecked tree against a signature and context,
/// returning the annotated term. The type is determined by the arity of
/// each label; errors report the argument path.
pub fn typecheck(
    sig: &TypedSignature,
    ctx: &Context,
    expr: &TypedTermExpr,
) -> Result<TypedTerm, TypeError> {
    match expr {
        TypedTermExpr::Var(i) => TypedTerm::var(ctx, *i),
        TypedTermExpr::Op(name, params, args) => {
            let label = TypedLabel::new(name.clone(), params.clone());
            let arity = sig
                .arity_of(&label)
                .map_err(|e| err_here(TypeErrorKind::Signature(e)))?;
            if args.len() != arity.args.len() {
                return Err(err_here(TypeErrorKind::ArgCount {
                    label: name.clone(),
                    expected: arity.args.len(),
                    got: args.len(),
                }));
            }
            let typed_args = args
                .iter()
                .zip(&arity.args)
                .enumerate()
                .map(|(j, (a, spec))| {
                    let inner = typecheck(sig, &ctx.extend(&spec.bound), a)
                        .map_err(|e| push_path(e, j))?;
                    if inner.ty != spec.ty {
                        return Err(push_path(
                            err_here(TypeErrorKind::ArgTypeMismatch {
                                label: name.clone(),
                                arg: j,
                                expected: spec.ty.clone(),
                                found: inner.ty.clone(),
                            }),
                            j,
                        ));
                    }
                    Ok(inner)
                })
                .collect::<Result<Vec<_>, _>>()?;
            TypedTerm::op(sig, label, typed_args, ctx)
        }
    }
}

/// A typed substitution `Γ → Δ`: one entry per source slot, entry `i`
/// typed `Γ[i]` in `Δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedSubst {
    source: Context,
    target: Context,
    entries: Vec<TypedTerm>,
}

impl TypedSubst {
    pub fn new(
        entries: Vec<TypedTerm>,
        source: Context,
        target: Context,
    ) -> Result<Self, TypeError> {
        if entries.len() != source.len() {
            return Err(err_here(TypeErrorKind::EntryMismatch {
                entry: entries.len(),
                detail: format!(
                    "{} entries for a source context of length {}",
                    entries.len(),
                    source.len()
                ),
            }));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.ctx != target {
                return Err(err_here(TypeErrorKind::EntryMismatch {
                    entry: i,
                    detail: format!("entry context {} is not the target {target}", e.ctx),
                }));
            }
            if Some(&e.ty) != source.get(i) {
                return Err(err_here(TypeErrorKind::EntryMismatch {
                    entry: i,
                    detail: format!(
                        "entry has type {}, expected {}",
                        e.ty,
                        source.get(i).map(ToString::to_string).unwrap_or_default()
                    ),
                }));
            }
        }
        Ok(TypedSubst { source, target, entries })
    }

    pub fn identity(ctx: &Context) -> TypedSubst {
        TypedSubst {
            source: ctx.clone(),
            target: ctx.clone(),
            entries: (0..ctx.len())
                .map(|i| TypedTerm::var(ctx, i).expect("index in context"))
                .collect(),
        }
    }

    pub fn source(&self) -> &Context {
        &self.source
    }

    pub fn target(&self) -> &Context {
        &self.target
    }

    pub fn entries(&self) -> &[TypedTerm] {
        &self.entries
    }

    /// Lifts under newly bound types: fresh variables for the bound
    /// slots, old entries weakened past them.
    pub fn lift(&self, bound: &[TypeExpr]) -> TypedSubst {
        if bound.is_empty() {
            return self.clone();
        }
        let source = self.source.extend(bound);
        let target = self.target.extend(bound);
        let mut entries: Vec<TypedTerm> = (0..bound.len())
            .map(|i| TypedTerm::var(&target, i).expect("fresh var in context"))
            .collect();
        for e in &self.entries {
            entries.push(e.shift_under(bound));
        }
        TypedSubst { source, target, entries }
    }

    /// Kleisli composition: entrywise substitution.
    pub fn compose(&self, other: &TypedSubst) -> Result<TypedSubst, TypeError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.substitute(other))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TypedSubst { source: self.source.clone(), target: other.target.clone(), entries })
    }
}

// ---------------------------------------------------------------------------
// Typed models
// ---------------------------------------------------------------------------

/// A model of a simply-typed signature: carrier indexed by context and
/// type, with variable, constructor, and substitution interpretations.
pub trait TypedModel {
    type Value: Clone + PartialEq + fmt::Debug;

    fn var(&self, ctx: &Context, index: usize) -> Self::Value;

    fn op(
        &self,
        label: &TypedLabel,
        args: Vec<Self::Value>,
        ctx: &Context,
    ) -> Result<Self::Value, ModelError>;

    fn subst(
        &self,
        value: &Self::Value,
        src: &Context,
        env: &[Self::Value],
        tgt: &Context,
    ) -> Self::Value;

    /// Weakening past newly bound types, by substitution with shifted
    /// variables.
    fn shift_under(&self, value: &Self::Value, ctx: &Context, bound: &[TypeExpr]) -> Self::Value {
        let extended = ctx.extend(bound);
        let env: Vec<Self::Value> = (0..ctx.len())
            .map(|i| self.var(&extended, i + bound.len()))
            .collect();
        self.subst(value, ctx, &env, &extended)
    }
}

/// The typed recursion principle: structural recursion into any typed
/// model.
pub fn typed_fold<M: TypedModel>(model: &M, term: &TypedTerm) -> Result<M::Value, ModelError> {
    match &term.node {
        TypedNode::Var(i) => Ok(model.var(&term.ctx, *i)),
        TypedNode::Op(label, args) => {
            let values = args
                .iter()
                .map(|a| typed_fold(model, a))
                .collect::<Result<Vec<_>, _>>()?;
            model.op(label, values, &term.ctx)
        }
    }
}

/// Typed syntax as a model of itself.
pub struct TypedSyntaxModel {
    sig: TypedSignature,
}

pub fn typed_syntax_model(sig: &TypedSignature) -> TypedSyntaxModel {
    TypedSyntaxModel { sig: sig.clone() }
}

impl TypedModel for TypedSyntaxModel {
    type Value = TypedTerm;

    fn var(&self, ctx: &Context, index: usize) -> TypedTerm {
        TypedTerm::var(ctx, index).expect("model contract: index in context")
    }

    fn op(
        &self,
        label: &TypedLabel,
        args: Vec<TypedTerm>,
        ctx: &Context,
    ) -> Result<TypedTerm, ModelError> {
        TypedTerm::op(&self.sig, label.clone(), args, ctx)
            .map_err(|e| ModelError::Invalid(e.to_string()))
    }

    fn subst(
        &self,
        value: &TypedTerm,
        src: &Context,
        env: &[TypedTerm],
        tgt: &Context,
    ) -> TypedTerm {
        let subst = TypedSubst::new(env.to_vec(), src.clone(), tgt.clone())
            .expect("model contract: env typing");
        value.substitute(&subst).expect("model contract: source context")
    }

    fn shift_under(&self, value: &TypedTerm, _ctx: &Context, bound: &[TypeExpr]) -> TypedTerm {
        value.shift_under(bound)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PullbackError {
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error("signature morphism incompatible with the arities:\n{0}")]
    Incompatible(MorphismReport),
}

/// The pullback of a model along a signature morphism: the carrier at
/// `(Γ, τ)` is the inner carrier at `(g Γ, g τ)`, and constructors go
/// through the label translation.
pub struct PullbackModel<'a, M: TypedModel> {
    morphism: &'a SigMorphism,
    inner: &'a M,
}

impl<M: TypedModel> PullbackModel<'_, M> {
    fn map_ctx(&self, ctx: &Context) -> Context {
        ctx.map_types(&self.morphism.type_map)
            .expect("pullback contract: context inside the source grammar")
    }
}

impl<M: TypedModel> TypedModel for PullbackModel<'_, M> {
    type Value = M::Value;

    fn var(&self, ctx: &Context, index: usize) -> M::Value {
        self.inner.var(&self.map_ctx(ctx), index)
    }

    fn op(
        &self,
        label: &TypedLabel,
        args: Vec<M::Value>,
        ctx: &Context,
    ) -> Result<M::Value, ModelError> {
        self.inner.op(&self.morphism.map_label(label), args, &self.map_ctx(ctx))
    }

    fn subst(
        &self,
        value: &M::Value,
        src: &Context,
        env: &[M::Value],
        tgt: &Context,
    ) -> M::Value {
        self.inner.subst(value, &self.map_ctx(src), env, &self.map_ctx(tgt))
    }
}

/// Checks the morphism at `type_depth` and forms the pullback model.
pub fn pullback_model<'a, M: TypedModel>(
    morphism: &'a SigMorphism,
    model: &'a M,
    source: &TypedSignature,
    target: &TypedSignature,
    type_depth: usize,
) -> Result<PullbackModel<'a, M>, PullbackError> {
    let report = check_morphism(morphism, source, target, type_depth)?;
    if !report.passed() {
        return Err(PullbackError::Incompatible(report));
    }
    Ok(PullbackModel { morphism, inner: model })
}

/// A model of another signature reached by a morphism, acting as a model
/// of the source signature via pullback; the vehicle for translating
/// across type systems.
pub struct ExtendedModel<M: TypedModel> {
    source: TypedSignature,
    target: TypedSignature,
    morphism: SigMorphism,
    model: M,
}

impl<M: TypedModel> ExtendedModel<M> {
    /// Validates the morphism at `type_depth` and assembles the extended
    /// model.
    pub fn new(
        source: TypedSignature,
        target: TypedSignature,
        morphism: SigMorphism,
        model: M,
        type_depth: usize,
    ) -> Result<Self, PullbackError> {
        let report = check_morphism(&morphism, &source, &target, type_depth)?;
        if !report.passed() {
            return Err(PullbackError::Incompatible(report));
        }
        Ok(ExtendedModel { source, target, morphism, model })
    }

    pub fn source(&self) -> &TypedSignature {
        &self.source
    }

    pub fn target(&self) -> &TypedSignature {
        &self.target
    }

    pub fn morphism(&self) -> &SigMorphism {
        &self.morphism
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    /// The initial morphism into the pulled-back model: a typed fold.
    pub fn translate(&self, term: &TypedTerm) -> Result<M::Value, ModelError> {
        let pullback = PullbackModel { morphism: &self.morphism, inner: &self.model };
        typed_fold(&pullback, term)
    }
}

/// Translates a term of the source signature through an extended model.
pub fn translate<M: TypedModel>(
    extended: &ExtendedModel<M>,
    term: &TypedTerm,
) -> Result<M::Value, ModelError> {
    extended.translate(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{
        bool_ty, nat_ty, pcf_signature, pcf_type_grammar, retype_signature, star_ty,
        ulc_signature, ulc_type_grammar, TypeMap,
    };

    fn pcf() -> TypedSignature {
        pcf_signature()
    }

    fn nat_to_nat() -> TypeExpr {
        TypeExpr::arrow(nat_ty(), nat_ty())
    }

    #[test]
    fn var_types_from_context() {
        let ctx = Context::new(vec![nat_ty(), bool_ty()]);
        let v = TypedTerm::var(&ctx, 0).unwrap();
        assert_eq!(v.ty(), &nat_ty());
        let v = TypedTerm::var(&ctx, 1).unwrap();
        assert_eq!(v.ty(), &bool_ty());
        assert!(TypedTerm::var(&ctx, 2).is_err());
    }

    #[test]
    fn abs_types_as_arrow() {
        let sig = pcf();
        let ctx = Context::empty();
        let body_ctx = ctx.extend(&[nat_ty()]);
        let body = TypedTerm::var(&body_ctx, 0).unwrap();
        let term = TypedTerm::op(
            &sig,
            TypedLabel::new("abs", vec![nat_ty(), nat_ty()]),
            vec![body],
            &ctx,
        )
        .unwrap();
        assert_eq!(term.ty(), &nat_to_nat());
    }

    #[test]
    fn app_type_mismatch_reports_path() {
        // app at (s=nat, t=nat) applied to (succ, true): the second
        // argument has type bool, not nat.
        let sig = pcf();
        let ctx = Context::empty();
        let text = "(op app (nat nat) (op succ ()) (op true ()))";
        let err = TypedTerm::parse(&sig, text, &ctx).unwrap_err();
        assert_eq!(err.path, vec![1]);
    }

    #[test]
    fn parse_accepts_if_sugar() {
        let sig = pcf();
        let ctx = Context::empty();
        let sugar = TypedTerm::parse(&sig, "(op if_nat ())", &ctx).unwrap();
        let full = TypedTerm::parse(&sig, "(op if (nat))", &ctx).unwrap();
        assert_eq!(sugar, full);
        assert_eq!(
            sugar.ty(),
            &TypeExpr::arrow(
                bool_ty(),
                TypeExpr::arrow(nat_ty(), TypeExpr::arrow(nat_ty(), nat_ty()))
            )
        );
    }

    #[test]
    fn print_parse_roundtrip() {
        let sig = pcf();
        let ctx = Context::new(vec![nat_ty()]);
        let text = "(op app (nat nat) (op succ ()) (var 0))";
        let term = TypedTerm::parse(&sig, text, &ctx).unwrap();
        assert_eq!(term.to_string(), text);
        assert_eq!(TypedTerm::parse(&sig, &term.to_string(), &ctx).unwrap(), term);
    }

    #[test]
    fn identity_substitution_is_neutral() {
        let sig = pcf();
        let ctx = Context::new(vec![nat_ty(), bool_ty()]);
        let term =
            TypedTerm::parse(&sig, "(op app (nat nat) (op succ ()) (var 0))", &ctx).unwrap();
        assert_eq!(term.substitute(&TypedSubst::identity(&ctx)).unwrap(), term);
    }

    #[test]
    fn substitution_under_abs_preserves_type() {
        // Substitute true for the bool variable under an abstraction.
        let sig = pcf();
        let src = Context::new(vec![bool_ty()]);
        let tgt = Context::empty();
        let term = TypedTerm::parse(&sig, "(op abs (bool nat) (var 1))", &src).unwrap();
        assert_eq!(term.ty(), &TypeExpr::arrow(nat_ty(), bool_ty()));
        let entry = TypedTerm::parse(&sig, "(op true ())", &tgt).unwrap();
        let subst = TypedSubst::new(vec![entry], src, tgt.clone()).unwrap();
        let result = term.substitute(&subst).unwrap();
        assert_eq!(result.ty(), term.ty());
        assert_eq!(result.ctx(), &tgt);
        // The result re-typechecks to the same term.
        let reparsed = TypedTerm::parse(&sig, &result.to_string(), &tgt).unwrap();
        assert_eq!(reparsed, result);
    }

    #[test]
    fn typed_fold_into_syntax_is_identity() {
        let sig = pcf();
        let model = typed_syntax_model(&sig);
        let ctx = Context::new(vec![nat_ty()]);
        for text in [
            "(var 0)",
            "(op zero ())",
            "(op app (nat nat) (op succ ()) (var 0))",
            "(op abs (nat bool) (op zero ()))",
            "(op fix (nat) (op abs (nat nat) (var 0)))",
        ] {
            let term = TypedTerm::parse(&sig, text, &ctx).unwrap();
            assert_eq!(typed_fold(&model, &term).unwrap(), term);
        }
    }

    #[test]
    fn pullback_along_identity_is_the_model() {
        let sig = pcf();
        let model = typed_syntax_model(&sig);
        let id = SigMorphism::identity(pcf_type_grammar());
        let pulled = pullback_model(&id, &model, &sig, &sig, 2).unwrap();
        let ctx = Context::new(vec![nat_ty()]);
        let term =
            TypedTerm::parse(&sig, "(op app (nat nat) (op succ ()) (var 0))", &ctx).unwrap();
        assert_eq!(typed_fold(&pulled, &term).unwrap(), typed_fold(&model, &term).unwrap());
    }

    #[test]
    fn pullback_of_ulc_syntax_forgets_nothing_on_star() {
        // Pulling the ULC syntax model back along the collapse to star
        // keeps the tree; only the context bookkeeping changes.
        let ulc = ulc_signature();
        let model = typed_syntax_model(&ulc);
        let g = TypeMap::constant(ulc_type_grammar(), ulc_type_grammar(), star_ty());
        let m = SigMorphism::new(g, |l| l.clone());
        let pulled = pullback_model(&m, &model, &ulc, &ulc, 1).unwrap();
        let ctx = Context::new(vec![star_ty(), star_ty()]);
        let term = TypedTerm::parse(&ulc, "(op app () (var 1) (var 0))", &ctx).unwrap();
        let image = typed_fold(&pulled, &term).unwrap();
        assert_eq!(image.ctx().len(), 2);
        assert_eq!(image.to_string(), term.to_string());
    }

    #[test]
    fn pullback_rejects_incompatible_morphism() {
        let sig = pcf();
        let model = typed_syntax_model(&sig);
        let m = SigMorphism::new(TypeMap::identity(pcf_type_grammar()), |l| {
            let name = match l.name.as_str() {
                "app" => "abs",
                "abs" => "app",
                other => other,
            };
            TypedLabel::new(name, l.params.clone())
        });
        assert!(matches!(
            pullback_model(&m, &model, &sig, &sig, 2),
            Err(PullbackError::Incompatible(_))
        ));
    }

    #[test]
    fn identity_extended_model_translates_identically() {
        let sig = pcf();
        let extended = ExtendedModel::new(
            sig.clone(),
            sig.clone(),
            SigMorphism::identity(pcf_type_grammar()),
            typed_syntax_model(&sig),
            2,
        )
        .unwrap();
        let ctx = Context::new(vec![bool_ty()]);
        let term =
            TypedTerm::parse(&sig, "(op app (nat nat) (op pred ()) (op zero ()))", &ctx).unwrap();
        assert_eq!(extended.translate(&term).unwrap(), term);
    }

    #[test]
    fn translate_equals_fold_of_pullback() {
        let sig = pcf();
        let g = TypeMap::constant(pcf_type_grammar(), ulc_type_grammar(), star_ty());
        let target = retype_signature(&g, &sig);
        let morphism = SigMorphism::new(g, |l| l.clone());
        let extended = ExtendedModel::new(
            sig.clone(),
            target.clone(),
            morphism.clone(),
            typed_syntax_model(&target),
            2,
        )
        .unwrap();
        let ctx = Context::new(vec![nat_ty()]);
        let term =
            TypedTerm::parse(&sig, "(op app (nat nat) (op succ ()) (var 0))", &ctx).unwrap();
        let by_translate = extended.translate(&term).unwrap();
        let inner = typed_syntax_model(&target);
        let pulled = pullback_model(&morphism, &inner, &sig, &target, 2).unwrap();
        let by_fold = typed_fold(&pulled, &term).unwrap();
        assert_eq!(by_translate, by_fold);
    }
}
