//! The PCF to untyped-lambda-calculus translation.
//!
//! The retyping of the PCF signature along the collapse of all types to
//! `star` leaves a signature whose constants can be interpreted by
//! closed λ-terms. Church encodings supply those terms, Curry's fixpoint
//! combinator interprets `fix`, and the resulting extended model turns
//! the typed fold into a translator producing untyped de Bruijn terms.
//! A normal-order β-normalizer lets tests run the images.

use std::sync::OnceLock;

use rand::Rng;

use crate::models::ModelError;
use crate::node::Node;
use crate::signature::{
    bool_ty, lc_signature, nat_ty, pcf_signature, pcf_type_grammar, retype_signature, star_ty,
    ulc_type_grammar, BindingSignature, SigMorphism, TypeExpr, TypedLabel, TypeMap,
    TypedSignature,
};
use crate::typed::{Context, ExtendedModel, TypedModel, TypedSubst, TypedTerm};
use crate::unscoped::{UnscopedSubst, UnscopedTerm};

pub const DEFAULT_BETA_FUEL: u32 = 10_000;

fn uvar(i: usize) -> Node {
    Node::Var(i)
}

fn uapp(f: Node, x: Node) -> Node {
    Node::Op { label: "app".to_string(), binders: vec![0, 0], args: vec![f, x] }
}

fn uabs(body: Node) -> Node {
    Node::Op { label: "abs".to_string(), binders: vec![1], args: vec![body] }
}

fn term(node: Node) -> UnscopedTerm {
    UnscopedTerm { node }
}

/// `λt.λf.t`
pub fn church_true() -> UnscopedTerm {
    term(uabs(uabs(uvar(1))))
}

/// `λt.λf.f`
pub fn church_false() -> UnscopedTerm {
    term(uabs(uabs(uvar(0))))
}

/// `λs.λz.sⁿ z`
pub fn church_nat(n: usize) -> UnscopedTerm {
    let mut body = uvar(0);
    for _ in 0..n {
        body = uapp(uvar(1), body);
    }
    term(uabs(uabs(body)))
}

/// `λn.λs.λz. s (n s z)`
pub fn church_succ() -> UnscopedTerm {
    term(uabs(uabs(uabs(uapp(
        uvar(1),
        uapp(uapp(uvar(2), uvar(1)), uvar(0)),
    )))))
}

/// `λn.λf.λx. n (λg.λh. h (g f)) (λu.x) (λu.u)`, the pair-trick
/// predecessor; `pred 0` computes to `0`.
pub fn church_pred() -> UnscopedTerm {
    let inner = uabs(uabs(uapp(uvar(0), uapp(uvar(1), uvar(3)))));
    term(uabs(uabs(uabs(uapp(
        uapp(uapp(uvar(2), inner), uabs(uvar(1))),
        uabs(uvar(0)),
    )))))
}

/// `λb.λt.λf. b t f`
pub fn church_if() -> UnscopedTerm {
    term(uabs(uabs(uabs(uapp(uapp(uvar(2), uvar(1)), uvar(0))))))
}

/// Curry's fixpoint combinator `λf.(λx.f (x x)) (λx.f (x x))`.
pub fn y_combinator() -> UnscopedTerm {
    let half = uabs(uapp(uvar(1), uapp(uvar(0), uvar(0))));
    term(uabs(uapp(half.clone(), half)))
}

/// The closed λ-terms interpreting PCF's constants.
#[derive(Debug, Clone)]
pub struct UlcStdlib {
    pub church_true: UnscopedTerm,
    pub church_false: UnscopedTerm,
    pub church_succ: UnscopedTerm,
    pub church_pred: UnscopedTerm,
    pub church_if: UnscopedTerm,
    pub y_comb: UnscopedTerm,
}

pub fn ulc_stdlib() -> UlcStdlib {
    UlcStdlib {
        church_true: church_true(),
        church_false: church_false(),
        church_succ: church_succ(),
        church_pred: church_pred(),
        church_if: church_if(),
        y_comb: y_combinator(),
    }
}

/// The untyped λ-calculus as a model of the star-retyped PCF signature:
/// `app`/`abs` are the λ-calculus constructors, the constants are their
/// Church encodings, and `fix u` is `Y u`.
pub struct PcfUlcModel {
    lib: UlcStdlib,
}

impl Default for PcfUlcModel {
    fn default() -> Self {
        PcfUlcModel { lib: ulc_stdlib() }
    }
}

impl TypedModel for PcfUlcModel {
    type Value = UnscopedTerm;

    fn var(&self, _ctx: &Context, index: usize) -> UnscopedTerm {
        UnscopedTerm::var(index)
    }

    fn op(
        &self,
        label: &TypedLabel,
        mut args: Vec<UnscopedTerm>,
        _ctx: &Context,
    ) -> Result<UnscopedTerm, ModelError> {
        let value = match label.name.as_str() {
            "app" => {
                let x = args.pop().expect("app has two arguments");
                let f = args.pop().expect("app has two arguments");
                term(uapp(f.node, x.node))
            }
            "abs" => term(uabs(args.pop().expect("abs has one argument").node)),
            "true" => self.lib.church_true.clone(),
            "false" => self.lib.church_false.clone(),
            "zero" => church_nat(0),
            "succ" => self.lib.church_succ.clone(),
            "pred" => self.lib.church_pred.clone(),
            "if" => self.lib.church_if.clone(),
            "fix" => {
                let u = args.pop().expect("fix has one argument");
                term(uapp(self.lib.y_comb.node.clone(), u.node))
            }
            other => return Err(ModelError::UnknownLabel(other.to_string())),
        };
        Ok(value)
    }

    fn subst(
        &self,
        value: &UnscopedTerm,
        _src: &Context,
        env: &[UnscopedTerm],
        tgt: &Context,
    ) -> UnscopedTerm {
        value.subst(&UnscopedSubst::new(env.to_vec(), tgt.len()))
    }
}

/// The star-collapsed PCF signature together with the λ-calculus model
/// of it: the extended model driving [`pcf_to_ulc`].
pub fn pcf_ulc_extended_model() -> ExtendedModel<PcfUlcModel> {
    let source = pcf_signature();
    let collapse = TypeMap::constant(pcf_type_grammar(), ulc_type_grammar(), star_ty());
    let target = retype_signature(&collapse, &source);
    let morphism = SigMorphism::new(collapse, |l| l.clone());
    ExtendedModel::new(source, target, morphism, PcfUlcModel::default(), 2)
        .expect("the collapse morphism is compatible by construction")
}

/// Translates a well-typed PCF term to an untyped λ-term. Variables map
/// by index, `app`/`abs` homomorphically, constants to their Church
/// encodings, and `fix u` to `Y u`; the result's support never exceeds
/// the context length.
pub fn pcf_to_ulc(term: &TypedTerm) -> Result<UnscopedTerm, ModelError> {
    static MODEL: OnceLock<ExtendedModel<PcfUlcModel>> = OnceLock::new();
    MODEL.get_or_init(pcf_ulc_extended_model).translate(term)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BetaError {
    #[error("fuel exhausted after {steps} steps")]
    OutOfFuel { steps: u32, partial: UnscopedTerm },
    #[error("term contains non-lambda constructor `{0}`")]
    NotLambda(String),
}

fn check_lambda_only(node: &Node) -> Result<(), BetaError> {
    match node {
        Node::Var(_) => Ok(()),
        Node::Op { label, args, .. } => {
            if label != "app" && label != "abs" {
                return Err(BetaError::NotLambda(label.clone()));
            }
            args.iter().try_for_each(check_lambda_only)
        }
    }
}

/// One leftmost-outermost β-step, if any redex exists.
fn beta_step(node: &Node) -> Option<Node> {
    match node {
        Node::Var(_) => None,
        Node::Op { label, args, .. } if label == "app" => {
            if let Node::Op { label: inner, args: body, .. } = &args[0] {
                if inner == "abs" {
                    let body = &body[0];
                    let argument = term(args[1].clone());
                    let reduced =
                        term(body.clone()).subst(&UnscopedSubst::new(vec![argument], 0));
                    return Some(reduced.node);
                }
            }
            if let Some(f) = beta_step(&args[0]) {
                return Some(uapp(f, args[1].clone()));
            }
            beta_step(&args[1]).map(|x| uapp(args[0].clone(), x))
        }
        Node::Op { args, .. } => beta_step(&args[0]).map(uabs),
    }
}

/// Normal-order reduction to β-normal form, or an out-of-fuel error
/// carrying the partially reduced term (expected for fixpoint loops).
pub fn beta_normalize(t: &UnscopedTerm, fuel: u32) -> Result<UnscopedTerm, BetaError> {
    check_lambda_only(&t.node)?;
    let mut current = t.node.clone();
    let mut steps = 0;
    while let Some(next) = beta_step(&current) {
        if steps >= fuel {
            return Err(BetaError::OutOfFuel { steps, partial: term(current) });
        }
        current = next;
        steps += 1;
    }
    Ok(term(current))
}

// ---------------------------------------------------------------------------
// Random well-typed PCF terms
// ---------------------------------------------------------------------------

/// A random PCF type of height at most `max_depth`.
pub fn random_pcf_type<R: Rng>(max_depth: usize, rng: &mut R) -> TypeExpr {
    if max_depth <= 1 || rng.random_bool(0.5) {
        if rng.random_bool(0.5) {
            bool_ty()
        } else {
            nat_ty()
        }
    } else {
        TypeExpr::arrow(
            random_pcf_type(max_depth - 1, rng),
            random_pcf_type(max_depth - 1, rng),
        )
    }
}

pub fn random_pcf_context<R: Rng>(len: usize, max_type_depth: usize, rng: &mut R) -> Context {
    Context::new((0..len).map(|_| random_pcf_type(max_type_depth, rng)).collect())
}

/// Does `ty` look like `bool => ι => ι => ι` for a base `ι`?
fn as_conditional(ty: &TypeExpr) -> Option<TypeExpr> {
    let TypeExpr::Con(c1, parts1) = ty else { return None };
    if c1 != "=>" || parts1[0] != bool_ty() {
        return None;
    }
    let TypeExpr::Con(c2, parts2) = &parts1[1] else { return None };
    if c2 != "=>" {
        return None;
    }
    let iota = &parts2[0];
    if (iota != &bool_ty() && iota != &nat_ty())
        || parts2[1] != TypeExpr::arrow(iota.clone(), iota.clone())
    {
        return None;
    }
    Some(iota.clone())
}

/// A seeded random well-typed term of the requested type. `fuel` bounds
/// the number of `app`/`fix` expansions, so generation always
/// terminates; leaves are variables, constants, and abstractions.
pub fn random_pcf_term<R: Rng>(
    sig: &TypedSignature,
    ctx: &Context,
    ty: &TypeExpr,
    fuel: usize,
    rng: &mut R,
) -> TypedTerm {
    #[derive(Clone)]
    enum Move {
        Var(usize),
        Constant(&'static str, Vec<TypeExpr>),
        Abs,
        App,
        Fix,
    }
    let mut moves = Vec::new();
    for i in 0..ctx.len() {
        if ctx.get(i) == Some(ty) {
            moves.push(Move::Var(i));
        }
    }
    if *ty == bool_ty() {
        moves.push(Move::Constant("true", Vec::new()));
        moves.push(Move::Constant("false", Vec::new()));
    }
    if *ty == nat_ty() {
        moves.push(Move::Constant("zero", Vec::new()));
    }
    if *ty == TypeExpr::arrow(nat_ty(), nat_ty()) {
        moves.push(Move::Constant("succ", Vec::new()));
        moves.push(Move::Constant("pred", Vec::new()));
    }
    if let Some(iota) = as_conditional(ty) {
        moves.push(Move::Constant("if", vec![iota]));
    }
    if matches!(ty, TypeExpr::Con(c, _) if c == "=>") {
        moves.push(Move::Abs);
    }
    if fuel > 0 {
        moves.push(Move::App);
        moves.push(Move::Fix);
    }
    let chosen = moves[rng.random_range(0..moves.len())].clone();
    match chosen {
        Move::Var(i) => TypedTerm::var(ctx, i).expect("index in context"),
        Move::Constant(name, params) => {
            TypedTerm::op(sig, TypedLabel::new(name, params), Vec::new(), ctx)
                .expect("constant is well-typed")
        }
        Move::Abs => {
            let TypeExpr::Con(_, parts) = ty else { unreachable!("abs move on arrow") };
            let (t, s) = (parts[0].clone(), parts[1].clone());
            let body = random_pcf_term(sig, &ctx.extend(&[t.clone()]), &s, fuel, rng);
            TypedTerm::op(sig, TypedLabel::new("abs", vec![s, t]), vec![body], ctx)
                .expect("abs is well-typed")
        }
        Move::App => {
            let t = random_pcf_type(2, rng);
            let fun_ty = TypeExpr::arrow(t.clone(), ty.clone());
            let fun = random_pcf_term(sig, ctx, &fun_ty, fuel - 1, rng);
            let arg = random_pcf_term(sig, ctx, &t, fuel - 1, rng);
            TypedTerm::op(
                sig,
                TypedLabel::new("app", vec![ty.clone(), t]),
                vec![fun, arg],
                ctx,
            )
            .expect("app is well-typed")
        }
        Move::Fix => {
            let arg_ty = TypeExpr::arrow(ty.clone(), ty.clone());
            let arg = random_pcf_term(sig, ctx, &arg_ty, fuel - 1, rng);
            TypedTerm::op(sig, TypedLabel::new("fix", vec![ty.clone()]), vec![arg], ctx)
                .expect("fix is well-typed")
        }
    }
}

/// A random typed substitution between the given contexts.
pub fn random_pcf_subst<R: Rng>(
    sig: &TypedSignature,
    source: &Context,
    target: &Context,
    fuel: usize,
    rng: &mut R,
) -> TypedSubst {
    let entries = (0..source.len())
        .map(|i| random_pcf_term(sig, target, source.get(i).expect("index"), fuel, rng))
        .collect();
    TypedSubst::new(entries, source.clone(), target.clone()).expect("entries are well-typed")
}

/// The erasure of a typed substitution: the prefix of translated
/// entries, with the tail landing in the target's free indices.
pub fn erase_subst(subst: &TypedSubst) -> Result<UnscopedSubst, ModelError> {
    let prefix = subst
        .entries()
        .iter()
        .map(pcf_to_ulc)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(UnscopedSubst::new(prefix, subst.target().len()))
}

/// The untyped shape of the star-collapsed PCF signature; useful for
/// running the untyped law suites over it.
pub fn pcf_star_shape() -> BindingSignature {
    let _ = lc_signature();
    BindingSignature::new(vec![
        ("app".to_string(), vec![0, 0].into()),
        ("abs".to_string(), vec![1].into()),
        ("true".to_string(), Vec::new().into()),
        ("false".to_string(), Vec::new().into()),
        ("zero".to_string(), Vec::new().into()),
        ("succ".to_string(), Vec::new().into()),
        ("pred".to_string(), Vec::new().into()),
        ("fix".to_string(), vec![0].into()),
        ("if".to_string(), Vec::new().into()),
    ])
    .expect("labels are distinct")
}
