//! Shared tree shape for scoped and unscoped de Bruijn terms.
//!
//! An `Op` node caches the binder counts of its constructor so traversals
//! do not need the signature at hand. Index 0 is the innermost binder.

use std::fmt;

use crate::sexpr::{self, ParseError, Sexpr};
use crate::signature::BindingSignature;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Var(usize),
    Op {
        label: String,
        binders: Vec<usize>,
        args: Vec<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{label}` takes {expected} arguments, got {got}")]
    ArityMismatch { label: String, expected: usize, got: usize },
    #[error("variable index {index} out of scope {scope}")]
    OutOfScope { index: usize, scope: usize },
    #[error("argument {arg} of `{label}` must be at scope {expected}, got {got}")]
    ArgScopeMismatch { label: String, arg: usize, expected: usize, got: usize },
    #[error("substitution has {got} entries, expected {expected}")]
    SubstLengthMismatch { expected: usize, got: usize },
    #[error("substitution entry {entry} is at scope {got}, expected {expected}")]
    SubstEntryScope { entry: usize, expected: usize, got: usize },
    #[error("renaming has {got} entries, expected {expected}")]
    RenamingLengthMismatch { expected: usize, got: usize },
    #[error("renaming entry {index} is {value}, out of target scope {target}")]
    RenamingOutOfRange { index: usize, value: usize, target: usize },
    #[error("scope mismatch: expected {expected}, got {got}")]
    ScopeMismatch { expected: usize, got: usize },
    #[error("requested scope {requested} is below the term's support {support}")]
    ScopeBelowSupport { support: usize, requested: usize },
}

impl Node {
    pub(crate) fn size(&self) -> usize {
        match self {
            Node::Var(_) => 1,
            Node::Op { args, .. } => 1 + args.iter().map(Node::size).sum::<usize>(),
        }
    }

    /// Least scope containing all free variables.
    pub(crate) fn support(&self) -> usize {
        fn go(node: &Node, depth: usize) -> usize {
            match node {
                Node::Var(i) => {
                    if *i >= depth {
                        *i - depth + 1
                    } else {
                        0
                    }
                }
                Node::Op { binders, args, .. } => args
                    .iter()
                    .zip(binders)
                    .map(|(a, k)| go(a, depth + k))
                    .max()
                    .unwrap_or(0),
            }
        }
        go(self, 0)
    }

    pub(crate) fn check_scope(&self, scope: usize) -> Result<(), TermError> {
        match self {
            Node::Var(i) => {
                if *i < scope {
                    Ok(())
                } else {
                    Err(TermError::OutOfScope { index: *i, scope })
                }
            }
            Node::Op { binders, args, .. } => {
                for (a, k) in args.iter().zip(binders) {
                    a.check_scope(scope + k)?;
                }
                Ok(())
            }
        }
    }

    /// Replaces every free variable: `Var(i)` at binder depth `d` with
    /// `i >= d` becomes `f(i - d)` with its own free variables shifted up
    /// by `d`. Bound variables are untouched.
    pub(crate) fn map_free(&self, f: &mut dyn FnMut(usize) -> Node) -> Node {
        fn go(node: &Node, depth: usize, f: &mut dyn FnMut(usize) -> Node) -> Node {
            match node {
                Node::Var(i) => {
                    if *i < depth {
                        Node::Var(*i)
                    } else {
                        f(*i - depth).shift_free(depth)
                    }
                }
                Node::Op { label, binders, args } => Node::Op {
                    label: label.clone(),
                    binders: binders.clone(),
                    args: args
                        .iter()
                        .zip(binders)
                        .map(|(a, k)| go(a, depth + k, f))
                        .collect(),
                },
            }
        }
        go(self, 0, f)
    }

    /// Adds `k` to every free variable index.
    pub(crate) fn shift_free(&self, k: usize) -> Node {
        if k == 0 {
            return self.clone();
        }
        fn go(node: &Node, depth: usize, k: usize) -> Node {
            match node {
                Node::Var(i) => {
                    if *i < depth {
                        Node::Var(*i)
                    } else {
                        Node::Var(*i + k)
                    }
                }
                Node::Op { label, binders, args } => Node::Op {
                    label: label.clone(),
                    binders: binders.clone(),
                    args: args
                        .iter()
                        .zip(binders)
                        .map(|(a, b)| go(a, depth + b, k))
                        .collect(),
                },
            }
        }
        go(self, 0, k)
    }

    /// Renames free variables through an arbitrary index function.
    pub(crate) fn rename_free(&self, f: &dyn Fn(usize) -> usize) -> Node {
        fn go(node: &Node, depth: usize, f: &dyn Fn(usize) -> usize) -> Node {
            match node {
                Node::Var(i) => {
                    if *i < depth {
                        Node::Var(*i)
                    } else {
                        Node::Var(f(*i - depth) + depth)
                    }
                }
                Node::Op { label, binders, args } => Node::Op {
                    label: label.clone(),
                    binders: binders.clone(),
                    args: args
                        .iter()
                        .zip(binders)
                        .map(|(a, k)| go(a, depth + k, f))
                        .collect(),
                },
            }
        }
        go(self, 0, f)
    }

    pub(crate) fn parse(sig: &BindingSignature, expr: &Sexpr) -> Result<Node, TermError> {
        let items = expr.as_list().ok_or_else(|| {
            TermError::Parse(ParseError {
                pos: expr.pos(),
                msg: "expected `(var <i>)` or `(<label> <arg>...)`".to_string(),
            })
        })?;
        let (head, rest) = items.split_first().ok_or_else(|| {
            TermError::Parse(ParseError { pos: expr.pos(), msg: "empty term".to_string() })
        })?;
        let head_atom = head.as_atom().ok_or_else(|| {
            TermError::Parse(ParseError {
                pos: head.pos(),
                msg: "term head must be an atom".to_string(),
            })
        })?;
        if head_atom == "var" {
            if rest.len() != 1 {
                return Err(TermError::Parse(ParseError {
                    pos: expr.pos(),
                    msg: "expected `(var <i>)`".to_string(),
                }));
            }
            let index: usize = rest[0]
                .as_atom()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| {
                    TermError::Parse(ParseError {
                        pos: rest[0].pos(),
                        msg: "variable index must be a natural number".to_string(),
                    })
                })?;
            return Ok(Node::Var(index));
        }
        let arity = sig
            .arity(head_atom)
            .ok_or_else(|| TermError::UnknownLabel(head_atom.to_string()))?;
        if rest.len() != arity.len() {
            return Err(TermError::ArityMismatch {
                label: head_atom.to_string(),
                expected: arity.len(),
                got: rest.len(),
            });
        }
        let args = rest
            .iter()
            .map(|a| Node::parse(sig, a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Node::Op {
            label: head_atom.to_string(),
            binders: arity.binders().to_vec(),
            args,
        })
    }

    pub(crate) fn parse_str(sig: &BindingSignature, text: &str) -> Result<Node, TermError> {
        Node::parse(sig, &sexpr::parse(text)?)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Var(i) => write!(f, "(var {i})"),
            Node::Op { label, args, .. } => {
                write!(f, "({label}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
