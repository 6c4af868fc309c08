//! Test-only substitution oracle over a named-variable representation.
//!
//! Free variables stay numbered while bound variables get globally fresh
//! string names, so substitution needs neither lifting nor shifting:
//! capture is impossible because free and bound variables live in
//! different constructors. Converting back to de Bruijn indices gives an
//! independent reference for the scoped substitution path.

use crate::node::Node;
use crate::scoped::{ScopedTerm, Subst};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Named {
    Free(usize),
    Bound(String),
    Op {
        label: String,
        binders: Vec<usize>,
        args: Vec<(Vec<String>, Named)>,
    },
}

pub(crate) struct NamedOracle {
    counter: usize,
}

impl NamedOracle {
    fn fresh(&mut self) -> String {
        let name = format!("x{}", self.counter);
        self.counter += 1;
        name
    }

    fn from_node(&mut self, node: &Node, bound: &mut Vec<String>) -> Named {
        match node {
            Node::Var(i) => {
                if *i < bound.len() {
                    Named::Bound(bound[*i].clone())
                } else {
                    Named::Free(*i - bound.len())
                }
            }
            Node::Op { label, binders, args } => {
                let mut named_args = Vec::with_capacity(args.len());
                for (arg, &k) in args.iter().zip(binders) {
                    let names: Vec<String> = (0..k).map(|_| self.fresh()).collect();
                    // names[j] becomes index j inside the argument.
                    for name in names.iter().rev() {
                        bound.insert(0, name.clone());
                    }
                    let body = self.from_node(arg, bound);
                    for _ in 0..k {
                        bound.remove(0);
                    }
                    named_args.push((names, body));
                }
                Named::Op {
                    label: label.clone(),
                    binders: binders.clone(),
                    args: named_args,
                }
            }
        }
    }

    fn replace_free(term: &Named, images: &[Named]) -> Named {
        match term {
            Named::Free(i) => images[*i].clone(),
            Named::Bound(name) => Named::Bound(name.clone()),
            Named::Op { label, binders, args } => Named::Op {
                label: label.clone(),
                binders: binders.clone(),
                args: args
                    .iter()
                    .map(|(names, body)| {
                        (names.clone(), Self::replace_free(body, images))
                    })
                    .collect(),
            },
        }
    }

    fn to_node(term: &Named, bound: &mut Vec<String>) -> Node {
        match term {
            Named::Free(i) => Node::Var(*i + bound.len()),
            Named::Bound(name) => {
                let position = bound
                    .iter()
                    .position(|b| b == name)
                    .expect("bound name in scope");
                Node::Var(position)
            }
            Named::Op { label, binders, args } => {
                let mut node_args = Vec::with_capacity(args.len());
                for (names, body) in args {
                    for name in names.iter().rev() {
                        bound.insert(0, name.clone());
                    }
                    node_args.push(Self::to_node(body, bound));
                    for _ in 0..names.len() {
                        bound.remove(0);
                    }
                }
                Node::Op {
                    label: label.clone(),
                    binders: binders.clone(),
                    args: node_args,
                }
            }
        }
    }

    /// Reference simultaneous substitution.
    pub(crate) fn substitute(term: &ScopedTerm, subst: &Subst) -> ScopedTerm {
        let mut oracle = NamedOracle { counter: 0 };
        let named_term = oracle.from_node(&term.node, &mut Vec::new());
        let images: Vec<Named> = subst
            .entries()
            .iter()
            .map(|e| oracle.from_node(&e.node, &mut Vec::new()))
            .collect();
        let substituted = Self::replace_free(&named_term, &images);
        let node = Self::to_node(&substituted, &mut Vec::new());
        ScopedTerm::from_node(node, subst.target()).expect("oracle result is well-scoped")
    }

    /// Reference free-variable relabelling.
    pub(crate) fn rename(term: &ScopedTerm, rho: &[usize], target: usize) -> ScopedTerm {
        let mut oracle = NamedOracle { counter: 0 };
        let named_term = oracle.from_node(&term.node, &mut Vec::new());
        let relabelled = Self::relabel(&named_term, &|i| rho[i]);
        let node = Self::to_node(&relabelled, &mut Vec::new());
        ScopedTerm::from_node(node, target).expect("oracle result is well-scoped")
    }

    fn relabel(term: &Named, f: &dyn Fn(usize) -> usize) -> Named {
        match term {
            Named::Free(i) => Named::Free(f(*i)),
            Named::Bound(name) => Named::Bound(name.clone()),
            Named::Op { label, binders, args } => Named::Op {
                label: label.clone(),
                binders: binders.clone(),
                args: args
                    .iter()
                    .map(|(names, body)| (names.clone(), Self::relabel(body, f)))
                    .collect(),
            },
        }
    }

}
