use super::{Config, Control, Letter, Spds};
use crate::simplify::{SimpleOp, SimpleSystem};
use crate::tree::{NodePath, Tree};
use crate::Error;

/// One pushdown transition with concrete values. `pushed` replaces the top
/// letter; with two letters the second ends up on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdsStep {
    pub rule: usize,
    pub control: Control,
    pub top: Letter,
    pub next: Control,
    pub pushed: Vec<Letter>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdsRun {
    pub start: Config,
    pub steps: Vec<PdsStep>,
}

impl PdsRun {
    /// Executes the run, checking every step against its rule relation and
    /// against the current configuration. Returns all visited configurations.
    pub fn replay(&self, spds: &Spds) -> Result<Vec<Config>, Error> {
        let mut cur = self.start.clone();
        let mut out = vec![cur.clone()];
        for (i, s) in self.steps.iter().enumerate() {
            if cur.control != s.control || cur.stack.last() != Some(&s.top) {
                return Err(Error::Internal(format!(
                    "step {i} does not start at the current configuration"
                )));
            }
            if !spds.step_holds(s)? {
                return Err(Error::Internal(format!(
                    "step {i} violates its rule relation"
                )));
            }
            cur.stack.pop();
            cur.stack.extend(s.pushed.iter().cloned());
            cur.control = s.next.clone();
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn pushes(&self) -> usize {
        self.steps.iter().filter(|s| s.pushed.len() == 2).count()
    }

    pub fn pops(&self) -> usize {
        self.steps.iter().filter(|s| s.pushed.is_empty()).count()
    }
}

/// Translates a run started at `node` into rule applications on `tree`,
/// which is updated in place. Each entry is a node and an index into
/// `system.rules`. Pushes create a child with the smallest unused index and
/// move into it; pops move back to the parent.
pub fn pds_to_tree_witness(
    system: &SimpleSystem,
    spds: &Spds,
    run: &PdsRun,
    node: &NodePath,
    tree: &mut Tree,
) -> Result<Vec<(NodePath, usize)>, Error> {
    if !tree.contains(node) {
        return Err(Error::NodeNotInDomain(node.to_string()));
    }
    let mut out = Vec::new();
    let mut cur = node.clone();
    let mut above: Vec<NodePath> = Vec::new();
    for step in &run.steps {
        let sym = &spds.rules[step.rule];
        match (sym.arity, sym.origin) {
            (0, _) => {
                cur = above
                    .pop()
                    .ok_or_else(|| Error::Internal("pop below the starting node".into()))?;
            }
            (_, None) => return Err(Error::Internal("symbolic rule without provenance".into())),
            (_, Some(ri)) => {
                out.push((cur.clone(), ri));
                match &system.rules[ri].op {
                    SimpleOp::AddClass(x) => {
                        tree.add_classes(&cur, x)?;
                    }
                    SimpleOp::AddChild(x) => {
                        let child = tree.add_child(&cur, x.clone())?;
                        above.push(std::mem::replace(&mut cur, child));
                    }
                }
            }
        }
    }
    Ok(out)
}
