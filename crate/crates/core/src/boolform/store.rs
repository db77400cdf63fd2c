use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::circuit::QubitId;

/// Handle to a hash-consed node. Equal handles mean structurally equal
/// expressions within one [`ExprStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(u32);

impl ExprId {
    pub const FALSE: ExprId = ExprId(0);
    pub const TRUE: ExprId = ExprId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    False,
    True,
    Var(QubitId),
    Not(ExprId),
    /// At least two children, no constants, no nested `And`, sorted.
    And(Box<[ExprId]>),
    /// At least two children, no constants, no `Not`, no nested `Xor`, sorted.
    Xor(Box<[ExprId]>),
}

pub const DEFAULT_NODE_CAP: usize = 10_000_000;

/// Append-only table of canonical Boolean expression nodes.
///
/// Constructors apply local rewrites so that every stored node is in
/// canonical form:
/// - `¬¬x = x`, negated constants fold;
/// - `And`/`Xor` are flattened and their children sorted by
///   (structural hash, creation index);
/// - `And` absorbs `true` and collapses duplicates. It is `false` when it
///   holds `false` or both `x` and `¬x`;
/// - `Xor` drops `false` and cancels duplicate pairs. Negations and `true`
///   are lifted out as a single outer `Not`.
///
/// Children are always created before their parents, so a child's id is
/// smaller than its parent's.
#[derive(Debug, Clone)]
pub struct ExprStore {
    nodes: Vec<Node>,
    hashes: Vec<u64>,
    table: HashMap<Node, ExprId>,
    cap: usize,
}

impl Default for ExprStore {
    fn default() -> Self {
        ExprStore::with_cap(DEFAULT_NODE_CAP)
    }
}

fn mix(mut h: u64, v: u64) -> u64 {
    h ^= v
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2);
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Memo for repeated substitutions of one variable by one constant.
#[derive(Debug, Clone)]
pub struct SubstCache {
    var: QubitId,
    value: bool,
    memo: HashMap<ExprId, ExprId>,
}

impl SubstCache {
    pub fn new(var: QubitId, value: bool) -> Self {
        SubstCache {
            var,
            value,
            memo: HashMap::new(),
        }
    }
}

impl ExprStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: usize) -> Self {
        let mut store = ExprStore {
            nodes: Vec::new(),
            hashes: Vec::new(),
            table: HashMap::new(),
            cap,
        };
        store.intern(Node::False);
        store.intern(Node::True);
        store
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn over_cap(&self) -> bool {
        self.nodes.len() > self.cap
    }

    pub fn node(&self, id: ExprId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn structural_hash(&self, id: ExprId) -> u64 {
        self.hashes[id.index()]
    }

    fn intern(&mut self, node: Node) -> ExprId {
        if let Some(&id) = self.table.get(&node) {
            return id;
        }
        let h = match &node {
            Node::False => mix(1, 0),
            Node::True => mix(2, 0),
            Node::Var(q) => mix(3, u64::from(q.0)),
            Node::Not(c) => mix(4, self.hashes[c.index()]),
            Node::And(cs) => cs.iter().fold(mix(5, cs.len() as u64), |h, c| {
                mix(h, self.hashes[c.index()])
            }),
            Node::Xor(cs) => cs.iter().fold(mix(6, cs.len() as u64), |h, c| {
                mix(h, self.hashes[c.index()])
            }),
        };
        let id = ExprId(u32::try_from(self.nodes.len()).expect("expression store exceeds u32 ids"));
        self.nodes.push(node.clone());
        self.hashes.push(h);
        self.table.insert(node, id);
        id
    }

    fn sort_key(&self, id: ExprId) -> (u64, u32) {
        (self.hashes[id.index()], id.0)
    }

    pub fn constant(&self, value: bool) -> ExprId {
        if value {
            ExprId::TRUE
        } else {
            ExprId::FALSE
        }
    }

    pub fn var(&mut self, q: QubitId) -> ExprId {
        self.intern(Node::Var(q))
    }

    pub fn not(&mut self, e: ExprId) -> ExprId {
        match *self.node(e) {
            Node::False => ExprId::TRUE,
            Node::True => ExprId::FALSE,
            Node::Not(inner) => inner,
            _ => self.intern(Node::Not(e)),
        }
    }

    pub fn and(&mut self, children: impl IntoIterator<Item = ExprId>) -> ExprId {
        let mut flat = Vec::new();
        for c in children {
            match self.node(c) {
                Node::False => return ExprId::FALSE,
                Node::True => {}
                Node::And(cs) => flat.extend_from_slice(cs),
                _ => flat.push(c),
            }
        }
        flat.sort_by_key(|&c| self.sort_key(c));
        flat.dedup();
        for &c in &flat {
            if let Node::Not(inner) = *self.node(c) {
                if flat
                    .binary_search_by_key(&self.sort_key(inner), |&x| self.sort_key(x))
                    .is_ok()
                {
                    return ExprId::FALSE;
                }
            }
        }
        match flat.len() {
            0 => ExprId::TRUE,
            1 => flat[0],
            _ => self.intern(Node::And(flat.into_boxed_slice())),
        }
    }

    pub fn xor(&mut self, children: impl IntoIterator<Item = ExprId>) -> ExprId {
        let mut flat = Vec::new();
        let mut negate = false;
        for c in children {
            let c = match *self.node(c) {
                Node::Not(inner) => {
                    negate = !negate;
                    inner
                }
                _ => c,
            };
            match self.node(c) {
                Node::False => {}
                Node::True => negate = !negate,
                Node::Xor(cs) => flat.extend_from_slice(cs),
                _ => flat.push(c),
            }
        }
        flat.sort_by_key(|&c| self.sort_key(c));
        // x ⊕ x = 0: drop equal pairs
        let mut kept: Vec<ExprId> = Vec::with_capacity(flat.len());
        for c in flat {
            if kept.last() == Some(&c) {
                kept.pop();
            } else {
                kept.push(c);
            }
        }
        let base = match kept.len() {
            0 => ExprId::FALSE,
            1 => kept[0],
            _ => self.intern(Node::Xor(kept.into_boxed_slice())),
        };
        if negate {
            self.not(base)
        } else {
            base
        }
    }

    pub fn and2(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.and([a, b])
    }

    pub fn xor2(&mut self, a: ExprId, b: ExprId) -> ExprId {
        self.xor([a, b])
    }

    /// Disjunction, expressed as `¬(¬a ∧ ¬b ∧ ...)`.
    pub fn or(&mut self, children: impl IntoIterator<Item = ExprId>) -> ExprId {
        let negated: Vec<ExprId> = children.into_iter().map(|c| self.not(c)).collect();
        let conj = self.and(negated);
        self.not(conj)
    }

    pub fn children(&self, id: ExprId) -> &[ExprId] {
        match self.node(id) {
            Node::Not(c) => std::slice::from_ref(c),
            Node::And(cs) | Node::Xor(cs) => cs,
            _ => &[],
        }
    }

    /// All nodes reachable from `root`, children before parents.
    pub fn reachable(&self, root: ExprId) -> Vec<ExprId> {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![root];
        seen.insert(root);
        while let Some(id) = stack.pop() {
            for &c in self.children(id) {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        let mut out: Vec<ExprId> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Number of distinct DAG nodes under `root`.
    pub fn dag_size(&self, root: ExprId) -> usize {
        self.reachable(root).len()
    }

    /// Input variables occurring under `root`, in id order.
    pub fn support(&self, root: ExprId) -> BTreeSet<QubitId> {
        self.reachable(root)
            .into_iter()
            .filter_map(|id| match self.node(id) {
                Node::Var(q) => Some(*q),
                _ => None,
            })
            .collect()
    }

    /// Evaluates `root` under `assignment`.
    pub fn eval(&self, root: ExprId, assignment: impl Fn(QubitId) -> bool) -> bool {
        let order = self.reachable(root);
        let mut value: HashMap<ExprId, bool> = HashMap::with_capacity(order.len());
        for id in order {
            let v = match self.node(id) {
                Node::False => false,
                Node::True => true,
                Node::Var(q) => assignment(*q),
                Node::Not(c) => !value[c],
                Node::And(cs) => cs.iter().all(|c| value[c]),
                Node::Xor(cs) => cs.iter().fold(false, |acc, c| acc ^ value[c]),
            };
            value.insert(id, v);
        }
        value[&root]
    }

    /// Replaces every occurrence of the cache's variable by its constant.
    /// Untouched subterms keep their identity.
    pub fn substitute(&mut self, root: ExprId, cache: &mut SubstCache) -> ExprId {
        if let Some(&done) = cache.memo.get(&root) {
            return done;
        }
        for id in self.reachable(root) {
            if cache.memo.contains_key(&id) {
                continue;
            }
            let node = self.node(id).clone();
            let new = match node {
                Node::False | Node::True => id,
                Node::Var(q) if q == cache.var => self.constant(cache.value),
                Node::Var(_) => id,
                Node::Not(c) => {
                    let c2 = cache.memo[&c];
                    if c2 == c {
                        id
                    } else {
                        self.not(c2)
                    }
                }
                Node::And(cs) | Node::Xor(cs) => {
                    let mapped: Vec<ExprId> = cs.iter().map(|c| cache.memo[c]).collect();
                    if mapped.iter().zip(cs.iter()).all(|(a, b)| a == b) {
                        id
                    } else if matches!(self.node(id), Node::And(_)) {
                        self.and(mapped)
                    } else {
                        self.xor(mapped)
                    }
                }
            };
            cache.memo.insert(id, new);
        }
        cache.memo[&root]
    }

    /// Convenience wrapper for a one-off substitution.
    pub fn substitute_one(&mut self, root: ExprId, q: QubitId, value: bool) -> ExprId {
        self.substitute(root, &mut SubstCache::new(q, value))
    }

    /// Prefix rendering such as `xor(q4, and(q3, a))`. Shared subterms are
    /// expanded, so output is cut at `limit` bytes.
    pub fn to_prefix(
        &self,
        root: ExprId,
        name: &dyn Fn(QubitId) -> String,
        limit: usize,
    ) -> String {
        fn go(
            store: &ExprStore,
            id: ExprId,
            name: &dyn Fn(QubitId) -> String,
            out: &mut String,
            limit: usize,
        ) {
            if out.len() > limit {
                return;
            }
            match store.node(id) {
                Node::False => out.push_str("false"),
                Node::True => out.push_str("true"),
                Node::Var(q) => out.push_str(&name(*q)),
                Node::Not(c) => {
                    out.push_str("not(");
                    go(store, *c, name, out, limit);
                    out.push(')');
                }
                Node::And(cs) | Node::Xor(cs) => {
                    out.push_str(if matches!(store.node(id), Node::And(_)) {
                        "and("
                    } else {
                        "xor("
                    });
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        go(store, *c, name, out, limit);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        go(self, root, name, &mut out, limit);
        if out.len() > limit {
            out.truncate(limit);
            let _ = write!(out, "...");
        }
        out
    }
}
