//! Restrictions of crystallographic arrangements to root hyperplanes.
//!
//! [`all_restrictions`] precomputes, once per ambient system, every canonical
//! restriction object down to rank 1 together with label maps on the edges.
//! After that the search only ever translates label sets through tables.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cryst::{
    canonical_root_system, compute_groupoid, label_permutation, morphism_to_simple,
    AutomorphismGroup, CanonicalForm, Groupoid, Orbits, DEFAULT_OBJECT_CAP,
};
use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::linalg::{max_abs_minor, IntMatrix};
use crate::rootsys::{CartanType, OrderingPolicy, PositiveRootSystem, Root};

/// Marker in a label map for the wall itself.
pub const WALL: u8 = u8::MAX;

const TREE_FORMAT: &str = "idealfree-restriction-tree";
const TREE_FORMAT_VERSION: u32 = 1;

/// One restriction of a root system to a wall, before identification with
/// a tree node.
#[derive(Clone, Debug)]
pub struct Restriction {
    /// Restricted root system, in canonical coordinates.
    pub child: CanonicalForm,
    /// Morphism that made the wall a simple root.
    pub morphism: IntMatrix,
    /// Coordinate that was erased.
    pub erased: usize,
    /// Child label of every parent label; [`WALL`] for the wall.
    pub label_map: Vec<u8>,
    /// Basis of the wall hyperplane in parent coordinates; pairing a parent
    /// root with it gives the child root up to a scalar.
    pub basis: Vec<Vec<i64>>,
}

/// Restriction of `system` to the hyperplane of `wall`: move the wall to a
/// simple root, erase its coordinate, make every vector primitive, and
/// canonicalize the result.
pub fn restrict(system: &PositiveRootSystem, wall: usize) -> Result<Restriction> {
    let rank = system.rank();
    if rank == 0 || wall >= system.len() {
        return Err(Error::Domain(format!("no root {wall} to restrict to")));
    }
    let to_simple = morphism_to_simple(system, wall)?;
    let k = to_simple.simple_index;
    let mut images: Vec<Option<Root>> = Vec::with_capacity(system.len());
    for (label, root) in system.roots().iter().enumerate() {
        if label == wall {
            images.push(None);
            continue;
        }
        let v = to_simple.matrix.apply_root(root);
        let erased: Vec<i32> = v
            .coords()
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != k)
            .map(|(_, &x)| x)
            .collect();
        let w = Root(erased).primitive();
        if w.coords().iter().all(|&x| x == 0) {
            return Err(Error::Validation(format!(
                "root {label} is proportional to the wall {wall}"
            )));
        }
        images.push(Some(w));
    }
    let child = PositiveRootSystem::from_roots(None, rank - 1, images.iter().flatten().cloned())?;
    let canon = canonical_root_system(&child);
    let p = canon.matrix();
    // pairing with row j of the morphism gives coordinate j of the image
    let rows: Vec<Vec<i64>> = to_simple
        .matrix
        .rows()
        .into_iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, r)| r)
        .collect();
    let basis = canon.column_permutation.iter().map(|&old| rows[old].clone()).collect();
    let label_map = images
        .iter()
        .map(|img| match img {
            None => Ok(WALL),
            Some(w) => canon
                .root_system
                .label_of(&Root(p.apply(w.coords())))
                .map(|l| l as u8)
                .ok_or_else(|| Error::Internal("restricted root lost in canonical form".into())),
        })
        .collect::<Result<Vec<u8>>>()?;
    Ok(Restriction {
        child: canon,
        morphism: to_simple.matrix,
        erased: k,
        label_map,
        basis,
    })
}

/// A canonical crystallographic object of the restriction tree.
#[derive(Debug)]
pub struct TreeNode {
    pub id: usize,
    pub rank: usize,
    pub system: PositiveRootSystem,
    /// Number of distinct root systems in its groupoid.
    pub object_count: usize,
    /// Automorphism generators as matrices on root coordinates.
    pub aut_matrices: Vec<IntMatrix>,
    pub aut: AutomorphismGroup,
    pub orbits: Orbits,
    minor_bound: OnceLock<i64>,
}

impl TreeNode {
    fn new(
        id: usize,
        system: PositiveRootSystem,
        object_count: usize,
        matrices: Vec<IntMatrix>,
        element_cap: usize,
    ) -> Result<Self> {
        let mut aut_matrices: Vec<IntMatrix> = Vec::new();
        for m in matrices {
            if !m.is_identity() && !aut_matrices.contains(&m) {
                aut_matrices.push(m);
            }
        }
        let gens = aut_matrices
            .iter()
            .map(|m| label_permutation(&system, m))
            .collect::<Result<Vec<_>>>()?;
        let aut = AutomorphismGroup::new(system.len(), gens, element_cap);
        let orbits = aut.orbits();
        Ok(TreeNode {
            id,
            rank: system.rank(),
            system,
            object_count,
            aut_matrices,
            aut,
            orbits,
            minor_bound: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }

    /// Largest absolute square minor of the root matrix; bounds bad primes
    /// for every subarrangement of this object.
    pub fn minor_bound(&self) -> i64 {
        *self.minor_bound.get_or_init(|| {
            let rows: Vec<Vec<i64>> = self
                .system
                .roots()
                .iter()
                .map(|r| r.coords().iter().map(|&c| c as i64).collect())
                .collect();
            max_abs_minor(&rows)
        })
    }

    pub fn normals(&self, labels: LabelSet) -> Vec<Vec<i64>> {
        labels
            .iter()
            .map(|l| self.system.root(l).coords().iter().map(|&c| c as i64).collect())
            .collect()
    }
}

/// Edge from a node to the canonical restriction along one of its roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionEdge {
    pub parent: usize,
    pub wall: usize,
    pub child: usize,
    pub label_map: Vec<u8>,
    /// Basis of the wall in parent coordinates, one vector per child
    /// coordinate.
    pub basis: Vec<Vec<i64>>,
}

impl RestrictionEdge {
    /// Image of a label set in the child, with the wall dropped.
    #[inline]
    pub fn map(&self, set: LabelSet) -> LabelSet {
        let mut out = 0u128;
        for l in set.iter() {
            let c = self.label_map[l];
            if c != WALL {
                out |= 1u128 << c;
            }
        }
        LabelSet::from_bits(out)
    }
}

/// Pure table lookup `S -> S^H`; fails on labels outside the parent.
pub fn map_subarrangement(set: LabelSet, edge: &RestrictionEdge) -> Result<LabelSet> {
    if set.bound() > edge.label_map.len() {
        return Err(Error::Internal(format!(
            "label set {set:?} exceeds the {} labels of node {}",
            edge.label_map.len(),
            edge.parent
        )));
    }
    Ok(edge.map(set))
}

#[derive(Clone, Copy, Debug)]
pub struct TreeOptions {
    pub object_cap: usize,
    /// Largest automorphism group whose elements are enumerated.
    pub aut_element_cap: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions {
            object_cap: DEFAULT_OBJECT_CAP,
            aut_element_cap: 1 << 20,
        }
    }
}

/// All canonical restriction objects of an ambient system, with label maps.
#[derive(Debug)]
pub struct RestrictionTree {
    pub ambient: Option<CartanType>,
    pub policy: OrderingPolicy,
    nodes: Vec<TreeNode>,
    /// `edges[node][wall]`; empty for rank-1 nodes.
    edges: Vec<Vec<RestrictionEdge>>,
}

/// Hyperplane counts of the non-ambient nodes, grouped by rank.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census(pub BTreeMap<usize, Vec<usize>>);

impl Census {
    pub fn at_rank(&self, rank: usize) -> &[usize] {
        self.0.get(&rank).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (rank, sizes) in self.0.iter().rev() {
            let list: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
            writeln!(
                f,
                "rank {rank}: {} object(s) with {} hyperplanes",
                sizes.len(),
                list.join(", ")
            )?;
        }
        Ok(())
    }
}

impl RestrictionTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn edges(&self, node: usize) -> &[RestrictionEdge] {
        &self.edges[node]
    }

    pub fn edge(&self, node: usize, wall: usize) -> &RestrictionEdge {
        &self.edges[node][wall]
    }

    pub fn census(&self) -> Census {
        let mut by_rank: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for node in &self.nodes[1..] {
            by_rank.entry(node.rank).or_default().push(node.len());
        }
        for sizes in by_rank.values_mut() {
            sizes.sort_unstable();
        }
        Census(by_rank)
    }

    /// SHA-256 over node root matrices and label maps.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.policy.version().as_bytes());
        for node in &self.nodes {
            h.update((node.rank as u64).to_le_bytes());
            h.update((node.len() as u64).to_le_bytes());
            for r in node.system.roots() {
                for &c in r.coords() {
                    h.update(c.to_le_bytes());
                }
            }
        }
        for edges in &self.edges {
            for e in edges {
                h.update((e.child as u64).to_le_bytes());
                h.update(&e.label_map);
                for &x in e.basis.iter().flatten() {
                    h.update(x.to_le_bytes());
                }
            }
        }
        hex::encode(h.finalize())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = TreeFile {
            format: TREE_FORMAT.into(),
            format_version: TREE_FORMAT_VERSION,
            ordering_policy: self.policy.version().into(),
            ambient: self.ambient,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeData {
                    system: n.system.clone(),
                    object_count: n.object_count,
                    aut_matrices: n.aut_matrices.clone(),
                })
                .collect(),
            edges: self.edges.iter().flatten().cloned().collect(),
        };
        std::fs::write(path, serde_json::to_vec(&file)?)?;
        Ok(())
    }

    /// Loads a cached tree, refusing files built for another ambient type
    /// or ordering policy.
    pub fn load(path: &Path, ambient: Option<CartanType>, opts: TreeOptions) -> Result<Self> {
        let file: TreeFile = serde_json::from_slice(&std::fs::read(path)?)?;
        let policy = OrderingPolicy::default();
        if file.format != TREE_FORMAT || file.format_version != TREE_FORMAT_VERSION {
            return Err(Error::Database(format!(
                "unsupported tree cache format {} v{}",
                file.format, file.format_version
            )));
        }
        if file.ordering_policy != policy.version() || file.ambient != ambient {
            return Err(Error::Database(format!(
                "tree cache is for {:?} / {}, expected {:?} / {}",
                file.ambient,
                file.ordering_policy,
                ambient,
                policy.version()
            )));
        }
        let nodes: Vec<TreeNode> = file
            .nodes
            .into_iter()
            .enumerate()
            .map(|(id, d)| TreeNode::new(id, d.system, d.object_count, d.aut_matrices, opts.aut_element_cap))
            .collect::<Result<_>>()?;
        let mut edges: Vec<Vec<RestrictionEdge>> = vec![Vec::new(); nodes.len()];
        for e in file.edges {
            if e.parent >= nodes.len() || e.child >= nodes.len() {
                return Err(Error::Database("tree cache edge points outside the node list".into()));
            }
            edges[e.parent].push(e);
        }
        for (id, list) in edges.iter().enumerate() {
            let expected = if nodes[id].rank >= 2 { nodes[id].len() } else { 0 };
            if list.len() != expected || list.iter().enumerate().any(|(w, e)| e.wall != w) {
                return Err(Error::Database(format!("tree cache has bad edges at node {id}")));
            }
        }
        Ok(RestrictionTree {
            ambient,
            policy,
            nodes,
            edges,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct NodeData {
    system: PositiveRootSystem,
    object_count: usize,
    aut_matrices: Vec<IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    format: String,
    format_version: u32,
    ordering_policy: String,
    ambient: Option<CartanType>,
    nodes: Vec<NodeData>,
    edges: Vec<RestrictionEdge>,
}

/// Canonical forms of every groupoid object seen so far, each with the map
/// from that form's coordinates to its node's coordinates.
#[derive(Default)]
struct Registry {
    forms: HashMap<Vec<Root>, (usize, IntMatrix)>,
}

impl Registry {
    /// Registers all objects of `groupoid`, whose base is sent to the node's
    /// system by `base_to_node`.
    fn register(&mut self, node: usize, groupoid: &Groupoid, base_to_node: &IntMatrix) {
        for (o, object) in groupoid.objects.iter().enumerate() {
            let cf = canonical_root_system(object);
            let key = cf.root_system.roots().to_vec();
            self.forms.entry(key).or_insert_with(|| {
                let to_node = base_to_node
                    .mul(&groupoid.from_object[o])
                    .mul(&cf.matrix().transpose());
                (node, to_node)
            });
        }
    }
}

/// Builds the restriction tree of `ambient`: the ambient system itself is
/// node 0, then every restriction is identified up to coordinate
/// permutations and groupoid morphisms and expanded breadth-first.
pub fn all_restrictions(ambient: &PositiveRootSystem, opts: TreeOptions) -> Result<RestrictionTree> {
    let mut registry = Registry::default();
    let mut nodes: Vec<TreeNode> = Vec::new();

    let groupoid = compute_groupoid(ambient, opts.object_cap)?;
    registry.register(0, &groupoid, &IntMatrix::identity(ambient.rank()));
    nodes.push(TreeNode::new(
        0,
        ambient.clone(),
        groupoid.object_count(),
        groupoid.automorphisms.clone(),
        opts.aut_element_cap,
    )?);

    let mut edges: Vec<Vec<RestrictionEdge>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if nodes[u].rank < 2 {
            continue;
        }
        let n = nodes[u].len();
        let mut out: Vec<Option<RestrictionEdge>> = vec![None; n];
        for orbit in nodes[u].orbits.orbits.clone() {
            let rep = orbit[0];
            let r = restrict(&nodes[u].system, rep)?;
            let key = r.child.root_system.roots().to_vec();
            if !registry.forms.contains_key(&key) {
                let id = nodes.len();
                let node = new_node(id, &r.child.root_system, &mut registry, opts)?;
                nodes.push(node);
                edges.push(Vec::new());
                queue.push_back(id);
            }
            let (child, to_node) = &registry.forms[&key];
            let target = &nodes[*child].system;
            let relabel = r
                .child
                .root_system
                .roots()
                .iter()
                .map(|root| {
                    target
                        .label_of(&to_node.apply_root(root))
                        .map(|l| l as u8)
                        .ok_or_else(|| Error::Internal(format!("node map does not reach node {child}")))
                })
                .collect::<Result<Vec<u8>>>()?;
            let rep_map: Vec<u8> = r
                .label_map
                .iter()
                .map(|&c| if c == WALL { WALL } else { relabel[c as usize] })
                .collect();
            // coordinate c of the node is sum_j to_node[c][j] * (form coordinate j)
            let d = r.basis.len();
            let rep_basis: Vec<Vec<i64>> = (0..d)
                .map(|c| {
                    (0..nodes[u].rank)
                        .map(|i| (0..d).map(|j| to_node.get(c, j) * r.basis[j][i]).sum())
                        .collect()
                })
                .collect();
            // an automorphism g with g(rep) = wall carries everything along:
            // the restriction of g(S) to g(rep) is that of S to rep
            let system = &nodes[u].system;
            for (wall, g, g_inv) in schreier_tree(system, &nodes[u].aut_matrices, rep)? {
                let mut label_map = vec![WALL; n];
                for (beta, &c) in rep_map.iter().enumerate() {
                    let image = system
                        .label_of(&g.apply_root(system.root(beta)))
                        .ok_or_else(|| Error::Internal("automorphism leaves the root set".into()))?;
                    label_map[image] = c;
                }
                let t = g_inv.transpose();
                let basis = rep_basis
                    .iter()
                    .map(|b| {
                        let b32: Vec<i32> = b.iter().map(|&x| x as i32).collect();
                        t.apply(&b32).into_iter().map(|x| x as i64).collect()
                    })
                    .collect();
                out[wall] = Some(RestrictionEdge {
                    parent: u,
                    wall,
                    child: *child,
                    label_map,
                    basis,
                });
            }
        }
        let out = out
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Internal("orbit walk missed a wall".into()))?;
        edges[u] = out;
    }
    Ok(RestrictionTree {
        ambient: ambient.kind(),
        policy: OrderingPolicy::default(),
        nodes,
        edges,
    })
}

/// Orbit of `start` with, for each member, an automorphism sending `start`
/// to it and the inverse of that automorphism.
fn schreier_tree(
    system: &PositiveRootSystem,
    generators: &[IntMatrix],
    start: usize,
) -> Result<Vec<(usize, IntMatrix, IntMatrix)>> {
    let inverses = generators.iter().map(finite_order_inverse).collect::<Result<Vec<_>>>()?;
    let id = IntMatrix::identity(system.rank());
    let mut reached = vec![(start, id.clone(), id)];
    let mut seen = LabelSet::singleton(start);
    let mut k = 0;
    while k < reached.len() {
        for (a, a_inv) in generators.iter().zip(&inverses) {
            let (label, g, g_inv) = &reached[k];
            let next = system
                .label_of(&a.apply_root(system.root(*label)))
                .ok_or_else(|| Error::Internal("automorphism leaves the root set".into()))?;
            if !seen.contains(next) {
                seen.insert(next);
                let entry = (next, a.mul(g), g_inv.mul(a_inv));
                reached.push(entry);
            }
        }
        k += 1;
    }
    Ok(reached)
}

fn finite_order_inverse(a: &IntMatrix) -> Result<IntMatrix> {
    let mut p = IntMatrix::identity(a.dim());
    for _ in 0..1000 {
        let next = p.mul(a);
        if next.is_identity() {
            return Ok(p);
        }
        p = next;
    }
    Err(Error::Internal("automorphism of unexpectedly large order".into()))
}

/// New node for a restriction whose canonical form is not yet registered.
/// The node's system is the smallest canonical form over its groupoid.
fn new_node(
    id: usize,
    form: &PositiveRootSystem,
    registry: &mut Registry,
    opts: TreeOptions,
) -> Result<TreeNode> {
    let groupoid = compute_groupoid(form, opts.object_cap)?;
    let forms: Vec<CanonicalForm> = groupoid.objects.iter().map(canonical_root_system).collect();
    let best = (0..forms.len())
        .min_by(|&a, &b| forms[a].root_system.roots().cmp(forms[b].root_system.roots()))
        .expect("groupoid has a base object");
    let p = forms[best].matrix();
    let to_node = p.mul(&groupoid.to_object[best]);
    let from_node = groupoid.from_object[best].mul(&p.transpose());
    registry.register(id, &groupoid, &to_node);

    let system = forms[best].root_system.clone();
    let matrices = groupoid
        .automorphisms
        .iter()
        .map(|a| to_node.mul(a).mul(&from_node))
        .collect();
    TreeNode::new(id, system, groupoid.object_count(), matrices, opts.aut_element_cap)
}
