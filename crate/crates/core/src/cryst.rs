//! Crystallographic arrangements: per-chamber Cartan matrices, simple
//! reflections, the Weyl groupoid (smallest covering), automorphism groups
//! and canonical forms of root systems.
//!
//! Root systems are always stored in the coordinates of their own chamber,
//! so the simple roots are the unit vectors and every root is nonnegative.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::linalg::IntMatrix;
use crate::rootsys::{height, PositiveRootSystem, Root};

/// Default cap on the number of objects visited by the groupoid closure.
pub const DEFAULT_OBJECT_CAP: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanMatrix {
    rank: usize,
    entries: Vec<i32>,
}

impl CartanMatrix {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.entries[i * self.rank + j]
    }

    pub fn rows(&self) -> Vec<Vec<i32>> {
        self.entries.chunks(self.rank.max(1)).map(|r| r.to_vec()).collect()
    }
}

impl fmt::Debug for CartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

/// `c_ii = 2`, `c_ij = -max{k : k alpha_i + alpha_j in R}`.
pub fn cartan_matrix(system: &PositiveRootSystem) -> CartanMatrix {
    let n = system.rank();
    let mut entries = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                entries[i * n + j] = 2;
                continue;
            }
            let mut probe = Root::unit(n, j);
            let mut k = 0;
            loop {
                probe.0[i] += 1;
                if !system.contains(&probe) {
                    break;
                }
                k += 1;
            }
            entries[i * n + j] = -k;
        }
    }
    CartanMatrix { rank: n, entries }
}

/// Matrix of `sigma_i(alpha_j) = alpha_j - c_ij alpha_i`.
pub fn simple_reflection(cartan: &CartanMatrix, i: usize) -> IntMatrix {
    let n = cartan.rank();
    let mut m = IntMatrix::identity(n);
    for j in 0..n {
        m.set(i, j, if i == j { -1 } else { -cartan.get(i, j) as i64 });
    }
    m
}

/// The root system of the chamber adjacent across the wall `alpha_i^perp`.
///
/// Fails if the reflected set is not sign-consistent, which means the input
/// is not the root system of a crystallographic arrangement.
pub fn reflect(system: &PositiveRootSystem, i: usize) -> Result<(PositiveRootSystem, IntMatrix)> {
    let cartan = cartan_matrix(system);
    let s = simple_reflection(&cartan, i);
    let mut image = Vec::with_capacity(system.len());
    for root in system.roots() {
        if root.simple_index() == Some(i) {
            image.push(root.clone());
            continue;
        }
        let v = s.apply(root.coords());
        if v.iter().any(|&c| c < 0) {
            return Err(Error::Validation(format!(
                "reflection {i} sends {root} to {:?}, which is not sign-consistent",
                v
            )));
        }
        image.push(Root(v));
    }
    let reflected = PositiveRootSystem::from_roots(None, system.rank(), image)?;
    if reflected.len() != system.len() {
        return Err(Error::Validation(format!(
            "reflection {i} is not injective on the root set"
        )));
    }
    Ok((reflected, s))
}

/// Smallest covering of the Weyl groupoid reachable from a base object.
#[derive(Clone, Debug)]
pub struct Groupoid {
    /// Distinct root systems; `objects[0]` is the base.
    pub objects: Vec<PositiveRootSystem>,
    /// Morphism from the base to each object.
    pub to_object: Vec<IntMatrix>,
    /// Morphism from each object back to the base.
    pub from_object: Vec<IntMatrix>,
    /// Generators of the automorphism group at the base, as matrices.
    pub automorphisms: Vec<IntMatrix>,
}

impl Groupoid {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }
}

/// Breadth-first closure over simple reflections, identifying chambers with
/// equal root sets. Automorphism generators come from the non-tree edges.
pub fn compute_groupoid(base: &PositiveRootSystem, object_cap: usize) -> Result<Groupoid> {
    let n = base.rank();
    let mut objects = vec![base.clone()];
    let mut to_object = vec![IntMatrix::identity(n)];
    let mut from_object = vec![IntMatrix::identity(n)];
    let mut seen: HashMap<Vec<Root>, usize> = HashMap::new();
    seen.insert(base.roots().to_vec(), 0);
    let mut automorphisms: Vec<IntMatrix> = Vec::new();
    let mut aut_seen: HashSet<IntMatrix> = HashSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for i in 0..n {
            let (next, s) = reflect(&objects[x], i)?;
            match seen.get(next.roots()) {
                Some(&y) => {
                    let aut = from_object[y].mul(&s).mul(&to_object[x]);
                    if !aut.is_identity() && aut_seen.insert(aut.clone()) {
                        automorphisms.push(aut);
                    }
                }
                None => {
                    if objects.len() >= object_cap {
                        return Err(Error::Validation(format!(
                            "groupoid closure exceeded {object_cap} objects"
                        )));
                    }
                    let y = objects.len();
                    seen.insert(next.roots().to_vec(), y);
                    to_object.push(s.mul(&to_object[x]));
                    // reflections are involutions
                    from_object.push(from_object[x].mul(&s));
                    objects.push(next);
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(Groupoid {
        objects,
        to_object,
        from_object,
        automorphisms,
    })
}

/// A morphism carrying a root to a simple root of its target object.
#[derive(Clone, Debug)]
pub struct SimpleMorphism {
    pub matrix: IntMatrix,
    pub target: PositiveRootSystem,
    /// Index of the simple root the given root is sent to.
    pub simple_index: usize,
    /// Number of simple reflections composed.
    pub length: usize,
}

/// Composite of simple reflections sending `label` to a simple root.
///
/// Walks down in height; each step picks the first reflection that lowers
/// the height of the current image.
pub fn morphism_to_simple(system: &PositiveRootSystem, label: usize) -> Result<SimpleMorphism> {
    let n = system.rank();
    let mut current = system.clone();
    let mut v = system.root(label).clone();
    let mut matrix = IntMatrix::identity(n);
    let mut length = 0;
    loop {
        if let Some(k) = v.simple_index() {
            return Ok(SimpleMorphism {
                matrix,
                target: current,
                simple_index: k,
                length,
            });
        }
        let cartan = cartan_matrix(&current);
        let step = (0..n).find(|&i| {
            let pairing: i32 = (0..n).map(|j| cartan.get(i, j) * v.0[j]).sum();
            pairing > 0 && v.0[i] > 0
        });
        let Some(i) = step else {
            return morphism_to_simple_bfs(system, label);
        };
        let (next, s) = reflect(&current, i)?;
        v = Root(s.apply(v.coords()));
        matrix = s.mul(&matrix);
        current = next;
        length += 1;
    }
}

fn morphism_to_simple_bfs(system: &PositiveRootSystem, label: usize) -> Result<SimpleMorphism> {
    let n = system.rank();
    let start = system.root(label).clone();
    let mut seen: HashSet<(Vec<Root>, Root)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((system.roots().to_vec(), start.clone()));
    queue.push_back((system.clone(), start, IntMatrix::identity(n), 0usize));
    while let Some((obj, v, m, len)) = queue.pop_front() {
        if let Some(k) = v.simple_index() {
            return Ok(SimpleMorphism {
                matrix: m,
                target: obj,
                simple_index: k,
                length: len,
            });
        }
        for i in 0..n {
            let (next, s) = reflect(&obj, i)?;
            let w = Root(s.apply(v.coords()));
            if seen.insert((next.roots().to_vec(), w.clone())) {
                queue.push_back((next, w, s.mul(&m), len + 1));
            }
        }
        if seen.len() > DEFAULT_OBJECT_CAP {
            break;
        }
    }
    Err(Error::Validation(format!(
        "no morphism makes root {label} simple"
    )))
}

/// A root system with its coordinates permuted into canonical position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub root_system: PositiveRootSystem,
    /// New coordinate `c` is old coordinate `column_permutation[c]`.
    pub column_permutation: Vec<usize>,
}

impl CanonicalForm {
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::permutation(&self.column_permutation)
    }
}

/// Sort coordinates by increasing column sum; break ties by taking the
/// lexicographically smallest root matrix over all permutations that keep
/// the column-sum sequence.
pub fn canonical_root_system(system: &PositiveRootSystem) -> CanonicalForm {
    let n = system.rank();
    let sums: Vec<i64> = (0..n)
        .map(|c| system.roots().iter().map(|r| r.0[c] as i64).sum())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&c| (sums[c], c));
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || sums[order[k]] != sums[order[start]] {
            blocks.push((start, k));
            start = k;
        }
    }

    let mut perm = order.clone();
    let mut best: Option<(Vec<Root>, Vec<usize>)> = None;
    loop {
        let permuted = permute_rows(system, &perm);
        if best.as_ref().is_none_or(|(b, _)| permuted < *b) {
            best = Some((permuted, perm.clone()));
        }
        // odometer over the per-block permutations
        let mut advanced = false;
        for &(lo, hi) in blocks.iter().rev() {
            if next_permutation(&mut perm[lo..hi]) {
                advanced = true;
                break;
            }
            // next_permutation left the block sorted again
        }
        if !advanced {
            break;
        }
    }
    let (roots, column_permutation) = best.expect("at least one permutation");
    let root_system = PositiveRootSystem::from_roots(system.kind(), n, roots)
        .expect("permuted root set stays valid");
    CanonicalForm {
        root_system,
        column_permutation,
    }
}

fn permute_rows(system: &PositiveRootSystem, perm: &[usize]) -> Vec<Root> {
    let mut rows: Vec<Root> = system
        .roots()
        .iter()
        .map(|r| Root(perm.iter().map(|&c| r.0[c]).collect()))
        .collect();
    crate::rootsys::OrderingPolicy::default().sort(&mut rows);
    rows
}

/// Lexicographic successor; on the last permutation resets to sorted and
/// returns false.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Whether a set of positive roots (simple roots = unit vectors) is the root
/// system of a crystallographic arrangement. Checked by closing under simple
/// reflections and requiring every reflected set to be sign-consistent.
pub fn is_crystallographic(rank: usize, roots: &[Root]) -> bool {
    let Ok(system) = PositiveRootSystem::from_roots(None, rank, roots.iter().cloned()) else {
        return false;
    };
    if (0..rank).any(|i| !system.contains(&Root::unit(rank, i))) {
        return false;
    }
    let reduced = roots.iter().all(|r| r.clone().primitive() == *r);
    reduced && compute_groupoid(&system, DEFAULT_OBJECT_CAP).is_ok()
}

/// Permutation of the positive-root labels of one object.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Box<[u8]>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Self {
        Permutation(images.into_boxed_slice())
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn image(&self, label: usize) -> usize {
        self.0[label] as usize
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn apply(&self, set: LabelSet) -> LabelSet {
        let mut out = 0u128;
        for l in set.iter() {
            out |= 1u128 << self.0[l];
        }
        LabelSet::from_bits(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Label permutation induced by a linear map preserving the root set up to sign.
pub fn label_permutation(system: &PositiveRootSystem, matrix: &IntMatrix) -> Result<Permutation> {
    let images = system
        .roots()
        .iter()
        .map(|r| {
            system
                .label_of(&matrix.apply_root(r))
                .map(|l| l as u8)
                .ok_or_else(|| {
                    Error::Internal(format!("automorphism {matrix:?} does not preserve {r}"))
                })
        })
        .collect::<Result<Vec<u8>>>()?;
    Ok(Permutation(images.into_boxed_slice()))
}

/// Automorphism group of one object, acting on its positive-root labels.
///
/// Elements are enumerated lazily and only if the group order stays within
/// the configured cap.
#[derive(Debug)]
pub struct AutomorphismGroup {
    degree: usize,
    generators: Vec<Permutation>,
    element_cap: usize,
    elements: OnceLock<Option<Vec<Permutation>>>,
}

impl Clone for AutomorphismGroup {
    fn clone(&self) -> Self {
        AutomorphismGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            element_cap: self.element_cap,
            elements: match self.elements.get() {
                Some(e) => OnceLock::from(e.clone()),
                None => OnceLock::new(),
            },
        }
    }
}

impl AutomorphismGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>, element_cap: usize) -> Self {
        let mut gens: Vec<Permutation> = Vec::new();
        for g in generators {
            if !g.is_identity() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        AutomorphismGroup {
            degree,
            generators: gens,
            element_cap,
            elements: OnceLock::new(),
        }
    }

    /// Group generated by the automorphisms found in a groupoid closure.
    pub fn from_groupoid(
        system: &PositiveRootSystem,
        groupoid: &Groupoid,
        element_cap: usize,
    ) -> Result<Self> {
        let gens = groupoid
            .automorphisms
            .iter()
            .map(|m| label_permutation(system, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(system.len(), gens, element_cap))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn element_cap(&self) -> usize {
        self.element_cap
    }

    /// All elements, identity first, or `None` if the order exceeds the cap.
    pub fn elements(&self) -> Option<&[Permutation]> {
        self.elements
            .get_or_init(|| close_group(self.degree, &self.generators, self.element_cap))
            .as_deref()
    }

    pub fn order(&self) -> Option<usize> {
        self.elements().map(|e| e.len())
    }

    pub fn orbits(&self) -> Orbits {
        automorphism_orbits(self.degree, &self.generators)
    }
}

fn close_group(degree: usize, gens: &[Permutation], cap: usize) -> Option<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut elements = vec![id];
    let mut k = 0;
    while k < elements.len() {
        for g in gens {
            let p = g.compose(&elements[k]);
            if !seen.contains(&p) {
                if elements.len() >= cap {
                    return None;
                }
                seen.insert(p.clone());
                elements.push(p);
            }
        }
        k += 1;
    }
    Some(elements)
}

/// Orbit partition of the labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbits {
    /// Orbit id of each label; ids are numbered by smallest member.
    pub orbit_of: Vec<u16>,
    pub orbits: Vec<Vec<usize>>,
}

impl Orbits {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    /// Sizes of the intersections of `set` with every orbit.
    pub fn signature(&self, set: LabelSet) -> Vec<u16> {
        let mut sig = vec![0u16; self.orbits.len()];
        for l in set.iter() {
            sig[self.orbit_of[l] as usize] += 1;
        }
        sig
    }
}

pub fn automorphism_orbits(degree: usize, generators: &[Permutation]) -> Orbits {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in generators {
        for l in 0..degree {
            let (a, b) = (find(&mut parent, l), find(&mut parent, g.image(l)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut orbit_of = vec![u16::MAX; degree];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut id_of_root: HashMap<usize, u16> = HashMap::new();
    for l in 0..degree {
        let r = find(&mut parent, l);
        let id = *id_of_root.entry(r).or_insert_with(|| {
            orbits.push(Vec::new());
            (orbits.len() - 1) as u16
        });
        orbit_of[l] = id;
        orbits[id as usize].push(l);
    }
    Orbits { orbit_of, orbits }
}

/// Checks that every root maps to a root (up to sign) under `matrix`.
pub fn preserves_roots(system: &PositiveRootSystem, matrix: &IntMatrix) -> bool {
    system
        .roots()
        .iter()
        .all(|r| system.contains(&matrix.apply_root(r)))
}

/// Height of every root, handy for galleries.
pub fn max_height(system: &PositiveRootSystem) -> i32 {
    system.roots().iter().map(height).max().unwrap_or(0)
}
