//! Positive root systems of Weyl type, their ideals, and the exponents
//! predicted for arrangements of ideal type.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelSet, MAX_LABELS};

/// Cartan type of an irreducible reduced crystallographic root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl CartanType {
    pub fn rank(self) -> usize {
        match self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => n,
            CartanType::E(n) => n,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }

    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            CartanType::A(n) => n >= 1,
            CartanType::B(n) => n >= 2,
            CartanType::C(n) => n >= 3,
            CartanType::D(n) => n >= 4,
            CartanType::E(n) => (6..=8).contains(&n),
            CartanType::F4 | CartanType::G2 => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Config(format!("unsupported Cartan type {self}")))
        }
    }

    /// Number of positive roots.
    pub fn positive_root_count(self) -> usize {
        match self {
            CartanType::A(n) => n * (n + 1) / 2,
            CartanType::B(n) | CartanType::C(n) => n * n,
            CartanType::D(n) => n * (n - 1),
            CartanType::E(6) => 36,
            CartanType::E(7) => 63,
            CartanType::E(_) => 120,
            CartanType::F4 => 24,
            CartanType::G2 => 6,
        }
    }

    /// Cartan matrix with `a[i][j] = <alpha_j, alpha_i^vee>`, Bourbaki numbering.
    ///
    /// This agrees with `-max{k : k alpha_i + alpha_j is a root}` off the diagonal.
    pub fn cartan_entries(self) -> Vec<Vec<i32>> {
        let n = self.rank();
        let mut a = vec![vec![0i32; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut bond = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) => {
                for i in 0..n - 1 {
                    bond(i, i + 1);
                }
            }
            CartanType::D(n) => {
                for i in 0..n - 2 {
                    bond(i, i + 1);
                }
                bond(n - 3, n - 1);
            }
            CartanType::E(n) => {
                bond(0, 2);
                bond(1, 3);
                for i in 2..n - 1 {
                    bond(i, i + 1);
                }
            }
            CartanType::F4 => {
                bond(0, 1);
                bond(1, 2);
                bond(2, 3);
            }
            CartanType::G2 => bond(0, 1),
        }
        match self {
            // alpha_n short
            CartanType::B(n) => a[n - 1][n - 2] = -2,
            // alpha_n long
            CartanType::C(n) => a[n - 2][n - 1] = -2,
            CartanType::F4 => a[2][1] = -2,
            // alpha_1 short
            CartanType::G2 => a[0][1] = -3,
            _ => {}
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::E(n) => write!(f, "E{n}"),
            CartanType::F4 => write!(f, "F4"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = Error;

    /// Accepts `A3`, `A_3`, `a3`, `E8`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unknown Cartan type tag {s:?}"));
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let digits = chars.as_str().trim_start_matches('_');
        let n: usize = digits.parse().map_err(|_| bad())?;
        let ty = match (letter, n) {
            ('A', n) => CartanType::A(n),
            ('B', n) => CartanType::B(n),
            ('C', n) => CartanType::C(n),
            ('D', n) => CartanType::D(n),
            ('E', n) => CartanType::E(n),
            ('F', 4) => CartanType::F4,
            ('G', 2) => CartanType::G2,
            _ => return Err(bad()),
        };
        ty.validate()
    }
}

impl TryFrom<String> for CartanType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CartanType> for String {
    fn from(t: CartanType) -> String {
        t.to_string()
    }
}

/// A root given by its coefficients over the simple roots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root(pub Vec<i32>);

impl Root {
    pub fn unit(rank: usize, i: usize) -> Root {
        let mut v = vec![0; rank];
        v[i] = 1;
        Root(v)
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Index of the simple root this is, if it is a unit vector.
    pub fn simple_index(&self) -> Option<usize> {
        let mut found = None;
        for (i, &c) in self.0.iter().enumerate() {
            match c {
                0 => {}
                1 if found.is_none() => found = Some(i),
                _ => return None,
            }
        }
        found
    }

    /// Divide by the gcd of the entries and make the first nonzero entry positive.
    pub fn primitive(mut self) -> Root {
        let g = self.0.iter().fold(0i32, |g, &c| num_integer::gcd(g, c));
        if g > 1 {
            for c in &mut self.0 {
                *c /= g;
            }
        }
        if self.0.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            for c in &mut self.0 {
                *c = -*c;
            }
        }
        self
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Coordinate sum of a root.
pub fn height(root: &Root) -> i32 {
    root.0.iter().sum()
}

/// Ordering of roots inside every root system the engine builds.
///
/// The same ordering is used for the ambient system and for every
/// restriction object, so labels stay comparable across the whole run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingPolicy {
    /// Nondecreasing height; within a height, lexicographically decreasing
    /// coordinates, so the simple roots come first as `alpha_1, .., alpha_l`.
    #[default]
    HeightLex,
}

impl OrderingPolicy {
    pub fn version(self) -> &'static str {
        match self {
            OrderingPolicy::HeightLex => "height-lex/1",
        }
    }

    pub fn sort(self, roots: &mut [Root]) {
        match self {
            OrderingPolicy::HeightLex => roots.sort_by(|a, b| {
                height(a).cmp(&height(b)).then_with(|| b.cmp(a))
            }),
        }
    }
}

/// An ordered set of positive roots in the basis of its simple roots.
#[derive(Clone, Serialize, Deserialize)]
#[serde(from = "RootSystemData", into = "RootSystemData")]
pub struct PositiveRootSystem {
    kind: Option<CartanType>,
    rank: usize,
    roots: Vec<Root>,
    index: HashMap<Root, usize>,
}

#[derive(Serialize, Deserialize)]
struct RootSystemData {
    #[serde(rename = "type", skip_serializing_if = "Option::is_none", default)]
    kind: Option<CartanType>,
    rank: usize,
    roots: Vec<Root>,
}

impl From<RootSystemData> for PositiveRootSystem {
    fn from(d: RootSystemData) -> Self {
        PositiveRootSystem::from_sorted(d.kind, d.rank, d.roots)
    }
}

impl From<PositiveRootSystem> for RootSystemData {
    fn from(s: PositiveRootSystem) -> Self {
        RootSystemData {
            kind: s.kind,
            rank: s.rank,
            roots: s.roots,
        }
    }
}

impl PartialEq for PositiveRootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.roots == other.roots
    }
}

impl Eq for PositiveRootSystem {}

impl fmt::Debug for PositiveRootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PositiveRootSystem")
            .field("kind", &self.kind)
            .field("rank", &self.rank)
            .field("roots", &self.roots)
            .finish()
    }
}

impl PositiveRootSystem {
    /// Builds a system from an unordered collection of positive roots.
    ///
    /// Roots are put in the default ordering and duplicates are dropped.
    pub fn from_roots(
        kind: Option<CartanType>,
        rank: usize,
        roots: impl IntoIterator<Item = Root>,
    ) -> Result<Self> {
        let mut roots: Vec<Root> = roots.into_iter().collect();
        for r in &roots {
            if r.rank() != rank {
                return Err(Error::Validation(format!(
                    "root {r} has {} coordinates, expected {rank}",
                    r.rank()
                )));
            }
            if r.0.iter().any(|&c| c < 0) || r.0.iter().all(|&c| c == 0) {
                return Err(Error::Validation(format!("{r} is not a positive root")));
            }
        }
        OrderingPolicy::default().sort(&mut roots);
        roots.dedup();
        if roots.len() > MAX_LABELS {
            return Err(Error::Config(format!(
                "{} positive roots exceed the engine capacity of {MAX_LABELS}",
                roots.len()
            )));
        }
        Ok(Self::from_sorted(kind, rank, roots))
    }

    fn from_sorted(kind: Option<CartanType>, rank: usize, roots: Vec<Root>) -> Self {
        let index = roots
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        PositiveRootSystem {
            kind,
            rank,
            roots,
            index,
        }
    }

    pub fn kind(&self) -> Option<CartanType> {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, label: usize) -> &Root {
        &self.roots[label]
    }

    pub fn label_of(&self, root: &Root) -> Option<usize> {
        self.index.get(root).copied()
    }

    pub fn contains(&self, root: &Root) -> bool {
        self.index.contains_key(root)
    }

    pub fn all_labels(&self) -> LabelSet {
        LabelSet::full(self.len())
    }

    pub fn heights(&self) -> Vec<i32> {
        self.roots.iter().map(height).collect()
    }

    /// Label of the root `roots[label] + alpha_i`, if that is a root.
    pub fn raise(&self, label: usize, i: usize) -> Option<usize> {
        let mut v = self.roots[label].clone();
        v.0[i] += 1;
        self.label_of(&v)
    }
}

/// Complete positive system of a Weyl type, built height by height.
///
/// `beta + alpha_i` is a root exactly when `p - <beta, alpha_i^vee> > 0`,
/// where `p` is the largest `k` with `beta - k alpha_i` a root.
pub fn build_positive_roots(ty: CartanType) -> Result<PositiveRootSystem> {
    let ty = ty.validate()?;
    if ty.positive_root_count() > MAX_LABELS {
        return Err(Error::Config(format!(
            "{ty} has {} positive roots, more than the engine capacity of {MAX_LABELS}",
            ty.positive_root_count()
        )));
    }
    let n = ty.rank();
    let a = ty.cartan_entries();
    let mut all: Vec<Root> = (0..n).map(|i| Root::unit(n, i)).collect();
    let mut known: HashSet<Root> = all.iter().cloned().collect();
    let mut layer = all.clone();
    while !layer.is_empty() {
        let mut next: Vec<Root> = Vec::new();
        for beta in &layer {
            for i in 0..n {
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down.0[i] -= 1;
                    if known.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i32 = (0..n).map(|j| beta.0[j] * a[i][j]).sum();
                if p - pairing > 0 {
                    let mut up = beta.clone();
                    up.0[i] += 1;
                    if known.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    if all.len() != ty.positive_root_count() {
        return Err(Error::Internal(format!(
            "{ty}: built {} positive roots, expected {}",
            all.len(),
            ty.positive_root_count()
        )));
    }
    PositiveRootSystem::from_roots(Some(ty), n, all)
}

/// An upper order ideal of a positive root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ideal {
    pub members: LabelSet,
}

/// A set of hyperplanes `alpha^perp` of one root-system object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subarrangement {
    /// Node identity of the ambient object in the restriction tree.
    pub ambient: usize,
    pub labels: LabelSet,
}

/// Multiset of exponents, kept sorted ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentMultiset(Vec<u32>);

impl ExponentMultiset {
    pub fn new(mut values: Vec<u32>) -> Self {
        values.sort_unstable();
        ExponentMultiset(values)
    }

    pub fn zeros(rank: usize) -> Self {
        ExponentMultiset(vec![0; rank])
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().map(|&v| v as usize).sum()
    }

    pub fn nonzero(&self) -> Vec<u32> {
        self.0.iter().copied().filter(|&v| v > 0).collect()
    }

    /// Distinct values, ascending.
    pub fn distinct(&self) -> Vec<u32> {
        let mut d = self.0.clone();
        d.dedup();
        d
    }

    pub fn is_submultiset_of(&self, other: &ExponentMultiset) -> bool {
        let mut j = 0;
        for &v in &self.0 {
            while j < other.0.len() && other.0[j] < v {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != v {
                return false;
            }
            j += 1;
        }
        true
    }

    /// `self \ other` as a multiset, if `other` is contained in `self`.
    pub fn difference(&self, other: &ExponentMultiset) -> Option<Vec<u32>> {
        if !other.is_submultiset_of(self) {
            return None;
        }
        let mut rest = Vec::new();
        let mut j = 0;
        for &v in &self.0 {
            if j < other.0.len() && other.0[j] == v {
                j += 1;
            } else {
                rest.push(v);
            }
        }
        Some(rest)
    }
}

impl fmt::Debug for ExponentMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for ExponentMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Upward closure test: `alpha` in the set and `alpha + beta` a root forces
/// `alpha + beta` into the set.
pub fn is_ideal(subset: LabelSet, system: &PositiveRootSystem) -> bool {
    for a in subset.iter() {
        let alpha = system.root(a);
        for beta in system.roots() {
            let sum = Root(alpha.0.iter().zip(&beta.0).map(|(x, y)| x + y).collect());
            if let Some(s) = system.label_of(&sum) {
                if !subset.contains(s) {
                    return false;
                }
            }
        }
    }
    true
}

/// Smallest ideal containing `generators`.
pub fn upward_closure(generators: LabelSet, system: &PositiveRootSystem) -> LabelSet {
    let mut closed = generators;
    let mut stack: Vec<usize> = generators.iter().collect();
    while let Some(label) = stack.pop() {
        for i in 0..system.rank() {
            if let Some(up) = system.raise(label, i) {
                if !closed.contains(up) {
                    closed.insert(up);
                    stack.push(up);
                }
            }
        }
    }
    closed
}

/// All ideals, including the empty one and the whole positive system.
///
/// Starts from the principal ideals and saturates under pairwise unions.
/// Output is sorted by size, then lexicographically on the label lists.
pub fn enumerate_ideals(system: &PositiveRootSystem) -> Vec<Ideal> {
    let principal: Vec<LabelSet> = {
        let mut p: Vec<LabelSet> = (0..system.len())
            .map(|l| upward_closure(LabelSet::singleton(l), system))
            .collect();
        p.sort();
        p.dedup();
        p
    };
    let mut seen: HashSet<LabelSet> = principal.iter().copied().collect();
    seen.insert(LabelSet::EMPTY);
    let mut frontier = principal.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &ideal in &frontier {
            for &p in &principal {
                let u = ideal.union(p);
                if seen.insert(u) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    let mut ideals: Vec<LabelSet> = seen.into_iter().collect();
    ideals.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.to_vec().cmp(&b.to_vec())));
    ideals.into_iter().map(|members| Ideal { members }).collect()
}

/// The hyperplanes of the complement `R_+ \ I`.
pub fn ideal_arrangement(ideal: &Ideal, system: &PositiveRootSystem) -> Result<LabelSet> {
    if !ideal.members.is_subset(system.all_labels()) || !is_ideal(ideal.members, system) {
        return Err(Error::Domain(format!(
            "{:?} is not an ideal of the positive system",
            ideal.members
        )));
    }
    Ok(system.all_labels().difference(ideal.members))
}

/// Conjugate of the height partition of `roots`, padded with zeros to `rank`.
pub fn dual_height_partition(
    roots: LabelSet,
    system: &PositiveRootSystem,
    rank: usize,
) -> ExponentMultiset {
    let mut per_height: Vec<u32> = Vec::new();
    for label in roots.iter() {
        let h = height(system.root(label)) as usize;
        if per_height.len() < h {
            per_height.resize(h, 0);
        }
        per_height[h - 1] += 1;
    }
    let largest = per_height.iter().copied().max().unwrap_or(0);
    let mut values: Vec<u32> = (1..=largest)
        .map(|j| per_height.iter().filter(|&&c| c >= j).count() as u32)
        .collect();
    while values.len() < rank {
        values.push(0);
    }
    ExponentMultiset::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(tag: &str) -> PositiveRootSystem {
        build_positive_roots(tag.parse().unwrap()).unwrap()
    }

    fn labels_of(system: &PositiveRootSystem, roots: &[&[i32]]) -> LabelSet {
        roots
            .iter()
            .map(|r| system.label_of(&Root(r.to_vec())).unwrap())
            .collect()
    }

    /// Independent oracle: every subset passing `is_ideal`.
    fn brute_force_ideals(system: &PositiveRootSystem) -> Vec<LabelSet> {
        let n = system.len();
        (0u128..1 << n)
            .map(LabelSet::from_bits)
            .filter(|&s| is_ideal(s, system))
            .collect()
    }

    #[test]
    fn a2_roots_and_heights() {
        let a2 = sys("A2");
        let roots: Vec<Vec<i32>> = a2.roots().iter().map(|r| r.0.clone()).collect();
        assert_eq!(roots, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(height(&Root(vec![1, 0])), 1);
        assert_eq!(height(&Root(vec![1, 1])), 2);
        assert_eq!(sys("A1").len(), 1);
    }

    #[test]
    fn g2_closure_and_highest_root() {
        let g2 = sys("G2");
        let roots: Vec<Vec<i32>> = g2.roots().iter().map(|r| r.0.clone()).collect();
        assert_eq!(
            roots,
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![3, 1], vec![3, 2]]
        );
        assert_eq!(height(g2.roots().last().unwrap()), 5);
    }

    #[test]
    fn positive_root_counts() {
        for (tag, n) in [
            ("A5", 15),
            ("B4", 16),
            ("C3", 9),
            ("D4", 12),
            ("D5", 20),
            ("E6", 36),
            ("E7", 63),
            ("E8", 120),
            ("F4", 24),
        ] {
            assert_eq!(sys(tag).len(), n, "{tag}");
        }
    }

    #[test]
    fn first_roots_are_simple_and_order_is_height_lex() {
        for tag in ["A4", "B3", "E6", "F4", "G2"] {
            let s = sys(tag);
            for i in 0..s.rank() {
                assert_eq!(s.root(i), &Root::unit(s.rank(), i));
            }
            for w in s.roots().windows(2) {
                let (h0, h1) = (height(&w[0]), height(&w[1]));
                assert!(h0 < h1 || (h0 == h1 && w[0] > w[1]));
            }
        }
    }

    #[test]
    fn unknown_type_tags_are_rejected() {
        for bad in ["X3", "B1", "C2", "D3", "E5", "F3", "G3", "", "A"] {
            assert!(matches!(bad.parse::<CartanType>(), Err(Error::Config(_))), "{bad}");
        }
        assert_eq!("e_8".parse::<CartanType>().unwrap(), CartanType::E(8));
        assert!(build_positive_roots(CartanType::A(16)).is_err());
    }

    #[test]
    fn is_ideal_examples() {
        let a2 = sys("A2");
        assert!(is_ideal(LabelSet::EMPTY, &a2));
        assert!(is_ideal(labels_of(&a2, &[&[1, 1]]), &a2));
        assert!(!is_ideal(labels_of(&a2, &[&[1, 0]]), &a2));
    }

    #[test]
    fn ideal_counts_match_brute_force() {
        for (tag, count) in [("A2", 5), ("A3", 14), ("B2", 6), ("G2", 8), ("B3", 20)] {
            let s = sys(tag);
            let fast: Vec<LabelSet> = enumerate_ideals(&s).iter().map(|i| i.members).collect();
            let mut oracle = brute_force_ideals(&s);
            assert_eq!(fast.len(), count, "{tag}");
            let mut sorted = fast.clone();
            sorted.sort();
            oracle.sort();
            assert_eq!(sorted, oracle, "{tag}");
        }
    }

    #[test]
    fn ideal_order_is_size_then_lex() {
        let ideals = enumerate_ideals(&sys("A3"));
        assert_eq!(ideals.first().unwrap().members, LabelSet::EMPTY);
        assert_eq!(ideals.last().unwrap().members, LabelSet::full(6));
        for w in ideals.windows(2) {
            let (a, b) = (w[0].members, w[1].members);
            assert!((a.len(), a.to_vec()) < (b.len(), b.to_vec()));
        }
    }

    #[test]
    fn unions_of_ideals_are_ideals() {
        for tag in ["A3", "B3", "C3", "G2"] {
            let s = sys(tag);
            let ideals = enumerate_ideals(&s);
            for a in &ideals {
                for b in &ideals {
                    assert!(is_ideal(a.members.union(b.members), &s));
                }
            }
        }
    }

    #[test]
    fn ideal_arrangement_examples() {
        let a2 = sys("A2");
        let full = Ideal { members: a2.all_labels() };
        assert_eq!(ideal_arrangement(&full, &a2).unwrap(), LabelSet::EMPTY);
        let empty = Ideal { members: LabelSet::EMPTY };
        assert_eq!(ideal_arrangement(&empty, &a2).unwrap(), a2.all_labels());
        let top = Ideal { members: labels_of(&a2, &[&[1, 1]]) };
        assert_eq!(
            ideal_arrangement(&top, &a2).unwrap(),
            labels_of(&a2, &[&[1, 0], &[0, 1]])
        );
        let bad = Ideal { members: labels_of(&a2, &[&[1, 0]]) };
        assert!(matches!(ideal_arrangement(&bad, &a2), Err(Error::Domain(_))));
    }

    #[test]
    fn dual_height_partition_examples() {
        let a2 = sys("A2");
        assert_eq!(dual_height_partition(a2.all_labels(), &a2, 2).values(), &[1, 2]);
        assert_eq!(dual_height_partition(LabelSet::EMPTY, &a2, 2).values(), &[0, 0]);
        assert_eq!(
            dual_height_partition(labels_of(&a2, &[&[1, 0], &[0, 1]]), &a2, 2).values(),
            &[1, 1]
        );
        let a3 = sys("A3");
        assert_eq!(dual_height_partition(a3.all_labels(), &a3, 3).values(), &[1, 2, 3]);
        let g2 = sys("G2");
        assert_eq!(dual_height_partition(g2.all_labels(), &g2, 2).values(), &[1, 5]);
        let e8 = sys("E8");
        assert_eq!(
            dual_height_partition(e8.all_labels(), &e8, 8).values(),
            &[1, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn dual_height_partition_sums_to_complement_size() {
        for tag in ["A4", "B3", "D4", "F4"] {
            let s = sys(tag);
            for ideal in enumerate_ideals(&s) {
                let comp = ideal_arrangement(&ideal, &s).unwrap();
                let e = dual_height_partition(comp, &s, s.rank());
                assert_eq!(e.sum(), comp.len());
                assert_eq!(e.len(), s.rank());
            }
        }
    }

    #[test]
    fn exponent_multiset_helpers() {
        let e = ExponentMultiset::new(vec![2, 1, 2]);
        let f = ExponentMultiset::new(vec![1, 2]);
        assert!(f.is_submultiset_of(&e));
        assert_eq!(e.difference(&f), Some(vec![2]));
        assert!(!ExponentMultiset::new(vec![3]).is_submultiset_of(&e));
        assert!(!ExponentMultiset::new(vec![1, 1]).is_submultiset_of(&e));
        assert_eq!(e.distinct(), vec![1, 2]);
    }

    #[test]
    fn root_system_json_round_trip() {
        let s = sys("B3");
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with(r#"{"type":"B3","rank":3,"roots":[[1,0,0]"#));
        let back: PositiveRootSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.label_of(&Root(vec![0, 1, 1])), s.label_of(&Root(vec![0, 1, 1])));
    }
}
