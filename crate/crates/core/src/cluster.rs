//! Cluster pictures for the family, inertia profiles, the general tame engine, rendering.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{rat, Val};
use crate::classify::{classify_case, CaseRow, FamilyInstance, Field, RowTag};
use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf { id: usize, label: String },
    Cluster { depth: Val, children: Vec<Node> },
}

impl Node {
    pub fn size(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Cluster { children, .. } => children.iter().map(Node::size).sum(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out.sort();
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Node::Leaf { id, .. } => out.push(*id),
            Node::Cluster { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    fn leaf_labels(&self, out: &mut Vec<String>) {
        match self {
            Node::Leaf { label, .. } => out.push(label.clone()),
            Node::Cluster { children, .. } => children.iter().for_each(|c| c.leaf_labels(out)),
        }
    }

    fn height(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Cluster { children, .. } => 1 + children.iter().map(Node::height).max().unwrap_or(0),
        }
    }
}

/// Rooted tree of clusters; the root is the cluster of all roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPicture {
    pub root: Node,
}

fn leaf(id: usize, label: impl Into<String>) -> Node {
    Node::Leaf { id, label: label.into() }
}

fn numbered(id: usize) -> Node {
    leaf(id, format!("γ{}", id))
}

impl ClusterPicture {
    /// Checks the structural invariants and returns the number of leaves.
    pub fn validate(&self) -> Result<usize> {
        let Node::Cluster { .. } = &self.root else {
            return domain("the top of a picture must be a cluster");
        };
        fn walk(n: &Node, parent: Option<&Val>) -> Result<()> {
            if let Node::Cluster { depth, children } = n {
                if depth.is_infinite() {
                    return domain("cluster depth must be finite");
                }
                if n.size() < 2 || children.len() < 2 {
                    return domain("a proper cluster needs at least two children");
                }
                if let Some(p) = parent {
                    if depth <= p {
                        return domain("child cluster must be deeper than its parent");
                    }
                }
                for c in children {
                    walk(c, Some(depth))?;
                }
            }
            Ok(())
        }
        walk(&self.root, None)?;
        let leaves = self.root.leaves();
        if leaves.iter().enumerate().any(|(i, &id)| i != id) {
            return domain("leaf ids must be 0..n-1, each once");
        }
        Ok(leaves.len())
    }

    pub fn depth(&self) -> Val {
        match &self.root {
            Node::Cluster { depth, .. } => depth.clone(),
            Node::Leaf { .. } => Val::Infinity,
        }
    }

    /// Clusters of size 2.
    pub fn twins(&self) -> Vec<Vec<usize>> {
        self.flatten().into_iter().filter(|c| c.leaves.len() == 2).map(|c| c.leaves).collect()
    }

    /// Every non-leaf cluster with parent index, leaf set and direct children.
    pub fn flatten(&self) -> Vec<FlatCluster> {
        let mut out = Vec::new();
        fn go(n: &Node, parent: Option<usize>, out: &mut Vec<FlatCluster>) {
            if let Node::Cluster { depth, children } = n {
                let me = out.len();
                out.push(FlatCluster {
                    depth: depth.clone(),
                    parent,
                    leaves: n.leaves(),
                    children: vec![],
                    direct_leaves: vec![],
                });
                for c in children {
                    match c {
                        Node::Leaf { id, .. } => out[me].direct_leaves.push(*id),
                        Node::Cluster { .. } => {
                            let idx = out.len();
                            out[me].children.push(idx);
                            go(c, Some(me), out);
                        }
                    }
                }
            }
        }
        go(&self.root, None, &mut out);
        out
    }

    /// Multiset of v(γ_i − γ_j) over ordered pairs i ≠ j.
    pub fn pair_valuations(&self) -> Vec<(Val, u64)> {
        let flat = self.flatten();
        flat.iter()
            .map(|c| {
                let n = c.leaves.len() as u64;
                let inner: u64 = c.children.iter().map(|&i| (flat[i].leaves.len() as u64).pow(2)).sum::<u64>()
                    + c.direct_leaves.len() as u64;
                (c.depth.clone(), n * n - inner)
            })
            .collect()
    }

    /// Same picture with every depth multiplied by k.
    pub fn scaled(&self, k: &BigRational) -> ClusterPicture {
        fn go(n: &Node, k: &BigRational) -> Node {
            match n {
                Node::Leaf { .. } => n.clone(),
                Node::Cluster { depth, children } => Node::Cluster {
                    depth: depth.scale(k),
                    children: children.iter().map(|c| go(c, k)).collect(),
                },
            }
        }
        ClusterPicture { root: go(&self.root, k) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatCluster {
    pub depth: Val,
    pub parent: Option<usize>,
    pub leaves: Vec<usize>,
    pub children: Vec<usize>,
    pub direct_leaves: Vec<usize>,
}

// ---------------------------------------------------------------- builders

fn single(r: u64, depth: Val) -> ClusterPicture {
    ClusterPicture { root: Node::Cluster { depth, children: (0..r as usize).map(numbered).collect() } }
}

fn finite(v: BigRational) -> Val {
    Val::Finite(v)
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The picture over Q_q for a classified bad row.
fn picture_q(row: &CaseRow, r: u64) -> Result<ClusterPicture> {
    let m = (r - 1) / 2;
    let base = rat(1, r as i64 - 1);
    let vd = int(row.v_delta);
    let vs = || match &row.v_s {
        Val::Finite(x) => Ok(x.clone()),
        Val::Infinity => domain("v(s) is infinite"),
    };
    Ok(match row.tag {
        RowTag::Good => return domain("q is not a bad prime"),
        RowTag::R1 => {
            let twin_depth = finite(&vd / int(2));
            let mut children = vec![];
            for k in 0..m as usize {
                let (a, b) = (k + 1, r as usize - 1 - k);
                let (la, lb) = if k == 0 {
                    ("γ0".to_string(), "γ{2i0}".to_string())
                } else {
                    (format!("γ{}", k), format!("γ{{2i0-{}}}", k))
                };
                children.push(Node::Cluster { depth: twin_depth.clone(), children: vec![leaf(a, la), leaf(b, lb)] });
            }
            children.push(leaf(0, "γ{i0}"));
            ClusterPicture { root: Node::Cluster { depth: Val::zero(), children } }
        }
        RowTag::R2 => single(r, finite(vs()? / int(r))),
        RowTag::R3 | RowTag::R4 => single(r, finite(base)),
        RowTag::R5 => single(r, finite(base + vs()? / int(r))),
        RowTag::R6 | RowTag::R7 => single(r, finite(base + vd / int(2 * r))),
        RowTag::R8 => {
            let outer = rat(2, r as i64 - 1);
            let rel = &vd / int(2) - rat(r as i64, r as i64 - 1);
            let inner = finite(&outer + rel);
            let mut children = vec![numbered(0)];
            for i in 1..=m as usize {
                children.push(Node::Cluster {
                    depth: inner.clone(),
                    children: vec![numbered(i), numbered(r as usize - i)],
                });
            }
            ClusterPicture { root: Node::Cluster { depth: finite(outer), children } }
        }
    })
}

/// Scale applied to Q_q-depths to get depths over the completion of K (normalized valuation).
pub fn k_scale(r: u64, q: u64) -> BigRational {
    if q == r {
        int((r - 1) / 2)
    } else {
        int(1)
    }
}

pub fn picture_for_row(row: &CaseRow, r: u64, field: Field) -> Result<ClusterPicture> {
    let p = picture_q(row, r)?;
    Ok(match field {
        Field::Q => p,
        Field::K => p.scaled(&k_scale(r, row.q)),
    })
}

pub fn cluster_picture(inst: &FamilyInstance, q: u64, field: Field) -> Result<ClusterPicture> {
    let row = classify_case(inst, q)?;
    picture_for_row(&row, inst.r, field)
}

// ---------------------------------------------------------------- inertia

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaProfile {
    /// Partition of leaf ids into inertia orbits, each sorted, ordered by smallest element.
    pub orbits: Vec<Vec<usize>>,
    /// [I : I_s] for each proper cluster other than the top one, keyed by its sorted leaf set.
    pub cluster_indices: Vec<(Vec<usize>, u64)>,
    pub e_l: u64,
}

impl InertiaProfile {
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

fn primitive_root(r: u64) -> u64 {
    let phi = r - 1;
    let mut ps = vec![];
    let mut n = phi;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            ps.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    (2..r)
        .find(|&g| ps.iter().all(|&p| crate::arith::pow_mod_u64(g, phi / p, r) != 1))
        .expect("primitive root exists")
}

/// Permutations of leaf ids generating the inertia action.
fn generators(row: &CaseRow, r: u64, field: Field) -> Vec<Vec<usize>> {
    let n = r as usize;
    let m = (r - 1) / 2;
    let mult = |g: u64| (0..n).map(|i| (i as u64 * g % r) as usize).collect::<Vec<_>>();
    let neg = mult(r - 1);
    let cycle = (0..n).map(|i| (i + 1) % n).collect::<Vec<_>>();
    let g = primitive_root(r);
    match row.tag {
        RowTag::Good => vec![],
        RowTag::R2 | RowTag::R4 | RowTag::R5 | RowTag::R6 | RowTag::R7 => vec![cycle],
        RowTag::R1 => {
            if row.v_delta % 2 == 1 {
                vec![neg]
            } else {
                vec![]
            }
        }
        RowTag::R3 => match field {
            Field::Q => vec![mult(g)],
            Field::K => vec![neg],
        },
        RowTag::R8 => {
            let full = (m * row.v_delta).is_multiple_of(2);
            match (field, full) {
                (Field::Q, true) => vec![mult(g)],
                (Field::Q, false) => vec![mult(g * g % r)],
                (Field::K, true) => vec![neg],
                (Field::K, false) => vec![],
            }
        }
    }
}

/// Ramification index of the splitting field of F over the base field.
pub fn splitting_ramification(row: &CaseRow, r: u64, field: Field) -> u64 {
    let m = (r - 1) / 2;
    let at_r = row.q == r;
    let eps1 = if at_r { m } else { 1 };
    let eps2 = if row.reducible { 1 } else { r };
    let e_e = if at_r {
        if (m * row.v_delta).is_multiple_of(2) {
            2
        } else {
            1
        }
    } else if row.v_delta.is_multiple_of(2) {
        1
    } else {
        2
    };
    let e = eps1 * eps2 * e_e;
    match field {
        Field::K if at_r => e / m,
        _ => e,
    }
}

fn orbit_of_set(set: &BTreeSet<usize>, gens: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let start: Vec<usize> = set.iter().copied().collect();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    while let Some(cur) = stack.pop() {
        for g in gens {
            let mut img: Vec<usize> = cur.iter().map(|&i| g[i]).collect();
            img.sort();
            if seen.insert(img.clone()) {
                stack.push(img);
            }
        }
    }
    seen
}

pub fn profile_for_row(row: &CaseRow, r: u64, field: Field) -> Result<InertiaProfile> {
    if row.tag == RowTag::Good {
        return domain("q is not a bad prime");
    }
    let pic = picture_for_row(row, r, field)?;
    let gens = generators(row, r, field);
    let mut orbits: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..r as usize {
        let o = orbit_of_set(&BTreeSet::from([i]), &gens);
        orbits.insert(o.into_iter().flatten().collect::<BTreeSet<_>>().into_iter().collect());
    }
    let flat = pic.flatten();
    let cluster_indices = flat
        .iter()
        .skip(1)
        .map(|c| {
            let set: BTreeSet<usize> = c.leaves.iter().copied().collect();
            (c.leaves.clone(), orbit_of_set(&set, &gens).len() as u64)
        })
        .collect();
    Ok(InertiaProfile {
        orbits: orbits.into_iter().collect(),
        cluster_indices,
        e_l: splitting_ramification(row, r, field),
    })
}

pub fn inertia_profile(inst: &FamilyInstance, q: u64, field: Field) -> Result<InertiaProfile> {
    let row = classify_case(inst, q)?;
    profile_for_row(&row, inst.r, field)
}

// ---------------------------------------------------------------- tame engine

fn v2(x: &BigRational) -> i64 {
    fn v2i(n: &BigInt) -> i64 {
        n.trailing_zeros().map_or(0, |t| t as i64)
    }
    v2i(x.numer()) - v2i(x.denom())
}

/// ξ_s(a) = max(−v₂([I:I_s]·a), 0), with ξ(0) = 0.
pub fn xi(index: u64, a: &BigRational) -> u64 {
    if a.is_zero() {
        return 0;
    }
    let x = a * int(index);
    (-v2(&x)).max(0) as u64
}

struct Engine<'a> {
    flat: Vec<FlatCluster>,
    lead: &'a BigRational,
    n: usize,
}

impl Engine<'_> {
    /// Depth of the smallest cluster containing leaf γ and cluster c.
    fn meet_depth(&self, leaf: usize, c: usize) -> BigRational {
        let mut cur = Some(c);
        while let Some(i) = cur {
            if self.flat[i].leaves.binary_search(&leaf).is_ok() {
                return self.depth(i);
            }
            cur = self.flat[i].parent;
        }
        unreachable!("the top cluster contains every leaf")
    }

    fn depth(&self, i: usize) -> BigRational {
        self.flat[i].depth.finite().cloned().expect("validated finite")
    }

    fn outside_sum(&self, c: usize) -> BigRational {
        (0..self.n)
            .filter(|l| self.flat[c].leaves.binary_search(l).is_err())
            .map(|l| self.meet_depth(l, c))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    fn odd_children(&self, c: usize) -> usize {
        self.flat[c].direct_leaves.len()
            + self.flat[c].children.iter().filter(|&&i| self.flat[i].leaves.len() % 2 == 1).count()
    }

    fn lambda(&self, c: usize) -> BigRational {
        let k = int(self.odd_children(c) as u64);
        (self.lead + k * self.depth(c) + self.outside_sum(c)) / int(2)
    }

    fn nu(&self, c: usize) -> BigRational {
        let k = int(self.flat[c].leaves.len() as u64);
        self.lead + k * self.depth(c) + self.outside_sum(c)
    }

    fn ubereven(&self, c: usize) -> bool {
        let f = &self.flat[c];
        f.leaves.len().is_multiple_of(2)
            && f.direct_leaves.is_empty()
            && f.children.iter().all(|&i| self.flat[i].leaves.len().is_multiple_of(2))
    }
}

/// ν_s = v(c) + |s|·d_s + Σ_{γ∉s} d_{γ∧s} for the top cluster.
pub fn nu_top(pic: &ClusterPicture, lead_val: &Val) -> Result<BigRational> {
    let n = pic.validate()?;
    let Some(lead) = lead_val.finite() else {
        return domain("leading coefficient valuation must be finite");
    };
    let e = Engine { flat: pic.flatten(), lead, n };
    Ok(e.nu(0))
}

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    if parent[i] != i {
        let root = find(parent, parent[i]);
        parent[i] = root;
    }
    parent[i]
}

pub fn tame_conductor_general(
    pic: &ClusterPicture,
    lead_val: &Val,
    prof: &InertiaProfile,
    genus: u64,
) -> Result<u64> {
    let n = pic.validate()?;
    if n as u64 != 2 * genus + 1 {
        return domain(format!("picture has {} leaves, expected 2g+1 = {}", n, 2 * genus + 1));
    }
    if pic.root.height() > 2 {
        return domain("only pictures of nesting depth at most 2 are supported");
    }
    let Some(lead) = lead_val.finite() else {
        return domain("leading coefficient valuation must be finite");
    };
    let flat = pic.flatten();

    // leaf orbits must partition the leaves
    let mut orbit_of = vec![usize::MAX; n];
    for (k, o) in prof.orbits.iter().enumerate() {
        for &l in o {
            if l >= n || orbit_of[l] != usize::MAX {
                return domain("inconsistent profile: orbits do not partition the leaves");
            }
            orbit_of[l] = k;
        }
    }
    if orbit_of.contains(&usize::MAX) {
        return domain("inconsistent profile: orbits do not cover the leaves");
    }
    // a leaf orbit must stay inside one kind of cluster
    let home = |l: usize| -> (usize, String) {
        let c = (0..flat.len()).rev().find(|&i| flat[i].leaves.binary_search(&l).is_ok()).unwrap();
        (flat[c].leaves.len(), flat[c].depth.to_string())
    };
    for o in &prof.orbits {
        let h0 = home(o[0]);
        if o.iter().any(|&l| home(l) != h0) {
            return domain("inconsistent profile: an orbit mixes leaves of different cluster types");
        }
    }
    // cluster orbits: clusters whose leaves meet a common leaf orbit are conjugate
    let mut uf: Vec<usize> = (0..flat.len()).collect();
    for i in 1..flat.len() {
        for j in i + 1..flat.len() {
            let oi: BTreeSet<usize> = flat[i].leaves.iter().map(|&l| orbit_of[l]).collect();
            if flat[j].leaves.iter().any(|l| oi.contains(&orbit_of[*l])) {
                let (a, b) = (find(&mut uf, i), find(&mut uf, j));
                uf[a] = b;
            }
        }
    }
    let mut class_size: BTreeMap<usize, u64> = BTreeMap::new();
    for i in 0..flat.len() {
        let root = find(&mut uf, i);
        *class_size.entry(root).or_default() += 1;
    }
    let mut index = vec![1u64; flat.len()];
    for i in 1..flat.len() {
        let derived = class_size[&find(&mut uf, i)];
        let stated = prof
            .cluster_indices
            .iter()
            .find(|(ls, _)| *ls == flat[i].leaves)
            .map(|&(_, k)| k)
            .ok_or_else(|| Error::Domain("unsupported profile: missing cluster index".into()))?;
        if stated != derived {
            return domain(format!(
                "inconsistent profile: cluster {:?} has index {} but its orbit has {} members",
                flat[i].leaves, stated, derived
            ));
        }
        if !prof.e_l.is_multiple_of(stated) {
            return domain("inconsistent profile: cluster index does not divide e_L");
        }
        index[i] = stated;
    }

    let eng = Engine { flat, lead, n };
    let lam: Vec<BigRational> = (0..eng.flat.len()).map(|i| eng.lambda(i)).collect();
    let parent_ok = |p: usize| xi(index[p], &lam[p]) <= xi(index[p], &eng.depth(p));

    // U: odd clusters other than the top, singletons included
    let mut u_leaf_orbits: BTreeSet<usize> = BTreeSet::new();
    let mut u_cluster_orbits: BTreeSet<usize> = BTreeSet::new();
    for (i, c) in eng.flat.iter().enumerate() {
        if parent_ok(i) {
            for &l in &c.direct_leaves {
                u_leaf_orbits.insert(orbit_of[l]);
            }
        }
        if i > 0 && c.leaves.len() % 2 == 1 && parent_ok(c.parent.unwrap()) {
            u_cluster_orbits.insert(find(&mut uf, i));
        }
    }
    // V: proper non-übereven clusters with ξ_s(λ̃_s) = 0
    let mut v_orbits: BTreeSet<usize> = BTreeSet::new();
    for i in 0..eng.flat.len() {
        if !eng.ubereven(i) && xi(index[i], &lam[i]) == 0 {
            v_orbits.insert(find(&mut uf, i));
        }
    }
    let u = (u_leaf_orbits.len() + u_cluster_orbits.len()) as i64;
    let v = v_orbits.len() as i64;
    let tame = 2 * genus as i64 - u + v;
    if tame < 0 {
        return Err(Error::Internal(format!("negative tame conductor {}", tame)));
    }
    Ok(tame as u64)
}

// ---------------------------------------------------------------- rendering and JSON

fn label_key(label: &str) -> (u8, u64, String) {
    let body = label.strip_prefix('γ').unwrap_or(label);
    match body.parse::<u64>() {
        Ok(n) => (0, n, String::new()),
        Err(_) => (1, 0, body.to_string()),
    }
}

fn node_key(n: &Node) -> (u8, u64, String) {
    let mut labels = vec![];
    n.leaf_labels(&mut labels);
    labels.iter().map(|l| label_key(l)).min().unwrap_or((2, 0, String::new()))
}

pub fn render_ascii(pic: &ClusterPicture) -> Result<String> {
    pic.validate()?;
    fn go(n: &Node, parent: Option<&Val>, out: &mut String) {
        match n {
            Node::Leaf { label, .. } => out.push_str(label),
            Node::Cluster { depth, children } => {
                let mut kids: Vec<&Node> = children.iter().collect();
                kids.sort_by_key(|c| node_key(c));
                out.push('(');
                for (i, c) in kids.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    go(c, Some(depth), out);
                }
                let shown = match (parent, depth) {
                    (Some(Val::Finite(p)), Val::Finite(d)) => Val::Finite(d - p),
                    _ => depth.clone(),
                };
                out.push_str(&format!(")_{{{}}}", shown));
            }
        }
    }
    let mut out = String::new();
    go(&pic.root, None, &mut out);
    Ok(out)
}

/// JSON form of a cluster: {depth, size, children[], label?}; leaves also carry their id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<Val>,
    pub size: usize,
    #[serde(default)]
    pub children: Vec<ClusterJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
}

pub fn to_json(pic: &ClusterPicture) -> ClusterJson {
    fn go(n: &Node) -> ClusterJson {
        match n {
            Node::Leaf { id, label } => ClusterJson {
                depth: None,
                size: 1,
                children: vec![],
                label: Some(label.clone()),
                id: Some(*id),
            },
            Node::Cluster { depth, children } => ClusterJson {
                depth: Some(depth.clone()),
                size: n.size(),
                children: children.iter().map(go).collect(),
                label: None,
                id: None,
            },
        }
    }
    go(&pic.root)
}

/// Parse and validate a picture from its JSON form.
pub fn parse_cluster_json(text: &str) -> Result<ClusterPicture> {
    let j: ClusterJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_json(&j)
}

pub fn from_json(j: &ClusterJson) -> Result<ClusterPicture> {
    fn go(j: &ClusterJson, next_id: &mut usize, depth_left: usize) -> Result<Node> {
        if depth_left == 0 {
            return Err(Error::Parse("cluster nesting too deep".into()));
        }
        if j.children.is_empty() {
            if j.size != 1 {
                return Err(Error::Parse("a leaf must have size 1".into()));
            }
            let id = j.id.unwrap_or(*next_id);
            *next_id += 1;
            let label = j.label.clone().unwrap_or_else(|| format!("γ{}", id));
            return Ok(Node::Leaf { id, label });
        }
        let Some(depth) = j.depth.clone() else {
            return Err(Error::Parse("a cluster needs a depth".into()));
        };
        let children = j
            .children
            .iter()
            .map(|c| go(c, next_id, depth_left - 1))
            .collect::<Result<Vec<_>>>()?;
        let node = Node::Cluster { depth, children };
        if node.size() != j.size {
            return Err(Error::Parse(format!("size {} does not match {} leaves", j.size, node.size())));
        }
        Ok(node)
    }
    let mut next = 0;
    let pic = ClusterPicture { root: go(j, &mut next, 64)? };
    pic.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(pic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::make_instance;

    fn inst(r: u64, z: i64, s: i64) -> FamilyInstance {
        make_instance(r, &BigInt::from(z), &BigInt::from(s)).unwrap()
    }

    #[test]
    fn pictures_and_rendering() {
        let p = cluster_picture(&inst(5, 1, 3), 5, Field::Q).unwrap();
        assert_eq!(render_ascii(&p).unwrap(), "(γ0 γ1 γ2 γ3 γ4)_{7/20}");
        let p = cluster_picture(&inst(5, 1, 1), 3, Field::Q).unwrap();
        assert_eq!(
            render_ascii(&p).unwrap(),
            "((γ0 γ{2i0})_{1/2} (γ1 γ{2i0-1})_{1/2} γ{i0})_{0}"
        );
        let p = cluster_picture(&inst(5, 1, 127), 5, Field::K).unwrap();
        assert_eq!(render_ascii(&p).unwrap(), "(γ0 (γ1 γ4)_{1/2} (γ2 γ3)_{1/2})_{1}");
        let p = cluster_picture(&inst(5, 1, 127), 5, Field::Q).unwrap();
        assert_eq!(render_ascii(&p).unwrap(), "(γ0 (γ1 γ4)_{1/4} (γ2 γ3)_{1/4})_{1/2}");
        assert!(cluster_picture(&inst(5, 1, 3), 7, Field::Q).is_err());
    }

    #[test]
    fn profiles() {
        let p = inertia_profile(&inst(5, 3, 3), 3, Field::Q).unwrap();
        assert_eq!(p.orbit_sizes(), vec![5]);
        let p = inertia_profile(&inst(5, 1, 127), 5, Field::Q).unwrap();
        assert_eq!(p.orbit_sizes(), vec![1, 4]);
        assert!(p.cluster_indices.iter().all(|c| c.1 == 2));
        let p = inertia_profile(&inst(5, 1, 127), 5, Field::K).unwrap();
        assert!(p.cluster_indices.iter().all(|c| c.1 == 1));
    }

    #[test]
    fn engine_examples() {
        for (z, s, q, field, want) in [
            (1, 3, 5, Field::Q, 4),
            (1, 1, 3, Field::Q, 2),
            (1, 127, 5, Field::K, 4),
            (1, 127, 5, Field::Q, 4),
        ] {
            let i = inst(5, z, s);
            let pic = cluster_picture(&i, q, field).unwrap();
            let prof = inertia_profile(&i, q, field).unwrap();
            assert_eq!(tame_conductor_general(&pic, &Val::zero(), &prof, 2).unwrap(), want);
        }
    }

    #[test]
    fn engine_rejects_bad_profiles() {
        let i = inst(5, 1, 127);
        let pic = cluster_picture(&i, 5, Field::Q).unwrap();
        let mut prof = inertia_profile(&i, 5, Field::Q).unwrap();
        prof.cluster_indices[0].1 = 1;
        assert!(tame_conductor_general(&pic, &Val::zero(), &prof, 2).is_err());
        let mut prof = inertia_profile(&i, 5, Field::Q).unwrap();
        prof.orbits = vec![vec![0, 1], vec![2, 3, 4]];
        assert!(tame_conductor_general(&pic, &Val::zero(), &prof, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let pic = cluster_picture(&inst(5, 1, 127), 5, Field::Q).unwrap();
        let text = serde_json::to_string(&to_json(&pic)).unwrap();
        assert_eq!(parse_cluster_json(&text).unwrap(), pic);
        assert!(parse_cluster_json("{\"size\":2,\"children\":[]}").is_err());
    }
}
