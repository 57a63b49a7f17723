//! Finite groups stored as dense multiplication tables.
//!
//! Element `0` is always the identity. Every constructor validates the full
//! set of group axioms before returning, so a [`FiniteGroup`] value is always
//! a genuine group.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order accepted anywhere in the crate.
pub const MAX_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    order: usize,
    table: Vec<Vec<usize>>,
    #[serde(default)]
    label: Option<String>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, checking all axioms.
    pub fn from_table(table: Vec<Vec<usize>>, label: impl Into<String>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if n > MAX_ORDER {
            return Err(Error::SizeLimit(format!("order {n} exceeds {MAX_ORDER}")));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has length {}", row.len())));
            }
            if !is_permutation(row) {
                return Err(Error::InvalidGroup(format!("row {i} is not a permutation")));
            }
        }
        for j in 0..n {
            let col: Vec<usize> = table.iter().map(|r| r[j]).collect();
            if !is_permutation(&col) {
                return Err(Error::InvalidGroup(format!("column {j} is not a permutation")));
            }
        }
        for i in 0..n {
            if table[0][i] != i || table[i][0] != i {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = table[i][j];
                for k in 0..n {
                    if table[ij][k] != table[i][table[j][k]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![0; n];
        for (i, inv) in inverses.iter_mut().enumerate() {
            // rows are permutations, so a right inverse exists and is unique
            *inv = table[i].iter().position(|&x| x == 0).unwrap();
            if table[*inv][i] != 0 {
                return Err(Error::InvalidGroup(format!("element {i} lacks a two-sided inverse")));
            }
        }
        Ok(Self { table, inverses, label: label.into() })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverses
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.order()).map(|g| self.element_order(g)).collect()
    }

    /// Sorted multiset of element orders, a cheap isomorphism invariant.
    pub fn order_census(&self) -> Vec<usize> {
        let mut v = self.element_orders();
        v.sort_unstable();
        v
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    /// Conjugacy classes, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut class: Vec<usize> =
                (0..n).map(|x| self.mul(self.mul(x, g), self.inv(x))).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Subgroup generated by `gens` as a sorted list of elements.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let n = self.order();
        let mut member = vec![false; n];
        member[0] = true;
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..n).filter(|&i| member[i]).collect()
    }

    /// Greedy generating set, preferring elements of large order.
    pub fn generating_set(&self) -> Vec<usize> {
        let orders = self.element_orders();
        let mut candidates: Vec<usize> = (1..self.order()).collect();
        candidates.sort_by_key(|&g| (std::cmp::Reverse(orders[g]), g));
        let mut gens = Vec::new();
        let mut span = vec![0];
        for g in candidates {
            if span.len() == self.order() {
                break;
            }
            if span.binary_search(&g).is_err() {
                gens.push(g);
                span = self.generated_subgroup(&gens);
            }
        }
        gens
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: GroupJson = serde_json::from_str(s)?;
        if parsed.order != parsed.table.len() {
            return Err(Error::InvalidGroup(format!(
                "declared order {} but table has {} rows",
                parsed.order,
                parsed.table.len()
            )));
        }
        let label = parsed.label.unwrap_or_else(|| format!("G{}", parsed.order));
        Self::from_table(parsed.table, label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GroupJson {
            order: self.order(),
            table: self.table.clone(),
            label: Some(self.label.clone()),
        })
        .expect("group serialization is infallible")
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.label, self.order())
    }
}

impl Serialize for FiniteGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupJson { order: self.order(), table: self.table.clone(), label: Some(self.label.clone()) }
            .serialize(s)
    }
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    for &x in v {
        if x >= v.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if n > MAX_ORDER {
        return Err(Error::SizeLimit(format!("Z{n}: order exceeds {MAX_ORDER}")));
    }
    let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    FiniteGroup::from_table(table, format!("Z{n}"))
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(x) = a(b(x))
    b.iter().map(|&x| a[x]).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn group_from_elements(elems: &[Vec<usize>], label: String) -> Result<FiniteGroup> {
    let index: BTreeMap<&[usize], usize> =
        elems.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let table = elems
        .iter()
        .map(|a| elems.iter().map(|b| index[compose(a, b).as_slice()]).collect())
        .collect();
    FiniteGroup::from_table(table, label)
}

/// Symmetric group on `n ≤ 5` points.
///
/// Elements are permutations in lexicographic order (identity first), except
/// for `S3` which uses the ordering `{id, s, r, sr, r², sr²}` with
/// `s = (1 2)` and `r = (1 2 3)`.
pub fn make_symmetric(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if n > 5 {
        return Err(Error::SizeLimit(format!("S{n}: only n <= 5 is supported")));
    }
    let elems = if n == 3 {
        let s = vec![1, 0, 2];
        let r = vec![1, 2, 0];
        let id = vec![0, 1, 2];
        let r2 = compose(&r, &r);
        let sr = compose(&s, &r);
        let sr2 = compose(&s, &r2);
        vec![id, s, r, sr, r2, sr2]
    } else {
        permutations(n)
    };
    group_from_elements(&elems, format!("S{n}"))
}

/// Dihedral group of order `2n`; element `b·n + a` is `r^a s^b`.
pub fn make_dihedral(n: usize) -> Result<FiniteGroup> {
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    if 2 * n > MAX_ORDER {
        return Err(Error::SizeLimit(format!("D{n}: order exceeds {MAX_ORDER}")));
    }
    let idx = |a: usize, b: usize| b * n + a;
    let mut table = vec![vec![0; 2 * n]; 2 * n];
    for b1 in 0..2 {
        for a1 in 0..n {
            for b2 in 0..2 {
                for a2 in 0..n {
                    // r^a1 s^b1 r^a2 s^b2 = r^(a1 ± a2) s^(b1+b2)
                    let a = if b1 == 0 { (a1 + a2) % n } else { (a1 + n - a2) % n };
                    table[idx(a1, b1)][idx(a2, b2)] = idx(a, (b1 + b2) % 2);
                }
            }
        }
    }
    FiniteGroup::from_table(table, format!("D{n}"))
}

/// Quaternion group, indexed `1, -1, i, -i, j, -j, k, -k`.
pub fn make_quaternion() -> Result<FiniteGroup> {
    // unit products: (sign, unit) for units 1, i, j, k
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let mut table = vec![vec![0; 8]; 8];
    for x in 0..8 {
        for y in 0..8 {
            let (ux, sx) = (x / 2, x % 2 == 1);
            let (uy, sy) = (y / 2, y % 2 == 1);
            let (s, u) = UNIT[ux][uy];
            let neg = s ^ sx ^ sy;
            table[x][y] = 2 * u + usize::from(neg);
        }
    }
    FiniteGroup::from_table(table, "Q8")
}

pub fn make_direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    if na * nb > MAX_ORDER {
        return Err(Error::SizeLimit(format!("{}x{}: order exceeds {MAX_ORDER}", a.label, b.label)));
    }
    let n = na * nb;
    let table = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                .collect()
        })
        .collect();
    FiniteGroup::from_table(table, format!("{}x{}", a.label, b.label))
}

/// Parses group literals such as `Z6`, `S3`, `D4`, `Q8` or `Z2xZ2xZ2`.
pub fn parse_group(spec: &str) -> Result<FiniteGroup> {
    let spec = spec.trim();
    let mut factors = spec.split(['x', 'X']).map(parse_factor);
    let first = factors.next().ok_or_else(|| Error::Parse("empty group literal".into()))??;
    factors.try_fold(first, |acc, f| make_direct_product(&acc, &f?))
}

fn parse_factor(s: &str) -> Result<FiniteGroup> {
    let s = s.trim();
    if s == "Q8" {
        return make_quaternion();
    }
    let bad = || Error::Parse(format!("unrecognized group literal '{s}'"));
    let mut chars = s.chars();
    let kind = chars.next().ok_or_else(bad)?;
    let n: usize = chars.as_str().parse().map_err(|_| bad())?;
    match kind {
        'Z' | 'C' => make_cyclic(n),
        'S' => make_symmetric(n),
        'D' => make_dihedral(n),
        _ => Err(bad()),
    }
}

/// A bijection `t: H → G` between groups of equal order; `map[h] = t(h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupBijection {
    source: FiniteGroup,
    target: FiniteGroup,
    map: Vec<usize>,
}

impl GroupBijection {
    pub fn new(source: FiniteGroup, target: FiniteGroup, map: Vec<usize>) -> Result<Self> {
        if source.order() != target.order() {
            return Err(Error::InvalidBijection(format!(
                "orders differ: |{}| = {}, |{}| = {}",
                source.label,
                source.order(),
                target.label,
                target.order()
            )));
        }
        if map.len() != source.order() || !is_permutation(&map) {
            return Err(Error::InvalidBijection(format!("{map:?} is not a permutation")));
        }
        Ok(Self { source, target, map })
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        Self { source: g.clone(), target: g.clone(), map: (0..g.order()).collect() }
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, h: usize) -> usize {
        self.map[h]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (h, &g) in self.map.iter().enumerate() {
            inv[g] = h;
        }
        Self { source: self.target.clone(), target: self.source.clone(), map: inv }
    }

    pub fn fixes_identity(&self) -> bool {
        self.map[0] == 0
    }

    pub fn is_homomorphism(&self) -> bool {
        let n = self.map.len();
        (0..n).all(|a| {
            (0..n).all(|b| self.map[self.source.mul(a, b)] == self.target.mul(self.map[a], self.map[b]))
        })
    }

    pub fn is_anti_homomorphism(&self) -> bool {
        let n = self.map.len();
        (0..n).all(|a| {
            (0..n).all(|b| self.map[self.source.mul(a, b)] == self.target.mul(self.map[b], self.map[a]))
        })
    }

    /// `h ↦ g0 · t(h)`.
    pub fn left_translate_target(&self, g0: usize) -> Self {
        let map = self.map.iter().map(|&g| self.target.mul(g0, g)).collect();
        Self { map, ..self.clone() }
    }

    /// `h ↦ t(h0 · h)`.
    pub fn left_translate_source(&self, h0: usize) -> Self {
        let map = (0..self.map.len()).map(|h| self.map[self.source.mul(h0, h)]).collect();
        Self { map, ..self.clone() }
    }

    /// Identity-fixing representative `h ↦ t(e)⁻¹ · t(h)`.
    pub fn canonical(&self) -> Self {
        self.left_translate_target(self.target.inv(self.map[0]))
    }
}

/// Searches for a group isomorphism `a → b`.
///
/// Returns the witness map with `map[a_i] = b_j`.
pub fn are_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> Result<Option<Vec<usize>>> {
    for g in [a, b] {
        if g.order() > MAX_ORDER {
            return Err(Error::SizeLimit(format!("{} exceeds order {MAX_ORDER}", g.label)));
        }
    }
    if a.order() != b.order() || a.order_census() != b.order_census() {
        return Ok(None);
    }
    let mut found = None;
    homomorphism_search(a, b, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    Ok(found)
}

/// All automorphisms of `g`, each as an element map.
pub fn automorphisms(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    homomorphism_search(g, g, &mut |m| {
        out.push(m.to_vec());
        true
    });
    out.sort();
    out
}

/// Backtracks over images of a generating set of `a`, calling `visit` with
/// every bijective homomorphism found. `visit` returns whether to continue.
fn homomorphism_search(
    a: &FiniteGroup,
    b: &FiniteGroup,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    let gens = a.generating_set();
    let ord_a = a.element_orders();
    let ord_b = b.element_orders();
    let mut images = Vec::with_capacity(gens.len());

    fn extend(
        a: &FiniteGroup,
        b: &FiniteGroup,
        gens: &[usize],
        images: &[usize],
    ) -> Option<Vec<usize>> {
        const UNSET: usize = usize::MAX;
        let mut map = vec![UNSET; a.order()];
        map[0] = 0;
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = a.mul(x, g);
                let fy = b.mul(map[x], img);
                if map[y] == UNSET {
                    map[y] = fy;
                    frontier.push(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        Some(map)
    }

    fn rec(
        a: &FiniteGroup,
        b: &FiniteGroup,
        gens: &[usize],
        ord_a: &[usize],
        ord_b: &[usize],
        images: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let depth = images.len();
        if depth == gens.len() {
            let map = match extend(a, b, gens, images) {
                Some(m) => m,
                None => return true,
            };
            if is_permutation(&map) {
                return visit(&map);
            }
            return true;
        }
        for cand in 0..b.order() {
            if ord_b[cand] != ord_a[gens[depth]] {
                continue;
            }
            images.push(cand);
            let consistent = extend(a, b, &gens[..=depth], images).is_some_and(|m| {
                // partial map must be injective on the generated subgroup
                let mut img: Vec<usize> = m.into_iter().filter(|&x| x != usize::MAX).collect();
                let len = img.len();
                img.sort_unstable();
                img.dedup();
                img.len() == len
            });
            if consistent && !rec(a, b, gens, ord_a, ord_b, images, visit) {
                images.pop();
                return false;
            }
            images.pop();
        }
        true
    }

    rec(a, b, &gens, &ord_a, &ord_b, &mut images, visit);
}
