//! Rooted trees with harmonic node labels.
//!
//! A tree of order k has k nodes; the first node hangs from a root line.
//! Canonical labeled trees are stored bottom-up in a [`Forest`]: each node
//! refers to its children by id, ids are ordered by subtree size, and the
//! children of a node are kept in nondecreasing id order.  A canonical tree
//! of order k with automorphism group of size |Aut| stands for k!/|Aut|
//! trees with distinguishable lines.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::base::exact::{factorial, ExactComplex};
use crate::base::{FourierSeries, FrequencyVector, HarmonicVector};
use crate::error::{Error, Result};

/// Default cap on the number of canonical trees generated by one enumeration.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Enumeration budget, overridable through `HAMILTONIA_BUDGET`.
pub fn default_budget() -> u64 {
    std::env::var("HAMILTONIA_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Which canonical trees an enumeration keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFilter {
    /// Every labeled tree.
    All,
    /// Trees in which every line carries a nonzero current.
    NonzeroCurrents,
    /// Nonzero currents and no two lines on a common root path with equal current.
    Restricted,
}

/// Bottom-up store of canonical labeled trees up to a given order.
#[derive(Debug, Clone)]
pub struct Forest {
    alphabet: Vec<HarmonicVector>,
    dim: usize,
    filter: TreeFilter,
    budget: u64,
    generated: std::cell::Cell<u64>,
    label: Vec<u16>,
    size: Vec<u8>,
    aut: Vec<u64>,
    child_start: Vec<u32>,
    child_ids: Vec<u32>,
    currents: Vec<i64>,
    /// `size_start[s]..size_start[s + 1]` are the ids of order s.
    size_start: Vec<usize>,
}

/// Borrowed view of a canonical tree: root label, children ids and derived data.
#[derive(Debug, Clone)]
pub struct TreeView<'a> {
    pub forest: &'a Forest,
    pub label: usize,
    pub children: &'a [u32],
    pub order: usize,
    pub aut: u64,
    pub current: HarmonicVector,
}

impl Forest {
    /// Builds every canonical tree of order ≤ `max_order` that passes `filter`.
    pub fn build(alphabet: &[HarmonicVector], max_order: usize, filter: TreeFilter, budget: u64) -> Result<Forest> {
        if alphabet.is_empty() {
            return Err(Error::InvalidInput("empty harmonic alphabet".into()));
        }
        let dim = alphabet[0].dim();
        if alphabet.iter().any(|a| a.dim() != dim) {
            return Err(Error::InvalidInput("alphabet entries differ in dimension".into()));
        }
        if max_order > u8::MAX as usize || alphabet.len() > u16::MAX as usize {
            return Err(Error::OrderTooLarge { order: max_order, detail: "forest limits".into() });
        }
        let mut forest = Forest {
            alphabet: alphabet.to_vec(),
            dim,
            filter,
            budget,
            generated: std::cell::Cell::new(0),
            label: Vec::new(),
            size: Vec::new(),
            aut: Vec::new(),
            child_start: vec![0],
            child_ids: Vec::new(),
            currents: Vec::new(),
            size_start: vec![0, 0],
        };
        for order in 1..=max_order {
            let mut fresh: Vec<(u16, Vec<u32>, u64, Vec<i64>)> = Vec::new();
            forest.generate(order, &mut |label, children, aut, current| {
                fresh.push((label as u16, children.to_vec(), aut, current.to_vec()));
            })?;
            for (label, children, aut, current) in fresh {
                forest.label.push(label);
                forest.size.push(order as u8);
                forest.aut.push(aut);
                forest.child_ids.extend_from_slice(&children);
                forest.child_start.push(forest.child_ids.len() as u32);
                forest.currents.extend_from_slice(&current);
            }
            forest.size_start.push(forest.label.len());
        }
        Ok(forest)
    }

    pub fn alphabet(&self) -> &[HarmonicVector] {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn filter(&self) -> TreeFilter {
        self.filter
    }

    /// Number of stored canonical trees.
    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    /// Largest stored order.
    pub fn max_order(&self) -> usize {
        self.size_start.len() - 2
    }

    /// Canonical trees generated so far (stored and streamed).
    pub fn generated(&self) -> u64 {
        self.generated.get()
    }

    /// Ids of the stored trees of a given order.
    pub fn ids_of_order(&self, order: usize) -> std::ops::Range<usize> {
        if order == 0 || order > self.max_order() {
            return 0..0;
        }
        self.size_start[order]..self.size_start[order + 1]
    }

    pub fn label(&self, id: usize) -> usize {
        self.label[id] as usize
    }

    pub fn harmonic(&self, id: usize) -> &HarmonicVector {
        &self.alphabet[self.label[id] as usize]
    }

    pub fn order(&self, id: usize) -> usize {
        self.size[id] as usize
    }

    pub fn aut(&self, id: usize) -> u64 {
        self.aut[id]
    }

    pub fn children(&self, id: usize) -> &[u32] {
        &self.child_ids[self.child_start[id] as usize..self.child_start[id + 1] as usize]
    }

    /// Current on the line leaving tree `id` towards its parent.
    pub fn current(&self, id: usize) -> &[i64] {
        &self.currents[id * self.dim..(id + 1) * self.dim]
    }

    /// Borrowed view of a stored tree.
    pub fn view(&self, id: usize) -> TreeView<'_> {
        TreeView {
            forest: self,
            label: self.label(id),
            children: self.children(id),
            order: self.order(id),
            aut: self.aut(id),
            current: HarmonicVector::new(self.current(id)),
        }
    }

    /// True when some line in subtree `id` carries current `cur`.
    fn subtree_has_current(&self, id: u32, cur: &[i64]) -> bool {
        let mut stack = vec![id];
        while let Some(t) = stack.pop() {
            if self.current(t as usize) == cur {
                return true;
            }
            stack.extend_from_slice(self.children(t as usize));
        }
        false
    }

    /// Calls `emit(label, children, aut, current)` for each canonical tree of
    /// order `order` built over the stored trees of smaller order.
    fn generate(&self, order: usize, emit: &mut dyn FnMut(usize, &[u32], u64, &[i64])) -> Result<()> {
        if order == 0 || order > self.max_order() + 1 {
            return Err(Error::InvalidInput(format!("order {order} not reachable from stored forest")));
        }
        let mut stack: Vec<u32> = Vec::new();
        let mut current = vec![0i64; self.dim];
        let mut base = vec![0i64; self.dim];
        let mut status = Ok(());
        self.child_multisets(0, order - 1, &mut stack, &mut |children| {
            if status.is_err() {
                return;
            }
            let mut aut = 1u64;
            let mut run = 0u64;
            for (i, &c) in children.iter().enumerate() {
                aut *= self.aut[c as usize];
                run = if i > 0 && children[i - 1] == c { run + 1 } else { 1 };
                aut *= run;
            }
            base.iter_mut().for_each(|b| *b = 0);
            for &c in children {
                for (b, x) in base.iter_mut().zip(self.current(c as usize)) {
                    *b += x;
                }
            }
            for label in 0..self.alphabet.len() {
                for (d, slot) in current.iter_mut().enumerate() {
                    *slot = base[d] + self.alphabet[label].entries()[d];
                }
                let keep = match self.filter {
                    TreeFilter::All => true,
                    TreeFilter::NonzeroCurrents => current.iter().any(|&x| x != 0),
                    TreeFilter::Restricted => {
                        current.iter().any(|&x| x != 0)
                            && !children.iter().any(|&c| self.subtree_has_current(c, &current))
                    }
                };
                if !keep {
                    continue;
                }
                let n = self.generated.get() + 1;
                self.generated.set(n);
                if n > self.budget {
                    status = Err(Error::OrderTooLarge {
                        order,
                        detail: format!("more than {} canonical trees (raise HAMILTONIA_BUDGET)", self.budget),
                    });
                    return;
                }
                emit(label, children, aut, &current);
            }
        });
        status
    }

    /// Multisets of stored ids (nondecreasing) with total order `remaining`.
    fn child_multisets(&self, min_id: usize, remaining: usize, stack: &mut Vec<u32>, out: &mut dyn FnMut(&[u32])) {
        if remaining == 0 {
            out(stack);
            return;
        }
        let end = self.size_start[remaining.min(self.max_order()) + 1];
        for id in min_id..end {
            let s = self.size[id] as usize;
            if s > remaining {
                break;
            }
            stack.push(id as u32);
            self.child_multisets(id, remaining - s, stack, out);
            stack.pop();
        }
    }

    /// Streams the canonical trees of order `max_order() + 1` without storing them.
    pub fn stream_next_order(&self, visit: &mut dyn FnMut(&TreeView<'_>)) -> Result<u64> {
        let order = self.max_order() + 1;
        let before = self.generated.get();
        self.generate(order, &mut |label, children, aut, current| {
            let view = TreeView { forest: self, label, children, order, aut, current: HarmonicVector::new(current) };
            visit(&view);
        })?;
        Ok(self.generated.get() - before)
    }

    /// Visits every canonical tree of order `order` in canonical order,
    /// streaming the top order when it is not stored.
    pub fn for_each(&self, order: usize, visit: &mut dyn FnMut(&TreeView<'_>)) -> Result<u64> {
        if order <= self.max_order() {
            let ids = self.ids_of_order(order);
            for id in ids.clone() {
                visit(&self.view(id));
            }
            Ok(ids.len() as u64)
        } else if order == self.max_order() + 1 {
            self.stream_next_order(visit)
        } else {
            Err(Error::InvalidInput(format!("order {order} beyond stored forest + 1")))
        }
    }
}

/// Streams canonical trees of order k.  Memory is bounded by the stored
/// trees of order < k.
pub fn for_each_tree(
    k: usize,
    alphabet: &[HarmonicVector],
    filter: TreeFilter,
    budget: u64,
    visit: &mut dyn FnMut(&TreeView<'_>),
) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let forest = Forest::build(alphabet, k - 1, filter, budget)?;
    forest.stream_next_order(visit)
}

impl TreeView<'_> {
    pub fn harmonic(&self) -> &HarmonicVector {
        &self.forest.alphabet[self.label]
    }

    /// Number of line labelings represented: k!/|Aut|.
    pub fn multiplicity(&self) -> BigInt {
        factorial(self.order as u32) / BigInt::from(self.aut)
    }

    /// Expands the view into an explicit tree.
    pub fn to_labeled(&self) -> LabeledTree {
        let mut nodes = vec![LabeledNode { nu: self.harmonic().clone(), children: Vec::new() }];
        let mut stack: Vec<(usize, u32)> = self.children.iter().rev().map(|&c| (0usize, c)).collect();
        while let Some((parent, id)) = stack.pop() {
            let idx = nodes.len();
            nodes.push(LabeledNode { nu: self.forest.harmonic(id as usize).clone(), children: Vec::new() });
            nodes[parent].children.push(idx);
            for &c in self.forest.children(id as usize).iter().rev() {
                stack.push((idx, c));
            }
        }
        LabeledTree { nodes }
    }
}

/// Node of an explicit labeled tree.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledNode {
    pub nu: HarmonicVector,
    pub children: Vec<usize>,
}

/// Explicit rooted tree; node 0 is the first node (attached to the root line).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTree {
    pub nodes: Vec<LabeledNode>,
}

impl LabeledTree {
    /// Builds a tree from `(harmonic, parent)` pairs; node 0 must have no parent.
    pub fn from_parents(layout: &[(HarmonicVector, Option<usize>)]) -> Result<LabeledTree> {
        if layout.is_empty() || layout[0].1.is_some() {
            return Err(Error::InvalidInput("node 0 must be the first node".into()));
        }
        let mut nodes: Vec<LabeledNode> =
            layout.iter().map(|(nu, _)| LabeledNode { nu: nu.clone(), children: Vec::new() }).collect();
        for (i, (_, parent)) in layout.iter().enumerate().skip(1) {
            match parent {
                Some(p) if *p < i => nodes[*p].children.push(i),
                _ => return Err(Error::InvalidInput(format!("node {i} needs an earlier parent"))),
            }
        }
        Ok(LabeledTree { nodes })
    }

    /// Single-node tree.
    pub fn leaf(nu: HarmonicVector) -> LabeledTree {
        LabeledTree { nodes: vec![LabeledNode { nu, children: Vec::new() }] }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in post-order (children before parents), computed iteratively.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(0usize, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                for &c in self.nodes[v].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Parent of every node (`None` for node 0).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (v, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = Some(v);
            }
        }
        parent
    }

    /// Current on the line leaving each node towards its parent (node 0: root line).
    pub fn line_currents(&self) -> Vec<HarmonicVector> {
        let mut cur: Vec<HarmonicVector> = self.nodes.iter().map(|n| n.nu.clone()).collect();
        for v in self.post_order() {
            for &c in &self.nodes[v].children {
                let sum = &cur[v] + &cur[c];
                cur[v] = sum;
            }
        }
        cur
    }

    /// Current on the root line, the total harmonic ν(θ).
    pub fn root_current(&self) -> HarmonicVector {
        self.line_currents().swap_remove(0)
    }

    /// Canonical string encoding; equal for trees related by reordering children.
    pub fn encoding(&self) -> String {
        let mut enc: Vec<String> = vec![String::new(); self.nodes.len()];
        for v in self.post_order() {
            let mut kids: Vec<String> = self.nodes[v].children.iter().map(|&c| std::mem::take(&mut enc[c])).collect();
            kids.sort();
            enc[v] = format!("{:?}[{}]", self.nodes[v].nu.entries(), kids.join(","));
        }
        std::mem::take(&mut enc[0])
    }

    /// Order of the automorphism group (permutations of identical sibling subtrees).
    pub fn automorphisms(&self) -> u64 {
        let mut enc: Vec<String> = vec![String::new(); self.nodes.len()];
        let mut aut: Vec<u64> = vec![1; self.nodes.len()];
        for v in self.post_order() {
            let mut kids: Vec<(String, u64)> =
                self.nodes[v].children.iter().map(|&c| (std::mem::take(&mut enc[c]), aut[c])).collect();
            kids.sort();
            let mut a = 1u64;
            let mut run = 0u64;
            for i in 0..kids.len() {
                a *= kids[i].1;
                run = if i > 0 && kids[i - 1].0 == kids[i].0 { run + 1 } else { 1 };
                a *= run;
            }
            aut[v] = a;
            let joined: Vec<&str> = kids.iter().map(|(s, _)| s.as_str()).collect();
            enc[v] = format!("{:?}[{}]", self.nodes[v].nu.entries(), joined.join(","));
        }
        aut[0]
    }

    /// k!/|Aut|.
    pub fn multiplicity(&self) -> BigInt {
        factorial(self.order() as u32) / BigInt::from(self.automorphisms())
    }

    /// No two lines on a common path to the root carry the same current.
    pub fn is_non_repeating(&self) -> bool {
        let cur = self.line_currents();
        let parent = self.parents();
        for v in 0..self.nodes.len() {
            let mut w = parent[v];
            while let Some(u) = w {
                if cur[u] == cur[v] {
                    return false;
                }
                w = parent[u];
            }
        }
        true
    }

    /// Nested `{nu, children}` encoding for debugging dumps.
    pub fn to_json(&self) -> Value {
        let mut built: Vec<Option<Value>> = vec![None; self.nodes.len()];
        for v in self.post_order() {
            let kids: Vec<Value> = self.nodes[v].children.iter().map(|&c| built[c].take().unwrap_or(Value::Null)).collect();
            built[v] = Some(json!({ "nu": self.nodes[v].nu.entries(), "children": kids }));
        }
        built[0].take().unwrap_or(Value::Null)
    }
}

/// Kepler coefficient c_ν: 1/2 for ν = ±1, zero otherwise.
fn kepler_c(nu: &HarmonicVector) -> BigRational {
    if nu.dim() == 1 && nu.entries()[0].abs() == 1 {
        BigRational::new(BigInt::one(), BigInt::from(2))
    } else {
        BigRational::zero()
    }
}

/// Value of one labeled tree in the Kepler expansion:
/// (−i/k!) Π_lines ν_{v′}ν_v Π_nodes c_{ν_v}, with ν_{v′} = 1 on the root line.
pub fn kepler_tree_value(tree: &LabeledTree) -> Result<ExactComplex> {
    let mut prod = BigRational::one();
    let parent = tree.parents();
    for (v, node) in tree.nodes.iter().enumerate() {
        if node.nu.dim() != 1 {
            return Err(Error::InvalidInput("Kepler trees carry scalar harmonics".into()));
        }
        let up = parent[v].map_or(1, |p| tree.nodes[p].nu.entries()[0]);
        prod *= BigRational::from_integer(BigInt::from(up * node.nu.entries()[0]));
        prod *= kepler_c(&node.nu);
    }
    let k = BigRational::from_integer(factorial(tree.order() as u32));
    Ok(Complex::new(BigRational::zero(), -prod / k))
}

/// Value of one labeled tree in the Lindstedt expansion of the torus
/// equation, along the unit vector `u`:
/// (−i(−1)^k/k!) Π_lines [ν_{v′}·ν_v/(ω·ν(l))²] Π_nodes f_{ν_v}.
pub fn lindstedt_tree_value(
    tree: &LabeledTree,
    omega: &FrequencyVector,
    f: &FourierSeries,
    u: &[f64],
) -> Result<Complex<f64>> {
    let cur = tree.line_currents();
    let parent = tree.parents();
    let mut val = Complex::new(1.0, 0.0);
    for (v, node) in tree.nodes.iter().enumerate() {
        if cur[v].is_zero() {
            return Err(Error::ZeroCurrentLine);
        }
        let d = omega.dot(&cur[v]);
        let up = match parent[v] {
            Some(p) => node.nu.dot_int(&tree.nodes[p].nu) as f64,
            None => node.nu.dot(u),
        };
        val *= up / (d * d);
        val *= f.coeff(&node.nu);
    }
    let k = tree.order();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let kfact: f64 = (1..=k).map(|j| j as f64).product();
    Ok(val * Complex::new(0.0, -sign / kfact))
}

/// Dyadic scale of a divisor: 0 when C|x| > 1, otherwise the n ≥ 1 with
/// 2^{−n} < C|x| ≤ 2^{−n+1}.
pub fn divisor_scale(c: f64, x: f64) -> u32 {
    let y = c * x.abs();
    if y > 1.0 {
        return 0;
    }
    let mut n = 1u32;
    let mut lower = 0.5;
    while y <= lower && n < 1023 {
        n += 1;
        lower *= 0.5;
    }
    n
}

/// Number of lines of `tree` on scale `n`.
///
/// The tree must be non-repeating; `max_harmonic` is the node harmonic
/// bound N and is validated against the labels.
pub fn siegel_census(tree: &LabeledTree, omega: &FrequencyVector, n: u32, max_harmonic: usize) -> Result<usize> {
    let c = omega
        .diophantine
        .map(|d| d.c)
        .ok_or_else(|| Error::InvalidInput("census needs Diophantine constants".into()))?;
    if tree.nodes.iter().any(|node| node.nu.norm() > max_harmonic) {
        return Err(Error::InvalidInput(format!("node harmonic exceeds N={max_harmonic}")));
    }
    if !tree.is_non_repeating() {
        return Err(Error::PreconditionViolated("two lines on one root path share a current".into()));
    }
    Ok(tree.line_currents().iter().filter(|cur| divisor_scale(c, omega.dot(cur)) == n).count())
}

/// The census bound 4·N·k·2^{−n/τ}.
pub fn siegel_bound(max_harmonic: usize, order: usize, n: u32, tau: f64) -> f64 {
    4.0 * max_harmonic as f64 * order as f64 * 2f64.powf(-(n as f64) / tau)
}

/// Outcome of an exhaustive census over restricted trees.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelReport {
    pub max_order: usize,
    pub max_harmonic: usize,
    /// Restricted canonical trees examined at each order.
    pub trees_per_order: Vec<u64>,
    pub violations: u64,
    /// Largest count/bound ratio over all trees and scales n ≥ 1.
    pub max_ratio: f64,
    /// Largest scale seen on any line.
    pub max_scale: u32,
}

/// Exhaustive census over every restricted tree of order ≤ `max_order` with
/// node harmonics 0 < |ν| ≤ `max_harmonic`.
pub fn siegel_scan(omega: &FrequencyVector, max_order: usize, max_harmonic: usize, budget: u64) -> Result<SiegelReport> {
    let dio = omega.diophantine.ok_or_else(|| Error::InvalidInput("census needs Diophantine constants".into()))?;
    let alphabet: Vec<HarmonicVector> = HarmonicVector::ball(omega.dim(), max_harmonic);
    const SCALES: usize = 32;
    let mut report = SiegelReport {
        max_order,
        max_harmonic,
        trees_per_order: Vec::new(),
        violations: 0,
        max_ratio: 0.0,
        max_scale: 0,
    };
    if max_order == 0 {
        return Ok(report);
    }
    let forest = Forest::build(&alphabet, max_order - 1, TreeFilter::Restricted, budget)?;
    // Scale histogram of every stored subtree (lines inside, including its top line).
    let hist_of = |forest: &Forest, id: usize, memo: &[[u16; SCALES]]| {
        let mut h = [0u16; SCALES];
        for &c in forest.children(id) {
            for (a, b) in h.iter_mut().zip(&memo[c as usize]) {
                *a += b;
            }
        }
        let s = divisor_scale(dio.c, forest.current(id).iter().zip(&omega.omega).map(|(a, w)| *a as f64 * w).sum());
        h[(s as usize).min(SCALES - 1)] += 1;
        h
    };
    let mut memo: Vec<[u16; SCALES]> = Vec::with_capacity(forest.len());
    for id in 0..forest.len() {
        let h = hist_of(&forest, id, &memo);
        memo.push(h);
    }
    let check = |h: &[u16; SCALES], k: usize, report: &mut SiegelReport| {
        for (n, &count) in h.iter().enumerate().skip(1) {
            if count > 0 {
                report.max_scale = report.max_scale.max(n as u32);
            }
            let bound = siegel_bound(max_harmonic, k, n as u32, dio.tau);
            report.max_ratio = report.max_ratio.max(count as f64 / bound);
            if count as f64 > bound {
                report.violations += 1;
            }
        }
    };
    for k in 1..max_order {
        let ids = forest.ids_of_order(k);
        report.trees_per_order.push(ids.len() as u64);
        for id in ids {
            check(&memo[id], k, &mut report);
        }
    }
    let mut top = 0u64;
    let mut rep = report.clone();
    forest.stream_next_order(&mut |view| {
        let mut h = [0u16; SCALES];
        for &c in view.children {
            for (a, b) in h.iter_mut().zip(&memo[c as usize]) {
                *a += b;
            }
        }
        let s = divisor_scale(dio.c, omega.dot(&view.current));
        h[(s as usize).min(SCALES - 1)] += 1;
        check(&h, max_order, &mut rep);
        top += 1;
    })?;
    rep.trees_per_order.push(top);
    Ok(rep)
}

/// Σ over canonical trees of the multiplicity, used to cross-check against
/// the Cayley count s^k·k^{k−1}.
pub fn weighted_count(k: usize, alphabet: &[HarmonicVector], budget: u64) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for_each_tree(k, alphabet, TreeFilter::All, budget, &mut |view| total += view.multiplicity())?;
    Ok(total)
}

/// Number of canonical labeled trees of order k over s labels (Euler transform).
pub fn canonical_count(k: usize, s: u64) -> u128 {
    let mut a = vec![0u128; k + 1];
    let mut forests = vec![0u128; k + 1];
    forests[0] = 1;
    if k >= 1 {
        a[1] = s as u128;
    }
    for n in 1..k {
        let mut acc = 0u128;
        for j in 1..=n {
            let cj: u128 = (1..=j).filter(|d| j % d == 0).map(|d| d as u128 * a[d]).sum();
            acc += cj * forests[n - j];
        }
        forests[n] = acc / n as u128;
        a[n + 1] = s as u128 * forests[n];
    }
    a[k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::golden_frequency;
    use crate::base::exact::rational;

    fn pm() -> Vec<HarmonicVector> {
        vec![HarmonicVector::new(&[1]), HarmonicVector::new(&[-1])]
    }

    fn collect(k: usize, alphabet: &[HarmonicVector], filter: TreeFilter) -> Vec<(LabeledTree, u64)> {
        let mut out = Vec::new();
        for_each_tree(k, alphabet, filter, DEFAULT_BUDGET, &mut |v| out.push((v.to_labeled(), v.aut))).unwrap();
        out
    }

    #[test]
    fn order_one_two_trees() {
        assert_eq!(collect(1, &pm(), TreeFilter::All).len(), 2);
        let two = collect(2, &pm(), TreeFilter::All);
        assert_eq!(two.len(), 4);
        let total: BigInt = two.iter().map(|(t, _)| t.multiplicity()).sum();
        assert_eq!(total, BigInt::from(8));
        // Normalised by the k choices of first line: (k−1)!/|Aut| sums to 4.
        let per_root: u64 = two.iter().map(|(_, a)| 1 / a).sum();
        assert_eq!(per_root, 4);
    }

    #[test]
    fn order_three_single_label() {
        let three = collect(3, &[HarmonicVector::new(&[1])], TreeFilter::All);
        assert_eq!(three.len(), 2);
        let total: BigInt = three.iter().map(|(t, _)| t.multiplicity()).sum();
        assert_eq!(total, BigInt::from(9));
        let normalised: f64 = three.iter().map(|(_, a)| 2.0 / *a as f64).sum();
        assert_eq!(normalised, 3.0);
    }

    #[test]
    fn cayley_counts() {
        for k in 1..=7usize {
            let total = weighted_count(k, &pm(), DEFAULT_BUDGET).unwrap();
            let expect = BigInt::from(2u64.pow(k as u32)) * BigInt::from((k as u64).pow(k as u32 - 1));
            assert_eq!(total, expect, "k={k}");
            let n = collect(k, &pm(), TreeFilter::All).len() as u128;
            assert_eq!(n, canonical_count(k, 2));
        }
    }

    #[test]
    fn view_aut_matches_explicit_tree() {
        let alphabet = vec![HarmonicVector::new(&[1, 0]), HarmonicVector::new(&[0, 1]), HarmonicVector::new(&[-1, 1])];
        for (t, aut) in collect(5, &alphabet, TreeFilter::All) {
            assert_eq!(t.automorphisms(), aut);
        }
    }

    #[test]
    fn currents_of_small_trees() {
        let t = LabeledTree::leaf(HarmonicVector::new(&[1]));
        assert_eq!(t.root_current(), HarmonicVector::new(&[1]));
        let chain = LabeledTree::from_parents(&[(HarmonicVector::new(&[-1]), None), (HarmonicVector::new(&[1]), Some(0))])
            .unwrap();
        let cur = chain.line_currents();
        assert_eq!(cur[1], HarmonicVector::new(&[1]));
        assert_eq!(cur[0], HarmonicVector::new(&[0]));
    }

    #[test]
    fn eleven_node_tree_root_current() {
        let parents = [None, Some(0), Some(0), Some(1), Some(1), Some(2), Some(3), Some(3), Some(5), Some(5), Some(9)];
        let layout: Vec<_> = parents.iter().map(|p| (HarmonicVector::new(&[1]), *p)).collect();
        let t = LabeledTree::from_parents(&layout).unwrap();
        assert_eq!(t.root_current(), HarmonicVector::new(&[11]));
    }

    #[test]
    fn long_chain_is_iterative() {
        let layout: Vec<_> =
            (0..200_000).map(|i| (HarmonicVector::new(&[1]), if i == 0 { None } else { Some(i - 1) })).collect();
        let t = LabeledTree::from_parents(&layout).unwrap();
        assert_eq!(t.root_current(), HarmonicVector::new(&[200_000]));
        assert_eq!(t.post_order().len(), 200_000);
    }

    #[test]
    fn kepler_values_order_one() {
        let plus = kepler_tree_value(&LabeledTree::leaf(HarmonicVector::new(&[1]))).unwrap();
        assert_eq!(plus, Complex::new(rational(0, 1), rational(-1, 2)));
        let minus = kepler_tree_value(&LabeledTree::leaf(HarmonicVector::new(&[-1]))).unwrap();
        assert_eq!(minus, Complex::new(rational(0, 1), rational(1, 2)));
        let two = kepler_tree_value(&LabeledTree::leaf(HarmonicVector::new(&[2]))).unwrap();
        assert!(two.re.is_zero() && two.im.is_zero());
    }

    #[test]
    fn lindstedt_value_order_one() {
        let w = golden_frequency();
        let f = FourierSeries::cosine(2, &[1, 1], 1.0);
        let nu = HarmonicVector::new(&[1, 1]);
        let u = [1.0, 0.0];
        let v = lindstedt_tree_value(&LabeledTree::leaf(nu.clone()), &w, &f, &u).unwrap();
        let d = w.dot(&nu);
        assert!((v - Complex::new(0.0, 0.5 / (d * d))).norm() < 1e-15);
        let zero = LabeledTree::from_parents(&[
            (HarmonicVector::new(&[-1, -1]), None),
            (HarmonicVector::new(&[1, 1]), Some(0)),
        ])
        .unwrap();
        assert_eq!(lindstedt_tree_value(&zero, &w, &f, &u), Err(Error::ZeroCurrentLine));
    }

    #[test]
    fn census_examples() {
        let w = golden_frequency();
        let leaf = LabeledTree::leaf(HarmonicVector::new(&[1, 1]));
        for n in 1..10 {
            assert_eq!(siegel_census(&leaf, &w, n, 2).unwrap(), 0);
        }
        // Chain with currents (1,−1), (−1,2), (0,1) from root line down.
        let chain = LabeledTree::from_parents(&[
            (HarmonicVector::new(&[2, -3]), None),
            (HarmonicVector::new(&[-1, 1]), Some(0)),
            (HarmonicVector::new(&[0, 1]), Some(1)),
        ])
        .unwrap();
        let cur = chain.line_currents();
        assert_eq!(cur, vec![HarmonicVector::new(&[1, -1]), HarmonicVector::new(&[-1, 2]), HarmonicVector::new(&[0, 1])]);
        let c = 5f64.sqrt();
        let mut total = 0;
        for n in 0..8 {
            let direct = cur.iter().filter(|x| divisor_scale(c, w.dot(x)) == n).count();
            assert_eq!(siegel_census(&chain, &w, n, 5).unwrap(), direct);
            total += direct;
        }
        assert_eq!(total, 3);
        // (−1,2): |ω·ν| = 2φ−1 = √5 so scale 0; (1,−1): |1−φ|√5 ≈ 1.38 scale 0.
        assert_eq!(siegel_census(&chain, &w, 0, 5).unwrap(), 3);
        assert!(siegel_census(&chain, &w, 0, 2).is_err());
        let repeat = LabeledTree::from_parents(&[
            (HarmonicVector::new(&[0, 0]), None),
            (HarmonicVector::new(&[1, 0]), Some(0)),
        ])
        .unwrap();
        assert!(matches!(siegel_census(&repeat, &w, 1, 2), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn restricted_filter_matches_explicit_check() {
        let alphabet = HarmonicVector::ball(2, 1);
        let all = collect(4, &alphabet, TreeFilter::All);
        let expected = all.iter().filter(|(t, _)| t.line_currents().iter().all(|c| !c.is_zero()) && t.is_non_repeating()).count();
        assert_eq!(collect(4, &alphabet, TreeFilter::Restricted).len(), expected);
        let nonzero = all.iter().filter(|(t, _)| t.line_currents().iter().all(|c| !c.is_zero())).count();
        assert_eq!(collect(4, &alphabet, TreeFilter::NonzeroCurrents).len(), nonzero);
    }

    #[test]
    fn small_census_scan() {
        let rep = siegel_scan(&golden_frequency(), 4, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.trees_per_order.len(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let err = for_each_tree(8, &pm(), TreeFilter::All, 100, &mut |_| {}).unwrap_err();
        assert!(matches!(err, Error::OrderTooLarge { .. }));
    }

    #[test]
    fn json_dump_nests() {
        let chain = LabeledTree::from_parents(&[(HarmonicVector::new(&[1]), None), (HarmonicVector::new(&[-1]), Some(0))])
            .unwrap();
        assert_eq!(chain.to_json().to_string(), r#"{"children":[{"children":[],"nu":[-1]}],"nu":[1]}"#);
    }
}
