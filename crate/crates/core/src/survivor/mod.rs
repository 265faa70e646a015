//! Exact branch-and-prune over lambda-intervals.
//!
//! A node at depth `n` holds a closed interval `J` of admissible values of
//! `lambda * ratio^n`. Its children are the pieces of `ratio * J` that land
//! in `m + arc` for an integer `m` and an arc of the target set, so every
//! surviving `lambda` satisfies `frac(lambda * ratio^i) ∈ target` for all
//! `i <= n`. Root nodes are the pieces of the window itself, which makes the
//! `n = 0` constraint part of the search.
//!
//! Node expansion is pure. Work is split into independent subtrees whose
//! results are concatenated in subtree order and sorted before returning,
//! so the output does not depend on the rayon pool size.

mod presets;
mod stats;

pub use presets::{
    preset_dubickas_gap, preset_es, preset_mahler_z, preset_pollington, PresetInfo, DUBICKAS_HI,
    DUBICKAS_LO,
};
pub use stats::{gap_stats, GapStats};

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circle::{orbit, CircleSet, Interval};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on generated nodes for [`search`] and [`leaves_per_depth`].
pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChildMode {
    /// Keep every nonempty intersection.
    AllChildren,
    /// Keep only children equal to a whole translated target arc.
    FullComponentOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub ratio: Rational,
    pub target: CircleSet,
    pub window: Interval,
    pub depth: usize,
    pub mode: ChildMode,
}

impl TargetSpec {
    pub fn new(
        ratio: Rational,
        target: CircleSet,
        window: Interval,
        depth: usize,
        mode: ChildMode,
    ) -> Result<Self> {
        if ratio <= 1 {
            return Err(Error::RatioNotAboveOne(ratio.to_string()));
        }
        if !window.lo.is_positive() {
            return Err(Error::NonPositive {
                what: "window lower endpoint",
                value: window.lo.to_string(),
            });
        }
        Ok(TargetSpec {
            ratio,
            target,
            window,
            depth,
            mode,
        })
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_window(self, lo: Rational, hi: Rational) -> Result<Self> {
        let window = Interval::new(lo, hi)?;
        TargetSpec::new(self.ratio, self.target, window, self.depth, self.mode)
    }

    pub fn with_mode(mut self, mode: ChildMode) -> Self {
        self.mode = mode;
        self
    }
}

/// One branching choice: the value `lambda * ratio^n` was placed in
/// `m + arcs[component]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathStep {
    pub m: BigInt,
    pub component: usize,
}

impl Serialize for PathStep {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.m.to_string(), self.component).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PathStep {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (m, component) = <(String, usize)>::deserialize(deserializer)?;
        let m = BigInt::from_str(&m).map_err(serde::de::Error::custom)?;
        Ok(PathStep { m, component })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorNode {
    pub n: usize,
    /// Admissible values of `lambda * ratio^n`.
    pub interval: Interval,
    pub path: Vec<PathStep>,
}

impl SurvivorNode {
    pub fn lambda_interval(&self, ratio: &Rational) -> Interval {
        self.interval.scale(&ratio.pow(self.n as u32).recip())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub ratio: Rational,
    pub target: CircleSet,
    pub window: Interval,
    pub depth: usize,
    pub mode: ChildMode,
    pub path: Vec<PathStep>,
    pub lambda_interval: Interval,
    pub representative: Rational,
}

impl Certificate {
    fn from_leaf(spec: &TargetSpec, leaf: SurvivorNode) -> Self {
        let lambda_interval = leaf.lambda_interval(&spec.ratio);
        let representative = lambda_interval.midpoint();
        Certificate {
            ratio: spec.ratio.clone(),
            target: spec.target.clone(),
            window: spec.window.clone(),
            depth: spec.depth,
            mode: spec.mode,
            path: leaf.path,
            lambda_interval,
            representative,
        }
    }
}

/// Pieces of `range` inside `m + arc`, sorted by lower endpoint.
fn pieces(range: &Interval, arcs: &[Interval], mode: ChildMode) -> Vec<(PathStep, Interval)> {
    let mut out = Vec::new();
    for (component, arc) in arcs.iter().enumerate() {
        let m_lo = (&range.lo - &arc.hi).ceil_int();
        let m_hi = (&range.hi - &arc.lo).floor_int();
        let mut m = m_lo;
        while m <= m_hi {
            let shift = Rational::from(m.clone());
            let shifted = Interval {
                lo: &arc.lo + &shift,
                hi: &arc.hi + &shift,
            };
            let piece = match mode {
                ChildMode::FullComponentOnly => shifted.is_subset_of(range).then_some(shifted),
                ChildMode::AllChildren => range.intersect(&shifted),
            };
            if let Some(piece) = piece {
                out.push((
                    PathStep {
                        m: m.clone(),
                        component,
                    },
                    piece,
                ));
            }
            m += 1;
        }
    }
    out.sort_by(|a, b| {
        a.1.lo
            .cmp(&b.1.lo)
            .then_with(|| a.1.hi.cmp(&b.1.hi))
            .then_with(|| a.0.component.cmp(&b.0.component))
    });
    out
}

/// Depth-0 nodes: pieces of the window admissible at `n = 0`.
pub fn roots(spec: &TargetSpec) -> Vec<SurvivorNode> {
    pieces(&spec.window, &spec.target.arcs(), spec.mode)
        .into_iter()
        .map(|(step, interval)| SurvivorNode {
            n: 0,
            interval,
            path: vec![step],
        })
        .collect()
}

pub fn children(node: &SurvivorNode, spec: &TargetSpec) -> Vec<SurvivorNode> {
    children_with_arcs(node, spec, &spec.target.arcs())
}

fn children_with_arcs(
    node: &SurvivorNode,
    spec: &TargetSpec,
    arcs: &[Interval],
) -> Vec<SurvivorNode> {
    let image = node.interval.scale(&spec.ratio);
    pieces(&image, arcs, spec.mode)
        .into_iter()
        .map(|(step, interval)| {
            let mut path = Vec::with_capacity(node.path.len() + 1);
            path.extend(node.path.iter().cloned());
            path.push(step);
            SurvivorNode {
                n: node.n + 1,
                interval,
                path,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Depth-first, children in increasing order.
    Leftmost,
    /// Depth-first, children in decreasing order.
    Rightmost,
    /// Bit `i` picks child 0 or 1 when expanding depth `i` to `i + 1`;
    /// deeper levels continue leftmost.
    Bits(Vec<bool>),
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leftmost" => Ok(Strategy::Leftmost),
            "rightmost" => Ok(Strategy::Rightmost),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

impl Strategy {
    pub fn from_bits(code: &str) -> Result<Self> {
        if code.is_empty() {
            return Err(Error::InvalidBitstring("empty code".into()));
        }
        code.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitstring(format!("{code:?} contains {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Strategy::Bits)
    }

    fn select(&self, level: usize, mut kids: Vec<SurvivorNode>) -> Vec<SurvivorNode> {
        match self {
            Strategy::Leftmost => kids,
            Strategy::Rightmost => {
                kids.reverse();
                kids
            }
            Strategy::Bits(bits) => match bits.get(level) {
                Some(&bit) => {
                    let idx = usize::from(bit);
                    if idx < kids.len() {
                        vec![kids.swap_remove(idx)]
                    } else {
                        Vec::new()
                    }
                }
                None => kids,
            },
        }
    }
}

struct Budget {
    used: AtomicUsize,
    limit: usize,
}

impl Budget {
    fn charge(&self, n: usize) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before + n > self.limit {
            return Err(Error::NodeBudgetExceeded { budget: self.limit });
        }
        Ok(())
    }
}

struct SearchCtx<'a> {
    spec: &'a TargetSpec,
    arcs: Vec<Interval>,
    strategy: &'a Strategy,
    max_leaves: usize,
    budget: Budget,
}

impl SearchCtx<'_> {
    fn expand(&self, node: &SurvivorNode) -> Result<Vec<SurvivorNode>> {
        let kids = children_with_arcs(node, self.spec, &self.arcs);
        self.budget.charge(kids.len())?;
        Ok(self.strategy.select(node.n, kids))
    }

    fn dfs(&self, node: SurvivorNode, out: &mut Vec<SurvivorNode>) -> Result<()> {
        if out.len() >= self.max_leaves {
            return Ok(());
        }
        if node.n == self.spec.depth {
            out.push(node);
            return Ok(());
        }
        for child in self.expand(&node)? {
            self.dfs(child, out)?;
            if out.len() >= self.max_leaves {
                break;
            }
        }
        Ok(())
    }
}

/// Depth-first search for up to `max_leaves` survivors at `spec.depth`,
/// returned as certificates sorted by the lower end of their lambda-interval.
pub fn search(
    spec: &TargetSpec,
    strategy: &Strategy,
    max_leaves: usize,
    node_budget: usize,
) -> Result<Vec<Certificate>> {
    if max_leaves == 0 {
        return Err(Error::ZeroArgument("max_leaves"));
    }
    if let Strategy::Bits(bits) = strategy {
        if bits.len() > spec.depth {
            return Err(Error::InvalidBitstring(format!(
                "code length {} exceeds depth {}",
                bits.len(),
                spec.depth
            )));
        }
    }
    let ctx = SearchCtx {
        spec,
        arcs: spec.target.arcs(),
        strategy,
        max_leaves,
        budget: Budget {
            used: AtomicUsize::new(0),
            limit: node_budget,
        },
    };
    let mut start = roots(spec);
    ctx.budget.charge(start.len())?;
    if let Strategy::Rightmost = strategy {
        start.reverse();
    }

    // Independent subtrees: the depth-1 nodes (or the roots at depth 0).
    let subtrees: Vec<SurvivorNode> = if spec.depth == 0 {
        start
    } else {
        let mut frontier = Vec::new();
        for root in &start {
            frontier.extend(ctx.expand(root)?);
        }
        frontier
    };
    let per_subtree: Vec<Result<Vec<SurvivorNode>>> = subtrees
        .into_par_iter()
        .map(|node| {
            let mut out = Vec::new();
            ctx.dfs(node, &mut out)?;
            Ok(out)
        })
        .collect();

    let mut leaves = Vec::new();
    for found in per_subtree {
        leaves.extend(found?);
    }
    leaves.truncate(max_leaves);
    if leaves.is_empty() {
        return Err(Error::NoSurvivors { depth: spec.depth });
    }
    let mut certs: Vec<Certificate> = leaves
        .into_iter()
        .map(|l| Certificate::from_leaf(spec, l))
        .collect();
    certs.sort_by(|a, b| {
        a.lambda_interval
            .lo
            .cmp(&b.lambda_interval.lo)
            .then_with(|| a.lambda_interval.hi.cmp(&b.lambda_interval.hi))
    });
    Ok(certs)
}

/// First `n <= depth` at which `frac(representative * ratio^n)` leaves the
/// target, recomputed from scratch.
pub fn replay_failure(cert: &Certificate) -> Option<usize> {
    let points = match orbit(&cert.representative, &cert.ratio, cert.depth) {
        Ok(points) => points,
        Err(_) => return Some(0),
    };
    points.iter().position(|x| !cert.target.contains(x))
}

pub fn replay(cert: &Certificate) -> bool {
    replay_failure(cert).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthStats {
    pub depth: usize,
    pub leaves: usize,
    /// Total length of the surviving lambda-intervals.
    pub measure: Rational,
}

/// Level-by-level census of the survivor tree.
pub fn leaves_per_depth(spec: &TargetSpec, node_budget: usize) -> Result<Vec<DepthStats>> {
    let arcs = spec.target.arcs();
    let mut level: Vec<Interval> = pieces(&spec.window, &arcs, spec.mode)
        .into_iter()
        .map(|(_, iv)| iv)
        .collect();
    let mut used = level.len();
    if used > node_budget {
        return Err(Error::NodeBudgetExceeded {
            budget: node_budget,
        });
    }
    let mut scale = Rational::one();
    let mut rows = Vec::with_capacity(spec.depth + 1);
    for depth in 0..=spec.depth {
        let total: Rational = level.iter().map(Interval::length).sum();
        let measure = total * &scale;
        assert!(rows
            .last()
            .is_none_or(|prev: &DepthStats| measure <= prev.measure));
        rows.push(DepthStats {
            depth,
            leaves: level.len(),
            measure,
        });
        if depth == spec.depth {
            break;
        }
        let next: Vec<Vec<Interval>> = level
            .par_iter()
            .map(|iv| {
                pieces(&iv.scale(&spec.ratio), &arcs, spec.mode)
                    .into_iter()
                    .map(|(_, piece)| piece)
                    .collect()
            })
            .collect();
        level = next.into_iter().flatten().collect();
        used += level.len();
        if used > node_budget {
            return Err(Error::NodeBudgetExceeded {
                budget: node_budget,
            });
        }
        scale = scale / &spec.ratio;
    }
    Ok(rows)
}
