//! Backtracking and random-restart search for side pairings of the
//! 24-cell satisfying the polytope theorem, with ridge-cycle propagation,
//! symmetry reduction at the first branch and certificate deduplication.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cusps::{census, FlatLabel};
use crate::exact::{invariant_factors, ExactMatrix};
use crate::group::{abelianized_matrix, presentation};
use crate::pairing::{ridge_cycles, verify_poincare, SidePairing};
use crate::polytope::{polytope, reflection, symmetry_group};
use crate::{Error, Result};

const NONE: usize = usize::MAX;

/// One step of a search: `side` is glued to `partner` by the polytope
/// symmetry `element` (restricted to the side).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub side: usize,
    pub partner: usize,
    pub element: usize,
}

/// A pairing with some sides assigned; every ridge cycle that can be
/// traced so far is consistent with a right-angled gluing.
#[derive(Clone, Debug)]
pub struct PartialPairing {
    partner: [usize; 24],
    element: [usize; 24],
    matrices: Vec<Option<ExactMatrix>>,
}

impl Default for PartialPairing {
    fn default() -> Self {
        Self::new()
    }
}

/// Orientation-preserving candidates: symmetries carrying `side` onto
/// `partner` with determinant −1 (the pairing map is the symmetry followed
/// by a reflection).
pub fn candidate_elements(side: usize, partner: usize) -> Vec<usize> {
    let g = symmetry_group();
    g.facet_maps(side, partner)
        .iter()
        .copied()
        .filter(|&k| g.get(k).det == -1)
        .collect()
}

impl PartialPairing {
    pub fn new() -> Self {
        PartialPairing {
            partner: [NONE; 24],
            element: [NONE; 24],
            matrices: vec![None; 24],
        }
    }

    pub fn is_assigned(&self, side: usize) -> bool {
        self.partner[side] != NONE
    }

    pub fn assigned(&self) -> usize {
        self.partner.iter().filter(|&&p| p != NONE).count()
    }

    pub fn least_unassigned(&self) -> Option<usize> {
        (0..24).find(|&s| !self.is_assigned(s))
    }

    pub fn is_complete(&self) -> bool {
        self.least_unassigned().is_none()
    }

    /// Free assignments made so far, in side order.
    pub fn assignments(&self) -> Vec<Assignment> {
        (0..24)
            .filter(|&s| self.is_assigned(s) && s < self.partner[s])
            .map(|s| Assignment {
                side: s,
                partner: self.partner[s],
                element: self.element[s],
            })
            .collect()
    }

    /// Legal `(partner, element)` choices for the least unassigned side,
    /// ordered by partner and then element.
    pub fn choices(&self) -> Vec<Assignment> {
        let Some(s) = self.least_unassigned() else {
            return Vec::new();
        };
        ((s + 1)..24)
            .filter(|&t| !self.is_assigned(t))
            .flat_map(|t| {
                candidate_elements(s, t).into_iter().map(move |element| Assignment {
                    side: s,
                    partner: t,
                    element,
                })
            })
            .collect()
    }

    fn map_vertex(&self, side: usize, v: usize) -> usize {
        symmetry_group().get(self.element[side]).perm[v]
    }

    /// Adds an assignment, or `None` if it breaks a ridge cycle.
    pub fn extend(&self, a: Assignment) -> Option<PartialPairing> {
        let g = symmetry_group();
        let (s, t, k) = (a.side, a.partner, a.element);
        if s == t || s >= 24 || t >= 24 || self.is_assigned(s) || self.is_assigned(t) {
            return None;
        }
        let sym = g.get(k);
        if sym.facet_perm[s] != t || sym.det != -1 {
            return None;
        }
        let p = polytope();
        let kinv = g.inverse(k);
        let mut next = self.clone();
        next.partner[s] = t;
        next.partner[t] = s;
        next.element[s] = k;
        next.element[t] = kinv;
        next.matrices[s] = Some(reflection(&p.normals[t]).mul_ref(&sym.matrix));
        next.matrices[t] = Some(reflection(&p.normals[s]).mul_ref(&g.get(kinv).matrix));
        for side in [s, t] {
            for &r in p.ridges_of(side) {
                if !next.chain_ok(side, r) {
                    return None;
                }
            }
        }
        Some(next)
    }

    fn step(&self, s: usize, r: usize) -> (usize, usize) {
        let p = polytope();
        let t = self.partner[s];
        let img = p.ridges[r].vertices.map(|v| self.map_vertex(s, v));
        let r2 = p.ridge_index(img).expect("symmetries map ridges to ridges");
        (p.across(r2, t), r2)
    }

    /// Checks the chain of ridge steps through `(side, ridge)`.
    fn chain_ok(&self, s0: usize, r0: usize) -> bool {
        let p = polytope();
        // walk back to the start of the chain (or once round the cycle)
        let (mut s, mut r) = (s0, r0);
        for _ in 0..8 {
            let u = p.across(r, s);
            if !self.is_assigned(u) {
                break;
            }
            let prev_r = p
                .ridge_index(p.ridges[r].vertices.map(|v| self.map_vertex(u, v)))
                .expect("ridge image");
            let prev = (self.partner[u], prev_r);
            s = prev.0;
            r = prev.1;
            if (s, r) == (s0, r0) {
                break;
            }
        }
        let start = (s, r);
        let mut steps = vec![start];
        loop {
            let (cs, cr) = *steps.last().unwrap();
            let (ns, nr) = self.step(cs, cr);
            if (ns, nr) == start {
                if steps.len() != 4 {
                    return false;
                }
                let ret = steps.iter().fold(ExactMatrix::identity(), |acc, &(x, _)| {
                    self.matrices[x].as_ref().unwrap().mul_ref(&acc)
                });
                return ret.is_identity();
            }
            if !self.is_assigned(ns) {
                return steps.len() < 4;
            }
            steps.push((ns, nr));
            if steps.len() > 4 {
                return false;
            }
        }
    }

    /// The complete pairing, derived afresh from the vertex maps.
    pub fn to_pairing(&self) -> Result<SidePairing> {
        if !self.is_complete() {
            return Err(Error::Inconsistent("pairing is incomplete".into()));
        }
        SidePairing::from_symmetries(self.partner, &self.element)
    }

    pub fn from_assignments(assignments: &[Assignment]) -> Option<PartialPairing> {
        assignments
            .iter()
            .try_fold(PartialPairing::new(), |p, &a| p.extend(a))
    }
}

/// The first `k` free-side assignments of a pairing, in side order.
pub fn prefix_of(sp: &SidePairing, k: usize) -> Vec<Assignment> {
    sp.free_sides()
        .into_iter()
        .take(k)
        .map(|s| Assignment {
            side: s,
            partner: sp.partner(s),
            element: sp.symmetry(s),
        })
        .collect()
}

/// Reads assignments from `pairing-v1` lines (only the lower side of each
/// pair is used).
pub fn parse_prefix(text: &str) -> Result<Vec<Assignment>> {
    let g = symmetry_group();
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (s, t, corr) = crate::pairing::parse_line(line, n + 1)?;
        if s > t {
            continue;
        }
        let element = g.extending(s, t, &corr).ok_or_else(|| Error::Parse {
            line: n + 1,
            msg: "correspondence is not induced by a symmetry".into(),
        })?;
        out.push(Assignment { side: s, partner: t, element });
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Certificates

/// Invariants of a verified pairing that do not change under polytope
/// symmetries (handedness is taken up to a global sign).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Certificate {
    pub cusp_count: usize,
    /// `(type, handedness)` sorted; achiral cusps carry 0.
    pub cusps: Vec<(FlatLabel, i32)>,
    pub h1_rank: usize,
    pub h1_torsion: Vec<u64>,
    /// `(relator length, count)`.
    pub relator_lengths: Vec<(usize, usize)>,
}

pub fn canonicalize(sp: &SidePairing) -> Result<Certificate> {
    let recs = census(sp)?;
    let raw: Vec<(FlatLabel, i32)> = recs.iter().map(|c| (c.flat, c.handedness.unwrap_or(0))).collect();
    let mut plus = raw.clone();
    plus.sort();
    let mut minus: Vec<(FlatLabel, i32)> = raw.iter().map(|&(l, h)| (l, -h)).collect();
    minus.sort();
    let cusps = plus.min(minus);
    let pres = presentation(sp);
    let factors = invariant_factors(&abelianized_matrix(&pres));
    let h1_rank = pres.generators.len() - factors.len();
    let h1_torsion = factors
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().unwrap_or(u64::MAX))
        .collect();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for c in ridge_cycles(sp) {
        *hist.entry(c.len()).or_default() += 1;
    }
    Ok(Certificate {
        cusp_count: recs.len(),
        cusps,
        h1_rank,
        h1_torsion,
        relator_lengths: hist.into_iter().collect(),
    })
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exhaustive,
    RandomRestart,
}

/// Target cusp profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    Any,
    /// Every cusp a 3-torus.
    AllTorus,
    /// Exactly one quarter-twist cusp, the rest 3-tori.
    OneQuarterTwist,
}

impl Profile {
    pub fn accepts(&self, c: &Certificate) -> bool {
        match self {
            Profile::Any => true,
            Profile::AllTorus => c.cusps.iter().all(|x| x.0 == FlatLabel::F1),
            Profile::OneQuarterTwist => {
                c.cusps.iter().filter(|x| x.0 == FlatLabel::F4).count() == 1
                    && c.cusps.iter().all(|x| matches!(x.0, FlatLabel::F1 | FlatLabel::F4))
            }
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "any" => Ok(Profile::Any),
            "all-f1" | "torus" => Ok(Profile::AllTorus),
            "one-f4" | "quarter-twist" => Ok(Profile::OneQuarterTwist),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown cusp profile `{s}` (any, all-f1, one-f4)"),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Maximum number of search nodes (extension attempts).
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    pub profile: Profile,
    /// Minimum first Betti number.
    pub min_betti: usize,
    pub prefix: Vec<Assignment>,
    /// Reduce the first free branch by the symmetries fixing the prefix.
    pub symmetry_reduction: bool,
    /// Depth of the subtree split for parallel work.
    pub split_depth: usize,
    /// Nodes per random restart.
    pub restart_nodes: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Exhaustive,
            seed: 0,
            node_budget: None,
            time_budget: None,
            profile: Profile::Any,
            min_betti: 0,
            prefix: Vec::new(),
            symmetry_reduction: true,
            split_depth: 1,
            restart_nodes: 2_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Found {
    pub pairing: SidePairing,
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Deduplicated by certificate and sorted by it.
    pub found: Vec<Found>,
    pub nodes: u64,
    /// Complete pairings that passed verification before filtering.
    pub verified: u64,
    pub budget_exhausted: bool,
}

// ---------------------------------------------------------------------------
// Engine

struct Shared<'a> {
    cfg: &'a SearchConfig,
    nodes: AtomicU64,
    verified: AtomicU64,
    stop: AtomicBool,
    deadline: Option<Instant>,
    found: Mutex<BTreeMap<Certificate, SidePairing>>,
}

impl Shared<'_> {
    /// Accounts one node; false once the budget is spent.
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.cfg.node_budget.is_some_and(|b| n > b);
        let over_time = self.deadline.is_some_and(|d| n % 64 == 0 && Instant::now() >= d);
        if over_nodes || over_time {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn emit(&self, pp: &PartialPairing) {
        let Ok(sp) = pp.to_pairing() else {
            return;
        };
        // independent check, not reusing search state
        if !verify_poincare(&sp).overall {
            return;
        }
        self.verified.fetch_add(1, Ordering::Relaxed);
        let Ok(cert) = canonicalize(&sp) else {
            return;
        };
        if !self.cfg.profile.accepts(&cert) || cert.h1_rank < self.cfg.min_betti {
            return;
        }
        let mut found = self.found.lock().unwrap();
        let text = sp.to_text();
        match found.get(&cert) {
            // keep the smallest encoding so results are schedule independent
            Some(old) if old.to_text() <= text => {}
            _ => {
                found.insert(cert, sp);
            }
        }
    }
}

/// Symmetries `γ` with `γ P γ⁻¹ = P` for the prefix and `γ(side) = side`.
fn prefix_stabiliser(prefix: &PartialPairing, side: usize) -> Vec<usize> {
    let g = symmetry_group();
    (0..g.order())
        .filter(|&k| {
            let s = g.get(k);
            if s.facet_perm[side] != side {
                return false;
            }
            (0..24).filter(|&x| prefix.is_assigned(x)).all(|x| {
                let y = s.facet_perm[x];
                prefix.is_assigned(y)
                    && prefix.partner[y] == s.facet_perm[prefix.partner[x]]
                    && prefix.element[y] == g.compose(k, g.compose(prefix.element[x], g.inverse(k)))
            })
        })
        .collect()
}

/// Keeps one choice per orbit of the stabiliser acting by conjugation.
pub fn reduce_choices(prefix: &PartialPairing, choices: Vec<Assignment>) -> Vec<Assignment> {
    let Some(first) = choices.first() else {
        return choices;
    };
    let g = symmetry_group();
    let stab = prefix_stabiliser(prefix, first.side);
    if stab.len() <= 1 {
        return choices;
    }
    choices
        .iter()
        .copied()
        .filter(|a| {
            stab.iter().all(|&k| {
                let img = Assignment {
                    side: a.side,
                    partner: g.get(k).facet_perm[a.partner],
                    element: g.compose(k, g.compose(a.element, g.inverse(k))),
                };
                (img.partner, img.element) >= (a.partner, a.element)
            })
        })
        .collect()
}

fn dfs(node: &PartialPairing, sh: &Shared<'_>) {
    if node.is_complete() {
        sh.emit(node);
        return;
    }
    for a in node.choices() {
        if !sh.tick() {
            return;
        }
        if let Some(child) = node.extend(a) {
            dfs(&child, sh);
        }
    }
}

fn random_dive(node: &PartialPairing, sh: &Shared<'_>, rng: &mut ChaCha8Rng, left: &mut u64) {
    if node.is_complete() {
        sh.emit(node);
        return;
    }
    let mut ch = node.choices();
    ch.shuffle(rng);
    for a in ch {
        if *left == 0 || !sh.tick() {
            return;
        }
        *left -= 1;
        if let Some(child) = node.extend(a) {
            random_dive(&child, sh, rng, left);
        }
    }
}

/// Subtree roots after the prefix, `depth` levels down, in canonical order.
fn split(root: &PartialPairing, depth: usize, reduce: bool, sh: &Shared<'_>) -> Vec<PartialPairing> {
    let mut level = vec![root.clone()];
    for d in 0..depth {
        let mut next = Vec::new();
        for node in &level {
            if node.is_complete() {
                next.push(node.clone());
                continue;
            }
            let mut ch = node.choices();
            if d == 0 && reduce {
                ch = reduce_choices(node, ch);
            }
            for a in ch {
                if !sh.tick() {
                    break;
                }
                if let Some(c) = node.extend(a) {
                    next.push(c);
                }
            }
        }
        level = next;
    }
    level
}

pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let root = PartialPairing::from_assignments(&cfg.prefix)
        .ok_or_else(|| Error::Inconsistent("prefix violates a ridge cycle".into()))?;
    let sh = Shared {
        cfg,
        nodes: AtomicU64::new(0),
        verified: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        deadline: cfg.time_budget.map(|t| Instant::now() + t),
        found: Mutex::new(BTreeMap::new()),
    };
    let zero_budget = cfg.node_budget == Some(0) || cfg.time_budget == Some(Duration::ZERO);
    if !zero_budget {
        match cfg.mode {
            Mode::Exhaustive => {
                let roots = split(&root, cfg.split_depth.max(1), cfg.symmetry_reduction, &sh);
                roots.par_iter().for_each(|r| dfs(r, &sh));
            }
            Mode::RandomRestart => {
                let roots = split(&root, 1, cfg.symmetry_reduction, &sh);
                if !roots.is_empty() {
                    let mut batch = 0u64;
                    while !sh.stop.load(Ordering::Relaxed) {
                        let width = rayon::current_num_threads() as u64;
                        (batch * width..(batch + 1) * width).into_par_iter().for_each(|i| {
                            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                            let r = &roots[(i as usize) % roots.len()];
                            let mut left = cfg.restart_nodes;
                            random_dive(r, &sh, &mut rng, &mut left);
                        });
                        batch += 1;
                        if cfg.node_budget.is_none() && cfg.time_budget.is_none() {
                            break;
                        }
                    }
                }
            }
        }
    }
    let found = sh
        .found
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|(certificate, pairing)| Found { pairing, certificate })
        .collect();
    Ok(SearchOutcome {
        found,
        nodes: sh.nodes.load(Ordering::Relaxed),
        verified: sh.verified.load(Ordering::Relaxed),
        budget_exhausted: sh.stop.load(Ordering::Relaxed) || zero_budget,
    })
}
