//! Complete enumeration of X_C(ℕ) for finite-type matrices.
//!
//! X_C is assembled recursively. Setting x_k = 1 reduces the system to the principal
//! submatrix without k, so the orbit closure of all such lifts covers every orbit that
//! meets a hyperplane x_k = 1. The remaining orbits have every entry at least 2 and are
//! found by an interval-propagation search whose pivot row is capped by the orbit-minimum
//! bound and whose rows are capped by the row-product bound. Disconnected matrices are
//! products of their components.
//!
//! The top level is split into independent work units (one per lift and one per pivot
//! value), run on a worker pool and merged by set union. Completed units can be streamed
//! to a checkpoint file and skipped on resume.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bounds::restricted_box;
use crate::cartan::Gcm;
use crate::error::{Error, Result};
use crate::frieze::{monomial, Equation, FriezePoint, FriezeSystem};
use crate::io::{big_strings, big_vec_from_value};

/// Widths above this are bisected rather than enumerated value by value.
const BISECT_WIDTH: u32 = 64;

/// Checkpoint format version, part of the digest.
const CHECKPOINT_VERSION: u32 = 1;

/// Search parameters.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub gcm: Gcm,
    /// Pivot row of the restricted search (0-based); chosen automatically when `None`.
    pub pivot: Option<usize>,
    /// Override for the pivot cap ⌊c_pivot⌋.
    pub pivot_cap: Option<BigUint>,
    /// Override for the per-row entry caps of the top-level restricted search.
    pub entry_caps: Option<Vec<BigUint>>,
    /// Either 1 (all points) or 2 (points whose entries are all at least 2).
    pub min_entry: u8,
    /// Keep only points whose whole orbit has entries at least 2.
    pub restricted_orbit: bool,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    /// Continue from the checkpoint file instead of overwriting it.
    pub resume: bool,
    pub node_budget: Option<u64>,
}

impl SearchConfig {
    /// Full enumeration with one worker and no checkpoint.
    pub fn new(gcm: Gcm) -> SearchConfig {
        SearchConfig {
            gcm,
            pivot: None,
            pivot_cap: None,
            entry_caps: None,
            min_entry: 1,
            restricted_orbit: false,
            workers: 1,
            checkpoint_path: None,
            resume: false,
            node_budget: None,
        }
    }

    /// Checks the field invariants.
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.min_entry) {
            return Err(Error::Parameters(format!("min_entry must be 1 or 2, got {}", self.min_entry)));
        }
        if self.restricted_orbit && self.min_entry != 2 {
            return Err(Error::Parameters("restricted_orbit requires min_entry = 2".into()));
        }
        if self.workers == 0 {
            return Err(Error::Parameters("workers must be positive".into()));
        }
        if let Some(p) = self.pivot {
            if p >= self.gcm.n() {
                return Err(Error::Parameters(format!("pivot {} out of range", p + 1)));
            }
        }
        if let Some(caps) = &self.entry_caps {
            if caps.len() != self.gcm.n() {
                return Err(Error::Length { expected: self.gcm.n(), got: caps.len() });
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of every field that affects the result set.
    pub fn digest(&self) -> String {
        let record = json!({
            "version": CHECKPOINT_VERSION,
            "matrix": self.gcm.entries(),
            "min_entry": self.min_entry,
            "restricted_orbit": self.restricted_orbit,
            "pivot": self.pivot,
            "pivot_cap": self.pivot_cap.as_ref().map(|v| v.to_string()),
            "entry_caps": self.entry_caps.as_ref().map(|v| big_strings(v)),
        });
        Sha256::digest(record.to_string().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Summary of one enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub total: usize,
    pub orbits: usize,
    /// Search nodes, counted per unit so that the value does not depend on scheduling.
    pub nodes: u64,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
    #[serde(serialize_with = "crate::io::ser_big")]
    pub max_coordinate: BigUint,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Shared node counter with an optional limit.
struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn new(limit: Option<u64>) -> Budget {
        Budget { limit, used: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    fn tick(&self) -> Result<()> {
        let used = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        if self.limit.is_some_and(|l| used > l) || self.exhausted.load(Ordering::Relaxed) {
            self.exhausted.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExhausted { nodes: used, path: None });
        }
        Ok(())
    }
}

type XSet = HashSet<Vec<BigUint>>;

/// A solved matrix: x-parts of all its points and the deterministic node cost.
struct Solved {
    xs: Vec<Vec<BigUint>>,
    cost: u64,
}

/// Interval domains for x and y.
#[derive(Clone)]
struct Domains {
    xl: Vec<BigUint>,
    xh: Vec<BigUint>,
    yl: Vec<BigUint>,
    yh: Vec<BigUint>,
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    a.div_ceil(b)
}

fn ceil_root(v: &BigUint, e: u32) -> BigUint {
    let r = v.nth_root(e);
    if &r.pow(e) == v {
        r
    } else {
        r + 1u32
    }
}

fn rest_product(terms: &[(usize, u32)], skip: usize, v: &[BigUint]) -> BigUint {
    terms.iter().filter(|(k, _)| *k != skip).fold(BigUint::one(), |acc, &(k, f)| acc * v[k].pow(f))
}

fn narrow(lo: &mut BigUint, hi: &mut BigUint, nl: BigUint, nh: BigUint, changed: &mut bool) -> bool {
    let nl = nl.max(lo.clone());
    let nh = nh.min(hi.clone());
    if nl > nh {
        return false;
    }
    if nl != *lo || nh != *hi {
        *changed = true;
        *lo = nl;
        *hi = nh;
    }
    true
}

/// Bounds propagation for x_i y_i = A_i + B_i to a fixed point; `false` if some domain empties.
fn propagate(eqs: &[Equation], d: &mut Domains) -> bool {
    loop {
        let mut changed = false;
        for (i, eq) in eqs.iter().enumerate() {
            let (al, ah) = (monomial(&eq.lo, &d.xl), monomial(&eq.lo, &d.xh));
            let (bl, bh) = (monomial(&eq.hi, &d.xl), monomial(&eq.hi, &d.xh));
            let (sl, sh) = (&al + &bl, &ah + &bh);
            let nxh = &sh / &d.yl[i];
            let nxl = ceil_div(&sl, &d.yh[i]);
            if !narrow(&mut d.xl[i], &mut d.xh[i], nxl, nxh, &mut changed) {
                return false;
            }
            let nyh = &sh / &d.xl[i];
            let nyl = ceil_div(&sl, &d.xh[i]);
            if !narrow(&mut d.yl[i], &mut d.yh[i], nyl, nyh, &mut changed) {
                return false;
            }
            let pl = &d.xl[i] * &d.yl[i];
            let ph = &d.xh[i] * &d.yh[i];
            for (terms, ol, oh) in [(&eq.lo, &bl, &bh), (&eq.hi, &al, &ah)] {
                for &(j, e) in terms.iter() {
                    if &ph < ol {
                        return false;
                    }
                    let up = (&ph - ol) / rest_product(terms, j, &d.xl);
                    let nh = up.nth_root(e);
                    let nl = if &pl > oh {
                        ceil_root(&ceil_div(&(&pl - oh), &rest_product(terms, j, &d.xh)), e)
                    } else {
                        BigUint::zero()
                    };
                    if !narrow(&mut d.xl[j], &mut d.xh[j], nl, nh, &mut changed) {
                        return false;
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 900 {
        v.to_f64().unwrap_or(f64::MAX).log2()
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().unwrap_or(f64::MAX).log2() + shift as f64
    }
}

fn volume(d: &Domains) -> f64 {
    d.xl.iter()
        .zip(&d.xh)
        .chain(d.yl.iter().zip(&d.yh))
        .map(|(l, h)| log2_big(&(h - l + 1u32)))
        .sum()
}

/// Prepared restricted search: pivot row and the root domains after propagation.
struct RestrictedPlan {
    pivot: usize,
    root: Domains,
}

/// Overrides that apply only to the top-level restricted search.
#[derive(Default)]
struct PlanOverrides {
    pivot: Option<usize>,
    pivot_cap: Option<BigUint>,
    entry_caps: Option<Vec<BigUint>>,
}

fn restricted_plan(sys: &FriezeSystem, ov: &PlanOverrides) -> Result<Option<RestrictedPlan>> {
    let n = sys.n();
    let period = sys.period().ok_or(Error::NotFiniteType)?;
    let bx = restricted_box(sys.gcm(), period)?;
    let two = BigUint::from(2u32);
    let caps = ov.entry_caps.clone().unwrap_or(bx.row_caps);
    let start = |p: usize| -> Option<Domains> {
        let mut d = Domains { xl: vec![two.clone(); n], xh: caps.clone(), yl: vec![two.clone(); n], yh: caps.clone() };
        let pc = ov.pivot_cap.clone().unwrap_or_else(|| bx.pivot_caps[p].clone());
        d.xh[p] = d.xh[p].clone().min(pc);
        if d.xl.iter().zip(&d.xh).any(|(l, h)| l > h) {
            return None;
        }
        propagate(sys.equations(), &mut d).then_some(d)
    };
    if let Some(p) = ov.pivot {
        return Ok(start(p).map(|root| RestrictedPlan { pivot: p, root }));
    }
    let mut best: Option<(f64, usize, Domains)> = None;
    for p in 0..n {
        match start(p) {
            None => return Ok(None),
            Some(d) => {
                let v = volume(&d);
                if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                    best = Some((v, p, d));
                }
            }
        }
    }
    Ok(best.map(|(_, pivot, root)| RestrictedPlan { pivot, root }))
}

/// Depth-first search over the domains; leaves are checked exactly.
fn csp(sys: &FriezeSystem, mut d: Domains, budget: &Budget, nodes: &mut u64, out: &mut Vec<Vec<BigUint>>) -> Result<()> {
    budget.tick()?;
    *nodes += 1;
    if !propagate(sys.equations(), &mut d) {
        return Ok(());
    }
    let mut best: Option<(BigUint, usize, bool)> = None;
    for i in 0..sys.n() {
        for (l, h, is_x) in [(&d.xl[i], &d.xh[i], true), (&d.yl[i], &d.yh[i], false)] {
            if h > l {
                let w = h - l;
                if best.as_ref().is_none_or(|(bw, _, _)| &w < bw) {
                    best = Some((w, i, is_x));
                }
            }
        }
    }
    let Some((width, i, is_x)) = best else {
        if sys.solve_y(&d.xl).is_some_and(|y| y == d.yl) {
            out.push(d.xl);
        }
        return Ok(());
    };
    let (lo, hi) = if is_x { (d.xl[i].clone(), d.xh[i].clone()) } else { (d.yl[i].clone(), d.yh[i].clone()) };
    let set = |d: &mut Domains, a: BigUint, b: BigUint| {
        if is_x {
            d.xl[i] = a;
            d.xh[i] = b;
        } else {
            d.yl[i] = a;
            d.yh[i] = b;
        }
    };
    if width > BigUint::from(BISECT_WIDTH) {
        let mid: BigUint = (&lo + &hi) >> 1;
        for (a, b) in [(lo, mid.clone()), (mid + 1u32, hi)] {
            let mut child = d.clone();
            set(&mut child, a, b);
            csp(sys, child, budget, nodes, out)?;
        }
    } else {
        let mut v = lo;
        while v <= hi {
            let mut child = d.clone();
            set(&mut child, v.clone(), v.clone());
            csp(sys, child, budget, nodes, out)?;
            v += 1u32;
        }
    }
    Ok(())
}

/// Adds the σ-orbit of x to the set; returns the orbit when it was not yet present.
fn close_orbit(sys: &FriezeSystem, x: Vec<BigUint>, out: &mut XSet) -> Result<()> {
    let mut cur = x;
    while !out.contains(&cur) {
        let next = sys.translate_x(&cur)?;
        out.insert(cur);
        cur = next;
    }
    Ok(())
}

/// The orbits of the candidates whose every member has all entries at least 2.
fn restricted_orbits(sys: &FriezeSystem, candidates: Vec<Vec<BigUint>>) -> Result<XSet> {
    let mut out = XSet::new();
    for x in candidates {
        if out.contains(&x) {
            continue;
        }
        let p = sys.point_from_x(x).ok_or(Error::KnitFailure)?;
        let orbit = sys.orbit(&p)?;
        if orbit.iter().all(|q| q.min_entry() >= BigUint::from(2u32)) {
            out.extend(orbit.into_iter().map(|q| q.x));
        }
    }
    Ok(out)
}

/// Memoized recursive solver shared by the work units.
struct Engine<'a> {
    budget: &'a Budget,
    memo: Mutex<HashMap<Vec<Vec<i64>>, Arc<Solved>>>,
}

impl<'a> Engine<'a> {
    fn new(budget: &'a Budget) -> Engine<'a> {
        Engine { budget, memo: Mutex::new(HashMap::new()) }
    }

    fn solve(&self, c: &Gcm) -> Result<Arc<Solved>> {
        let key = c.entries().to_vec();
        if let Some(s) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(s.clone());
        }
        let solved = Arc::new(self.solve_uncached(c)?);
        self.memo.lock().expect("memo lock").insert(key, solved.clone());
        Ok(solved)
    }

    fn solve_uncached(&self, c: &Gcm) -> Result<Solved> {
        let n = c.n();
        if n == 1 {
            return Ok(Solved { xs: vec![vec![BigUint::one()], vec![BigUint::from(2u32)]], cost: 0 });
        }
        let comps = c.components();
        if comps.len() > 1 {
            let mut xs: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); n]];
            let mut cost = 0u64;
            for comp in &comps {
                let part = self.solve(&c.principal(comp))?;
                cost = cost.saturating_add(part.cost);
                xs = xs
                    .iter()
                    .flat_map(|base| {
                        part.xs.iter().map(move |p| {
                            let mut q = base.clone();
                            for (k, &i) in comp.iter().enumerate() {
                                q[i] = p[k].clone();
                            }
                            q
                        })
                    })
                    .collect();
            }
            return Ok(Solved { xs, cost });
        }
        let sys = FriezeSystem::new(c.clone())?;
        let mut all = XSet::new();
        let mut cost = 0u64;
        for k in 0..n {
            let (set, c) = self.lift_unit(&sys, k)?;
            cost = cost.saturating_add(c);
            all.extend(set);
        }
        if let Some(plan) = restricted_plan(&sys, &PlanOverrides::default())? {
            let mut nodes = 0;
            let mut found = Vec::new();
            csp(&sys, plan.root, self.budget, &mut nodes, &mut found)?;
            cost = cost.saturating_add(nodes);
            all.extend(restricted_orbits(&sys, found)?);
        }
        let mut xs: Vec<_> = all.into_iter().collect();
        xs.sort();
        Ok(Solved { xs, cost })
    }

    /// Orbit closure of the points of C∖k lifted by x_k = 1.
    fn lift_unit(&self, sys: &FriezeSystem, k: usize) -> Result<(XSet, u64)> {
        let n = sys.n();
        let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let sub = self.solve(&sys.gcm().principal(&keep))?;
        let mut out = XSet::new();
        for p in &sub.xs {
            let mut x = p.clone();
            x.insert(k, BigUint::one());
            close_orbit(sys, x, &mut out)?;
        }
        Ok((out, sub.cost))
    }

    /// Restricted search with the pivot fixed to v.
    fn pivot_unit(&self, sys: &FriezeSystem, plan: &RestrictedPlan, v: &BigUint) -> Result<(XSet, u64)> {
        let mut d = plan.root.clone();
        d.xl[plan.pivot] = v.clone();
        d.xh[plan.pivot] = v.clone();
        let mut nodes = 0;
        let mut found = Vec::new();
        csp(sys, d, self.budget, &mut nodes, &mut found)?;
        Ok((restricted_orbits(sys, found)?, nodes))
    }
}

/// Top-level work unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Unit {
    Whole,
    Lift(usize),
    Pivot(BigUint),
}

impl Unit {
    fn id(&self) -> String {
        match self {
            Unit::Whole => "whole".into(),
            Unit::Lift(k) => format!("lift:{}", k + 1),
            Unit::Pivot(v) => format!("pivot:{v}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    digest: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct UnitRecord {
    unit: String,
    nodes: u64,
    points: Vec<Vec<String>>,
}

/// Completed units read back from a checkpoint.
type Completed = HashMap<String, (XSet, u64)>;

fn read_checkpoint(path: &PathBuf, digest: &str, sys: &FriezeSystem) -> Result<Completed> {
    let mut done = Completed::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(file).lines();
    let Some(first) = lines.next().transpose()? else {
        return Ok(done);
    };
    if first.trim().is_empty() {
        return Ok(done);
    }
    let header: CheckpointHeader =
        serde_json::from_str(&first).map_err(|e| Error::CorruptCheckpoint(format!("header: {e}")))?;
    if header.digest != digest {
        return Err(Error::DigestMismatch { expected: digest.into(), found: header.digest });
    }
    for (no, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: UnitRecord =
            serde_json::from_str(&line).map_err(|e| Error::CorruptCheckpoint(format!("line {}: {e}", no + 2)))?;
        let mut set = XSet::new();
        for p in &rec.points {
            let x = big_vec_from_value(&Value::from(p.clone()))
                .map_err(|e| Error::CorruptCheckpoint(format!("line {}: {e}", no + 2)))?;
            if sys.solve_y(&x).is_none() {
                return Err(Error::CorruptCheckpoint(format!("line {}: invalid point", no + 2)));
            }
            set.insert(x);
        }
        done.insert(rec.unit, (set, rec.nodes));
    }
    Ok(done)
}

fn open_checkpoint(path: &PathBuf, digest: &str, fresh: bool) -> Result<BufWriter<File>> {
    if fresh {
        let mut w = BufWriter::new(File::create(path)?);
        let header = CheckpointHeader { digest: digest.into(), version: CHECKPOINT_VERSION };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        w.flush()?;
        Ok(w)
    } else {
        Ok(BufWriter::new(OpenOptions::new().append(true).open(path)?))
    }
}

fn append_unit(w: &Mutex<BufWriter<File>>, unit: &Unit, set: &XSet, nodes: u64) -> Result<()> {
    let mut xs: Vec<&Vec<BigUint>> = set.iter().collect();
    xs.sort();
    let rec = UnitRecord { unit: unit.id(), nodes, points: xs.into_iter().map(|x| big_strings(x)).collect() };
    let mut w = w.lock().expect("checkpoint lock");
    writeln!(w, "{}", serde_json::to_string(&rec)?)?;
    w.flush()?;
    Ok(())
}

fn build_units(sys: &FriezeSystem, cfg: &SearchConfig) -> Result<(Vec<Unit>, Option<RestrictedPlan>)> {
    let n = sys.n();
    if n < 2 || sys.gcm().components().len() > 1 {
        return Ok((vec![Unit::Whole], None));
    }
    let ov = PlanOverrides { pivot: cfg.pivot, pivot_cap: cfg.pivot_cap.clone(), entry_caps: cfg.entry_caps.clone() };
    let plan = restricted_plan(sys, &ov)?;
    let mut units: Vec<Unit> = (0..n).map(Unit::Lift).collect();
    if let Some(plan) = &plan {
        let mut v = plan.root.xl[plan.pivot].clone();
        while v <= plan.root.xh[plan.pivot] {
            units.push(Unit::Pivot(v.clone()));
            v += 1u32;
        }
    }
    Ok((units, plan))
}

/// Number of distinct σ-orbits meeting the set.
fn count_orbits(sys: &FriezeSystem, points: &BTreeSet<FriezePoint>) -> Result<usize> {
    let mut seen: HashSet<Vec<BigUint>> = HashSet::new();
    let mut orbits = 0;
    for p in points {
        if seen.contains(&p.x) {
            continue;
        }
        orbits += 1;
        let mut cur = p.x.clone();
        while seen.insert(cur.clone()) {
            cur = sys.translate_x(&cur)?;
        }
    }
    Ok(orbits)
}

/// Points of the set whose whole σ-orbit has every entry at least 2.
pub fn filter_restricted(sys: &FriezeSystem, points: &[FriezePoint]) -> Result<BTreeSet<FriezePoint>> {
    let two = BigUint::from(2u32);
    let mut out = BTreeSet::new();
    for p in points {
        if out.contains(p) {
            continue;
        }
        let orbit = sys.orbit(p)?;
        if orbit.iter().all(|q| q.min_entry() >= two) {
            out.extend(orbit);
        }
    }
    Ok(out.into_iter().filter(|p| points.contains(p)).collect())
}

/// Enumerates X_C(ℕ), or its min_entry / restricted-orbit subset, as a canonical sorted set.
pub fn enumerate(cfg: &SearchConfig) -> Result<(BTreeSet<FriezePoint>, CountReport)> {
    let start = Instant::now();
    cfg.validate()?;
    let sys = FriezeSystem::new(cfg.gcm.clone())?;
    if sys.period().is_none() {
        return Err(Error::NotFiniteType);
    }
    let digest = cfg.digest();
    let mut done = match (&cfg.checkpoint_path, cfg.resume) {
        (Some(path), true) => read_checkpoint(path, &digest, &sys)?,
        _ => Completed::new(),
    };
    let writer = match &cfg.checkpoint_path {
        Some(path) => {
            let fresh = !cfg.resume || done.is_empty() && std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            Some(Mutex::new(open_checkpoint(path, &digest, fresh)?))
        }
        None => None,
    };
    let (units, plan) = build_units(&sys, cfg)?;
    let budget = Budget::new(cfg.node_budget);
    let engine = Engine::new(&budget);
    let pending: Vec<&Unit> = units.iter().filter(|u| !done.contains_key(&u.id())).collect();
    let run = |u: &Unit| -> Result<(Unit, XSet, u64)> {
        let (set, nodes) = match u {
            Unit::Whole => {
                let s = engine.solve(sys.gcm())?;
                (s.xs.iter().cloned().collect(), s.cost)
            }
            Unit::Lift(k) => engine.lift_unit(&sys, *k)?,
            Unit::Pivot(v) => engine.pivot_unit(&sys, plan.as_ref().expect("pivot units need a plan"), v)?,
        };
        if let Some(w) = &writer {
            append_unit(w, u, &set, nodes)?;
        }
        Ok((u.clone(), set, nodes))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Parameters(format!("worker pool: {e}")))?;
    let results: Vec<Result<(Unit, XSet, u64)>> = pool.install(|| pending.par_iter().map(|u| run(u)).collect());
    let mut exhausted = false;
    for r in results {
        match r {
            Ok((u, set, nodes)) => {
                done.insert(u.id(), (set, nodes));
            }
            Err(Error::BudgetExhausted { .. }) => exhausted = true,
            Err(e) => return Err(e),
        }
    }
    if exhausted {
        return Err(Error::BudgetExhausted {
            nodes: budget.used.load(Ordering::Relaxed),
            path: cfg.checkpoint_path.as_ref().map(|p| p.display().to_string()),
        });
    }
    let mut nodes = 0u64;
    let mut all = XSet::new();
    for u in &units {
        let (set, n) = done.remove(&u.id()).expect("every unit completed");
        nodes = nodes.saturating_add(n);
        all.extend(set);
    }
    let full: BTreeSet<FriezePoint> = all
        .into_iter()
        .map(|x| sys.point_from_x(x).ok_or(Error::KnitFailure))
        .collect::<Result<_>>()?;
    let two = BigUint::from(2u32);
    let points: BTreeSet<FriezePoint> = if cfg.restricted_orbit {
        let candidates: Vec<FriezePoint> = full.into_iter().filter(|p| p.min_entry() >= two).collect();
        filter_restricted(&sys, &candidates)?
    } else if cfg.min_entry == 2 {
        full.into_iter().filter(|p| p.min_entry() >= two).collect()
    } else {
        full
    };
    let orbits = if cfg.min_entry == 1 || cfg.restricted_orbit { count_orbits(&sys, &points)? } else { 0 };
    let report = CountReport {
        total: points.len(),
        orbits,
        nodes,
        elapsed: start.elapsed(),
        max_coordinate: points.iter().map(FriezePoint::max_entry).max().unwrap_or_default(),
    };
    Ok((points, report))
}

/// Enumerates the points whose whole σ-orbit has every entry at least 2.
pub fn enumerate_restricted_orbit(cfg: &SearchConfig) -> Result<BTreeSet<FriezePoint>> {
    let mut cfg = cfg.clone();
    cfg.min_entry = 2;
    cfg.restricted_orbit = true;
    Ok(enumerate(&cfg)?.0)
}

/// Writes the canonical point file: one point per line in sorted order, then the report
/// record without the elapsed time.
pub fn write_point_file<W: Write>(w: &mut W, points: &BTreeSet<FriezePoint>, report: &CountReport) -> Result<()> {
    for p in points {
        writeln!(w, "{}", serde_json::to_string(p)?)?;
    }
    let tail = json!({
        "report": {
            "total": report.total,
            "orbits": report.orbits,
            "nodes": report.nodes,
            "max_coordinate": report.max_coordinate.to_string(),
        }
    });
    writeln!(w, "{tail}")?;
    Ok(())
}

/// Reads a point file, validating every point against the system; the report line is skipped.
pub fn read_point_file<R: BufRead>(r: R, sys: &FriezeSystem) -> Result<BTreeSet<FriezePoint>> {
    let mut out = BTreeSet::new();
    for (no, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line)?;
        if v.get("report").is_some() {
            continue;
        }
        let x = v.get("x").ok_or_else(|| Error::Parse(format!("line {}: missing x", no + 1)))?;
        let x = big_vec_from_value(x)?;
        let p = match v.get("y") {
            Some(y) => crate::frieze::make_point(sys.gcm(), x, big_vec_from_value(y)?)?,
            None => sys.point_from_x(x).ok_or(Error::Residue(vec![]))?,
        };
        out.insert(p);
    }
    Ok(out)
}
