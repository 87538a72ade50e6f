//! Zero-set analysis on the circle: locate fixed points, classify them,
//! render the stability verdict, and certify a robustness radius.
//!
//! Detection is scan-based: a uniform grid brackets sign changes, which
//! bisection then refines. Stretches where |f| stays below the root
//! tolerance for three or more consecutive cells become zero intervals.
//! Local minima of |f| that dip below the tolerance without a sign change
//! become tangential zeros. When more roots pile into a short arc than the
//! root cap allows, the cluster is replaced by an accumulation record — a
//! heuristic, since no finite scan can certify infinitely many zeros.

use crate::circle::{ccw_gap, circ_dist, wrap, Arc, CirclePoint};
use crate::error::{Error, Result};
use crate::expr::VectorFieldExpr;
use crate::norms;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct AnalysisOpts {
    pub root_tol: f64,
    pub hyper_tol: f64,
    pub scan_grid: usize,
    pub root_cap: usize,
}

impl Default for AnalysisOpts {
    fn default() -> Self {
        AnalysisOpts {
            root_tol: 1e-9,
            hyper_tol: 1e-6,
            scan_grid: 8192,
            root_cap: 64,
        }
    }
}

/// Minimum length for a sub-tolerance band to count as a zero interval.
/// A degenerate isolated zero of modest multiplicity stays below the root
/// tolerance on a band of order (tol)^(1/k), well under this; measuring in
/// absolute length instead of scan cells keeps the classification stable
/// when the grid is refined.
const MIN_ZERO_INTERVAL_LEN: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    /// f′ > 0 at the zero.
    HyperbolicRepeller,
    /// f′ < 0 at the zero.
    HyperbolicAttractor,
    /// f′ = 0 and f does not change sign.
    Tangential,
    /// f′ = 0 and f changes sign.
    InflectionDegenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPoint {
    pub location: CirclePoint,
    /// Isolating bracket the zero was found in.
    pub bracket: Arc,
    pub f_prime: f64,
    pub kind: FixedPointKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct Accumulation {
    /// Estimated limit of the zero cluster: the end where spacing shrinks.
    pub limit: CirclePoint,
    /// Number of resolved zeros folded into this record.
    pub count_in_probe: usize,
    /// Arc spanned by the folded zeros.
    pub arc: Arc,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct FixedPointSet {
    /// Isolated zeros in counterclockwise order.
    pub isolated: Vec<FixedPoint>,
    /// Arcs on which |f| stays below the root tolerance.
    pub zero_intervals: Vec<Arc>,
    pub accumulation: Option<Accumulation>,
    pub whole_circle_zero: bool,
    pub warnings: Vec<String>,
}

impl FixedPointSet {
    /// True when the zero set consists of finitely many isolated points
    /// (possibly none) with no intervals or accumulation.
    pub fn is_finite_isolated(&self) -> bool {
        !self.whole_circle_zero && self.zero_intervals.is_empty() && self.accumulation.is_none()
    }

    pub fn all_hyperbolic(&self) -> bool {
        self.isolated.iter().all(|p| {
            matches!(
                p.kind,
                FixedPointKind::HyperbolicRepeller | FixedPointKind::HyperbolicAttractor
            )
        })
    }

    /// Locations of the isolated zeros, counterclockwise.
    pub fn locations(&self) -> Vec<CirclePoint> {
        self.isolated.iter().map(|p| p.location).collect()
    }

    pub fn kind_sequence(&self) -> Vec<FixedPointKind> {
        self.isolated.iter().map(|p| p.kind).collect()
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnosis {
    NoFixedPoints,
    AllHyperbolic,
    /// An isolated zero without sign change (f′ = 0 there).
    TangentialZero {
        at: CirclePoint,
    },
    /// An isolated sign-changing zero with f′ = 0.
    InflectionZero {
        at: CirclePoint,
    },
    ZeroInterval {
        arc: Arc,
    },
    WholeCircleZero,
    ZeroAccumulation {
        limit: CirclePoint,
    },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Margins {
    pub eps0: f64,
    pub eps1: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub diagnosis: Diagnosis,
    pub robustness_radius: Option<f64>,
    pub margins: Option<Margins>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhasePortrait {
    /// Arcs of constant flow direction between zero-set components.
    pub arcs: Vec<(Arc, Direction)>,
    pub fixed_points: FixedPointSet,
}

/// A zero candidate before classification.
#[derive(Debug, Clone, Copy)]
struct RawRoot {
    pos: f64,
    bracket_lo: f64,
    bracket_hi: f64,
}

/// Locates the zero set of `f`.
pub fn find_fixed_points(f: &VectorFieldExpr, opts: &AnalysisOpts) -> Result<FixedPointSet> {
    if opts.root_cap < 8 {
        return Err(Error::BadArgument("root_cap must be at least 8".into()));
    }
    let mut set = detect(f, opts, opts.scan_grid)?;
    if let Some(acc) = &set.accumulation {
        set.warnings.push(format!(
            "accumulation record is heuristic: more than {} zeros resolved in a short arc \
             ({} folded near {}); no finite scan can certify infinitely many",
            opts.root_cap, acc.count_in_probe, acc.limit
        ));
    }
    let doubled = detect(f, opts, opts.scan_grid * 2)?;
    if set.isolated.len() != doubled.isolated.len()
        || set.zero_intervals.len() != doubled.zero_intervals.len()
        || set.accumulation.is_some() != doubled.accumulation.is_some()
    {
        set.warnings.push(format!(
            "doubling the scan grid from {} to {} changes the detected structure \
             ({} -> {} isolated, {} -> {} intervals); the scan may be under-resolved",
            opts.scan_grid,
            opts.scan_grid * 2,
            set.isolated.len(),
            doubled.isolated.len(),
            set.zero_intervals.len(),
            doubled.zero_intervals.len(),
        ));
    }
    Ok(set)
}

fn detect(f: &VectorFieldExpr, opts: &AnalysisOpts, n: usize) -> Result<FixedPointSet> {
    let h = 1.0 / n as f64;
    let mut pos = vec![0.0f64; n];
    let mut val = vec![0.0f64; n];
    for i in 0..n {
        let mut x = i as f64 * h;
        let mut v = f.eval(x);
        if v == 0.0 {
            // A zero landing exactly on a node would fall between brackets;
            // nudge the node by half a cell.
            x += 0.5 * h;
            v = f.eval(x);
        }
        if !v.is_finite() {
            return Err(Error::NonFinite {
                x,
                context: "fixed-point scan".into(),
            });
        }
        pos[i] = x;
        val[i] = v;
    }

    let tiny: Vec<bool> = val.iter().map(|v| v.abs() <= opts.root_tol).collect();
    if tiny.iter().all(|&t| t) {
        return Ok(FixedPointSet {
            whole_circle_zero: true,
            ..Default::default()
        });
    }

    // Maximal circular runs of consecutive tiny nodes.
    let mut runs: Vec<(usize, usize)> = Vec::new(); // (start index, length)
    {
        let mut i = 0;
        // Start scanning from a non-tiny node so runs never split across the seam.
        let origin = (0..n).find(|&k| !tiny[k]).unwrap();
        while i < n {
            let idx = (origin + i) % n;
            if tiny[idx] {
                let start = idx;
                let mut len = 0;
                while i < n && tiny[(origin + i) % n] {
                    len += 1;
                    i += 1;
                }
                runs.push((start, len));
            } else {
                i += 1;
            }
        }
    }

    let mut zero_intervals: Vec<Arc> = Vec::new();
    let mut roots: Vec<RawRoot> = Vec::new();

    let lifted = |i: usize, j: usize| -> (f64, f64) {
        // Positions of nodes i and j with j counterclockwise of i, lifted so
        // the bracket is an increasing real interval.
        let a = pos[i];
        let mut b = pos[j];
        if b <= a {
            b += 1.0;
        }
        (a, b)
    };

    for &(start, len) in &runs {
        let before = (start + n - 1) % n;
        let after = (start + len) % n;
        // At least three consecutive all-tiny cells spanning a genuine arc:
        // a zero interval. Refine each edge to where |f| crosses the
        // tolerance. Shorter bands are flat crossings and get bridged.
        let is_interval = len >= 4 && (len - 1) as f64 * h >= MIN_ZERO_INTERVAL_LEN;
        if is_interval {
            let (lo, hi) = lifted(before, start);
            let left = refine_tol_crossing(f, opts.root_tol, lo, hi);
            let (lo2, hi2) = lifted((start + len - 1) % n, after);
            let right = refine_tol_crossing_rev(f, opts.root_tol, lo2, hi2);
            zero_intervals.push(Arc::from_raw(left, right));
        } else {
            // A short tiny stretch: bridge it with one bracket.
            let (lo, hi) = lifted(before, after);
            if val[before] * val[after] < 0.0 {
                let root = bisect(f, lo, hi);
                roots.push(RawRoot {
                    pos: root,
                    bracket_lo: lo,
                    bracket_hi: hi,
                });
            } else {
                let (m, arg) = norms::min_on(|x| f.eval(x).abs(), lo, hi, 32);
                if m <= opts.root_tol {
                    roots.push(RawRoot {
                        pos: arg,
                        bracket_lo: lo,
                        bracket_hi: hi,
                    });
                }
            }
        }
    }

    // Plain sign-change cells between adjacent non-tiny nodes.
    for i in 0..n {
        let j = (i + 1) % n;
        if !tiny[i] && !tiny[j] && val[i] * val[j] < 0.0 {
            let (lo, hi) = lifted(i, j);
            let root = bisect(f, lo, hi);
            roots.push(RawRoot {
                pos: root,
                bracket_lo: lo,
                bracket_hi: hi,
            });
        }
    }

    // Tangential zeros hiding between nodes: same-sign local minima of |f|
    // that reach below the tolerance.
    for i in 0..n {
        let p = (i + n - 1) % n;
        let q = (i + 1) % n;
        if tiny[p] || tiny[i] || tiny[q] {
            continue;
        }
        let (ap, ai, aq) = (val[p].abs(), val[i].abs(), val[q].abs());
        let same_sign = val[p].signum() == val[i].signum() && val[i].signum() == val[q].signum();
        if same_sign && ai <= ap && ai <= aq && ai < 0.01 {
            let (lo, hi) = lifted(p, q);
            let (m, arg) = norms::min_on(|x| f.eval(x).abs(), lo, hi, 32);
            if m <= opts.root_tol {
                roots.push(RawRoot {
                    pos: arg,
                    bracket_lo: lo,
                    bracket_hi: hi,
                });
            }
        }
    }

    // Sort counterclockwise and drop duplicates found by different paths.
    for r in &mut roots {
        r.pos = wrap(r.pos).position();
    }
    roots.sort_by(|a, b| a.pos.partial_cmp(&b.pos).unwrap());
    roots.dedup_by(|a, b| circ_dist(wrap(a.pos), wrap(b.pos)) < 1e-8);
    if roots.len() >= 2 {
        let first = roots.first().unwrap().pos;
        let last = roots.last().unwrap().pos;
        if circ_dist(wrap(first), wrap(last)) < 1e-8 {
            roots.pop();
        }
    }

    // Accumulation heuristic: more than root_cap roots inside any arc of
    // length below 0.1 collapse into a single record.
    let mut accumulation = None;
    let mut kept: Vec<RawRoot> = roots.clone();
    if roots.len() > opts.root_cap {
        let marked = mark_overloaded(&roots, opts.root_cap, 0.1);
        if marked.iter().any(|&m| m) {
            // One record carries the largest cluster; smaller overloaded
            // blocks at this resolution are folded into the kept list.
            let block = largest_circular_block(&marked);
            let cluster: Vec<f64> = block.iter().map(|&i| roots[i].pos).collect();
            let limit = estimate_limit(&cluster);
            let arc = Arc::from_raw(cluster[0], *cluster.last().unwrap());
            accumulation = Some(Accumulation {
                limit: wrap(limit),
                count_in_probe: cluster.len(),
                arc,
            });
            let in_block: std::collections::HashSet<usize> = block.into_iter().collect();
            kept = roots
                .iter()
                .enumerate()
                .filter(|(i, _)| !in_block.contains(i))
                .map(|(_, r)| *r)
                .collect();
        }
    }

    // Classify what survived.
    let mut isolated = Vec::with_capacity(kept.len());
    for r in &kept {
        isolated.push(classify_at(f, r, opts));
    }

    Ok(FixedPointSet {
        isolated,
        zero_intervals,
        accumulation,
        whole_circle_zero: false,
        warnings: Vec::new(),
    })
}

/// Marks every root that lies inside some window of length `window` holding
/// more than `cap` roots.
fn mark_overloaded(roots: &[RawRoot], cap: usize, window: f64) -> Vec<bool> {
    let n = roots.len();
    let mut marked = vec![false; n];
    for a in 0..n {
        // Count roots in the ccw window starting at root a.
        let start = roots[a].pos;
        let mut count = 0;
        let mut members = Vec::new();
        for (b, r) in roots.iter().enumerate() {
            if ccw_gap(wrap(start), wrap(r.pos)) < window {
                count += 1;
                members.push(b);
            }
        }
        if count > cap {
            for b in members {
                marked[b] = true;
            }
        }
    }
    marked
}

/// Largest circularly contiguous block of marked indices, in ccw order.
fn largest_circular_block(marked: &[bool]) -> Vec<usize> {
    let n = marked.len();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let origin = match (0..n).find(|&k| !marked[k]) {
        Some(o) => o,
        None => return (0..n).collect(),
    };
    let mut i = 0;
    while i < n {
        let idx = (origin + i) % n;
        if marked[idx] {
            let mut block = Vec::new();
            while i < n && marked[(origin + i) % n] {
                block.push((origin + i) % n);
                i += 1;
            }
            blocks.push(block);
        } else {
            i += 1;
        }
    }
    blocks.sort_by_key(|b| std::cmp::Reverse(b.len()));
    blocks.into_iter().next().unwrap_or_default()
}

/// The cluster end where spacing shrinks is the best estimate of the limit.
fn estimate_limit(cluster: &[f64]) -> f64 {
    if cluster.len() < 4 {
        return cluster[0];
    }
    let k = 3.min(cluster.len() - 1);
    let front: f64 = (0..k)
        .map(|i| ccw_gap(wrap(cluster[i]), wrap(cluster[i + 1])))
        .sum();
    let m = cluster.len();
    let back: f64 = (0..k)
        .map(|i| ccw_gap(wrap(cluster[m - 1 - k + i]), wrap(cluster[m - k + i])))
        .sum();
    if front <= back {
        cluster[0]
    } else {
        *cluster.last().unwrap()
    }
}

fn classify_at(f: &VectorFieldExpr, r: &RawRoot, opts: &AnalysisOpts) -> FixedPoint {
    let z = wrap(r.pos);
    let fp = f.eval_deriv(z.position());
    let kind = if fp.abs() > opts.hyper_tol {
        if fp > 0.0 {
            FixedPointKind::HyperbolicRepeller
        } else {
            FixedPointKind::HyperbolicAttractor
        }
    } else {
        let probe = (r.bracket_hi - r.bracket_lo).max(1e-7);
        let before = f.eval(z.position() - probe);
        let after = f.eval(z.position() + probe);
        if before * after < 0.0 {
            FixedPointKind::InflectionDegenerate
        } else {
            FixedPointKind::Tangential
        }
    };
    FixedPoint {
        location: z,
        bracket: Arc::from_raw(r.bracket_lo, r.bracket_hi),
        f_prime: fp,
        kind,
    }
}

/// Classifies a known zero of `f`.
pub fn classify(f: &VectorFieldExpr, p: CirclePoint, opts: &AnalysisOpts) -> Result<FixedPoint> {
    let v = f.eval(p.position());
    if v.abs() > opts.root_tol {
        return Err(Error::NotAZero {
            x: p.position(),
            value: v.abs(),
        });
    }
    let h = 1.0 / opts.scan_grid as f64;
    Ok(classify_at(
        f,
        &RawRoot {
            pos: p.position(),
            bracket_lo: p.position() - h,
            bracket_hi: p.position() + h,
        },
        opts,
    ))
}

fn bisect(f: &VectorFieldExpr, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f.eval(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..60 {
        if hi - lo < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Bisects for the point where |f| first drops to `tol`, scanning from a
/// loud node at `lo` toward a quiet node at `hi`.
fn refine_tol_crossing(f: &VectorFieldExpr, tol: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..60 {
        if hi - lo < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f.eval(mid).abs() <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mirror image: quiet at `lo`, loud at `hi`; finds where |f| rises past
/// `tol`.
fn refine_tol_crossing_rev(f: &VectorFieldExpr, tol: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..60 {
        if hi - lo < 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f.eval(mid).abs() <= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Stability verdict with the first violated degeneracy, checked in the
/// order: whole-circle zero set, zero interval, accumulation, tangential
/// zero, inflection zero.
pub fn assess(f: &VectorFieldExpr, opts: &AnalysisOpts) -> Result<StabilityVerdict> {
    let set = find_fixed_points(f, opts)?;
    assess_with(f, &set)
}

pub(crate) fn assess_with(f: &VectorFieldExpr, set: &FixedPointSet) -> Result<StabilityVerdict> {
    if set.whole_circle_zero {
        return Ok(unstable(Diagnosis::WholeCircleZero));
    }
    if let Some(arc) = set.zero_intervals.first() {
        return Ok(unstable(Diagnosis::ZeroInterval { arc: *arc }));
    }
    if let Some(acc) = &set.accumulation {
        return Ok(unstable(Diagnosis::ZeroAccumulation { limit: acc.limit }));
    }
    if let Some(p) = set
        .isolated
        .iter()
        .find(|p| p.kind == FixedPointKind::Tangential)
    {
        return Ok(unstable(Diagnosis::TangentialZero { at: p.location }));
    }
    if let Some(p) = set
        .isolated
        .iter()
        .find(|p| p.kind == FixedPointKind::InflectionDegenerate)
    {
        return Ok(unstable(Diagnosis::InflectionZero { at: p.location }));
    }
    let diagnosis = if set.isolated.is_empty() {
        Diagnosis::NoFixedPoints
    } else {
        Diagnosis::AllHyperbolic
    };
    let (radius, margins) = robustness_radius_with(f, set)?;
    Ok(StabilityVerdict {
        stable: true,
        diagnosis,
        robustness_radius: Some(radius),
        margins: Some(margins),
    })
}

fn unstable(diagnosis: Diagnosis) -> StabilityVerdict {
    StabilityVerdict {
        stable: false,
        diagnosis,
        robustness_radius: None,
        margins: None,
    }
}

/// Certified lower bound on how far the field can move in C¹ without
/// changing its phase portrait. Only defined for stable systems.
pub fn robustness_radius(f: &VectorFieldExpr, opts: &AnalysisOpts) -> Result<(f64, Margins)> {
    let set = find_fixed_points(f, opts)?;
    if !(set.is_finite_isolated() && set.all_hyperbolic()) {
        return Err(Error::UnstableInput(
            "robustness radius requires finitely many hyperbolic zeros".into(),
        ));
    }
    robustness_radius_with(f, &set)
}

fn robustness_radius_with(f: &VectorFieldExpr, set: &FixedPointSet) -> Result<(f64, Margins)> {
    if set.isolated.is_empty() {
        // No zeros: anything closer than min |f| cannot create one.
        let radius = refined_min_abs(f)?;
        return Ok((
            radius,
            Margins {
                eps0: radius,
                eps1: radius,
                delta: 0.0,
            },
        ));
    }

    let zeros: Vec<f64> = set.isolated.iter().map(|p| p.location.position()).collect();
    let m = zeros.len();
    let min_gap = if m == 1 {
        1.0
    } else {
        (0..m)
            .map(|k| ccw_gap(wrap(zeros[k]), wrap(zeros[(k + 1) % m])))
            .fold(f64::INFINITY, f64::min)
    };

    let lo = min_gap / 64.0;
    let hi = min_gap / 2.0 * 0.999;
    let mut best: Option<(f64, Margins)> = None;
    for j in 0..32 {
        let delta = lo * (hi / lo).powf(j as f64 / 31.0);
        // eps0: half the smallest |f'| within delta of any zero.
        let mut min_slope = f64::INFINITY;
        for z in &zeros {
            let (v, _) = norms::min_on(|x| f.eval_deriv(x).abs(), z - delta, z + delta, 256);
            min_slope = min_slope.min(v);
        }
        // eps1: half the smallest |f| on the closed complement of those
        // neighborhoods.
        let mut min_val = f64::INFINITY;
        for k in 0..m {
            let a = zeros[k] + delta;
            let len = ccw_gap(wrap(zeros[k]), wrap(zeros[(k + 1) % m]));
            let len = if m == 1 { 1.0 } else { len };
            let b = zeros[k] + len - delta;
            if b <= a {
                continue;
            }
            let samples = ((b - a) * 2048.0).ceil().max(64.0) as usize;
            let (v, _) = norms::min_on(|x| f.eval(x).abs(), a, b, samples);
            min_val = min_val.min(v);
        }
        let eps0 = 0.5 * min_slope;
        let eps1 = 0.5 * min_val;
        let radius = eps0.min(eps1);
        if best.map(|(r, _)| radius > r).unwrap_or(true) {
            best = Some((radius, Margins { eps0, eps1, delta }));
        }
    }
    best.ok_or_else(|| Error::BadArgument("empty delta grid".into()))
}

fn refined_min_abs(f: &VectorFieldExpr) -> Result<f64> {
    let mut n = 4096usize;
    let mut prev: Option<f64> = None;
    loop {
        let mut m = f64::INFINITY;
        let mut arg = 0.0;
        for i in 0..=n {
            let x = i as f64 / n as f64;
            let v = f.eval(x).abs();
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    x,
                    context: "minimum refinement".into(),
                });
            }
            if v < m {
                m = v;
                arg = x;
            }
        }
        let cell = 1.0 / n as f64;
        let (polished, _) = norms::golden_min(|x| f.eval(x).abs(), arg - cell, arg + cell);
        let est = polished.min(m);
        if let Some(p) = prev {
            if (est - p).abs() <= 1e-3 * est.max(f64::MIN_POSITIVE) || n >= (1 << 20) {
                return Ok(est);
            }
        }
        prev = Some(est);
        n *= 2;
    }
}

/// Arcs of constant flow direction between zero-set components.
pub fn phase_portrait(f: &VectorFieldExpr, opts: &AnalysisOpts) -> Result<PhasePortrait> {
    let set = find_fixed_points(f, opts)?;
    let mut arcs = Vec::new();
    if set.whole_circle_zero {
        return Ok(PhasePortrait {
            arcs,
            fixed_points: set,
        });
    }

    // Each component occupies [start, end] on the circle; points degenerate
    // to start == end.
    let mut components: Vec<(f64, f64)> = Vec::new();
    for p in &set.isolated {
        components.push((p.location.position(), p.location.position()));
    }
    for arc in &set.zero_intervals {
        components.push((arc.start.position(), arc.end.position()));
    }
    if let Some(acc) = &set.accumulation {
        components.push((acc.arc.start.position(), acc.arc.end.position()));
    }

    if components.is_empty() {
        let arc = Arc::full();
        let dir = direction_at(f, arc.midpoint());
        arcs.push((arc, dir));
        return Ok(PhasePortrait {
            arcs,
            fixed_points: set,
        });
    }

    components.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let m = components.len();
    for k in 0..m {
        let end_k = components[k].1;
        let start_next = components[(k + 1) % m].0;
        let gap = ccw_gap(wrap(end_k), wrap(start_next));
        if gap <= 1e-9 {
            continue;
        }
        let arc = Arc::from_raw(end_k, start_next);
        let dir = direction_at(f, arc.midpoint());
        arcs.push((arc, dir));
    }
    Ok(PhasePortrait {
        arcs,
        fixed_points: set,
    })
}

fn direction_at(f: &VectorFieldExpr, p: CirclePoint) -> Direction {
    if f.eval(p.position()) > 0.0 {
        Direction::Ccw
    } else {
        Direction::Cw
    }
}
