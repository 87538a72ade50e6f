//! Bump-based perturbation synthesis.
//!
//! Constructors build the compactly supported shapes (bump, plateau, double
//! bump, interval double bump); `size_sigma` scales any shape to fit a C¹
//! budget using its measured norm, never a closed-form estimate; and
//! `destabilize` / `stabilize` assemble, apply, and then re-verify complete
//! perturbations. Nothing is returned unverified: a result that fails its
//! own re-analysis is an error carrying the offending field.
//!
//! Shapes with an odd linear factor need the factor written in the local
//! chart. When the support crosses the seam at 0 ≡ 1, the product is laid
//! out piecewise with the offset constant adjusted per piece; the bump and
//! plateau factors wrap on their own.
//!
//! The odd shapes could equally be built from the derivative of a bump,
//! which has the same sign structure; only the linear-factor forms below
//! are provided.

use crate::analysis::{
    assess_with, find_fixed_points, AnalysisOpts, Diagnosis, FixedPointKind, FixedPointSet,
};
use crate::circle::{ccw_gap, wrap, Arc};
use crate::error::{Error, Result};
use crate::expr::{add_scaled, constant, Node, VectorFieldExpr};
use crate::norms::c1_dist;
use crate::norms::c1_norm;
use serde::Serialize;

const E: f64 = std::f64::consts::E;
/// Safety factor applied to every sized perturbation.
const SIZING_MARGIN: f64 = 0.9;
/// Components closer than this merge into one lift during stabilization.
const MERGE_GAP: f64 = 0.02;
/// An interval this close to another zero-set component is treated as
/// non-isolated.
const ISOLATION_GAP: f64 = 0.02;
const MAX_DELTA: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// A single bump erasing a tangential zero.
    LocalBump,
    /// An odd double bump splitting or hyperbolizing an inflection zero.
    DoubleBump,
    /// A plateau lift over a zero interval.
    PlateauLift,
    /// An odd plateau-carried factor for intervals with a sign change.
    IntervalDoubleBump,
    /// A wide bump chasing a zero accumulation.
    AccumulationBump,
    ConstantShift,
    Composite,
}

#[derive(Debug, Clone, Serialize)]
pub struct Perturbation {
    /// The unscaled shape, direction folded in.
    #[serde(serialize_with = "serialize_expr")]
    pub expr: VectorFieldExpr,
    pub sigma: f64,
    pub support: Arc,
    /// Measured C¹ norm of `sigma * expr`.
    pub measured_norm: f64,
    pub recipe: Recipe,
}

fn serialize_expr<S: serde::Serializer>(
    e: &VectorFieldExpr,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_canonical_text())
}

/// What a zero set looks like up to homeomorphism, as far as a scan can
/// tell: component counts by class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroSetClass {
    pub isolated: usize,
    pub intervals: usize,
    pub accumulation: bool,
    pub whole_circle: bool,
}

impl ZeroSetClass {
    pub fn of(set: &FixedPointSet) -> Self {
        ZeroSetClass {
            isolated: set.isolated.len(),
            intervals: set.zero_intervals.len(),
            accumulation: set.accumulation.is_some(),
            whole_circle: set.whole_circle_zero,
        }
    }

    /// A reason the two classes cannot be carried onto each other by any
    /// homeomorphism, when one is visible to the scan.
    pub fn certify_inequivalence(a: &ZeroSetClass, b: &ZeroSetClass) -> Option<String> {
        if a.whole_circle != b.whole_circle {
            return Some("one zero set is the whole circle and the other is not".into());
        }
        if a.intervals != b.intervals {
            return Some(format!(
                "zero-interval component counts differ: {} vs {}",
                a.intervals, b.intervals
            ));
        }
        if a.accumulation != b.accumulation {
            return Some("one zero set has an accumulation cluster and the other does not".into());
        }
        if !a.accumulation && a.intervals == 0 && a.isolated != b.isolated {
            return Some(format!(
                "isolated zero counts differ: {} vs {}",
                a.isolated, b.isolated
            ));
        }
        None
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequivalenceEvidence {
    pub original: ZeroSetClass,
    pub perturbed: ZeroSetClass,
    pub reason: String,
}

#[derive(Debug)]
pub struct DestabilizeResult {
    pub g: VectorFieldExpr,
    pub perturbation: Perturbation,
    pub evidence: InequivalenceEvidence,
}

#[derive(Debug)]
pub struct StabilizeResult {
    pub g: VectorFieldExpr,
    pub total_distance: f64,
    pub stages: Vec<Perturbation>,
}

/// The bump with peak e⁻¹ at `center` and support of the given radius.
pub fn make_bump(center: f64, radius: f64) -> Result<VectorFieldExpr> {
    if !(radius > 0.0) {
        return Err(Error::BadArgument("bump radius must be positive".into()));
    }
    if radius >= 0.5 {
        return Err(Error::BadArgument(
            "bump radius must be below 0.5 so the support is a proper arc".into(),
        ));
    }
    Ok(VectorFieldExpr::from_node(Node::Bump {
        center: wrap(center).position(),
        radius,
    }))
}

/// Flat-topped bump: e⁻¹ on `[a - d/2, b + d/2]`, zero outside
/// `(a - d, b + d)`.
pub fn make_plateau(a: f64, b: f64, delta: f64) -> Result<VectorFieldExpr> {
    let aw = wrap(a).position();
    let bw = aw + (b - a);
    if !(b > a) {
        return Err(Error::BadArgument("plateau requires a < b".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::BadArgument("plateau margin must be positive".into()));
    }
    if (b - a) + 2.0 * delta >= 1.0 {
        return Err(Error::BadArgument(
            "plateau support must be a proper arc of the circle".into(),
        ));
    }
    Ok(VectorFieldExpr::from_node(Node::Plateau {
        a: aw,
        b: bw,
        margin: delta,
    }))
}

/// The odd double bump `-2 (x - c) ψ(x) / (r e)`: zero at the center with
/// slope `-2/(r e²)`, odd about the center, supported with ψ.
pub fn make_double_bump(center: f64, radius: f64) -> Result<VectorFieldExpr> {
    make_bump(center, radius)?; // geometry checks
    let c = wrap(center).position();
    let coef = 2.0 / (radius * E);
    let bump = Node::Bump { center: c, radius };
    Ok(VectorFieldExpr::from_node(odd_product(
        c, radius, coef, bump,
    )))
}

/// The interval analog: the plateau times the centered odd factor,
/// normalized by 2/(e L) with L = (b - a) + delta.
pub fn make_interval_double(a: f64, b: f64, delta: f64) -> Result<VectorFieldExpr> {
    let plateau = make_plateau(a, b, delta)?;
    let aw = wrap(a).position();
    let bw = aw + (b - a);
    let mid = 0.5 * (aw + bw);
    let norm_len = (b - a) + delta;
    let coef = 2.0 / (E * norm_len);
    let half_support = 0.5 * (b - a) + delta;
    Ok(VectorFieldExpr::from_node(odd_product(
        mid,
        half_support,
        coef,
        plateau.root().clone(),
    )))
}

/// `-(coef) (x - center) * carrier`, with the odd factor written piecewise
/// when the support arc (center ± radius) crosses the seam.
fn odd_product(center: f64, radius: f64, coef: f64, carrier: Node) -> Node {
    use crate::expr::builder::{
        constant_node, mul, neg, offset_node, segments_to_piecewise, Segment,
    };
    let carrier_for_closure = carrier.clone();
    let make = move |shift: f64| {
        neg(mul(
            mul(constant_node(coef), offset_node(center + shift)),
            carrier_for_closure.clone(),
        ))
    };
    let lo = center - radius;
    let hi = center + radius;
    if lo >= 0.0 && hi <= 1.0 {
        make(0.0)
    } else {
        segments_to_piecewise(vec![Segment::new(lo, hi, make)])
    }
}

/// Scale that puts the measured norm of `sigma * p` strictly inside `eps`.
pub fn size_sigma(p: &VectorFieldExpr, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::BadArgument("budget must be positive".into()));
    }
    let norm = c1_norm(p)?.value;
    if !(norm > 0.0) {
        return Err(Error::BadArgument(
            "perturbation shape has zero norm".into(),
        ));
    }
    Ok(SIZING_MARGIN * eps / norm)
}

/// Support of a shape built by the constructors above.
fn bump_support(center: f64, radius: f64) -> Arc {
    Arc::from_raw(center - radius, center + radius)
}

fn plateau_support(a: f64, b: f64, delta: f64) -> Arc {
    Arc::from_raw(a - delta, b + delta)
}

/// Distance from a point to a component span, zero when inside.
fn dist_to_span(p: f64, span: (f64, f64)) -> f64 {
    let arc = Arc::from_raw(span.0, span.1 + 1e-15);
    let w = wrap(p);
    if arc.contains(w) || wrap(span.1) == w {
        0.0
    } else {
        ccw_gap(wrap(span.1), w).min(ccw_gap(w, wrap(span.0)))
    }
}

/// All component spans of a zero set as (start, end) pairs on the circle;
/// points degenerate to zero-length spans.
fn component_spans(set: &FixedPointSet) -> Vec<(f64, f64)> {
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for p in &set.isolated {
        spans.push((p.location.position(), p.location.position()));
    }
    for arc in &set.zero_intervals {
        spans.push((arc.start.position(), arc.end.position()));
    }
    if let Some(acc) = &set.accumulation {
        spans.push((acc.arc.start.position(), acc.arc.end.position()));
    }
    spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    spans
}

/// Half the clearance from `p` to every other component, capped.
fn isolation_delta(p: f64, set: &FixedPointSet) -> f64 {
    let mut gap = f64::INFINITY;
    for span in component_spans(set) {
        let d = dist_to_span(p, span);
        if d > 1e-12 {
            gap = gap.min(d);
        }
    }
    if gap.is_finite() {
        (0.45 * gap).min(MAX_DELTA)
    } else {
        MAX_DELTA
    }
}

/// Sign of f on the louder side of a probe window.
fn probe_sign(f: &VectorFieldExpr, lo: f64, hi: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..=64 {
        let x = lo + (hi - lo) * i as f64 / 64.0;
        let v = f.eval(x);
        if v.abs() > best.abs() {
            best = v;
        }
    }
    if best >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn count_isolated_in(set: &FixedPointSet, arc: &Arc) -> usize {
    set.isolated
        .iter()
        .filter(|p| arc.contains(p.location))
        .count()
}

fn count_hyperbolic_in(set: &FixedPointSet, arc: &Arc) -> usize {
    set.isolated
        .iter()
        .filter(|p| {
            arc.contains(p.location)
                && matches!(
                    p.kind,
                    FixedPointKind::HyperbolicRepeller | FixedPointKind::HyperbolicAttractor
                )
        })
        .count()
}

/// Synthesizes a verified perturbation that breaks the phase portrait of an
/// unstable field: the returned `g` is within `eps` of `f` in C¹ and its
/// zero set is of a different class.
pub fn destabilize(
    f: &VectorFieldExpr,
    eps: f64,
    opts: &AnalysisOpts,
) -> Result<DestabilizeResult> {
    if !(eps > 0.0) {
        return Err(Error::BadArgument("budget must be positive".into()));
    }
    let fset = find_fixed_points(f, opts)?;
    let verdict = assess_with(f, &fset)?;
    if verdict.stable {
        return Err(Error::StableInput);
    }

    let p = match &verdict.diagnosis {
        Diagnosis::WholeCircleZero => {
            let sigma = SIZING_MARGIN * eps;
            Perturbation {
                expr: constant(1.0),
                sigma,
                support: Arc::full(),
                measured_norm: sigma,
                recipe: Recipe::ConstantShift,
            }
        }
        Diagnosis::TangentialZero { at } => {
            let delta = isolation_delta(at.position(), &fset);
            let sign = probe_sign(
                f,
                at.position() - 0.75 * delta,
                at.position() + 0.75 * delta,
            );
            let shape = crate::expr::scale(sign, &make_bump(at.position(), delta)?);
            sized(
                shape,
                bump_support(at.position(), delta),
                Recipe::LocalBump,
                eps,
            )?
        }
        Diagnosis::InflectionZero { at } => {
            // The added slope opposes the crossing so the zero splits in
            // three.
            let delta = isolation_delta(at.position(), &fset);
            let dir = probe_sign(f, at.position() + 0.1 * delta, at.position() + 0.9 * delta);
            let shape = crate::expr::scale(dir, &make_double_bump(at.position(), delta)?);
            sized(
                shape,
                bump_support(at.position(), delta),
                Recipe::DoubleBump,
                eps,
            )?
        }
        Diagnosis::ZeroInterval { arc } => interval_recipe(f, &fset, arc, eps)?,
        Diagnosis::ZeroAccumulation { .. } => {
            let acc = fset.accumulation.as_ref().expect("diagnosis carries it");
            let len = acc.arc.length();
            // Centered at the limit; the support blankets the whole
            // resolved cluster whichever way it extends.
            let radius = (1.15 * len + 0.02).min(0.45);
            let center = acc.limit.position();
            let sign = probe_sign(
                f,
                acc.arc.end.position() + 0.005,
                acc.arc.end.position() + 0.05,
            );
            let shape = crate::expr::scale(sign, &make_bump(center, radius)?);
            sized(
                shape,
                bump_support(center, radius),
                Recipe::AccumulationBump,
                eps,
            )?
        }
        Diagnosis::NoFixedPoints | Diagnosis::AllHyperbolic => unreachable!("stable diagnoses"),
    };

    let g = add_scaled(f, p.sigma, &p.expr);
    verify_destabilize(f, &fset, &g, &p, eps, opts)
}

/// Builds, sizes, and measures one localized shape.
fn sized(shape: VectorFieldExpr, support: Arc, recipe: Recipe, eps: f64) -> Result<Perturbation> {
    let sigma = size_sigma(&shape, eps)?;
    let measured = c1_norm(&crate::expr::scale(sigma, &shape))?.value;
    Ok(Perturbation {
        expr: shape,
        sigma,
        support,
        measured_norm: measured,
        recipe,
    })
}

/// Zero-interval recipes. An isolated interval takes the covering lift from
/// the construction; an interval crowding other components is split from
/// the inside instead, which still changes the component count.
fn interval_recipe(
    f: &VectorFieldExpr,
    fset: &FixedPointSet,
    arc: &Arc,
    eps: f64,
) -> Result<Perturbation> {
    let start = arc.start.position();
    let len = arc.length();
    let mut side_gap = f64::INFINITY;
    for span in component_spans(fset) {
        // Skip the interval itself.
        if wrap(span.0) == arc.start {
            continue;
        }
        let to_start = ccw_gap(wrap(span.1), arc.start);
        let from_end = ccw_gap(arc.end, wrap(span.0));
        side_gap = side_gap.min(to_start).min(from_end);
    }

    if side_gap > ISOLATION_GAP {
        // Covering lift.
        let free = if side_gap.is_finite() {
            side_gap
        } else {
            1.0 - len
        };
        let delta = (0.4 * free).min(MAX_DELTA).min(0.45 * (1.0 - len));
        let sl = probe_sign(f, start - delta, start - 0.01 * delta);
        let sr = probe_sign(f, start + len + 0.01 * delta, start + len + delta);
        if sl == sr {
            let shape = crate::expr::scale(sl, &make_plateau(start, start + len, delta)?);
            sized(
                shape,
                plateau_support(start, start + len, delta),
                Recipe::PlateauLift,
                eps,
            )
        } else {
            let dir = -sl;
            let shape = crate::expr::scale(dir, &make_interval_double(start, start + len, delta)?);
            sized(
                shape,
                plateau_support(start, start + len, delta),
                Recipe::IntervalDoubleBump,
                eps,
            )
        }
    } else {
        // Interior split: a positive plateau strictly inside the interval
        // leaves two residual interval components.
        let a_in = start + 0.3 * len;
        let b_in = start + 0.7 * len;
        let delta = (0.1 * len).min(MAX_DELTA);
        let shape = make_plateau(
            wrap(a_in).position(),
            wrap(a_in).position() + (b_in - a_in),
            delta,
        )?;
        sized(
            shape,
            plateau_support(a_in, b_in, delta),
            Recipe::PlateauLift,
            eps,
        )
    }
}

fn verify_destabilize(
    f: &VectorFieldExpr,
    fset: &FixedPointSet,
    g: &VectorFieldExpr,
    p: &Perturbation,
    eps: f64,
    opts: &AnalysisOpts,
) -> Result<DestabilizeResult> {
    let dist = c1_dist(f, g)?.value;
    if !(dist < eps) {
        return Err(Error::VerificationFailed {
            detail: format!("measured distance {dist:e} is not below the budget {eps:e}"),
            field_text: g.to_canonical_text(),
        });
    }
    let gset = find_fixed_points(g, opts)?;
    let original = ZeroSetClass::of(fset);
    let perturbed = ZeroSetClass::of(&gset);
    let reason = match ZeroSetClass::certify_inequivalence(&original, &perturbed) {
        Some(r) => r,
        None => {
            return Err(Error::VerificationFailed {
                detail: format!(
                    "zero-set class did not visibly change: {original:?} vs {perturbed:?}"
                ),
                field_text: g.to_canonical_text(),
            })
        }
    };

    // Recipe postconditions on the support arc.
    let support_ok = match p.recipe {
        Recipe::LocalBump => {
            count_isolated_in(&gset, &p.support) < count_isolated_in(fset, &p.support).max(1)
        }
        Recipe::DoubleBump => {
            count_hyperbolic_in(&gset, &p.support) == 3 && count_isolated_in(&gset, &p.support) == 3
        }
        Recipe::IntervalDoubleBump => count_hyperbolic_in(&gset, &p.support) == 3,
        Recipe::PlateauLift | Recipe::AccumulationBump | Recipe::ConstantShift => {
            gset.accumulation.is_none() || p.recipe == Recipe::PlateauLift
        }
        Recipe::Composite => true,
    };
    if !support_ok {
        return Err(Error::VerificationFailed {
            detail: format!(
                "recipe {:?} postcondition failed on the support arc",
                p.recipe
            ),
            field_text: g.to_canonical_text(),
        });
    }

    Ok(DestabilizeResult {
        g: g.clone(),
        perturbation: p.clone(),
        evidence: InequivalenceEvidence {
            original,
            perturbed,
            reason,
        },
    })
}

/// Degenerate components (intervals and accumulation arcs) merged into
/// covering spans when they crowd each other.
fn degenerate_groups(set: &FixedPointSet) -> Vec<(f64, f64)> {
    // Spans are (start, start + length): the end coordinate stays unwrapped
    // so arithmetic along the span works across the seam.
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for arc in &set.zero_intervals {
        spans.push((arc.start.position(), arc.start.position() + arc.length()));
    }
    if let Some(acc) = &set.accumulation {
        spans.push((
            acc.arc.start.position(),
            acc.arc.start.position() + acc.arc.length(),
        ));
    }
    if spans.is_empty() {
        return spans;
    }
    spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Merge circularly while the ccw gap between consecutive spans is small.
    let mut merged = true;
    while merged && spans.len() > 1 {
        merged = false;
        let m = spans.len();
        for k in 0..m {
            let next = (k + 1) % m;
            let gap = ccw_gap(wrap(spans[k].1), wrap(spans[next].0));
            if gap < MERGE_GAP {
                // Extend span k to swallow `next`.
                let hull_len = ccw_gap(wrap(spans[k].0), wrap(spans[next].1));
                let new = (spans[k].0, spans[k].0 + hull_len);
                spans[k] = new;
                spans.remove(next);
                merged = true;
                break;
            }
        }
    }
    spans
}

/// Stabilizes a field: removes zero intervals and accumulation clusters
/// with covering lifts (first half of the budget), then hyperbolizes the
/// remaining degenerate isolated zeros (second half). The result is
/// re-assessed and must come out stable within the budget.
pub fn stabilize(f: &VectorFieldExpr, eps: f64, opts: &AnalysisOpts) -> Result<StabilizeResult> {
    if !(eps > 0.0) {
        return Err(Error::BadArgument("budget must be positive".into()));
    }
    let fset = find_fixed_points(f, opts)?;
    let verdict = assess_with(f, &fset)?;
    if verdict.stable {
        return Ok(StabilizeResult {
            g: f.clone(),
            total_distance: 0.0,
            stages: Vec::new(),
        });
    }

    let mut g = f.clone();
    let mut stages: Vec<Perturbation> = Vec::new();

    // Stage 1: erase uncountable and accumulating zero structure.
    if fset.whole_circle_zero {
        let sigma = SIZING_MARGIN * 0.5 * eps;
        let shape = constant(1.0);
        g = add_scaled(&g, sigma, &shape);
        stages.push(Perturbation {
            expr: shape,
            sigma,
            support: Arc::full(),
            measured_norm: sigma,
            recipe: Recipe::ConstantShift,
        });
    } else {
        let groups = degenerate_groups(&fset);
        if !groups.is_empty() {
            let budget = 0.5 * eps / groups.len() as f64;
            for (a, b_raw) in &groups {
                let p = group_lift(&g, &groups, (*a, *b_raw), budget)?;
                g = add_scaled(&g, p.sigma, &p.expr);
                stages.push(p);
            }
        }
    }

    // Stage 2: hyperbolize what is left.
    let mid_set = find_fixed_points(&g, opts)?;
    if mid_set.whole_circle_zero
        || !mid_set.zero_intervals.is_empty()
        || mid_set.accumulation.is_some()
    {
        return Err(Error::VerificationFailed {
            detail: "stage-1 lifts left non-isolated zero structure".into(),
            field_text: g.to_canonical_text(),
        });
    }
    let degenerate: Vec<_> = mid_set
        .isolated
        .iter()
        .filter(|p| {
            matches!(
                p.kind,
                FixedPointKind::Tangential | FixedPointKind::InflectionDegenerate
            )
        })
        .cloned()
        .collect();
    if !degenerate.is_empty() {
        let budget = 0.5 * eps / degenerate.len() as f64;
        for point in &degenerate {
            let at = point.location.position();
            let delta = isolation_delta(at, &mid_set).max(1e-5);
            let p = match point.kind {
                FixedPointKind::Tangential => {
                    let sign = probe_sign(&g, at - 0.75 * delta, at + 0.75 * delta);
                    let shape = crate::expr::scale(sign, &make_bump(at, delta)?);
                    sized(shape, bump_support(at, delta), Recipe::LocalBump, budget)?
                }
                FixedPointKind::InflectionDegenerate => {
                    // Reinforce the crossing: one hyperbolic zero remains.
                    let dir = probe_sign(&g, at + 0.1 * delta, at + 0.9 * delta);
                    let shape = crate::expr::scale(-dir, &make_double_bump(at, delta)?);
                    sized(shape, bump_support(at, delta), Recipe::DoubleBump, budget)?
                }
                _ => unreachable!(),
            };
            g = add_scaled(&g, p.sigma, &p.expr);
            stages.push(p);
        }
    }

    // Final verification.
    let final_set = find_fixed_points(&g, opts)?;
    let final_verdict = assess_with(&g, &final_set)?;
    if !final_verdict.stable {
        return Err(Error::VerificationFailed {
            detail: format!(
                "stabilization left an unstable field: {:?}",
                final_verdict.diagnosis
            ),
            field_text: g.to_canonical_text(),
        });
    }
    let total_distance = c1_dist(f, &g)?.value;
    if !(total_distance < eps) {
        return Err(Error::VerificationFailed {
            detail: format!(
                "total measured distance {total_distance:e} is not below the budget {eps:e}"
            ),
            field_text: g.to_canonical_text(),
        });
    }
    Ok(StabilizeResult {
        g,
        total_distance,
        stages,
    })
}

/// One covering lift for a merged degenerate span.
fn group_lift(
    g: &VectorFieldExpr,
    groups: &[(f64, f64)],
    span: (f64, f64),
    budget: f64,
) -> Result<Perturbation> {
    let (a, b) = span;
    let len = b - a;
    // Clearance to the neighboring groups (or the whole complement).
    let mut left_gap = 1.0 - len;
    let mut right_gap = 1.0 - len;
    for other in groups {
        if (other.0 - a).abs() < 1e-12 {
            continue;
        }
        left_gap = left_gap.min(ccw_gap(wrap(other.1), wrap(a)));
        right_gap = right_gap.min(ccw_gap(wrap(b), wrap(other.0)));
    }
    let delta = (0.4 * left_gap.min(right_gap))
        .min(MAX_DELTA)
        .min(0.45 * (1.0 - len));
    if delta < 1e-4 {
        return Err(Error::VerificationFailed {
            detail: format!("no room for a covering lift around the degenerate span [{a}, {b}]"),
            field_text: g.to_canonical_text(),
        });
    }
    let sl = probe_sign(g, a - delta, a - 0.01 * delta);
    let sr = probe_sign(g, b + 0.01 * delta, b + delta);
    let aw = wrap(a).position();
    if sl == sr {
        let shape = crate::expr::scale(sl, &make_plateau(aw, aw + len, delta)?);
        sized(
            shape,
            plateau_support(a, b, delta),
            Recipe::PlateauLift,
            budget,
        )
    } else {
        let dir = -sl;
        let shape = crate::expr::scale(dir, &make_interval_double(aw, aw + len, delta)?);
        sized(
            shape,
            plateau_support(a, b, delta),
            Recipe::IntervalDoubleBump,
            budget,
        )
    }
}
