//! Partition classes of matrix powers.
//!
//! For `B` realizing a source arc and `c` with `K(source)^c = K(target)`,
//! `B^c` realizes the target arc and its partition class is a function of
//! the partition class of `B`. The `predict_*` functions compute it, the
//! `decide_*` functions invert it, and [`oracle_power_partition`] checks
//! both by multiplying exact matrices.

use num_integer::Integer;
use serde::Serialize;

use crate::arc_powers::{power_sources, power_targets, PowerRelation};
use crate::error::{Error, Result};
use crate::farey::{arc_params, mod_index, ArcId, ArcType};
use crate::poly::rat;
use crate::realizations::{build, partition_class_of, PartitionClass};

/// Largest order the exact oracle accepts.
pub const ORACLE_MAX_N: i64 = 64;

/// Partition data of the source matrix `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum SourcePartition {
    /// Type I realizations have no partition.
    TypeI,
    Class(PartitionClass),
}

impl std::fmt::Display for SourcePartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourcePartition::TypeI => f.write_str("Type I"),
            SourcePartition::Class(c) => c.fmt(f),
        }
    }
}

/// Intermediate grids, `d̂ × c`, row-major.
///
/// `grid` is `Z` (or `Y`), `primed` is `Z′` (or `Y′`): column `j` of
/// `primed` is the `j`-th lap of the long cycle through the rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerWork {
    pub grid: Vec<Vec<i64>>,
    pub primed: Vec<Vec<i64>>,
    /// `w_i` or `u_i`.
    pub base: Vec<i64>,
    /// `β_i`.
    pub beta: Vec<i64>,
    /// `γ_0, …, γ_d̂` for Type III targets, empty otherwise.
    pub gamma: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerPrediction {
    pub source_arc: ArcId,
    pub target_arc: ArcId,
    pub c: i64,
    pub source_partition: SourcePartition,
    pub target_partition: PartitionClass,
    /// `vec(Z′)ᵀ`, the representative the grids produce.
    pub ordered: Vec<i64>,
    pub work: PowerWork,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerDecision {
    pub target_arc: ArcId,
    pub c: i64,
    pub verdict: bool,
    /// Every source partition whose power lands in the queried class.
    pub witnesses: Vec<SourcePartition>,
}

impl PowerDecision {
    pub fn witness(&self) -> Option<&SourcePartition> {
        self.witnesses.first()
    }
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn arc_of_type(n: i64, a: i64, b: i64, want: ArcType, role: &str) -> Result<ArcId> {
    let arc = ArcId::new(n, a, b).map_err(|e| precondition(format!("{role} arc: {e}")))?;
    let found = arc_params(arc).arc_type;
    if found != want {
        return Err(precondition(format!(
            "{role} arc {arc} is {}, expected {}",
            found.name(),
            want.name()
        )));
    }
    Ok(arc)
}

fn check_parts(parts: &[i64], len: i64, what: &str) -> Result<i64> {
    if parts.len() as i64 != len {
        return Err(precondition(format!("{what} needs {len} parts, got {}", parts.len())));
    }
    if let Some(p) = parts.iter().find(|&&p| p < 0) {
        return Err(precondition(format!("{what} has negative part {p}")));
    }
    Ok(parts.iter().sum())
}

/// Walks the long cycle: after row `i` the column moves back by `shift[i]`.
fn follow(grid: &[Vec<i64>], shift: &[i64], c: i64) -> Result<Vec<Vec<i64>>> {
    let rows = grid.len();
    let mut primed = vec![vec![0; c as usize]; rows];
    let mut seen = vec![vec![false; c as usize]; rows];
    let mut j = 1;
    for lap in 0..c as usize {
        for i in 0..rows {
            let col = (j - 1) as usize;
            if std::mem::replace(&mut seen[i][col], true) {
                return Err(precondition("the parts do not close into a single cycle"));
            }
            primed[i][lap] = grid[i][col];
            j = mod_index(j - shift[i], c);
        }
    }
    Ok(primed)
}

fn flatten_columns(primed: &[Vec<i64>]) -> Vec<i64> {
    let cols = primed.first().map_or(0, Vec::len);
    (0..cols).flat_map(|j| primed.iter().map(move |row| row[j])).collect()
}

/// `Z` with rows `(w_i, …, w_i, w_i + 1, …)`, `β_i` copies of `w_i`.
fn type_ii_work(c: i64, z_hat: &[i64]) -> Result<PowerWork> {
    let mut base = Vec::new();
    let mut beta = Vec::new();
    let mut grid = Vec::new();
    for &z in z_hat {
        let r = mod_index(z, c);
        let (b, w) = (c - r, (z - r) / c);
        grid.push((1..=c).map(|j| if j <= b { w } else { w + 1 }).collect());
        base.push(w);
        beta.push(b);
    }
    let primed = follow(&grid, &beta, c)?;
    Ok(PowerWork { grid, primed, base, beta, gamma: Vec::new() })
}

/// `Y` with `u_i + 1` in the `β_i` cells after `γ_{i-1}`, `u_i` elsewhere.
fn type_iii_work(c: i64, y: i64, y_hat: &[i64]) -> Result<PowerWork> {
    let mut base = Vec::new();
    let mut beta = Vec::new();
    let mut gamma = vec![0];
    let mut grid = Vec::new();
    for &v in y_hat {
        let (u, b) = v.div_mod_floor(&c);
        let g = *gamma.last().expect("γ_0 is set");
        let mut row = vec![u; c as usize];
        for t in 1..=b {
            row[(mod_index(g + t, c) - 1) as usize] = u + 1;
        }
        grid.push(row);
        base.push(u);
        beta.push(b);
        gamma.push((g + b) % c);
    }
    let mut shift = vec![0; y_hat.len()];
    *shift.last_mut().expect("at least one row") = y;
    let primed = follow(&grid, &shift, c)?;
    Ok(PowerWork { grid, primed, base, beta, gamma })
}

fn finish(source_arc: ArcId, target_arc: ArcId, c: i64, source_partition: SourcePartition, work: PowerWork) -> Result<PowerPrediction> {
    let ordered = flatten_columns(&work.primed);
    Ok(PowerPrediction {
        source_arc,
        target_arc,
        c,
        source_partition,
        target_partition: PartitionClass::new(ordered.clone())?,
        ordered,
        work,
    })
}

fn check_excess(excess: i64, q: i64, modulus: i64, name: &str) -> Result<()> {
    if !(1..q).contains(&excess) {
        return Err(precondition(format!("{name} = {excess} must lie in 1..={}", q - 1)));
    }
    if excess.gcd(&modulus) != 1 {
        return Err(precondition(format!("gcd({modulus}, {name} = {excess}) must be 1")));
    }
    Ok(())
}

/// `P_II(B^d)` for `B` on the Type I arc `K_{qd}(qd - z, qd)`.
pub fn predict_ti_to_tii(q: i64, d: i64, z: i64) -> Result<PowerPrediction> {
    if q < 2 || d < 2 {
        return Err(precondition(format!("need q >= 2 and d >= 2, got q = {q}, d = {d}")));
    }
    let n = q.checked_mul(d).ok_or(Error::Overflow("n = q d"))?;
    check_excess(z, q, n, "z")?;
    let source = arc_of_type(n, n - z, n, ArcType::TypeI, "source")?;
    let target = arc_of_type(n, q, n - z, ArcType::TypeII, "target")?;
    finish(source, target, d, SourcePartition::TypeI, type_ii_work(d, &[z])?)
}

/// `P_II(B^c)` for `B` on `K_n(cq, n - z)`, `n = c d̂ q`, with partition `ẑ`.
pub fn predict_tii_to_tii(q: i64, c: i64, d_hat: i64, z_hat: &[i64]) -> Result<PowerPrediction> {
    if q < 2 || c < 1 || d_hat < 2 {
        return Err(precondition(format!(
            "need q >= 2, c >= 1 and d̂ >= 2, got q = {q}, c = {c}, d̂ = {d_hat}"
        )));
    }
    let z = check_parts(z_hat, d_hat, "ẑ")?;
    let n = q
        .checked_mul(c)
        .and_then(|v| v.checked_mul(d_hat))
        .ok_or(Error::Overflow("n = c d̂ q"))?;
    check_excess(z, q, c * q, "z")?;
    let source = arc_of_type(n, c * q, n - z, ArcType::TypeII, "source")?;
    let target = arc_of_type(n, q, n - z, ArcType::TypeII, "target")?;
    let class = PartitionClass::new(z_hat.to_vec())?;
    finish(source, target, c, SourcePartition::Class(class), type_ii_work(c, z_hat)?)
}

/// `P_III(B^c)` for `B` on `K_n(cq, n)`, `n = q c d̂ + y`, with partition `ŷ`.
pub fn predict_tiii_to_tiii(q: i64, c: i64, d_hat: i64, y: i64, y_hat: &[i64]) -> Result<PowerPrediction> {
    if q < 2 || c < 1 || d_hat < 2 {
        return Err(precondition(format!(
            "need q >= 2, c >= 1 and d̂ >= 2, got q = {q}, c = {c}, d̂ = {d_hat}"
        )));
    }
    let sum = check_parts(y_hat, d_hat, "ŷ")?;
    if sum != y {
        return Err(precondition(format!("ŷ sums to {sum}, expected y = {y}")));
    }
    let n = q
        .checked_mul(c)
        .and_then(|v| v.checked_mul(d_hat))
        .and_then(|v| v.checked_add(y))
        .ok_or(Error::Overflow("n = q c d̂ + y"))?;
    check_excess(y, q, c * q, "y")?;
    let source = arc_of_type(n, c * q, n, ArcType::TypeIII, "source")?;
    let target = arc_of_type(n, q, n, ArcType::TypeIII, "target")?;
    let class = PartitionClass::new(y_hat.to_vec())?;
    finish(source, target, c, SourcePartition::Class(class), type_iii_work(c, y, y_hat)?)
}

/// `P_III(B^d)` for `B` on the Type I arc `K_n(qd, n)`, `n = qd + y`.
pub fn predict_ti_to_tiii(q: i64, d: i64, y: i64) -> Result<PowerPrediction> {
    if q < 2 || d < 2 {
        return Err(precondition(format!("need q >= 2 and d >= 2, got q = {q}, d = {d}")));
    }
    let qd = q.checked_mul(d).ok_or(Error::Overflow("q d"))?;
    let n = qd.checked_add(y).ok_or(Error::Overflow("n = q d + y"))?;
    check_excess(y, q, qd, "y")?;
    let source = arc_of_type(n, qd, n, ArcType::TypeI, "source")?;
    let target = arc_of_type(n, q, n, ArcType::TypeIII, "target")?;
    finish(source, target, d, SourcePartition::TypeI, type_iii_work(d, y, &[y])?)
}

/// Dispatches on the types of a relation's arcs.
pub fn predict(rel: &PowerRelation, source_parts: Option<&[i64]>) -> Result<PowerPrediction> {
    let (src, tgt) = (arc_params(rel.source), arc_params(rel.target));
    let q = rel.target.q();
    let c = rel.c;
    let parts = || source_parts.ok_or_else(|| precondition("source partition required"));
    match (src.arc_type, tgt.arc_type) {
        (ArcType::TypeI, ArcType::TypeII) => predict_ti_to_tii(q, c, tgt.excess),
        (ArcType::TypeI, ArcType::TypeIII) => predict_ti_to_tiii(q, c, tgt.excess),
        (ArcType::TypeII, ArcType::TypeII) => predict_tii_to_tii(q, c, src.d, parts()?),
        (ArcType::TypeIII, ArcType::TypeIII) => predict_tiii_to_tiii(q, c, src.d, tgt.excess, parts()?),
        (s, t) => Err(precondition(format!(
            "no partition rule from {} to {} ({} = {}^{c})",
            s.name(),
            t.name(),
            rel.target,
            rel.source
        ))),
    }
}

fn rotations(v: &[i64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    (0..v.len()).map(move |k| v[k..].iter().chain(&v[..k]).copied().collect())
}

/// Shared driver of both corollaries.
///
/// For each rotation of `parts`, reads the `d̂` residue tracks, derives the
/// only candidate source partition they allow, and keeps it when its
/// prediction reproduces the queried class.
fn decide(
    target: ArcId,
    want: ArcType,
    c: i64,
    parts: &[i64],
    witness_of_track: impl Fn(i64, i64, usize) -> i64,
    run: impl Fn(&PowerRelation, &[i64]) -> Result<PowerPrediction>,
) -> Result<PowerDecision> {
    let params = arc_params(target);
    if params.arc_type != want {
        return Err(Error::WrongArcType {
            n: target.n(),
            q: target.q(),
            s: target.s(),
            expected: want.name(),
            found: params.arc_type.name(),
        });
    }
    let sum = check_parts(parts, params.d, "partition")
        .map_err(|e| Error::InvalidPartition(e.to_string()))?;
    if sum != params.excess {
        return Err(Error::InvalidPartition(format!(
            "partition sums to {sum}, expected {}",
            params.excess
        )));
    }
    let class = PartitionClass::new(parts.to_vec())?;
    if c == 1 {
        return Ok(PowerDecision {
            target_arc: target,
            c,
            verdict: true,
            witnesses: vec![SourcePartition::Class(class)],
        });
    }
    let rel = power_sources(target)
        .into_iter()
        .find(|r| r.c == c)
        .ok_or_else(|| Error::NoPowerRelation(format!("{target} is not a power with exponent {c}")))?;
    let d_hat = (params.d / c) as usize;
    let mut witnesses: Vec<SourcePartition> = Vec::new();
    for rot in rotations(parts) {
        let mut hat = Vec::with_capacity(d_hat);
        for i in 0..d_hat {
            let track: Vec<i64> = rot.iter().skip(i).step_by(d_hat).copied().collect();
            let (lo, hi) = (track.iter().min().copied().unwrap_or(0), track.iter().max().copied().unwrap_or(0));
            if hi - lo > 1 {
                break;
            }
            let low_count = track.iter().filter(|&&v| v == lo).count();
            hat.push(witness_of_track(lo, hi, low_count));
        }
        if hat.len() != d_hat {
            continue;
        }
        let pred = run(&rel, &hat)?;
        if pred.target_partition == class && !witnesses.contains(&pred.source_partition) {
            witnesses.push(pred.source_partition);
        }
    }
    Ok(PowerDecision {
        target_arc: target,
        c,
        verdict: !witnesses.is_empty(),
        witnesses,
    })
}

/// Is a Type II realization with this partition a `c`-th power?
///
/// A track whose parts are all equal to `v` is read as `w + 1 = v`, so it
/// contributes `ẑ_i = c v`.
pub fn decide_power_tii(target: ArcId, c: i64, parts: &[i64]) -> Result<PowerDecision> {
    decide(
        target,
        ArcType::TypeII,
        c,
        parts,
        |lo, hi, low| {
            // ẑ_i = c (w_i + 1) - β_i
            if lo == hi {
                c * lo
            } else {
                c * (lo + 1) - low as i64
            }
        },
        |rel, hat| predict(rel, Some(hat)),
    )
}

/// Is a Type III realization with this partition a `c`-th power?
///
/// A track whose parts are all equal to `v` is read as `u = v`.
pub fn decide_power_tiii(target: ArcId, c: i64, parts: &[i64]) -> Result<PowerDecision> {
    decide(
        target,
        ArcType::TypeIII,
        c,
        parts,
        |lo, hi, low| {
            // ŷ_i = c u_i + β_i
            if lo == hi {
                c * lo
            } else {
                c * lo + (c - low as i64)
            }
        },
        |rel, hat| predict(rel, Some(hat)),
    )
}

/// `P(B^c)` by brute force: builds `B` with `α = 1/2`, multiplies exactly and
/// reads the partition off the cycles of `Γ(B^c)`.
pub fn oracle_power_partition(source: ArcId, source_parts: Option<&[i64]>, c: i64) -> Result<PartitionClass> {
    if source.n() > ORACLE_MAX_N {
        return Err(Error::BudgetExceeded {
            what: "order for the matrix-power oracle",
            value: source.n() as usize,
            limit: ORACLE_MAX_N as usize,
        });
    }
    let target = if c == 1 {
        source
    } else {
        power_targets(source)
            .into_iter()
            .find(|r| r.c == c)
            .map(|r| r.target)
            .ok_or_else(|| Error::NoPowerRelation(format!("{source}^{c} is not an arc")))?
    };
    let b = build(source, source_parts, &rat(1, 2))?;
    partition_class_of(&b.pow(c as usize), target)
}
