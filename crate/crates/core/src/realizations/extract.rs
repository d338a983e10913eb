use std::collections::HashMap;

use super::matrix::SparseStochasticMatrix;
use super::partition::PartitionClass;
use crate::digraph::{CycleBudget, Digraph, SimpleCycle};
use crate::error::{Error, Result};
use crate::farey::{arc_params, ArcId, ArcType};

/// Vertex cap for extraction; the cycle cap of `d + 2` keeps it cheap.
const EXTRACT_MAX_VERTICES: usize = 100_000;

/// `P_II(A)` or `P_III(A)` read off the digraph of `m`.
///
/// Also checks that all `q`-cycles carry the same weight.
pub fn partition_class_of(m: &SparseStochasticMatrix, arc: ArcId) -> Result<PartitionClass> {
    let census = cycle_census(&m.digraph(), arc)?;
    let first = &census.q_cycles[0].weight;
    if census.q_cycles.iter().any(|c| &c.weight != first) {
        return Err(Error::Structure("q-cycles carry different weights".into()));
    }
    census.partition()
}

/// As [`partition_class_of`], from the support alone.
pub fn partition_class_of_digraph(g: &Digraph, arc: ArcId) -> Result<PartitionClass> {
    cycle_census(g, arc)?.partition()
}

struct Census {
    arc_type: ArcType,
    q: usize,
    q_cycles: Vec<SimpleCycle>,
    long: SimpleCycle,
}

fn cycle_census(g: &Digraph, arc: ArcId) -> Result<Census> {
    let params = arc_params(arc);
    if !matches!(params.arc_type, ArcType::TypeII | ArcType::TypeIII) {
        return Err(Error::WrongArcType {
            n: arc.n(),
            q: arc.q(),
            s: arc.s(),
            expected: "Type II or Type III",
            found: params.arc_type.name(),
        });
    }
    let (n, q, s, d) = (arc.n() as usize, arc.q() as usize, arc.s() as usize, params.d as usize);
    if g.n_vertices() != n {
        return Err(Error::Structure(format!(
            "digraph has {} vertices, expected {n}",
            g.n_vertices()
        )));
    }
    let budget = CycleBudget {
        max_vertices: EXTRACT_MAX_VERTICES,
        max_cycles: d + 2,
    };
    let cycles = g.enumerate_simple_cycles(budget).map_err(|e| match e {
        Error::BudgetExceeded { what: "simple cycles", .. } => {
            Error::Structure(format!("more than {} cycles", d + 1))
        }
        other => other,
    })?;
    let (q_cycles, rest): (Vec<SimpleCycle>, Vec<SimpleCycle>) =
        cycles.into_iter().partition(|c| c.len() == q);
    if q_cycles.len() != d {
        return Err(Error::Structure(format!(
            "found {} cycles of length {q}, expected {d}",
            q_cycles.len()
        )));
    }
    let [long] = <[SimpleCycle; 1]>::try_from(rest).map_err(|rest| {
        let lens: Vec<usize> = rest.iter().map(SimpleCycle::len).collect();
        Error::Structure(format!("expected one {s}-cycle besides the q-cycles, found lengths {lens:?}"))
    })?;
    if long.len() != s {
        return Err(Error::Structure(format!(
            "long cycle has length {}, expected {s}",
            long.len()
        )));
    }
    let mut owner = vec![usize::MAX; n + 1];
    for (i, c) in q_cycles.iter().enumerate() {
        for &v in &c.vertices {
            if owner[v] != usize::MAX {
                return Err(Error::Structure(format!("vertex {v} lies on two q-cycles")));
            }
            owner[v] = i;
        }
    }
    Ok(Census {
        arc_type: params.arc_type,
        q,
        q_cycles,
        long,
    })
}

impl Census {
    /// Walks the long cycle, turning it into runs of q-cycle vertices.
    fn partition(&self) -> Result<PartitionClass> {
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (i, c) in self.q_cycles.iter().enumerate() {
            for &v in &c.vertices {
                owner.insert(v, i);
            }
        }
        let labels: Vec<Option<usize>> = self.long.vertices.iter().map(|v| owner.get(v).copied()).collect();
        let len = labels.len();
        // Start just after a position where the label changes into a q-cycle run.
        let start = (0..len)
            .find(|&k| labels[k].is_some() && labels[(k + len - 1) % len] != labels[k])
            .ok_or_else(|| Error::Structure("long cycle never enters a q-cycle".into()))?;
        let mut runs: Vec<(usize, usize, usize)> = Vec::new(); // (cycle, run length, gap before)
        let mut gap = 0;
        let mut k = 0;
        // Gaps before the first run are counted at the end, so rotate to after it.
        let order: Vec<Option<usize>> = (0..len).map(|i| labels[(start + i) % len]).collect();
        while k < len {
            match order[k] {
                None => {
                    gap += 1;
                    k += 1;
                }
                Some(c) => {
                    let mut l = 0;
                    while k < len && order[k] == Some(c) {
                        l += 1;
                        k += 1;
                    }
                    runs.push((c, l, gap));
                    gap = 0;
                }
            }
        }
        // trailing gap belongs before the first run
        runs[0].2 += gap;
        let mut seen = vec![false; self.q_cycles.len()];
        for &(c, _, _) in &runs {
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::Structure("a q-cycle meets the long cycle in two runs".into()));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Structure("a q-cycle misses the long cycle".into()));
        }
        let parts = match self.arc_type {
            ArcType::TypeII => {
                if runs.iter().any(|&(_, _, g)| g > 0) {
                    return Err(Error::Structure("long cycle leaves the q-cycles".into()));
                }
                runs.iter().map(|&(_, l, _)| (self.q - l) as i64).collect()
            }
            _ => {
                if runs.iter().any(|&(_, l, _)| l != self.q) {
                    return Err(Error::Structure("a q-cycle is not a run of the n-cycle".into()));
                }
                runs.iter().map(|&(_, _, g)| g as i64).collect()
            }
        };
        PartitionClass::new(parts)
    }
}
