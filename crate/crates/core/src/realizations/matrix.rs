use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::boundary::check_alpha;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::farey::{arc_params, ArcId, ArcType};

/// A row-stochastic matrix with exact rational entries, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseStochasticMatrix {
    n: usize,
    entries: BTreeMap<(usize, usize), BigRational>,
}

impl SparseStochasticMatrix {
    /// Validates range, nonnegativity and unit row sums; zero entries are dropped.
    pub fn new(n: usize, entries: impl IntoIterator<Item = ((usize, usize), BigRational)>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for ((i, j), w) in entries {
            for v in [i, j] {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if w.is_negative() {
                return Err(Error::NotStochastic(format!("entry ({i},{j}) = {w} is negative")));
            }
            *map.entry((i, j)).or_insert_with(BigRational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        let m = SparseStochasticMatrix { n, entries: map };
        for i in 1..=n {
            let sum = m.row(i).fold(BigRational::zero(), |acc, (_, w)| acc + w);
            if !sum.is_one() {
                return Err(Error::NotStochastic(format!("row {i} sums to {sum}")));
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &BigRational)> {
        self.entries.iter()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &BigRational)> {
        self.entries.range((i, 0)..(i + 1, 0)).map(|(&(_, j), w)| (j, w))
    }

    /// `Γ(A)` with the entries as edge weights.
    pub fn digraph(&self) -> Digraph {
        let mut g = Digraph::new(self.n);
        for (&(i, j), w) in &self.entries {
            g.add_weighted_edge(i, j, w.clone()).expect("validated entries");
        }
        g
    }

    pub fn mul(&self, other: &SparseStochasticMatrix) -> SparseStochasticMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            for (j, b) in other.row(k) {
                *out.entry((i, j)).or_insert_with(BigRational::zero) += a * b;
            }
        }
        out.retain(|_, w| !w.is_zero());
        SparseStochasticMatrix {
            n: self.n,
            entries: out,
        }
    }

    pub fn pow(&self, c: usize) -> SparseStochasticMatrix {
        assert!(c >= 1, "matrix power needs c >= 1");
        let mut acc = self.clone();
        for _ in 1..c {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<BigRational>> {
        let mut out = vec![vec![BigRational::zero(); self.n]; self.n];
        for (&(i, j), w) in &self.entries {
            out[i - 1][j - 1] = w.clone();
        }
        out
    }

    /// Same matrix under the vertex relabelling `v ↦ perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<SparseStochasticMatrix> {
        SparseStochasticMatrix::new(
            self.n,
            self.entries
                .iter()
                .map(|(&(i, j), w)| ((perm[i - 1], perm[j - 1]), w.clone())),
        )
    }
}

/// Header `n=<dim>`, then one `row col p/q` line per nonzero entry.
impl fmt::Display for SparseStochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for (&(i, j), w) in &self.entries {
            writeln!(f, "{i} {j} {w}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Triplet {
    row: usize,
    col: usize,
    value: String,
}

impl Serialize for SparseStochasticMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let triplets: Vec<Triplet> = self
            .entries
            .iter()
            .map(|(&(row, col), w)| Triplet {
                row,
                col,
                value: w.to_string(),
            })
            .collect();
        let mut st = s.serialize_struct("SparseStochasticMatrix", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("entries", &triplets)?;
        st.end()
    }
}

fn expect_type(arc: ArcId, want: ArcType) -> Result<crate::farey::ArcParams> {
    let params = arc_params(arc);
    if params.arc_type != want {
        return Err(Error::WrongArcType {
            n: arc.n(),
            q: arc.q(),
            s: arc.s(),
            expected: want.name(),
            found: params.arc_type.name(),
        });
    }
    Ok(params)
}

fn check_parts(parts: &[i64], d: i64, total: i64, cap: i64, name: &str) -> Result<()> {
    if parts.len() as i64 != d {
        return Err(Error::InvalidPartition(format!(
            "expected {d} parts, got {}",
            parts.len()
        )));
    }
    if let Some(p) = parts.iter().find(|&&p| p < 0 || p > cap) {
        return Err(Error::InvalidPartition(format!("part {p} is outside 0..={cap}")));
    }
    let sum: i64 = parts.iter().sum();
    if sum != total {
        return Err(Error::InvalidPartition(format!(
            "parts sum to {sum}, expected {name} = {total}"
        )));
    }
    Ok(())
}

/// `(1 - α) I + α P` with `P` the cyclic shift.
pub fn build_type0(n: usize, alpha: &BigRational) -> Result<SparseStochasticMatrix> {
    if n == 0 {
        return Err(Error::OrderTooSmall { n: 0, min: 1 });
    }
    check_alpha(alpha, true)?;
    let beta = BigRational::one() - alpha;
    let entries = (1..=n).flat_map(|i| {
        [((i, i), beta.clone()), ((i, i % n + 1), alpha.clone())]
    });
    SparseStochasticMatrix::new(n, entries)
}

/// The `n`-cycle with the chord `(q, 1)` of weight `1 - α`.
pub fn build_type_i(arc: ArcId, alpha: &BigRational) -> Result<SparseStochasticMatrix> {
    expect_type(arc, ArcType::TypeI)?;
    check_alpha(alpha, true)?;
    let (n, q) = (arc.n() as usize, arc.q() as usize);
    let mut entries: Vec<((usize, usize), BigRational)> = (1..=n)
        .filter(|&i| i != q)
        .map(|i| ((i, i % n + 1), BigRational::one()))
        .collect();
    entries.push(((q, q + 1), alpha.clone()));
    entries.push(((q, 1), BigRational::one() - alpha));
    SparseStochasticMatrix::new(n, entries)
}

/// `d` disjoint `q`-cycles joined by chords `(iq - z_i, ⟨1 + iq⟩_n)` of weight `α`.
pub fn build_type_ii(arc: ArcId, parts: &[i64], alpha: &BigRational) -> Result<SparseStochasticMatrix> {
    let params = expect_type(arc, ArcType::TypeII)?;
    check_alpha(alpha, true)?;
    let (q, d, z) = (arc.q(), params.d, params.excess);
    check_parts(parts, d, z, q - 1, "z")?;
    let n = arc.n();
    let beta = BigRational::one() - alpha;
    let mut entries = Vec::with_capacity((n + d) as usize);
    for i in 1..=d {
        let base = q * (i - 1);
        let source = i * q - parts[(i - 1) as usize];
        for k in 1..=q {
            let u = base + k;
            let v = base + k % q + 1;
            let w = if u == source { beta.clone() } else { BigRational::one() };
            entries.push(((u as usize, v as usize), w));
        }
        let target = (i * q) % n + 1;
        entries.push(((source as usize, target as usize), alpha.clone()));
    }
    SparseStochasticMatrix::new(n as usize, entries)
}

/// The `n`-cycle with chords `(iq + Y_i, 1 + (i-1)q + Y_i)` of weight `1 - α`,
/// where `Y_i = y_1 + … + y_i`.
pub fn build_type_iii(arc: ArcId, parts: &[i64], alpha: &BigRational) -> Result<SparseStochasticMatrix> {
    let params = expect_type(arc, ArcType::TypeIII)?;
    check_alpha(alpha, true)?;
    let (q, d, y) = (arc.q(), params.d, params.excess);
    check_parts(parts, d, y, y, "y")?;
    let n = arc.n();
    let beta = BigRational::one() - alpha;
    let mut chords = BTreeMap::new();
    let mut acc = 0;
    for i in 1..=d {
        acc += parts[(i - 1) as usize];
        chords.insert(i * q + acc, 1 + (i - 1) * q + acc);
    }
    let mut entries = Vec::with_capacity((n + d) as usize);
    for u in 1..=n {
        let v = u % n + 1;
        match chords.get(&u) {
            Some(&t) => {
                entries.push(((u as usize, v as usize), alpha.clone()));
                entries.push(((u as usize, t as usize), beta.clone()));
            }
            None => entries.push(((u as usize, v as usize), BigRational::one())),
        }
    }
    SparseStochasticMatrix::new(n as usize, entries)
}

/// Builds the sparsest realization for any supported arc.
pub fn build(arc: ArcId, parts: Option<&[i64]>, alpha: &BigRational) -> Result<SparseStochasticMatrix> {
    match arc_params(arc).arc_type {
        ArcType::Type0 => build_type0(arc.n() as usize, alpha),
        ArcType::TypeI => build_type_i(arc, alpha),
        ArcType::TypeII => build_type_ii(arc, need_parts(parts)?, alpha),
        ArcType::TypeIII => build_type_iii(arc, need_parts(parts)?, alpha),
        ArcType::Unsupported => Err(Error::UnsupportedArc {
            n: arc.n(),
            q: arc.q(),
            s: arc.s(),
        }),
    }
}

fn need_parts(parts: Option<&[i64]>) -> Result<&[i64]> {
    parts.ok_or_else(|| Error::InvalidPartition("this arc type needs a partition".into()))
}
