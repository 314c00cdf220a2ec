//! Phase-space catalogs: finite families of operators in `Λ_n^loc` used as
//! LP columns and as simulator state spaces.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cnc::cnc_pairs;
use crate::error::{Error, Result};
use crate::expectation::{ExactOperator, FloatOperator};
use crate::local::{is_bipartite_linear, LocalPair};
use crate::polytope::{enumerate_vertices, local_clifford_action, local_lambda_facets, permute_qubits, tensor, Clifford, DdOptions};
use crate::stabilizer::enumerate_stabilizer_states;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogName {
    Det,
    Cnc,
    Lc1,
    Lc2,
    Maxw,
    Stab,
    Vert,
    Custom,
}

impl CatalogName {
    pub const BUILTIN: [CatalogName; 7] =
        [CatalogName::Det, CatalogName::Cnc, CatalogName::Lc1, CatalogName::Lc2, CatalogName::Maxw, CatalogName::Stab, CatalogName::Vert];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogName::Det => "DET",
            CatalogName::Cnc => "CNC",
            CatalogName::Lc1 => "LC1",
            CatalogName::Lc2 => "LC2",
            CatalogName::Maxw => "MAXW",
            CatalogName::Stab => "STAB",
            CatalogName::Vert => "VERT",
            CatalogName::Custom => "custom",
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        CatalogName::BUILTIN
            .into_iter()
            .chain([CatalogName::Custom])
            .find(|c| c.as_str().eq_ignore_ascii_case(&up))
            .ok_or_else(|| Error::invalid(format!("unknown phase space {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogMember {
    pub label: String,
    pub op: FloatOperator,
    pub pair: Option<LocalPair>,
}

impl CatalogMember {
    pub fn from_pair(label: impl Into<String>, pair: LocalPair) -> Self {
        CatalogMember { label: label.into(), op: pair.operator(), pair: Some(pair) }
    }
}

/// Bit pattern of the expectations with `-0.0` folded into `0.0`.
fn canonical_key(op: &FloatOperator) -> Vec<u64> {
    op.values().iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceCatalog {
    name: CatalogName,
    n: usize,
    members: Vec<CatalogMember>,
}

impl PhaseSpaceCatalog {
    /// Checks qubit counts and trace one; duplicates keep their first
    /// occurrence.
    pub fn new(name: CatalogName, n: usize, members: Vec<CatalogMember>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(members.len());
        for m in members {
            if m.op.n() != n {
                return Err(Error::DimensionMismatch(m.op.n(), n));
            }
            if (m.op.trace() - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("member {} does not have trace one", m.label)));
            }
            if let Some(p) = &m.pair {
                if p.n() != n {
                    return Err(Error::DimensionMismatch(p.n(), n));
                }
            }
            if seen.insert(canonical_key(&m.op)) {
                kept.push(m);
            }
        }
        Ok(PhaseSpaceCatalog { name, n, members: kept })
    }

    pub fn name(&self) -> CatalogName {
        self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[CatalogMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, op: &FloatOperator) -> Option<usize> {
        let key = canonical_key(op);
        self.members.iter().position(|m| canonical_key(&m.op) == key)
    }

    /// Every member has a local pair attached.
    pub fn has_pairs(&self) -> bool {
        self.members.iter().all(|m| m.pair.is_some())
    }

    /// Setwise invariance under qubit swaps and local `H`, `S`.
    pub fn is_symmetric(&self) -> bool {
        let keys: BTreeSet<Vec<u64>> = self.members.iter().map(|m| canonical_key(&m.op)).collect();
        let n = self.n;
        let mut moves: Vec<Box<dyn Fn(&FloatOperator) -> FloatOperator + Sync>> = Vec::new();
        for q in 0..n {
            for g in [Clifford::H, Clifford::S] {
                moves.push(Box::new(move |op| local_clifford_action(op, q, g).expect("qubit in range")));
            }
            if q + 1 < n {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(q, q + 1);
                moves.push(Box::new(move |op| permute_qubits(op, &perm).expect("valid permutation")));
            }
        }
        self.members.par_iter().all(|m| moves.iter().all(|f| keys.contains(&canonical_key(&f(&m.op)))))
    }
}

fn check(name: CatalogName, n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::UnsupportedCatalog { name: name.to_string(), n });
    }
    Ok(())
}

fn bits(x: u64, len: usize) -> String {
    (0..len).map(|i| if (x >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// The `8^n` products of eight-state vertices; label `det:rst.rst...`.
pub fn det_members(n: usize) -> Vec<CatalogMember> {
    (0..1u64 << (3 * n))
        .map(|code| {
            let signs: Vec<(bool, bool, bool)> =
                (0..n).map(|q| ((code >> (3 * q)) & 1 == 1, (code >> (3 * q + 1)) & 1 == 1, (code >> (3 * q + 2)) & 1 == 1)).collect();
            let label = (0..n).map(|q| bits(code >> (3 * q), 3)).collect::<Vec<_>>().join(".");
            CatalogMember::from_pair(format!("det:{label}"), LocalPair::deterministic(&signs))
        })
        .collect()
}

fn cnc_members(n: usize) -> Result<Vec<CatalogMember>> {
    Ok(cnc_pairs(n)?.into_iter().enumerate().map(|(i, p)| CatalogMember::from_pair(format!("cnc:{i}"), p)).collect())
}

fn maxw_members(n: usize) -> Result<Vec<CatalogMember>> {
    let inputs = 3usize.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..1u64 << inputs {
        let f: Vec<bool> = (0..inputs).map(|i| (code >> i) & 1 == 1).collect();
        if n >= 2 && is_bipartite_linear(n, &f)? {
            continue;
        }
        out.push(CatalogMember::from_pair(format!("maxw:{}", bits(code, inputs)), LocalPair::max_weight(n, &f)?));
    }
    Ok(out)
}

fn stab_members(n: usize) -> Result<Vec<CatalogMember>> {
    enumerate_stabilizer_states(n)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let op: ExactOperator = s.state();
            Ok(CatalogMember::from_pair(format!("stab:{i}"), LocalPair::from_operator(&op)?))
        })
        .collect()
}

/// Vertices of `Λ_n^loc` by exact enumeration, each with its local pair.
pub fn vertex_operators(n: usize) -> Result<Vec<ExactOperator>> {
    let system = local_lambda_facets(n)?;
    Ok(enumerate_vertices(&system, &DdOptions::default())?.into_vertices())
}

fn vert_members(n: usize) -> Result<Vec<CatalogMember>> {
    vertex_operators(n)?
        .iter()
        .enumerate()
        .map(|(i, v)| Ok(CatalogMember::from_pair(format!("vert:{i}"), LocalPair::from_operator(v)?)))
        .collect()
}

/// `u ⊗ v` for the eight-state vertices `u` and the `Λ_2^loc` vertices `v`,
/// with `u` placed on each of the three qubits and `v` on the other two in
/// order. Label `lc2:q:u:v` with `q` 1-based.
fn lc2_members() -> Result<Vec<CatalogMember>> {
    let singles: Vec<FloatOperator> = det_members(1).into_iter().map(|m| m.op).collect();
    let pairs: Vec<FloatOperator> = vertex_operators(2)?.iter().map(|v| v.to_double()).collect();
    let perms: [[usize; 3]; 3] = [[0, 1, 2], [1, 0, 2], [2, 0, 1]];
    let mut out = Vec::with_capacity(3 * singles.len() * pairs.len());
    for (q, perm) in perms.iter().enumerate() {
        let block: Vec<CatalogMember> = (0..singles.len() * pairs.len())
            .into_par_iter()
            .map(|k| {
                let (u, v) = (k / pairs.len(), k % pairs.len());
                let op = permute_qubits(&tensor(&singles[u], &pairs[v]), perm)?;
                let pair = LocalPair::from_operator(&op)?;
                Ok(CatalogMember { label: format!("lc2:{}:{u}:{v}", q + 1), op, pair: Some(pair) })
            })
            .collect::<Result<_>>()?;
        out.extend(block);
    }
    Ok(out)
}

/// Builds a named catalog. DET, CNC, LC1 and STAB need `n <= 3`, MAXW and
/// VERT `n <= 2`, and LC2 is defined for `n = 3` only.
pub fn build_phase_space(name: CatalogName, n: usize) -> Result<PhaseSpaceCatalog> {
    let members = match name {
        CatalogName::Det => {
            check(name, n, 3)?;
            det_members(n)
        }
        CatalogName::Cnc => {
            check(name, n, 3)?;
            cnc_members(n)?
        }
        CatalogName::Lc1 => {
            check(name, n, 3)?;
            let mut m = cnc_members(n)?;
            m.extend(det_members(n));
            m
        }
        CatalogName::Lc2 => {
            if n != 3 {
                return Err(Error::UnsupportedCatalog { name: name.to_string(), n });
            }
            lc2_members()?
        }
        CatalogName::Maxw => {
            check(name, n, 2)?;
            maxw_members(n)?
        }
        CatalogName::Stab => {
            check(name, n, 3)?;
            stab_members(n)?
        }
        CatalogName::Vert => {
            check(name, n, 2)?;
            vert_members(n)?
        }
        CatalogName::Custom => return Err(Error::UnsupportedCatalog { name: name.to_string(), n }),
    };
    PhaseSpaceCatalog::new(name, n, members)
}

/// Member counts per label prefix, e.g. `{"det": 8, "cnc": 21}`.
pub fn label_histogram(catalog: &PhaseSpaceCatalog) -> HashMap<String, usize> {
    let mut h = HashMap::new();
    for m in catalog.members() {
        let prefix = m.label.split(':').next().unwrap_or("").to_string();
        *h.entry(prefix).or_insert(0) += 1;
    }
    h
}
