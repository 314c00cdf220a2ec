//! Maximal closed noncontextual (CNC) sets and their operators.
//!
//! A CNC set is closed under sums of commuting elements and carries a value
//! assignment with `γ(a + b) = γ(a) + γ(b) + β(a, b)` on commuting pairs.
//! Maximal sets are built as `Ω = I ∪ (a_1 + I) ∪ ... ∪ (a_ξ + I)` with `I`
//! isotropic of dimension `m < n` and `a_k` a largest pairwise
//! anticommuting family in `I^⊥ / I` (`ξ = 2(n - m) + 1`). Every set is
//! checked to be closed, noncontextual and maximal before it is returned,
//! and the construction is compared against exhaustive search for `n <= 2`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::AffineSystem;
use crate::local::{LocalPair, LocallyClosedSet};
use crate::pauli::{all_points, PauliPoint};
use crate::stabilizer::Subspace;

/// Bit masks over the `4^n <= 64` points of `E_n`.
type Mask = u64;

const LIMIT: usize = 3;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > LIMIT {
        return Err(Error::TooManyQubits { what: "CNC enumeration", n, limit: LIMIT });
    }
    Ok(())
}

fn points_of(n: usize, m: Mask) -> Vec<PauliPoint> {
    (0..1usize << (2 * n)).filter(|i| (m >> i) & 1 == 1).map(|i| PauliPoint::from_index(n, i)).collect()
}

/// Least superset closed under commuting sums.
fn commuting_closure(n: usize, m: Mask) -> Mask {
    let mut m = m | 1;
    loop {
        let pts = points_of(n, m);
        let mut next = m;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                if a.commutes(b) {
                    next |= 1 << a.add(b).index();
                }
            }
        }
        if next == m {
            return m;
        }
        m = next;
    }
}

fn twisted_system(points: &[PauliPoint]) -> AffineSystem {
    let mut pos = [usize::MAX; 64];
    for (i, a) in points.iter().enumerate() {
        pos[a.index()] = i;
    }
    let mut sys = AffineSystem::new(points.len());
    sys.push(&[pos[0]], false);
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            if a.commutes(b) {
                sys.push(&[i, j, pos[a.add(b).index()]], a.beta_raw(b));
            }
        }
    }
    sys
}

/// Closed under commuting sums and admitting a β-twisted assignment.
fn is_cnc_mask(n: usize, m: Mask) -> bool {
    m & 1 == 1 && commuting_closure(n, m) == m && twisted_system(&points_of(n, m)).solve().is_some()
}

fn is_maximal_mask(n: usize, m: Mask) -> bool {
    (0..1usize << (2 * n)).filter(|i| (m >> i) & 1 == 0).all(|i| {
        let c = commuting_closure(n, m | (1 << i));
        twisted_system(&points_of(n, c)).solve().is_none()
    })
}

/// Isotropic subspaces of dimension below `n`, sorted.
fn small_isotropic_subspaces(n: usize) -> Vec<Subspace> {
    let points: Vec<PauliPoint> = all_points(n).skip(1).collect();
    let mut seen: BTreeSet<Subspace> = BTreeSet::new();
    let mut layer = vec![Subspace::trivial(n)];
    seen.insert(Subspace::trivial(n));
    while let Some(s) = layer.pop() {
        if s.dim() + 1 >= n {
            continue;
        }
        for a in &points {
            if s.contains(a) || !s.basis().iter().all(|b| b.commutes(a)) {
                continue;
            }
            let t = Subspace::span_of(n, s.basis().iter().copied().chain(std::iter::once(*a)));
            if seen.insert(t.clone()) {
                layer.push(t);
            }
        }
    }
    seen.into_iter().collect()
}

/// Cliques of pairwise anticommuting points of exactly size `t`.
fn anticommuting_families(reps: &[PauliPoint], t: usize) -> Vec<Vec<PauliPoint>> {
    fn grow(reps: &[PauliPoint], start: usize, cur: &mut Vec<PauliPoint>, t: usize, out: &mut Vec<Vec<PauliPoint>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for k in start..reps.len() {
            if cur.iter().all(|c| !c.commutes(&reps[k])) {
                cur.push(reps[k]);
                grow(reps, k + 1, cur, t, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(reps, 0, &mut Vec::new(), t, &mut out);
    out
}

/// All maximal CNC sets of `E_n` (`1 <= n <= 3`), sorted by element list.
pub fn maximal_cnc_sets(n: usize) -> Result<Vec<LocallyClosedSet>> {
    check_n(n)?;
    let masks: BTreeSet<Mask> = small_isotropic_subspaces(n)
        .par_iter()
        .flat_map_iter(|iso| {
            let elems: Vec<PauliPoint> = iso.elements().collect();
            let mut reps: BTreeSet<PauliPoint> = BTreeSet::new();
            for a in iso.perp().elements() {
                let rep = elems.iter().map(|i| a.add(i)).min().expect("nonempty");
                if !iso.contains(&rep) {
                    reps.insert(rep);
                }
            }
            let reps: Vec<PauliPoint> = reps.into_iter().collect();
            let t = 2 * (n - iso.dim()) + 1;
            anticommuting_families(&reps, t)
                .into_iter()
                .map(|fam| {
                    let mut m: Mask = 0;
                    for i in &elems {
                        m |= 1 << i.index();
                        for a in &fam {
                            m |= 1 << a.add(i).index();
                        }
                    }
                    m
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let checked: Vec<bool> = masks.par_iter().map(|&m| is_cnc_mask(n, m) && is_maximal_mask(n, m)).collect();
    if checked.iter().any(|ok| !ok) {
        return Err(Error::invalid("constructed set failed the CNC maximality check"));
    }
    let mut sets: Vec<LocallyClosedSet> = masks.into_iter().map(|m| LocallyClosedSet::new(n, points_of(n, m))).collect::<Result<_>>()?;
    sets.sort_by(|a, b| a.elements().cmp(b.elements()));
    Ok(sets)
}

/// Maximal CNC sets by exhaustive search over all subsets (`n <= 2`).
pub fn maximal_cnc_sets_exhaustive(n: usize) -> Result<Vec<LocallyClosedSet>> {
    if n == 0 || n > 2 {
        return Err(Error::TooManyQubits { what: "exhaustive CNC search", n, limit: 2 });
    }
    let rest = (1usize << (2 * n)) - 1;
    let masks: Vec<Mask> = (0..1u64 << rest)
        .into_par_iter()
        .map(|s| (s << 1) | 1)
        .filter(|&m| is_cnc_mask(n, m) && is_maximal_mask(n, m))
        .collect();
    let mut sets: Vec<LocallyClosedSet> = masks.into_iter().map(|m| LocallyClosedSet::new(n, points_of(n, m))).collect::<Result<_>>()?;
    sets.sort_by(|a, b| a.elements().cmp(b.elements()));
    Ok(sets)
}

/// Every β-twisted assignment on a CNC set, as local pairs.
pub fn twisted_assignments(omega: &LocallyClosedSet) -> Result<Vec<LocalPair>> {
    let sol = twisted_system(omega.elements()).solve().ok_or_else(|| Error::invalid("set admits no noncontextual assignment"))?;
    if sol.dimension() > 20 {
        return Err(Error::ResourceGuard(format!("2^{} assignments", sol.dimension())));
    }
    (0..1u64 << sol.dimension())
        .map(|c| {
            let v = sol.nth(c);
            LocalPair::new(omega.clone(), (0..omega.len()).map(|i| v.get(i)).collect())
        })
        .collect()
}

/// All maximal CNC operators as local pairs, sorted.
pub fn cnc_pairs(n: usize) -> Result<Vec<LocalPair>> {
    let sets = maximal_cnc_sets(n)?;
    let per: Vec<Vec<LocalPair>> = sets.par_iter().map(twisted_assignments).collect::<Result<_>>()?;
    let mut out: Vec<LocalPair> = per.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}
