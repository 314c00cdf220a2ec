//! Vertex enumeration by the double description method.
//!
//! The polytope is homogenised to the cone `{x : H x >= 0}` in `R^{4^n}`,
//! where `x_0` carries the trace. Rays are kept as primitive `i128`
//! vectors together with the set of processed rows they satisfy with
//! equality. Two rays straddling a new row are combined only if they are
//! adjacent, i.e. the rows tight at both have rank `d - 2`.

use rayon::prelude::*;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rank::{modular_rank_is_exact, mulmod, powmod, submod, to_mod, P};
use super::{is_vertex, FacetSystem};
use crate::error::{Error, Result};
use crate::expectation::{ExactOperator, ExpectationVector};
use crate::scalar::Rational;

#[derive(Clone, Debug)]
pub struct DdOptions {
    /// Abort once the working ray list grows beyond this.
    pub max_rays: usize,
}

impl Default for DdOptions {
    fn default() -> Self {
        DdOptions { max_rays: 2_000_000 }
    }
}

/// Vertices in canonical (sorted) order with a provenance tag each.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    n: usize,
    vertices: Vec<ExactOperator>,
    tags: Vec<String>,
}

impl VertexSet {
    pub fn new(n: usize, vertices: Vec<ExactOperator>, tags: Vec<String>) -> Result<Self> {
        if vertices.len() != tags.len() {
            return Err(Error::invalid("one tag per vertex required"));
        }
        if let Some(v) = vertices.iter().find(|v| v.n() != n) {
            return Err(Error::DimensionMismatch(v.n(), n));
        }
        Ok(VertexSet { n, vertices, tags })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[ExactOperator] {
        &self.vertices
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<ExactOperator> {
        self.vertices
    }
}

#[derive(Clone)]
struct Ray<const W: usize> {
    v: Vec<i128>,
    zeros: [u64; W],
}

fn set_bit<const W: usize>(z: &mut [u64; W], j: usize) {
    z[j / 64] |= 1 << (j % 64);
}

fn and<const W: usize>(a: &[u64; W], b: &[u64; W]) -> [u64; W] {
    std::array::from_fn(|k| a[k] & b[k])
}

fn popcount<const W: usize>(a: &[u64; W]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

fn contains<const W: usize>(sup: &[u64; W], sub: &[u64; W]) -> bool {
    sup.iter().zip(sub).all(|(a, b)| b & !a == 0)
}

fn ones<const W: usize>(a: &[u64; W]) -> impl Iterator<Item = usize> + '_ {
    a.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + b)
        })
    })
}

fn dot(row: &[i64], v: &[i128]) -> Option<i128> {
    let mut acc: i128 = 0;
    for (&h, &x) in row.iter().zip(v) {
        if h != 0 {
            acc = acc.checked_add((h as i128).checked_mul(x)?)?;
        }
    }
    Some(acc)
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Does the set of rows `idx` reach rank `target` modulo `P`?
fn rank_reaches(rows: &[Vec<u64>], idx: impl Iterator<Item = usize>, count: usize, target: usize) -> bool {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::with_capacity(target);
    let mut left = count;
    for j in idx {
        if basis.len() + left < target {
            return false;
        }
        left -= 1;
        let mut r = rows[j].clone();
        for (piv, b) in &basis {
            let f = r[*piv];
            if f != 0 {
                for (x, y) in r.iter_mut().zip(b) {
                    *x = submod(*x, mulmod(f, *y));
                }
            }
        }
        let Some(piv) = r.iter().position(|&x| x != 0) else { continue };
        let inv = powmod(r[piv], P - 2);
        r.iter_mut().for_each(|x| *x = mulmod(*x, inv));
        basis.push((piv, r));
        if basis.len() >= target {
            return true;
        }
    }
    basis.len() >= target
}

/// Picks `d` rows independent over the rationals, greedily in `order`.
fn independent_rows(rows_mod: &[Vec<u64>], order: &[usize], d: usize) -> Option<Vec<usize>> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for &j in order {
        let mut r = rows_mod[j].clone();
        for (piv, b) in &basis {
            let f = r[*piv];
            if f != 0 {
                for (x, y) in r.iter_mut().zip(b) {
                    *x = submod(*x, mulmod(f, *y));
                }
            }
        }
        let Some(piv) = r.iter().position(|&x| x != 0) else { continue };
        let inv = powmod(r[piv], P - 2);
        r.iter_mut().for_each(|x| *x = mulmod(*x, inv));
        basis.push((piv, r));
        chosen.push(j);
        if chosen.len() == d {
            return Some(chosen);
        }
    }
    None
}

/// Columns of the inverse of the square integer matrix `rows`, each scaled
/// to a primitive integer vector.
fn inverse_columns(rows: &[&[i64]]) -> Result<Vec<Vec<i128>>> {
    let d = rows.len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v: Vec<Rational> = r.iter().map(|&x| Rational::from_integer(x.into())).collect();
            v.extend((0..d).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            v
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&i| !m[i][col].is_zero()).ok_or_else(|| Error::invalid("singular initial basis"))?;
        m.swap(piv, col);
        let inv = m[col][col].recip();
        m[col].iter_mut().for_each(|x| *x *= &inv);
        let pivot_row = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    (0..d)
        .map(|c| {
            let col: Vec<&Rational> = (0..d).map(|i| &m[i][d + c]).collect();
            let l = col.iter().fold(num_bigint::BigInt::one(), |l, x| l.lcm(x.denom()));
            let ints: Vec<num_bigint::BigInt> = col.iter().map(|x| (*x * Rational::from_integer(l.clone())).to_integer()).collect();
            let g = ints.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x));
            ints.iter()
                .map(|x| (x / &g).to_i128().ok_or_else(|| Error::ResourceGuard("initial ray exceeds 128-bit range".into())))
                .collect()
        })
        .collect()
}

/// All vertices of the polytope cut out by `system`, each certified with
/// [`is_vertex`].
pub fn enumerate_vertices(system: &FacetSystem, opts: &DdOptions) -> Result<VertexSet> {
    match system.len().div_ceil(64) {
        0 | 1 => run::<1>(system, opts),
        2 => run::<2>(system, opts),
        3 | 4 => run::<4>(system, opts),
        5..=8 => run::<8>(system, opts),
        9..=17 => run::<17>(system, opts),
        _ => Err(Error::ResourceGuard(format!("{} facets exceed the enumerator's row capacity", system.len()))),
    }
}

fn run<const W: usize>(system: &FacetSystem, opts: &DdOptions) -> Result<VertexSet> {
    let n = system.n();
    let d = 1usize << (2 * n);
    let rows: Vec<Vec<i64>> = system.facets().iter().map(|f| f.integer_row()).collect();
    let rows_mod: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| to_mod(x)).collect()).collect();
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    let exact_mod = modular_rank_is_exact(&refs);

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&j| (system.facets()[j].terms().len(), j));
    let init = independent_rows(&rows_mod, &order, d).ok_or_else(|| Error::invalid("facet system does not define a bounded polytope"))?;
    let init_rows: Vec<&[i64]> = init.iter().map(|&j| rows[j].as_slice()).collect();
    let mut rays: Vec<Ray<W>> = inverse_columns(&init_rows)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let mut zeros = [0u64; W];
            for (k, &j) in init.iter().enumerate() {
                if k != i {
                    set_bit(&mut zeros, j);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let overflow = || Error::ResourceGuard("ray coordinates exceed 128-bit range".into());
    for &j in order.iter().filter(|j| !init.contains(j)) {
        let row = &rows[j];
        let vals: Vec<i128> = rays.par_iter().map(|r| dot(row, &r.v)).collect::<Option<_>>().ok_or_else(overflow)?;
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if *v == 0 {
                    set_bit(&mut r.zeros, j);
                }
            }
            continue;
        }
        let current = &rays;
        let fresh: Vec<Vec<Ray<W>>> = pos
            .par_iter()
            .map(|&p| {
                let rp = &current[p];
                let mut out = Vec::new();
                for &q in &neg {
                    let rq = &current[q];
                    let common = and(&rp.zeros, &rq.zeros);
                    let cnt = popcount(&common);
                    if cnt < d - 2 {
                        continue;
                    }
                    let adjacent = if exact_mod {
                        rank_reaches(&rows_mod, ones(&common), cnt, d - 2)
                    } else {
                        !current.iter().enumerate().any(|(k, r)| k != p && k != q && contains(&r.zeros, &common))
                    };
                    if !adjacent {
                        continue;
                    }
                    let (a, b) = (vals[p], -vals[q]);
                    let mut v = Vec::with_capacity(d);
                    for (x, y) in rq.v.iter().zip(&rp.v) {
                        let t = a.checked_mul(*x).and_then(|s| b.checked_mul(*y).and_then(|u| s.checked_add(u)));
                        match t {
                            Some(t) => v.push(t),
                            None => return Err(overflow()),
                        }
                    }
                    primitive(&mut v);
                    let mut zeros = common;
                    set_bit(&mut zeros, j);
                    out.push(Ray { v, zeros });
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let added: usize = fresh.iter().map(Vec::len).sum();
        let kept = rays.len() - neg.len();
        if kept + added > opts.max_rays {
            return Err(Error::ResourceGuard(format!("double description exceeded {} rays", opts.max_rays)));
        }
        let mut next: Vec<Ray<W>> = Vec::with_capacity(kept + added);
        for (mut r, v) in std::mem::take(&mut rays).into_iter().zip(vals) {
            if v == 0 {
                set_bit(&mut r.zeros, j);
                next.push(r);
            } else if v > 0 {
                next.push(r);
            }
        }
        next.extend(fresh.into_iter().flatten());
        rays = next;
    }

    let mut vertices: Vec<ExactOperator> = rays
        .iter()
        .map(|r| {
            let x0 = r.v[0];
            if x0 <= 0 {
                return Err(Error::invalid("polytope is unbounded"));
            }
            let den = num_bigint::BigInt::from(x0);
            let e = r.v.iter().map(|&x| Rational::new(x.into(), den.clone())).collect();
            ExpectationVector::new(n, e)
        })
        .collect::<Result<_>>()?;
    vertices.sort();
    vertices.dedup();
    let certified: Vec<bool> = vertices.par_iter().map(|v| is_vertex(v, system)).collect::<Result<_>>()?;
    if let Some(i) = certified.iter().position(|c| !c) {
        return Err(Error::invalid(format!("enumerated point {i} failed vertex certification")));
    }
    let tags = vec!["enumerated".to_string(); vertices.len()];
    VertexSet::new(n, vertices, tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::local_lambda_facets;
    use num_traits::Signed;

    #[test]
    fn eight_vertices_for_one_qubit() {
        let vs = enumerate_vertices(&local_lambda_facets(1).unwrap(), &DdOptions::default()).unwrap();
        assert_eq!(vs.len(), 8);
        for v in vs.vertices() {
            assert!(v.values()[1..].iter().all(|x| x.abs() == Rational::one()));
        }
    }

    #[test]
    fn resource_guard_fires() {
        let err = enumerate_vertices(&local_lambda_facets(2).unwrap(), &DdOptions { max_rays: 20 }).unwrap_err();
        assert!(matches!(err, Error::ResourceGuard(_)));
    }

    #[test]
    fn bitset_helpers() {
        let mut z = [0u64; 2];
        set_bit(&mut z, 3);
        set_bit(&mut z, 70);
        assert_eq!(ones(&z).collect::<Vec<_>>(), vec![3, 70]);
        assert_eq!(popcount(&z), 2);
        let mut y = z;
        set_bit(&mut y, 5);
        assert!(contains(&y, &z) && !contains(&z, &y));
        assert_eq!(and(&y, &z), z);
    }
}
