//! Affine systems over GF(2).

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; len.div_ceil(64)] }
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// Equations `sum_{i in row} v_i = rhs` over `nvars` unknowns.
#[derive(Clone, Debug)]
pub struct AffineSystem {
    nvars: usize,
    rows: Vec<(BitVec, bool)>,
}

/// Solution set `particular + span(kernel)`.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub particular: BitVec,
    pub kernel: Vec<BitVec>,
}

impl AffineSystem {
    pub fn new(nvars: usize) -> Self {
        AffineSystem { nvars, rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds `sum_{i in vars} v_i = rhs`; repeated variables cancel.
    pub fn push(&mut self, vars: &[usize], rhs: bool) {
        let mut row = BitVec::zeros(self.nvars);
        for &v in vars {
            row.flip(v);
        }
        self.rows.push((row, rhs));
    }

    /// Gauss-Jordan elimination; `None` when inconsistent.
    pub fn solve(&self) -> Option<SolutionSpace> {
        let mut rows = self.rows.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut r = 0;
        for col in 0..self.nvars {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0.get(col)) else { continue };
            rows.swap(r, p);
            let (pivot_row, pivot_rhs) = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0.get(col) {
                    row.0.xor_assign(&pivot_row);
                    row.1 ^= pivot_rhs;
                }
            }
            pivots.push((r, col));
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        if rows[r..].iter().any(|(row, rhs)| row.is_zero() && *rhs) {
            return None;
        }
        let mut is_pivot = vec![false; self.nvars];
        for &(_, c) in &pivots {
            is_pivot[c] = true;
        }
        let mut particular = BitVec::zeros(self.nvars);
        for &(ri, c) in &pivots {
            particular.set(c, rows[ri].1);
        }
        let kernel = (0..self.nvars)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.nvars);
                v.set(f, true);
                for &(ri, c) in &pivots {
                    if rows[ri].0.get(f) {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect();
        Some(SolutionSpace { particular, kernel })
    }
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    /// Solution indexed by the bits of `choice` over the kernel basis.
    pub fn nth(&self, choice: u64) -> BitVec {
        let mut v = self.particular.clone();
        for (k, b) in self.kernel.iter().enumerate() {
            if k < 64 && (choice >> k) & 1 == 1 {
                v.xor_assign(b);
            }
        }
        v
    }

    /// Solution for an arbitrary subset of kernel vectors.
    pub fn combine(&self, mut pick: impl FnMut(usize) -> bool) -> BitVec {
        let mut v = self.particular.clone();
        for (k, b) in self.kernel.iter().enumerate() {
            if pick(k) {
                v.xor_assign(b);
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // v0 + v1 = 1, v1 + v2 = 0
        let mut s = AffineSystem::new(3);
        s.push(&[0, 1], true);
        s.push(&[1, 2], false);
        let sol = s.solve().unwrap();
        assert_eq!(sol.dimension(), 1);
        for c in 0..2 {
            let v = sol.nth(c);
            assert!(v.get(0) ^ v.get(1));
            assert!(!(v.get(1) ^ v.get(2)));
        }
    }

    #[test]
    fn detects_inconsistency() {
        let mut s = AffineSystem::new(2);
        s.push(&[0, 1], true);
        s.push(&[0], false);
        s.push(&[1], false);
        assert!(s.solve().is_none());
        let mut t = AffineSystem::new(1);
        t.push(&[0, 0], true);
        assert!(t.solve().is_none());
    }

    #[test]
    fn empty_system_is_free() {
        let sol = AffineSystem::new(70).solve().unwrap();
        assert_eq!(sol.dimension(), 70);
        assert!(sol.nth(0).is_zero());
    }
}
