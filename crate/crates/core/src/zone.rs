//! Difference bound matrices (DBMs) over integer-bounded clock constraints.
//!
//! A `Zone` is a convex set of clock valuations represented by a square
//! matrix of [`Bound`]s: entry `(i, j)` constrains `x_i - x_j`, with index 0
//! reserved for the constant-zero reference clock. All constructors and
//! operations maintain two invariants:
//!
//! * the matrix is *canonical* (closed under shortest paths), and
//! * the represented set is non-empty — emptiness is signalled by returning
//!   `None` instead of an inconsistent matrix.
//!
//! Canonicity makes inclusion an entrywise comparison and equality a plain
//! matrix comparison. The operations follow Bengtsson & Yi, *Timed Automata:
//! Semantics, Algorithms and Tools* (2004), §4.3; `up`, `down`, `free` and
//! `reset` all preserve canonical form without re-closing, `intersect`,
//! tightening and extrapolation re-close explicitly.

use crate::bound::Bound;

/// A canonical, non-empty DBM over `dim` clocks (including the reference
/// clock 0). Valuations assign non-negative reals to clocks `1..dim`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Zone {
    dim: usize,
    m: Vec<Bound>,
}

impl Zone {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw entry access for inspection (row `i`, column `j`).
    pub fn bound(&self, i: usize, j: usize) -> Bound {
        self.at(i, j)
    }

    /// The universal zone: all clocks non-negative, otherwise unconstrained.
    pub fn universe(dim: usize) -> Zone {
        assert!(dim >= 1);
        let mut m = vec![Bound::INF; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
            // Row 0: 0 - x_i <= 0, i.e. x_i >= 0.
            m[i] = Bound::LE_ZERO;
        }
        Zone { dim, m }
    }

    /// The single valuation with every clock equal to zero.
    pub fn zero(dim: usize) -> Zone {
        let m = vec![Bound::LE_ZERO; dim * dim];
        Zone { dim, m }
    }

    /// Build a zone from an arbitrary bound matrix, closing it and checking
    /// consistency. `None` if the constraints are contradictory.
    pub fn from_bounds(dim: usize, m: Vec<Bound>) -> Option<Zone> {
        assert_eq!(m.len(), dim * dim);
        let mut z = Zone { dim, m };
        if z.close() {
            Some(z)
        } else {
            None
        }
    }

    /// Floyd–Warshall closure. Returns false (and leaves the matrix in an
    /// unspecified state) if the zone is empty.
    fn close(&mut self) -> bool {
        let dim = self.dim;
        for k in 0..dim {
            for i in 0..dim {
                let ik = self.at(i, k);
                if ik.is_inf() {
                    continue;
                }
                for j in 0..dim {
                    let kj = self.at(k, j);
                    if kj.is_inf() {
                        continue;
                    }
                    let through = ik.add(kj);
                    if through < self.at(i, j) {
                        self.set(i, j, through);
                    }
                }
            }
            if self.at(k, k) < Bound::LE_ZERO {
                return false;
            }
        }
        true
    }

    /// Tighten the entry `(i, j)` to `min(current, b)` and restore canonical
    /// form in `O(dim²)`. `None` if the tightened zone is empty.
    pub fn with_constraint(&self, i: usize, j: usize, b: Bound) -> Option<Zone> {
        debug_assert!(i != j);
        if self.at(i, j) <= b {
            return Some(self.clone());
        }
        // The new constraint closes a negative cycle with the stored
        // opposite entry exactly when the zone becomes empty.
        if self.at(j, i).add(b) < Bound::LE_ZERO {
            return None;
        }
        let mut z = self.clone();
        z.set(i, j, b);
        let dim = z.dim;
        // Re-close using only paths through the updated edge (i, j).
        for p in 0..dim {
            let pi = z.at(p, i);
            if pi.is_inf() {
                continue;
            }
            let via = pi.add(b);
            for q in 0..dim {
                let jq = z.at(j, q);
                if jq.is_inf() {
                    continue;
                }
                let cand = via.add(jq);
                if cand < z.at(p, q) {
                    z.set(p, q, cand);
                }
            }
        }
        Some(z)
    }

    /// Intersection of two zones of equal dimension.
    pub fn intersect(&self, other: &Zone) -> Option<Zone> {
        debug_assert_eq!(self.dim, other.dim);
        let mut changed = false;
        let mut m = self.m.clone();
        for (a, &b) in m.iter_mut().zip(other.m.iter()) {
            if b < *a {
                *a = b;
                changed = true;
            }
        }
        if !changed {
            return Some(self.clone());
        }
        Zone::from_bounds(self.dim, m)
    }

    /// Entrywise inclusion test. Because both zones are canonical this is
    /// exact: `self ⊆ other` iff every entry of `self` is at most the
    /// corresponding entry of `other`.
    pub fn includes(&self, other: &Zone) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        other.m.iter().zip(self.m.iter()).all(|(a, b)| a <= b)
    }

    /// Delay closure (future): `{ v + d | v ∈ Z, d ≥ 0 }`. Preserves
    /// canonical form (Bengtsson & Yi, Algorithm `up`).
    pub fn up(&self) -> Zone {
        let mut z = self.clone();
        for i in 1..z.dim {
            z.set(i, 0, Bound::INF);
        }
        z
    }

    /// Past closure: `{ v - d | v ∈ Z, d ≥ 0 } ∩ (clocks ≥ 0)`. Lower bounds
    /// are released and the matrix re-closed so that diagonal constraints
    /// re-tighten the lower bounds where necessary.
    pub fn down(&self) -> Zone {
        let mut z = self.clone();
        for j in 1..z.dim {
            z.set(0, j, Bound::LE_ZERO);
        }
        let ok = z.close();
        debug_assert!(ok, "down of a non-empty zone cannot be empty");
        z
    }

    /// Reset every clock in `clocks` to zero.
    pub fn reset(&self, clocks: &[usize]) -> Zone {
        let mut z = self.clone();
        let dim = z.dim;
        for &x in clocks {
            debug_assert!(x >= 1 && x < dim);
            for j in 0..dim {
                z.set(x, j, z.at(0, j));
                z.set(j, x, z.at(j, 0));
            }
            z.set(x, x, Bound::LE_ZERO);
            z.set(x, 0, Bound::LE_ZERO);
            z.set(0, x, Bound::LE_ZERO);
        }
        z
    }

    /// Remove all constraints on the clocks in `clocks` (inverse image of
    /// reset). The freed clocks keep only non-negativity.
    pub fn free(&self, clocks: &[usize]) -> Zone {
        let mut z = self.clone();
        let dim = z.dim;
        for &x in clocks {
            debug_assert!(x >= 1 && x < dim);
            for j in 0..dim {
                if j != x {
                    z.set(x, j, Bound::INF);
                    z.set(j, x, z.at(j, 0));
                }
            }
            z.set(x, 0, Bound::INF);
            z.set(0, x, Bound::LE_ZERO);
        }
        z
    }

    /// Classical maximal-constant extrapolation with per-clock ceilings
    /// `k[1..dim]` (`k[0]` is ignored). Entries above `(k_i, <=)` become
    /// unbounded, entries below `(-k_j, <)` are clamped. The result is
    /// re-closed; the operation is idempotent as a composed operation.
    pub fn extrapolate(&self, k: &[i64]) -> Zone {
        debug_assert_eq!(k.len(), self.dim);
        let mut z = self.clone();
        let dim = z.dim;
        let mut changed = false;
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let b = z.at(i, j);
                if b.is_inf() {
                    continue;
                }
                if i != 0 && b > Bound::le(k[i]) {
                    z.set(i, j, Bound::INF);
                    changed = true;
                } else if b < Bound::lt(-k[j]) {
                    // j == 0 would need b < (0, <) which canonical zones of
                    // non-negative clocks never store, so k[0] is never read.
                    z.set(i, j, Bound::lt(-k[j]));
                    changed = true;
                }
            }
        }
        if changed {
            let ok = z.close();
            debug_assert!(ok, "extrapolation cannot empty a zone");
        }
        z
    }

    /// The smallest zone containing both operands: the entrywise weakest
    /// bound. Entrywise maxima of canonical matrices are canonical (each
    /// max satisfies the triangle inequality through the per-operand one),
    /// so no re-closing is needed.
    pub fn hull(&self, other: &Zone) -> Zone {
        debug_assert_eq!(self.dim, other.dim);
        let m = self
            .m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (*a).max(*b))
            .collect();
        Zone { dim: self.dim, m }
    }

    /// Relative complement `self ∖ other`, returned as pairwise disjoint
    /// zones (at most one per finite constraint of `other`). Classical facet
    /// refinement: walk the constraints of `other`, splitting off the part of
    /// the remainder that violates each one. Disjoint or covering operands
    /// short-circuit before any splitting, so subtraction never fragments
    /// a zone the subtrahend cannot carve.
    pub fn subtract(&self, other: &Zone) -> Vec<Zone> {
        debug_assert_eq!(self.dim, other.dim);
        if other.includes(self) {
            return Vec::new();
        }
        if self.intersect(other).is_none() {
            return vec![self.clone()];
        }
        let dim = self.dim;
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let b = other.at(i, j);
                if b.is_inf() {
                    continue;
                }
                // Part of `rest` violating `x_i - x_j ≺ b`.
                if let Some(out) = rest.with_constraint(j, i, b.negated()) {
                    pieces.push(out);
                }
                // Part satisfying it, carried into the next facet.
                match rest.with_constraint(i, j, b) {
                    Some(r) => rest = r,
                    None => return pieces,
                }
            }
        }
        // `rest` satisfies every constraint of `other`: it is covered.
        pieces
    }

    /// Membership test for an integer valuation (`point[0]` must be 0).
    pub fn contains_point(&self, point: &[i64]) -> bool {
        debug_assert_eq!(point.len(), self.dim);
        debug_assert_eq!(point[0], 0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.at(i, j).admits(point[i] - point[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// True if the zone admits arbitrarily large delays from some valuation,
    /// i.e. every clock is unbounded above.
    pub fn is_unbounded(&self) -> bool {
        (1..self.dim).all(|i| self.at(i, 0).is_inf())
    }

    /// Weaken every strict bound to its non-strict counterpart (topological
    /// closure of the zone). Canonical form is preserved: making every edge
    /// non-strict cannot create a shorter path than the closed strict one.
    pub fn closure(&self) -> Zone {
        let mut z = self.clone();
        for b in z.m.iter_mut() {
            if !b.is_inf() && !b.is_nonstrict() {
                *b = Bound::le(b.value());
            }
        }
        z
    }
}

impl std::fmt::Debug for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Zone(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                write!(f, "{:>8}", format!("{:?}", self.at(i, j)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constrain(z: &Zone, i: usize, j: usize, b: Bound) -> Zone {
        z.with_constraint(i, j, b).expect("non-empty")
    }

    /// x1 in [lo, hi] as a 2-dim zone.
    fn interval(lo: i64, hi: i64) -> Zone {
        let u = Zone::universe(2);
        let z = constrain(&u, 1, 0, Bound::le(hi));
        constrain(&z, 0, 1, Bound::le(-lo))
    }

    #[test]
    fn universe_contains_zero() {
        for dim in 1..5 {
            let u = Zone::universe(dim);
            let p = vec![0i64; dim];
            assert!(u.contains_point(&p));
        }
    }

    #[test]
    fn contradiction_is_empty() {
        let u = Zone::universe(2);
        let z = constrain(&u, 1, 0, Bound::le(3)); // x1 <= 3
        assert!(z.with_constraint(0, 1, Bound::lt(-3)).is_none()); // x1 > 3
        assert!(z.with_constraint(0, 1, Bound::le(-3)).is_some()); // x1 >= 3
    }

    #[test]
    fn up_and_down() {
        let z = interval(2, 3);
        let up = z.up();
        assert!(up.contains_point(&[0, 100]));
        assert!(!up.contains_point(&[0, 1]));
        let down = z.down();
        assert!(down.contains_point(&[0, 0]));
        assert!(down.contains_point(&[0, 3]));
        assert!(!down.contains_point(&[0, 4]));
    }

    #[test]
    fn down_respects_diagonals() {
        // x1 in [5, 5], x2 in [0, 0]: past must keep x1 - x2 == 5, so x1 >= 5
        // remains after x2 hits zero.
        let u = Zone::universe(3);
        let z = constrain(&u, 1, 0, Bound::le(5));
        let z = constrain(&z, 0, 1, Bound::le(-5));
        let z = constrain(&z, 2, 0, Bound::le(0));
        let down = z.down();
        assert!(down.contains_point(&[0, 5, 0]));
        assert!(!down.contains_point(&[0, 4, 0]));
        assert!(!down.contains_point(&[0, 5, 1]));
    }

    #[test]
    fn reset_and_free() {
        let z = interval(2, 3);
        let r = z.reset(&[1]);
        assert!(r.contains_point(&[0, 0]));
        assert!(!r.contains_point(&[0, 2]));
        let f = z.free(&[1]);
        assert!(f.contains_point(&[0, 0]));
        assert!(f.contains_point(&[0, 1000]));
    }

    #[test]
    fn subtract_disjoint_exact_cover() {
        let a = interval(0, 10);
        let b = interval(3, 5);
        let pieces = a.subtract(&b);
        // Every integer point of a is in b xor in exactly one piece.
        for x in 0..=10 {
            let p = [0, x];
            let in_b = b.contains_point(&p);
            let n = pieces.iter().filter(|z| z.contains_point(&p)).count();
            assert_eq!(n, usize::from(!in_b), "x={x}");
        }
    }

    #[test]
    fn subtract_covered_is_empty() {
        let a = interval(3, 5);
        let b = interval(0, 10);
        assert!(a.subtract(&b).is_empty());
    }

    #[test]
    fn includes_entrywise() {
        let big = interval(0, 10);
        let small = interval(2, 4);
        assert!(big.includes(&small));
        assert!(!small.includes(&big));
    }

    #[test]
    fn extrapolate_widens_above_ceiling() {
        let z = interval(7, 9);
        let e = z.extrapolate(&[0, 5]);
        // Beyond the ceiling the zone must admit arbitrarily large values.
        assert!(e.contains_point(&[0, 8]));
        assert!(e.contains_point(&[0, 1000]));
        assert!(!e.contains_point(&[0, 5]));
        // Idempotent as a composed operation.
        assert_eq!(e.extrapolate(&[0, 5]), e);
    }

    #[test]
    fn closure_weakens_strict_bounds() {
        let u = Zone::universe(2);
        let z = constrain(&u, 1, 0, Bound::lt(3));
        let c = z.closure();
        assert!(c.contains_point(&[0, 3]));
        assert!(!z.contains_point(&[0, 3]));
    }
}
