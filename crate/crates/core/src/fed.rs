//! Federations: finite unions of zones of a common dimension.
//!
//! Zone algebra is closed under intersection but not under union or
//! complement, so the checker manipulates *federations* — reduced lists of
//! zones. "Reduced" means no stored zone is included in another stored zone;
//! the list is otherwise unordered set semantics with deterministic storage
//! order. Inclusion and equality are decided exactly via subtraction, not by
//! pairwise zone inclusion (which is incomplete on unions).

use crate::bound::Bound;
use crate::zone::Zone;

#[derive(Clone)]
pub struct Federation {
    dim: usize,
    zones: Vec<Zone>,
}

impl Federation {
    pub fn empty(dim: usize) -> Federation {
        Federation { dim, zones: Vec::new() }
    }

    pub fn universe(dim: usize) -> Federation {
        Federation { dim, zones: vec![Zone::universe(dim)] }
    }

    pub fn from_zone(z: Zone) -> Federation {
        Federation { dim: z.dim(), zones: vec![z] }
    }

    pub fn from_zones(dim: usize, zones: Vec<Zone>) -> Federation {
        let mut f = Federation { dim, zones };
        f.reduce();
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    /// Past this many zones, pairwise merging costs more than it saves;
    /// inclusion reduction alone keeps the list finite.
    const MERGE_CAP: usize = 256;

    /// Drop zones subsumed by another stored zone, then merge mergeable
    /// pairs.
    fn reduce(&mut self) {
        let mut kept: Vec<Zone> = Vec::with_capacity(self.zones.len());
        'outer: for z in self.zones.drain(..) {
            for k in kept.iter() {
                if k.includes(&z) {
                    continue 'outer;
                }
            }
            kept.retain(|k| !z.includes(k));
            kept.push(z);
        }
        self.zones = kept;
        self.compact();
    }

    /// Replace pairs whose union is convex by their hull, repeatedly. This
    /// keeps subtraction chains from fragmenting sets into slivers that
    /// never recombine. Exactness: a pair is merged only when the hull is
    /// covered by the two operands, so the represented set never changes.
    fn compact(&mut self) {
        if self.zones.len() < 2 || self.zones.len() > Federation::MERGE_CAP {
            return;
        }
        // A merge can enable further merges with zones in either direction,
        // so sweep until a whole pass changes nothing.
        loop {
            let mut merged = false;
            let mut i = 0;
            while i < self.zones.len() {
                let mut j = i + 1;
                while j < self.zones.len() {
                    match try_merge(&self.zones[i], &self.zones[j]) {
                        Some(hull) => {
                            self.zones.swap_remove(j);
                            self.zones[i] = hull;
                            merged = true;
                        }
                        None => j += 1,
                    }
                }
                i += 1;
            }
            if !merged {
                break;
            }
        }
    }

    pub fn insert(&mut self, z: Zone) {
        debug_assert_eq!(z.dim(), self.dim);
        for k in self.zones.iter() {
            if k.includes(&z) {
                return;
            }
        }
        self.zones.retain(|k| !z.includes(k));
        self.zones.push(z);
    }

    pub fn union(&self, other: &Federation) -> Federation {
        debug_assert_eq!(self.dim, other.dim);
        if self.is_empty() {
            return other.clone();
        }
        let mut out = self.clone();
        for z in other.zones.iter() {
            out.insert(z.clone());
        }
        out
    }

    pub fn intersect(&self, other: &Federation) -> Federation {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = Federation::empty(self.dim);
        for a in self.zones.iter() {
            for b in other.zones.iter() {
                if let Some(z) = a.intersect(b) {
                    out.insert(z);
                }
            }
        }
        out
    }

    pub fn intersect_zone(&self, b: &Zone) -> Federation {
        let mut out = Federation::empty(self.dim);
        for a in self.zones.iter() {
            if let Some(z) = a.intersect(b) {
                out.insert(z);
            }
        }
        out
    }

    /// Exact relative complement `self ∖ other`.
    pub fn subtract(&self, other: &Federation) -> Federation {
        debug_assert_eq!(self.dim, other.dim);
        if other.is_empty() {
            return self.clone();
        }
        let mut pieces: Vec<Zone> = self.zones.clone();
        for b in other.zones.iter() {
            let mut next = Vec::with_capacity(pieces.len());
            for a in pieces {
                next.extend(a.subtract(b));
            }
            pieces = next;
            if pieces.is_empty() {
                break;
            }
        }
        Federation::from_zones(self.dim, pieces)
    }

    /// Exact inclusion: `other ⊆ self` iff `other ∖ self = ∅`.
    pub fn includes(&self, other: &Federation) -> bool {
        for z in other.zones.iter() {
            // Cheap convex pre-check before the exact subtraction.
            if self.zones.iter().any(|k| k.includes(z)) {
                continue;
            }
            if !Federation::from_zone(z.clone()).subtract(self).is_empty() {
                return false;
            }
        }
        true
    }

    pub fn set_eq(&self, other: &Federation) -> bool {
        self.includes(other) && other.includes(self)
    }

    pub fn up(&self) -> Federation {
        self.map(Zone::up)
    }

    pub fn down(&self) -> Federation {
        self.map(Zone::down)
    }

    pub fn closure(&self) -> Federation {
        self.map(Zone::closure)
    }

    pub fn reset(&self, clocks: &[usize]) -> Federation {
        self.map(|z| z.reset(clocks))
    }

    pub fn free(&self, clocks: &[usize]) -> Federation {
        self.map(|z| z.free(clocks))
    }

    pub fn extrapolate(&self, k: &[i64]) -> Federation {
        self.map(|z| z.extrapolate(k))
    }

    fn map(&self, f: impl Fn(&Zone) -> Zone) -> Federation {
        let mut out = Federation::empty(self.dim);
        for z in self.zones.iter() {
            out.insert(f(z));
        }
        out
    }

    pub fn contains_point(&self, point: &[i64]) -> bool {
        self.zones.iter().any(|z| z.contains_point(point))
    }

    /// Constrain every zone by `x_i - x_j ≺ b`.
    pub fn constrained(&self, i: usize, j: usize, b: Bound) -> Federation {
        let mut out = Federation::empty(self.dim);
        for z in self.zones.iter() {
            if let Some(c) = z.with_constraint(i, j, b) {
                out.insert(c);
            }
        }
        out
    }
}

/// The hull of a pair whose union is convex, `None` otherwise. Pairs with
/// disjoint closures are rejected outright: a segment between them would
/// cross the gap, so their hull cannot be covered.
fn try_merge(a: &Zone, b: &Zone) -> Option<Zone> {
    if a.closure().intersect(&b.closure()).is_none() {
        return None;
    }
    let hull = a.hull(b);
    let covered = hull
        .subtract(a)
        .into_iter()
        .all(|piece| piece.subtract(b).is_empty());
    covered.then_some(hull)
}

impl std::fmt::Debug for Federation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Federation(dim={}, {} zones)", self.dim, self.zones.len())
    }
}
