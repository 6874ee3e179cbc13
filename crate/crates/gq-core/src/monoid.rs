use std::collections::BTreeSet;

use crate::codes;
use crate::error::{arg_err, capacity_err, Result};
use crate::op::OpTable;
use crate::relation::{validate_subset, Relation};
use crate::universe::Universe;

/// A transformation monoid: a set of unary operations containing the
/// identity and closed under composition. Members are kept sorted by table,
/// so equality and subset tests are plain slice comparisons.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monoid {
    universe: Universe,
    members: Vec<OpTable>,
}

impl Monoid {
    /// Validates the member list: all unary over the same universe, identity
    /// present, composition closed.
    pub fn new(universe: Universe, members: Vec<OpTable>) -> Result<Monoid> {
        let mut sorted = members;
        for f in &sorted {
            if f.universe() != universe {
                return arg_err("monoid member over a different universe");
            }
            if !f.is_unary() {
                return arg_err("monoid members must be unary");
            }
        }
        sorted.sort_unstable();
        sorted.dedup();
        let m = Monoid {
            universe,
            members: sorted,
        };
        if !m.contains(&OpTable::identity(universe)) {
            return arg_err("monoid must contain the identity");
        }
        for f in &m.members {
            for g in &m.members {
                let fg = f.compose_unary(g)?;
                if !m.contains(&fg) {
                    return arg_err(format!(
                        "not composition closed: {:?} after {:?} gives {:?}",
                        f.table(),
                        g.table(),
                        fg.table()
                    ));
                }
            }
        }
        Ok(m)
    }

    /// For producers that guarantee closure by construction (endomorphism
    /// sets, generated closures). Input must be sorted and deduplicated.
    pub(crate) fn from_sorted_members_unchecked(universe: Universe, members: Vec<OpTable>) -> Monoid {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Monoid { universe, members }
    }

    /// The least composition-closed set containing the generators and the
    /// identity.
    pub fn generate(universe: Universe, generators: &[OpTable]) -> Result<Monoid> {
        for g in generators {
            if g.universe() != universe {
                return arg_err("generator over a different universe");
            }
            if !g.is_unary() {
                return arg_err("generators must be unary");
            }
        }
        let mut set: BTreeSet<u32> = BTreeSet::new();
        set.insert(OpTable::identity(universe).unary_code());
        let mut queue: Vec<u32> = Vec::new();
        for g in generators {
            if set.insert(g.unary_code()) {
                queue.push(g.unary_code());
            }
        }
        queue.push(OpTable::identity(universe).unary_code());
        while let Some(code) = queue.pop() {
            let f = OpTable::from_unary_code(universe, code);
            let snapshot: Vec<u32> = set.iter().copied().collect();
            for other_code in snapshot {
                let g = OpTable::from_unary_code(universe, other_code);
                for h in [f.compose_unary(&g)?, g.compose_unary(&f)?] {
                    let c = h.unary_code();
                    if set.insert(c) {
                        queue.push(c);
                    }
                }
            }
        }
        let members = set
            .into_iter()
            .map(|c| OpTable::from_unary_code(universe, c))
            .collect();
        Ok(Monoid { universe, members })
    }

    /// The trivial monoid: identity plus all constants.
    pub fn trivial(universe: Universe) -> Monoid {
        let mut members = vec![OpTable::identity(universe)];
        for a in universe.elements() {
            members.push(OpTable::constant(universe, a).expect("in range"));
        }
        members.sort_unstable();
        Monoid { universe, members }
    }

    /// The full transformation monoid, all `k^k` unary maps.
    pub fn full(universe: Universe) -> Result<Monoid> {
        let k = universe.size();
        let count = codes::pow(k, k);
        if count > 1 << 21 {
            return capacity_err(format!("full monoid on {k} elements is too large"));
        }
        let members = (0..count as u32)
            .map(|c| OpTable::from_unary_code(universe, c))
            .collect();
        Ok(Monoid { universe, members })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a monoid always contains the identity
    }

    pub fn members(&self) -> &[OpTable] {
        &self.members
    }

    pub fn contains(&self, f: &OpTable) -> bool {
        f.universe() == self.universe
            && f.is_unary()
            && self
                .members
                .binary_search_by(|m| m.table().cmp(f.table()))
                .is_ok()
    }

    pub fn contains_table(&self, table: &[u8]) -> bool {
        self.members
            .binary_search_by(|m| m.table().cmp(table))
            .is_ok()
    }

    /// Member tables as sorted mixed-radix codes; doubles as a canonical key.
    pub fn member_codes(&self) -> Vec<u32> {
        self.members.iter().map(|m| m.unary_code()).collect()
    }

    pub fn is_subset(&self, other: &Monoid) -> bool {
        self.universe == other.universe && self.members.iter().all(|m| other.contains(m))
    }

    pub fn intersection(&self, other: &Monoid) -> Result<Monoid> {
        if self.universe != other.universe {
            return arg_err("universe mismatch");
        }
        let members: Vec<OpTable> = self
            .members
            .iter()
            .filter(|m| other.contains(m))
            .cloned()
            .collect();
        // Intersections of monoids are monoids.
        Ok(Monoid::from_sorted_members_unchecked(self.universe, members))
    }

    /// True when all constant maps belong to the monoid.
    pub fn contains_constants(&self) -> bool {
        self.universe
            .elements()
            .all(|a| self.contains(&OpTable::constant(self.universe, a).expect("in range")))
    }

    /// The k-ary relation whose tuples are the member tables. A unary table
    /// over k elements is itself a k-tuple, and its table code is its tuple
    /// code, so this is a direct re-wrap.
    pub fn table_relation(&self) -> Relation {
        Relation::from_codes(self.universe, self.universe.size(), self.member_codes())
            .expect("k-ary table space always fits for k <= 7")
    }

    /// Componentwise product monoid over the paired universe, element
    /// `(a, b)` encoded as `a * k2 + b`.
    pub fn tensor_product(&self, other: &Monoid) -> Result<Monoid> {
        let (k1, k2) = (self.universe.size(), other.universe.size());
        let product = Universe::new_product(k1 * k2)?;
        let mut members = Vec::with_capacity(self.len() * other.len());
        for g1 in &self.members {
            for g2 in &other.members {
                let mut table = vec![0u8; k1 * k2];
                for a in 0..k1 {
                    for b in 0..k2 {
                        table[a * k2 + b] = g1.table()[a] * k2 as u8 + g2.table()[b];
                    }
                }
                members.push(OpTable::from_raw(product, 1, table));
            }
        }
        members.sort_unstable();
        members.dedup();
        // Products of monoids are composition closed and contain id x id.
        Ok(Monoid::from_sorted_members_unchecked(product, members))
    }

    /// Restriction to an invariant subset `B`; errors with the violating
    /// member if some map leaves `B`.
    pub fn restrict_to(&self, subset: &[u8]) -> Result<Monoid> {
        let sub = validate_subset(self.universe, subset)?;
        let small = Universe::new(sub.len())?;
        let mut index = vec![None; self.universe.size()];
        for (i, &b) in sub.iter().enumerate() {
            index[b as usize] = Some(i as u8);
        }
        let mut members = Vec::with_capacity(self.len());
        for g in &self.members {
            let mut table = vec![0u8; sub.len()];
            for (i, &b) in sub.iter().enumerate() {
                match index[g.table()[b as usize] as usize] {
                    Some(v) => table[i] = v,
                    None => {
                        return arg_err(format!(
                            "subset {sub:?} is not invariant: member {:?} maps {b} outside",
                            g.table()
                        ))
                    }
                }
            }
            members.push(OpTable::from_raw(small, 1, table));
        }
        members.sort_unstable();
        members.dedup();
        // Restrictions of closed sets to invariant subsets stay closed.
        Ok(Monoid::from_sorted_members_unchecked(small, members))
    }

    /// True when `subset` is invariant under every member.
    pub fn leaves_invariant(&self, subset: &[u8]) -> bool {
        self.members.iter().all(|g| {
            subset
                .iter()
                .all(|&b| subset.contains(&g.table()[b as usize]))
        })
    }
}
