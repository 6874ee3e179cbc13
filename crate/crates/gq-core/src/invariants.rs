//! Enumeration of invariant quasiorders, congruences and generalized
//! quasiorders of a monoid.

use rayon::prelude::*;

use crate::error::{arg_err, capacity_err, Error, Result};
use crate::monoid::Monoid;
use crate::partial::partial;
use crate::relation::Relation;
use crate::universe::Universe;

const QUORD_MAX_UNIVERSE: usize = 5;
const CONGRUENCE_MAX_UNIVERSE: usize = 6;
pub const DEFAULT_GQUORD_BUDGET: usize = 50_000;

/// A set of relations over one universe, possibly of mixed arities, sorted
/// by (arity, code sequence).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    universe: Universe,
    members: Vec<Relation>,
}

impl RelationSet {
    pub fn new(universe: Universe, mut members: Vec<Relation>) -> Result<RelationSet> {
        if members.iter().any(|r| r.universe() != universe) {
            return arg_err("universe mismatch within the relation set");
        }
        members.sort_unstable_by(|a, b| {
            a.arity()
                .cmp(&b.arity())
                .then_with(|| a.codes().cmp(b.codes()))
        });
        members.dedup();
        Ok(RelationSet { universe, members })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn members(&self) -> &[Relation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, rho: &Relation) -> bool {
        self.members.iter().any(|r| r == rho)
    }
}

/// Binary relations as bitmasks over pair codes; `k <= 7` keeps them in 49
/// bits. Only used internally for the brute-force filters.
fn mask_relation(universe: Universe, mask: u64) -> Relation {
    let k = universe.size();
    let codes = (0..(k * k) as u32).filter(|&c| mask >> c & 1 == 1).collect();
    Relation::from_codes(universe, 2, codes).expect("binary shape fits")
}

fn mask_is_transitive(mask: u64, k: usize) -> bool {
    for a in 0..k {
        for b in 0..k {
            if mask >> (a * k + b) & 1 == 0 {
                continue;
            }
            for c in 0..k {
                if mask >> (b * k + c) & 1 == 1 && mask >> (a * k + c) & 1 == 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn mask_is_invariant(mask: u64, k: usize, m: &Monoid) -> bool {
    m.members().iter().all(|g| {
        let t = g.table();
        (0..k * k).all(|p| {
            mask >> p & 1 == 0 || {
                let (a, b) = (p / k, p % k);
                let q = (t[a] as usize) * k + t[b] as usize;
                mask >> q & 1 == 1
            }
        })
    })
}

/// All quasiorders (reflexive transitive binary relations) preserved by
/// every member of the monoid. Enumerates the `2^(k^2 - k)` reflexive
/// binary relations and filters; capped at `k <= 5`.
pub fn invariant_quords(m: &Monoid) -> Result<RelationSet> {
    let k = m.universe().size();
    if k > QUORD_MAX_UNIVERSE {
        return capacity_err(format!(
            "quasiorder enumeration is capped at {QUORD_MAX_UNIVERSE} elements"
        ));
    }
    let diag: u64 = (0..k).map(|a| 1u64 << (a * k + a)).sum();
    let off_diag: Vec<usize> = (0..k * k).filter(|&p| p / k != p % k).collect();
    let candidates = 1u64 << off_diag.len();
    let masks: Vec<u64> = (0..candidates)
        .into_par_iter()
        .filter_map(|bits| {
            let mut mask = diag;
            for (i, &p) in off_diag.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    mask |= 1 << p;
                }
            }
            (mask_is_transitive(mask, k) && mask_is_invariant(mask, k, m)).then_some(mask)
        })
        .collect();
    RelationSet::new(
        m.universe(),
        masks
            .into_iter()
            .map(|mask| mask_relation(m.universe(), mask))
            .collect(),
    )
}

/// All congruences (invariant equivalence relations), enumerated over set
/// partitions via restricted growth strings, so this stays cheap up to the
/// full universe cap.
pub fn invariant_congruences(m: &Monoid) -> Result<RelationSet> {
    let k = m.universe().size();
    if k > CONGRUENCE_MAX_UNIVERSE {
        return capacity_err(format!(
            "congruence enumeration is capped at {CONGRUENCE_MAX_UNIVERSE} elements"
        ));
    }
    let mut found = Vec::new();
    let mut rgs = vec![0u8; k];
    enumerate_partitions(&mut rgs, 1, &mut |blocks: &[u8]| {
        let mut mask = 0u64;
        for a in 0..k {
            for b in 0..k {
                if blocks[a] == blocks[b] {
                    mask |= 1 << (a * k + b);
                }
            }
        }
        if mask_is_invariant(mask, k, m) {
            found.push(mask_relation(m.universe(), mask));
        }
    });
    RelationSet::new(m.universe(), found)
}

fn enumerate_partitions(rgs: &mut Vec<u8>, pos: usize, emit: &mut impl FnMut(&[u8])) {
    if pos == rgs.len() {
        emit(rgs);
        return;
    }
    let max = rgs[..pos].iter().copied().max().unwrap_or(0);
    for b in 0..=max + 1 {
        rgs[pos] = b;
        enumerate_partitions(rgs, pos + 1, emit);
    }
}

/// The least generalized quasiorder containing `rho` that is preserved by
/// every member of `m`. Alternates three monotone fills to a fixpoint:
/// reflexive tuples, matrix diagonals, and images under the monoid.
pub fn invariant_gquord_closure(rho: &Relation, m: &Monoid) -> Result<Relation> {
    if rho.universe() != m.universe() {
        return arg_err("universe mismatch");
    }
    let mut cur = rho.reflexive_closure();
    loop {
        let mut next = cur.union(&partial(&cur)?)?;
        for g in m.members() {
            next = next.union(&cur.image_under(g)?)?;
        }
        if next.len() == cur.len() {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Raised when the generated lattice outgrows the budget; carries what was
/// found so callers can degrade gracefully.
#[derive(Debug, Clone)]
pub struct GquordBudgetExceeded {
    pub budget: usize,
    pub partial: Vec<Relation>,
}

impl From<GquordBudgetExceeded> for Error {
    fn from(e: GquordBudgetExceeded) -> Error {
        Error::Capacity(format!(
            "invariant gquord lattice exceeded the budget of {} ({} found)",
            e.budget,
            e.partial.len()
        ))
    }
}

#[derive(Debug)]
pub enum GquordEnumError {
    Budget(GquordBudgetExceeded),
    Other(Error),
}

impl From<Error> for GquordEnumError {
    fn from(e: Error) -> Self {
        GquordEnumError::Other(e)
    }
}

impl From<GquordEnumError> for Error {
    fn from(e: GquordEnumError) -> Error {
        match e {
            GquordEnumError::Budget(b) => b.into(),
            GquordEnumError::Other(e) => e,
        }
    }
}

/// The complete lattice of m-ary invariant generalized quasiorders of the
/// monoid.
///
/// Every invariant gquord is the join of the principal ones generated by its
/// tuples, so the full set is the closure of the principal family
/// `{ closure({t}) | t in A^m }` under binary joins (join = invariant
/// closure of the union).
pub fn invariant_gquords(
    m: &Monoid,
    arity: usize,
    budget: usize,
) -> std::result::Result<RelationSet, GquordEnumError> {
    if arity == 0 || arity > 4 {
        return Err(GquordEnumError::Other(Error::Capacity(
            "invariant gquord enumeration is capped at arity 4".into(),
        )));
    }
    let universe = m.universe();
    let k = universe.size();
    let space = k.pow(arity as u32);

    let mut found: Vec<Relation> = Vec::new();
    let mut keys: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
    let mut queue: Vec<usize> = Vec::new();
    let mut insert = move |r: Relation, found: &mut Vec<Relation>, queue: &mut Vec<usize>| {
        if keys.insert(r.codes().to_vec()) {
            found.push(r);
            queue.push(found.len() - 1);
        }
    };

    for c in 0..space as u32 {
        let single = Relation::from_codes(universe, arity, vec![c])?;
        let principal = invariant_gquord_closure(&single, m)?;
        insert(principal, &mut found, &mut queue);
        if found.len() > budget {
            return Err(GquordEnumError::Budget(GquordBudgetExceeded {
                budget,
                partial: found,
            }));
        }
    }

    while let Some(i) = queue.pop() {
        let mut j = 0;
        while j < found.len() {
            let (a, b) = (&found[i], &found[j]);
            j += 1;
            if a.is_subset(b) || b.is_subset(a) {
                continue;
            }
            let join = invariant_gquord_closure(&a.union(b)?, m)?;
            insert(join, &mut found, &mut queue);
            if found.len() > budget {
                return Err(GquordEnumError::Budget(GquordBudgetExceeded {
                    budget,
                    partial: found,
                }));
            }
        }
    }

    Ok(RelationSet::new(universe, found)?)
}

/// Convenience wrapper mapping the budget error into a capacity error.
pub fn invariant_gquords_or_err(m: &Monoid, arity: usize, budget: usize) -> Result<RelationSet> {
    invariant_gquords(m, arity, budget).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op::OpTable;
    use crate::partial::{closure, is_gquord, ClosureMode};
    use crate::preserve::end_of;

    fn u(k: usize) -> Universe {
        Universe::new(k).unwrap()
    }

    fn identity_monoid(k: usize) -> Monoid {
        Monoid::generate(u(k), &[]).unwrap()
    }

    #[test]
    fn preorders_on_three_elements() {
        let q = invariant_quords(&identity_monoid(3)).unwrap();
        // oracle: direct enumeration of all binary relations with a
        // reflexivity and pairwise transitivity test
        let mut count = 0;
        for mask in 0..(1u64 << 9) {
            let reflexive = (0..3).all(|a| mask >> (a * 3 + a) & 1 == 1);
            if reflexive && mask_is_transitive(mask, 3) {
                count += 1;
            }
        }
        assert_eq!(count, 29);
        assert_eq!(q.len(), 29);
    }

    #[test]
    fn congruences_count_bell_numbers() {
        let c = invariant_congruences(&identity_monoid(3)).unwrap();
        assert_eq!(c.len(), 5);
        let c4 = invariant_congruences(&identity_monoid(4)).unwrap();
        assert_eq!(c4.len(), 15);
    }

    #[test]
    fn full_monoid_admits_only_trivial_quasiorders() {
        let full = Monoid::full(u(3)).unwrap();
        let q = invariant_quords(&full).unwrap();
        assert_eq!(q.len(), 2);
        assert!(q.contains(&Relation::equality(u(3))));
        assert!(q.contains(&Relation::full(u(3), 2).unwrap()));
    }

    #[test]
    fn invariant_closure_fixes_invariant_gquords() {
        let t = Monoid::trivial(u(3));
        let delta = Relation::equality(u(3));
        assert_eq!(invariant_gquord_closure(&delta, &t).unwrap(), delta);
    }

    #[test]
    fn closure_of_single_edge_under_trivial_monoid() {
        let t = Monoid::trivial(u(3));
        let edge = Relation::new(u(3), 2, &[[1, 2]]).unwrap();
        let closed = invariant_gquord_closure(&edge, &t).unwrap();
        let expected = Relation::new(u(3), 2, &[[0, 0], [1, 1], [2, 2], [1, 2]]).unwrap();
        assert_eq!(closed, expected);
        // independent check: least invariant quasiorder by brute force
        let mut best: Option<Relation> = None;
        for q in invariant_quords(&t).unwrap().members() {
            if edge.is_subset(q) {
                best = Some(match best {
                    None => q.clone(),
                    Some(b) => b.intersection(q).unwrap(),
                });
            }
        }
        assert_eq!(best.unwrap(), closed);
    }

    #[test]
    fn plain_gquord_closure_when_monoid_is_identity() {
        let m = identity_monoid(3);
        let rho = Relation::new(u(3), 2, &[[0, 1], [1, 2]]).unwrap();
        let closed = invariant_gquord_closure(&rho, &m).unwrap();
        assert_eq!(closed, closure(&rho, ClosureMode::Gquord).unwrap());
    }

    #[test]
    fn binary_invariant_gquords_are_the_invariant_quasiorders() {
        for m in [
            identity_monoid(3),
            Monoid::trivial(u(3)),
            Monoid::full(u(3)).unwrap(),
        ] {
            let gq = invariant_gquords(&m, 2, DEFAULT_GQUORD_BUDGET).unwrap();
            let q = invariant_quords(&m).unwrap();
            assert_eq!(gq, q);
        }
    }

    #[test]
    fn full_monoid_gquords_are_diagonal_relations() {
        let full = Monoid::full(u(2)).unwrap();
        let gq = invariant_gquords(&full, 3, DEFAULT_GQUORD_BUDGET).unwrap();
        // oracle: brute-force filter of all ternary relations on 2 elements
        let mut expected = Vec::new();
        for mask in 0..(1u32 << 8) {
            let codes: Vec<u32> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
            let rho = Relation::from_codes(u(2), 3, codes).unwrap();
            let invariant = full
                .members()
                .iter()
                .all(|g| rho.image_under(g).unwrap().is_subset(&rho));
            if invariant && is_gquord(&rho).unwrap().is_gquord() {
                expected.push(rho);
            }
        }
        let expected = RelationSet::new(u(2), expected).unwrap();
        assert_eq!(gq, expected);
        // and each member is a diagonal relation: on 2 elements the ternary
        // diagonals come from the 5 partitions of 3 coordinates
        assert_eq!(gq.len(), 5);
    }

    #[test]
    fn ternary_example_lies_in_the_lattice_of_its_endomorphisms() {
        let r1 = Relation::new(
            u(3),
            3,
            &[[0, 0, 0], [1, 1, 1], [2, 2, 2], [2, 0, 1], [1, 1, 2]],
        )
        .unwrap();
        let m = end_of(&[r1.clone()]).unwrap();
        let gq = invariant_gquords(&m, 3, DEFAULT_GQUORD_BUDGET).unwrap();
        assert!(gq.contains(&r1));
    }

    #[test]
    fn budget_error_carries_partial_results() {
        let m = identity_monoid(3);
        match invariant_gquords(&m, 2, 3) {
            Err(GquordEnumError::Budget(b)) => {
                assert_eq!(b.budget, 3);
                assert!(b.partial.len() >= 3);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn invariance_under_generators_extends_to_the_monoid() {
        let gamma = OpTable::new(u(3), 1, vec![1, 2, 0]).unwrap();
        let m = Monoid::generate(u(3), &[gamma]).unwrap();
        for q in invariant_quords(&m).unwrap().members() {
            for g in m.members() {
                assert!(q.image_under(g).unwrap().is_subset(q));
            }
        }
    }
}
