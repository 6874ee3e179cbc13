//! Exhaustive enumeration and classification of the submonoids of the full
//! transformation monoid on up to 3 points, plus the unary-type
//! classification behind the minimal u-closed monoids.

use rayon::prelude::*;
use std::collections::HashSet;

use crate::codes;
use crate::error::{arg_err, capacity_err, Result};
use crate::galois::{is_uclosed, ucl};
use crate::invariants::{invariant_congruences, invariant_quords};
use crate::monoid::Monoid;
use crate::op::OpTable;
use crate::preserve::end_of;
use crate::universe::Universe;

const CENSUS_MAX_UNIVERSE: usize = 3;

/// All submonoids of the full transformation monoid, i.e. all
/// composition-closed sets of unary maps containing the identity.
///
/// Frontier search: starting from the monoid generated by the identity,
/// every discovered monoid is extended by each absent element and re-closed;
/// canonical member masks deduplicate. Monoids are returned sorted by
/// (size, member list). Capped at `k <= 3`, where the whole monoid fits in a
/// 27-bit mask; beyond that the count explodes.
pub fn enumerate_submonoids(k: usize) -> Result<Vec<Monoid>> {
    let universe = Universe::new(k)?;
    if k > CENSUS_MAX_UNIVERSE {
        return capacity_err(format!(
            "submonoid enumeration is capped at {CENSUS_MAX_UNIVERSE} elements"
        ));
    }
    let n = codes::pow(k, k); // number of unary maps, at most 27
    let tables: Vec<Vec<u8>> = (0..n as u32).map(|c| codes::decode(c, k, k)).collect();
    let mut comp = vec![0u32; n * n]; // comp[f * n + g] = code of f . g
    for (fi, f) in tables.iter().enumerate() {
        for (gi, g) in tables.iter().enumerate() {
            let h: Vec<u8> = g.iter().map(|&x| f[x as usize]).collect();
            comp[fi * n + gi] = codes::encode(&h, k);
        }
    }
    let id_code = codes::encode(&(0..k as u8).collect::<Vec<u8>>(), k);

    let close = |mut mask: u32| -> u32 {
        loop {
            let mut grown = mask;
            let mut fs = mask;
            while fs != 0 {
                let fi = fs.trailing_zeros() as usize;
                fs &= fs - 1;
                let mut gs = mask;
                while gs != 0 {
                    let gi = gs.trailing_zeros() as usize;
                    gs &= gs - 1;
                    grown |= 1 << comp[fi * n + gi];
                }
            }
            if grown == mask {
                return mask;
            }
            mask = grown;
        }
    };

    let start = close(1 << id_code);
    let mut seen: HashSet<u32> = HashSet::from([start]);
    let mut frontier = vec![start];
    while let Some(mask) = frontier.pop() {
        for g in 0..n {
            if mask >> g & 1 == 0 {
                let bigger = close(mask | 1 << g);
                if seen.insert(bigger) {
                    frontier.push(bigger);
                }
            }
        }
    }

    let mut masks: Vec<u32> = seen.into_iter().collect();
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    Ok(masks
        .into_iter()
        .map(|mask| {
            let members = (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| OpTable::from_unary_code(universe, i as u32))
                .collect();
            Monoid::from_sorted_members_unchecked(universe, members)
        })
        .collect())
}

/// One census entry: a submonoid together with its classification flags.
#[derive(Clone, Debug)]
pub struct CensusRecord {
    pub monoid: Monoid,
    pub uclosed: bool,
    /// Whether the monoid is exactly the endomorphism set of its invariant
    /// quasiorders.
    pub end_quord_closed: bool,
    pub contains_constants: bool,
    pub minimal_uclosed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusCounts {
    pub total: usize,
    pub uclosed: usize,
    pub end_quord_closed: usize,
}

/// Classifies every submonoid at `k <= 3`.
pub fn census_records(k: usize) -> Result<Vec<CensusRecord>> {
    let monoids = enumerate_submonoids(k)?;
    let trivial = Monoid::trivial(Universe::new(k)?);
    let mut records: Vec<CensusRecord> = monoids
        .par_iter()
        .map(|m| -> Result<CensusRecord> {
            let uclosed = is_uclosed(m)?.uclosed;
            let quords = invariant_quords(m)?;
            let end_quord_closed = &end_of(quords.members())? == m;
            Ok(CensusRecord {
                monoid: m.clone(),
                uclosed,
                end_quord_closed,
                contains_constants: m.contains_constants(),
                minimal_uclosed: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let uclosed: Vec<Monoid> = records
        .iter()
        .filter(|r| r.uclosed)
        .map(|r| r.monoid.clone())
        .collect();
    for r in records.iter_mut() {
        if !r.uclosed || r.monoid == trivial {
            continue;
        }
        r.minimal_uclosed = uclosed
            .iter()
            .all(|n| n == &trivial || n == &r.monoid || !n.is_subset(&r.monoid));
    }
    Ok(records)
}

pub fn census_counts(k: usize) -> Result<CensusCounts> {
    let records = census_records(k)?;
    Ok(CensusCounts {
        total: records.len(),
        uclosed: records.iter().filter(|r| r.uclosed).count(),
        end_quord_closed: records.iter().filter(|r| r.end_quord_closed).count(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryType {
    /// Identity or constant.
    Trivial,
    /// Idempotent: f . f = f.
    TypeI,
    /// f . f constant with at least 3 preimages of the constant value.
    TypeII,
    /// Permutation of prime order with at least two cycles of that length.
    TypeIII,
    /// f . f constant on a universe with at least 4 elements, not type II.
    TypeIIPrime,
    /// Permutation of prime order with at least two fixed points, not
    /// type III.
    TypeIIIPrime,
    Other,
}

/// Classification of a unary map by the shape of its square and its cycle
/// structure. A map can satisfy a base type and the primed variant at once;
/// the flags record both while `tag` carries the strongest base type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryTypeTag {
    pub tag: UnaryType,
    pub ii_prime: bool,
    pub iii_prime: bool,
    pub fixed_points: usize,
    pub image_size: usize,
    /// Cycle lengths when the map is a permutation, ascending.
    pub cycle_lengths: Vec<usize>,
}

pub fn classify_unary(f: &OpTable) -> Result<UnaryTypeTag> {
    if !f.is_unary() {
        return arg_err("classification applies to unary maps");
    }
    let k = f.universe().size();
    let t = f.table();
    let fixed_points = (0..k).filter(|&x| t[x] as usize == x).count();
    let image: HashSet<u8> = t.iter().copied().collect();
    let image_size = image.len();

    let square: Vec<u8> = (0..k).map(|x| t[t[x] as usize]).collect();
    let square_is_f = square.as_slice() == t;
    let square_constant = square.iter().all(|&v| v == square[0]);

    let is_permutation = image_size == k;
    let mut cycle_lengths = Vec::new();
    if is_permutation {
        let mut seen = vec![false; k];
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = t[x] as usize;
                len += 1;
            }
            cycle_lengths.push(len);
        }
        cycle_lengths.sort_unstable();
    }

    let trivial = f.is_identity() || f.is_constant();
    let type_i = !trivial && square_is_f;
    let (type_ii, ii_prime) = if !trivial && square_constant {
        let v = square[0];
        let preimages = t.iter().filter(|&&y| y == v).count();
        (preimages >= 3, k >= 4)
    } else {
        (false, false)
    };
    // prime order: all cycle lengths are 1 or p for a single prime p
    let (type_iii, iii_prime) = if is_permutation && !trivial {
        let p = *cycle_lengths.last().expect("nonempty");
        let prime = p >= 2 && (2..p).all(|d| p % d != 0);
        let uniform = cycle_lengths.iter().all(|&l| l == 1 || l == p);
        if prime && uniform {
            let p_cycles = cycle_lengths.iter().filter(|&&l| l == p).count();
            let iii = p_cycles >= 2;
            (iii, iii || fixed_points >= 2)
        } else {
            (false, false)
        }
    } else {
        (false, false)
    };

    let tag = if trivial {
        UnaryType::Trivial
    } else if type_i {
        UnaryType::TypeI
    } else if type_ii {
        UnaryType::TypeII
    } else if type_iii {
        UnaryType::TypeIII
    } else if ii_prime {
        UnaryType::TypeIIPrime
    } else if iii_prime {
        UnaryType::TypeIIIPrime
    } else {
        UnaryType::Other
    };
    Ok(UnaryTypeTag {
        tag,
        ii_prime,
        iii_prime,
        fixed_points,
        image_size,
        cycle_lengths,
    })
}

/// True when the map generates one of the minimal u-closed monoids together
/// with the constants: idempotent, or square-constant on at least 4 points,
/// or a prime-order permutation with two fixed points or two long cycles.
pub fn generates_minimal_uclosed(tag: &UnaryTypeTag) -> bool {
    tag.tag != UnaryType::Trivial && (tag.tag == UnaryType::TypeI || tag.ii_prime || tag.iii_prime)
}

/// `M_f`: the least monoid containing `f` and all constants.
pub fn monoid_of(f: &OpTable) -> Result<Monoid> {
    let universe = f.universe();
    let mut gens = vec![f.clone()];
    for a in universe.elements() {
        gens.push(OpTable::constant(universe, a)?);
    }
    Monoid::generate(universe, &gens)
}

#[derive(Clone, Debug)]
pub struct MinimalUclosedReport {
    /// The minimal u-closed monoids.
    pub monoids: Vec<Monoid>,
    /// Minimal elements among the u-closed census monoids; only at `k = 3`.
    pub census_route: Option<Vec<Monoid>>,
    /// The monoids `M_f` for the qualifying unary types, each verified
    /// u-closed.
    pub classification_route: Vec<Monoid>,
    /// Whether the two routes produced the same set.
    pub routes_agree: bool,
}

/// The minimal u-closed monoids (those properly containing no u-closed
/// monoid other than the trivial one). At `k = 3` this cross-checks the
/// census route against the unary classification; at `k = 4` the census is
/// out of reach and only the classification route runs, with a per-monoid
/// u-closedness verification.
pub fn minimal_uclosed(k: usize) -> Result<MinimalUclosedReport> {
    if !(3..=4).contains(&k) {
        return capacity_err("minimal u-closed classification runs at k = 3 or k = 4");
    }
    let universe = Universe::new(k)?;
    let mut classification: Vec<Monoid> = Vec::new();
    for code in 0..codes::pow(k, k) as u32 {
        let f = OpTable::from_unary_code(universe, code);
        let tag = classify_unary(&f)?;
        if generates_minimal_uclosed(&tag) {
            let mf = monoid_of(&f)?;
            if !classification.contains(&mf) {
                classification.push(mf);
            }
        }
    }
    for m in &classification {
        if !is_uclosed(m)?.uclosed {
            return arg_err(format!(
                "classification produced a non-u-closed monoid of size {}",
                m.len()
            ));
        }
    }
    sort_monoids(&mut classification);

    let census_route = if k == 3 {
        let records = census_records(k)?;
        let mut minimal: Vec<Monoid> = records
            .iter()
            .filter(|r| r.minimal_uclosed)
            .map(|r| r.monoid.clone())
            .collect();
        sort_monoids(&mut minimal);
        Some(minimal)
    } else {
        None
    };

    let routes_agree = match &census_route {
        Some(census) => census == &classification,
        None => true,
    };
    let monoids = match &census_route {
        Some(census) => census.clone(),
        None => classification.clone(),
    };
    Ok(MinimalUclosedReport {
        monoids,
        census_route,
        classification_route: classification,
        routes_agree,
    })
}

fn sort_monoids(ms: &mut [Monoid]) {
    ms.sort_unstable_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.member_codes().cmp(&b.member_codes()))
    });
}

/// The cyclic shift `x -> x + 1 (mod k)` together with all constants.
pub fn cycle_monoid(k: usize) -> Result<Monoid> {
    let universe = Universe::new(k)?;
    let table: Vec<u8> = (0..k).map(|x| ((x + 1) % k) as u8).collect();
    let gamma_k = OpTable::new(universe, 1, table)?;
    monoid_of(&gamma_k)
}

#[derive(Clone, Debug)]
pub struct CycleUclReport {
    pub k: usize,
    /// Size of the computed u-closure of the cycle monoid.
    pub computed: usize,
    /// The prime-power sum predicted for it: for `k = p1^m1 * ... * pn^mn`
    /// this is `sum_i pi^(pi + pi^2 + ... + pi^mi)`.
    pub formula: usize,
    /// Whether the u-closure coincides with the endomorphisms of the
    /// invariant congruences of the cycle monoid.
    pub end_con_agrees: bool,
}

/// Runs the u-closure of the cycle monoid and compares it against the
/// closed-form size and against the endomorphism monoid of its congruences.
/// `k <= 4` by default; 5 and 6 are allowed behind the opt-in flag since
/// they take noticeably longer.
pub fn cycle_ucl_size(k: usize, allow_large: bool) -> Result<CycleUclReport> {
    if k > 4 && !allow_large {
        return capacity_err("cycle u-closure beyond k = 4 requires the opt-in flag");
    }
    if k > 6 {
        return capacity_err("cycle u-closure is capped at k = 6");
    }
    let m = cycle_monoid(k)?;
    let closure = ucl(&m)?.result;
    let congruences = invariant_congruences(&m)?;
    let end_con = end_of(congruences.members())?;
    Ok(CycleUclReport {
        k,
        computed: closure.len(),
        formula: cycle_formula(k),
        end_con_agrees: end_con == closure,
    })
}

fn cycle_formula(k: usize) -> usize {
    let mut rest = k;
    let mut total = 0usize;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            let mut exponent_sum = 0usize;
            let mut power = 1usize;
            while rest % p == 0 {
                rest /= p;
                power *= p;
                exponent_sum += power;
            }
            total += p.pow(exponent_sum as u32);
        }
        p += 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(k: usize) -> Universe {
        Universe::new(k).unwrap()
    }

    #[test]
    fn submonoids_on_two_elements_match_subset_filter() {
        let fast = enumerate_submonoids(2).unwrap();
        // oracle: brute force over all subsets of the 4 unary maps
        let universe = u(2);
        let all: Vec<OpTable> = (0..4).map(|c| OpTable::from_unary_code(universe, c)).collect();
        let mut slow = 0;
        for mask in 0u32..16 {
            let members: Vec<OpTable> = (0..4)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| all[i].clone())
                .collect();
            if members.is_empty() {
                continue;
            }
            if Monoid::new(universe, members).is_ok() {
                slow += 1;
            }
        }
        assert_eq!(fast.len(), slow);
        assert_eq!(fast.len(), 6);
        for m in &fast {
            assert!(Monoid::new(universe, m.members().to_vec()).is_ok());
        }
    }

    #[test]
    fn uclosed_count_on_two_elements() {
        let records = census_records(2).unwrap();
        let uclosed: Vec<_> = records.iter().filter(|r| r.uclosed).collect();
        assert_eq!(uclosed.len(), 2);
        assert!(uclosed.iter().all(|r| r.contains_constants));
    }

    #[test]
    fn classification_examples() {
        // idempotent with two fixed points
        let f = OpTable::new(u(3), 1, vec![0, 0, 2]).unwrap();
        let tag = classify_unary(&f).unwrap();
        assert_eq!(tag.tag, UnaryType::TypeI);

        // a transposition with a single fixed point qualifies for nothing
        let g = OpTable::new(u(3), 1, vec![1, 0, 2]).unwrap();
        let tag = classify_unary(&g).unwrap();
        assert_eq!(tag.tag, UnaryType::Other);
        assert!(!tag.iii_prime);

        // square-constant on four points
        let h = OpTable::new(u(4), 1, vec![0, 0, 1, 1]).unwrap();
        let tag = classify_unary(&h).unwrap();
        assert!(tag.ii_prime);
        assert!(matches!(tag.tag, UnaryType::TypeIIPrime | UnaryType::TypeII));

        // double transposition: prime order with two 2-cycles
        let s = OpTable::new(u(4), 1, vec![1, 0, 3, 2]).unwrap();
        let tag = classify_unary(&s).unwrap();
        assert_eq!(tag.tag, UnaryType::TypeIII);
        assert!(tag.iii_prime);

        let id = OpTable::identity(u(3));
        assert_eq!(classify_unary(&id).unwrap().tag, UnaryType::Trivial);
    }

    #[test]
    fn cycle_formula_values() {
        assert_eq!(cycle_formula(2), 4);
        assert_eq!(cycle_formula(3), 27);
        assert_eq!(cycle_formula(4), 64);
        assert_eq!(cycle_formula(5), 3125);
        assert_eq!(cycle_formula(6), 31);
    }

    #[test]
    fn cycle_ucl_small() {
        let r = cycle_ucl_size(2, false).unwrap();
        assert_eq!(r.computed, 4);
        assert_eq!(r.formula, 4);
        assert!(r.end_con_agrees);
        assert!(cycle_ucl_size(5, false).is_err());
    }
}
