//! Preservation of relations by operations, endomorphism monoids, and
//! bounded polymorphism enumeration.

use std::collections::{HashMap, HashSet};

use crate::codes;
use crate::error::{arg_err, capacity_err, Result};
use crate::monoid::Monoid;
use crate::op::OpTable;
use crate::preclone::{ArityIndexedOpSet, DEFAULT_OP_BUDGET};
use crate::relation::Relation;

const POL_MAX_ARITY: usize = 3;
const POL_MAX_UNIVERSE: usize = 5;
const POL_CONSTRAINT_CAP: usize = 10_000_000;

/// Decides whether `f` preserves `rho`: every componentwise application of
/// `f` to tuples of `rho` lands in `rho`.
///
/// The search walks the tuple coordinates, branching over the possible
/// coordinate values of the chosen rows. All row prefixes are pruned against
/// the sorted code list. As soon as the image prefix leaves the relation the
/// search stops: the live row prefixes complete to members, and no extension
/// can bring the image back, so that partial assignment already certifies a
/// violation.
pub fn preserves(f: &OpTable, rho: &Relation) -> Result<bool> {
    if f.universe() != rho.universe() {
        return arg_err("universe mismatch");
    }
    if f.arity() == 1 {
        // direct image check
        for t in rho.tuples() {
            let image: Vec<u8> = t.iter().map(|&x| f.table()[x as usize]).collect();
            if !rho.contains(&image) {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let n = f.arity();
    let mut rows = vec![0u32; n];
    Ok(!violation(f, rho, 0, &mut rows, 0))
}

fn violation(f: &OpTable, rho: &Relation, depth: usize, rows: &mut [u32], image: u32) -> bool {
    if depth == rho.arity() {
        return false;
    }
    let k = rho.universe().size();
    let n = rows.len();
    let mut choice = vec![0u8; n];
    'choices: for c in 0..codes::pow(k, n) as u32 {
        codes::decode_into(c, k, &mut choice);
        let mut next = vec![0u32; n];
        for i in 0..n {
            next[i] = rows[i] * k as u32 + choice[i] as u32;
            if !rho.prefix_alive(next[i], depth + 1) {
                continue 'choices;
            }
        }
        let img = image * k as u32 + f.value_at(&choice) as u32;
        if !rho.prefix_alive(img, depth + 1) {
            return true;
        }
        let saved = rows.to_vec();
        rows.copy_from_slice(&next);
        let hit = violation(f, rho, depth + 1, rows, img);
        rows.copy_from_slice(&saved);
        if hit {
            return true;
        }
    }
    false
}

/// Reference implementation of preservation by direct enumeration of all
/// row combinations; used to cross-check the pruned search at small sizes.
pub fn preserves_naive(f: &OpTable, rho: &Relation) -> Result<bool> {
    if f.universe() != rho.universe() {
        return arg_err("universe mismatch");
    }
    let n = f.arity();
    let tuples = rho.tuples();
    let mut pick = vec![0usize; n];
    loop {
        let rows: Vec<&[u8]> = pick.iter().map(|&i| tuples[i].as_slice()).collect();
        if !rho.contains(&f.apply_to_tuples(&rows)?) {
            return Ok(false);
        }
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(true);
            }
            j -= 1;
            pick[j] += 1;
            if pick[j] < tuples.len() {
                break;
            }
            pick[j] = 0;
        }
    }
}

/// All unary maps preserving every relation in `q`, wrapped as a monoid
/// (endomorphism sets are always composition closed and contain the
/// identity).
pub fn end_of(q: &[Relation]) -> Result<Monoid> {
    let universe = match q.first() {
        Some(r) => r.universe(),
        None => return arg_err("end_of needs at least one relation to fix the universe"),
    };
    if q.iter().any(|r| r.universe() != universe) {
        return arg_err("universe mismatch within the relation set");
    }
    let k = universe.size();
    let mut members = Vec::new();
    for code in 0..codes::pow(k, k) as u32 {
        let f = OpTable::from_unary_code(universe, code);
        let mut ok = true;
        for rho in q {
            if !preserves(&f, rho)? {
                ok = false;
                break;
            }
        }
        if ok {
            members.push(f);
        }
    }
    Ok(Monoid::from_sorted_members_unchecked(universe, members))
}

/// All operations of arity `<= max_arity` preserving every relation in `q`.
///
/// Enumeration is a backtracking search over the value table. Every choice
/// of rows from a relation pins down table cells whose images must again
/// form a member tuple; these constraints are deduplicated, bucketed by
/// their last-assigned cell, and checked as soon as that cell gets a value.
/// This search is deliberately independent of the translation-based `M*`
/// machinery, so comparing the two is meaningful.
pub fn pol_bounded(q: &[Relation], max_arity: usize) -> Result<ArityIndexedOpSet> {
    pol_bounded_with_budget(q, max_arity, DEFAULT_OP_BUDGET)
}

pub fn pol_bounded_with_budget(
    q: &[Relation],
    max_arity: usize,
    budget: usize,
) -> Result<ArityIndexedOpSet> {
    let universe = match q.first() {
        Some(r) => r.universe(),
        None => return arg_err("pol_bounded needs at least one relation to fix the universe"),
    };
    if q.iter().any(|r| r.universe() != universe) {
        return arg_err("universe mismatch within the relation set");
    }
    if !(1..=POL_MAX_ARITY).contains(&max_arity) {
        return capacity_err(format!(
            "polymorphism search is capped at arity {POL_MAX_ARITY}"
        ));
    }
    if universe.size() > POL_MAX_UNIVERSE {
        return capacity_err(format!(
            "polymorphism search is capped at {POL_MAX_UNIVERSE} elements"
        ));
    }
    let mut out = ArityIndexedOpSet::new(universe);
    for n in 1..=max_arity {
        for f in pol_arity(q, n, budget)? {
            out.insert(f)?;
        }
    }
    Ok(out)
}

struct TableConstraint {
    /// Cells of the value table whose entries form the image tuple.
    cells: Vec<u32>,
    rel: usize,
}

fn pol_arity(q: &[Relation], arity: usize, budget: usize) -> Result<Vec<OpTable>> {
    let universe = q[0].universe();
    let k = universe.size();
    let cells = codes::pow(k, arity);

    // Collect the distinct cell patterns induced by row choices.
    let mut seen: HashSet<(Vec<u32>, usize)> = HashSet::new();
    let mut by_last_cell: HashMap<u32, Vec<TableConstraint>> = HashMap::new();
    let mut total = 0usize;
    for (ri, rho) in q.iter().enumerate() {
        let tuples = rho.tuples();
        let m = rho.arity();
        let mut pick = vec![0usize; arity];
        if tuples.is_empty() {
            continue;
        }
        loop {
            total += 1;
            if total > POL_CONSTRAINT_CAP {
                return capacity_err("too many preservation constraints");
            }
            let mut cell_vec = Vec::with_capacity(m);
            let mut args = vec![0u8; arity];
            for j in 0..m {
                for (i, &p) in pick.iter().enumerate() {
                    args[i] = tuples[p][j];
                }
                cell_vec.push(codes::encode(&args, k));
            }
            if seen.insert((cell_vec.clone(), ri)) {
                let last = *cell_vec.iter().max().expect("nonempty");
                by_last_cell
                    .entry(last)
                    .or_default()
                    .push(TableConstraint { cells: cell_vec, rel: ri });
            }
            let mut j = arity;
            let mut done = true;
            while j > 0 {
                j -= 1;
                pick[j] += 1;
                if pick[j] < tuples.len() {
                    done = false;
                    break;
                }
                pick[j] = 0;
            }
            if done {
                break;
            }
        }
    }

    let mut table = vec![0u8; cells];
    let mut found = Vec::new();
    search_tables(
        q,
        &by_last_cell,
        &mut table,
        0,
        k,
        arity,
        universe,
        budget,
        &mut found,
    )?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn search_tables(
    q: &[Relation],
    by_last_cell: &HashMap<u32, Vec<TableConstraint>>,
    table: &mut Vec<u8>,
    cell: usize,
    k: usize,
    arity: usize,
    universe: crate::universe::Universe,
    budget: usize,
    found: &mut Vec<OpTable>,
) -> Result<()> {
    if cell == table.len() {
        if found.len() >= budget {
            return capacity_err("polymorphism enumeration exceeded its budget");
        }
        found.push(OpTable::from_raw(universe, arity, table.clone()));
        return Ok(());
    }
    'values: for v in 0..k as u8 {
        table[cell] = v;
        if let Some(constraints) = by_last_cell.get(&(cell as u32)) {
            for c in constraints {
                let rho = &q[c.rel];
                let mut img = 0u32;
                for &cc in &c.cells {
                    img = img * k as u32 + table[cc as usize] as u32;
                }
                if !rho.contains_code(img) {
                    continue 'values;
                }
            }
        }
        search_tables(
            q, by_last_cell, table, cell + 1, k, arity, universe, budget, found,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preclone::{delta, in_star, star_members};
    use crate::universe::Universe;

    fn u(k: usize) -> Universe {
        Universe::new(k).unwrap()
    }

    fn m3a_rho() -> Relation {
        Relation::new(u(3), 2, &[[0, 0], [1, 1], [2, 2], [0, 1], [1, 2]]).unwrap()
    }

    fn m3a_f() -> OpTable {
        OpTable::new(u(3), 2, vec![0, 0, 1, 0, 0, 1, 1, 1, 2]).unwrap()
    }

    #[test]
    fn diagonal_of_counterexample_breaks_preservation() {
        let rho = m3a_rho();
        let g = delta(&m3a_f());
        assert_eq!(g.table(), &[0, 0, 2]);
        assert!(!preserves(&g, &rho).unwrap());
        // it maps (1,2) to (0,2), which is outside
        assert!(!rho.contains(&[0, 2]));
    }

    #[test]
    fn identity_and_constants_preserve_reflexive_relations() {
        let rho = m3a_rho();
        assert!(preserves(&OpTable::identity(u(3)), &rho).unwrap());
        for a in 0..3 {
            assert!(preserves(&OpTable::constant(u(3), a).unwrap(), &rho).unwrap());
        }
    }

    #[test]
    fn pruned_search_matches_naive() {
        let rho = m3a_rho();
        for code in 0..19683u32 {
            let f = OpTable::from_raw(u(3), 2, crate::codes::decode(code, 3, 9));
            assert_eq!(
                preserves(&f, &rho).unwrap(),
                preserves_naive(&f, &rho).unwrap(),
                "disagreement at table code {code}"
            );
        }
    }

    #[test]
    fn end_of_empty_relation_set_needs_universe() {
        assert!(end_of(&[]).is_err());
    }

    #[test]
    fn end_of_equality_is_everything() {
        let delta_rel = Relation::equality(u(3));
        let m = end_of(&[delta_rel]).unwrap();
        assert_eq!(m.len(), 27);
    }

    #[test]
    fn end_of_counterexample_relation() {
        let m = end_of(&[m3a_rho()]).unwrap();
        assert_eq!(m.len(), 8);
        assert!(m.contains_constants());
        assert!(in_star(&m3a_f(), &m).unwrap());
    }

    #[test]
    fn pol_unary_slice_is_end() {
        let rho = m3a_rho();
        let pol = pol_bounded(&[rho.clone()], 1).unwrap();
        let end = end_of(&[rho]).unwrap();
        assert_eq!(pol.arity_slice(1), end.members());
    }

    #[test]
    fn pol_matches_brute_force_filter() {
        let rho = m3a_rho();
        let pol = pol_bounded(&[rho.clone()], 2).unwrap();
        let mut slow = Vec::new();
        for code in 0..19683u32 {
            let f = OpTable::from_raw(u(3), 2, crate::codes::decode(code, 3, 9));
            if preserves_naive(&f, &rho).unwrap() {
                slow.push(f);
            }
        }
        assert_eq!(pol.arity_slice(2), slow.as_slice());
    }

    #[test]
    fn counterexample_op_is_in_star_but_not_in_pol() {
        // its translations preserve the relation, yet the operation itself
        // does not: rows (1,2),(1,2) map to (f(1,1), f(2,2)) = (0,2)
        let rho = m3a_rho();
        let f = m3a_f();
        let end = end_of(&[rho.clone()]).unwrap();
        assert!(in_star(&f, &end).unwrap());
        assert!(!preserves(&f, &rho).unwrap());
        let pol = pol_bounded(&[rho], 2).unwrap();
        assert!(!pol.contains(&f));
        let star = star_members(&end, 2).unwrap();
        assert!(star.binary_search(&f).is_ok());
    }

    #[test]
    fn pol_of_full_relation_unary() {
        let full = Relation::full(u(3), 2).unwrap();
        let pol = pol_bounded(&[full], 1).unwrap();
        assert_eq!(pol.arity_slice(1).len(), 27);
    }
}
