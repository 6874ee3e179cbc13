//! The diagonal operator on relations and the closures built from it.
//!
//! For an m-ary relation, consider all m x m matrices whose rows and columns
//! are member tuples. The diagonal operator collects the main diagonals of
//! those matrices; iterating it yields generalized transitive closure, and a
//! relation is generalized transitive exactly when the operator adds nothing.

use crate::codes;
use crate::error::{capacity_err, Result};
use crate::relation::Relation;
use crate::tensor::LineTensor;

/// Cap on the candidate diagonal space `k^m` for the matrix searches.
const DIAGONAL_SPACE_CAP: usize = 1 << 20;

/// Row index of a relation: for each matrix position `i` and value `v`, the
/// member tuples with `t[i] = v`, decoded once. Row `i` of a qualifying
/// matrix must carry the diagonal value at position `i`.
struct RowIndex {
    tuples: Vec<Vec<u8>>,
    by_pos_val: Vec<Vec<Vec<usize>>>,
}

impl RowIndex {
    fn build(rho: &Relation) -> RowIndex {
        let k = rho.universe().size();
        let m = rho.arity();
        let tuples = rho.tuples();
        let mut by_pos_val = vec![vec![Vec::new(); k]; m];
        for (ti, t) in tuples.iter().enumerate() {
            for (i, &v) in t.iter().enumerate() {
                by_pos_val[i][v as usize].push(ti);
            }
        }
        RowIndex { tuples, by_pos_val }
    }
}

/// Searches for an m x m matrix whose rows and columns all belong to `rho`
/// and whose diagonal equals `diag`. Rows are chosen top-down from the
/// position/value index; every column prefix is pruned against the sorted
/// code list. Returns the rows of a witness matrix.
fn matrix_with_diagonal(rho: &Relation, index: &RowIndex, diag: &[u8]) -> Option<Vec<Vec<u8>>> {
    let m = rho.arity();
    let k = rho.universe().size() as u32;
    let mut rows: Vec<usize> = Vec::with_capacity(m);
    let mut col_prefix = vec![0u32; m];

    fn descend(
        rho: &Relation,
        index: &RowIndex,
        diag: &[u8],
        rows: &mut Vec<usize>,
        col_prefix: &mut [u32],
        k: u32,
    ) -> bool {
        let m = col_prefix.len();
        let i = rows.len();
        if i == m {
            return true;
        }
        'rows: for &cand in &index.by_pos_val[i][diag[i] as usize] {
            let t = &index.tuples[cand];
            let saved = col_prefix.to_vec();
            for j in 0..m {
                col_prefix[j] = col_prefix[j] * k + t[j] as u32;
                if !rho.prefix_alive(col_prefix[j], i + 1) {
                    col_prefix.copy_from_slice(&saved);
                    continue 'rows;
                }
            }
            rows.push(cand);
            if descend(rho, index, diag, rows, col_prefix, k) {
                return true;
            }
            rows.pop();
            col_prefix.copy_from_slice(&saved);
        }
        false
    }

    if descend(rho, index, diag, &mut rows, &mut col_prefix, k) {
        Some(rows.iter().map(|&r| index.tuples[r].clone()).collect())
    } else {
        None
    }
}

fn check_space(rho: &Relation) -> Result<usize> {
    let space = codes::pow(rho.universe().size(), rho.arity());
    if space > DIAGONAL_SPACE_CAP {
        return capacity_err(format!(
            "diagonal space {}^{} exceeds the cap",
            rho.universe().size(),
            rho.arity()
        ));
    }
    Ok(space)
}

/// The diagonal operator: all diagonals of matrices whose rows and columns
/// lie in `rho`. Every candidate diagonal is decided by its own pruned
/// search, so the cost is `k^m` feasibility checks rather than an
/// enumeration of all row combinations.
pub fn partial(rho: &Relation) -> Result<Relation> {
    let space = check_space(rho)?;
    let index = RowIndex::build(rho);
    let k = rho.universe().size();
    let m = rho.arity();
    let reflexive = rho.is_reflexive();
    let mut out = Vec::new();
    let mut diag = vec![0u8; m];
    for c in 0..space as u32 {
        codes::decode_into(c, k, &mut diag);
        // For reflexive relations each member is its own diagonal via the
        // matrix with all rows equal to it.
        if reflexive && rho.contains_code(c) {
            out.push(c);
            continue;
        }
        if matrix_with_diagonal(rho, &index, &diag).is_some() {
            out.push(c);
        }
    }
    Relation::from_codes(rho.universe(), m, out)
}

/// Reference implementation of the diagonal operator by enumerating all
/// `|rho|^m` row choices; intended for cross-checks on small inputs.
pub fn partial_naive(rho: &Relation) -> Result<Relation> {
    let m = rho.arity();
    let tuples = rho.tuples();
    let k = rho.universe().size();
    let mut out = Vec::new();
    if tuples.is_empty() {
        return Relation::empty(rho.universe(), m);
    }
    let mut pick = vec![0usize; m];
    loop {
        let mut cols_ok = true;
        'cols: for j in 0..m {
            let col: Vec<u8> = (0..m).map(|i| tuples[pick[i]][j]).collect();
            if !rho.contains(&col) {
                cols_ok = false;
                break 'cols;
            }
        }
        if cols_ok {
            let diag: Vec<u8> = (0..m).map(|i| tuples[pick[i]][i]).collect();
            out.push(codes::encode(&diag, k));
        }
        let mut j = m;
        loop {
            if j == 0 {
                return Relation::from_codes(rho.universe(), m, out);
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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureMode {
    Reflexive,
    Transitive,
    Gquord,
}

/// Reflexive, generalized transitive, or full closure. The transitive
/// closure iterates `rho <- rho ∪ partial(rho)` to its fixpoint; the full
/// closure applies it after the reflexive one.
pub fn closure(rho: &Relation, mode: ClosureMode) -> Result<Relation> {
    match mode {
        ClosureMode::Reflexive => Ok(rho.reflexive_closure()),
        ClosureMode::Transitive => transitive_closure(rho),
        ClosureMode::Gquord => transitive_closure(&rho.reflexive_closure()),
    }
}

fn transitive_closure(rho: &Relation) -> Result<Relation> {
    let mut cur = rho.clone();
    loop {
        let step = cur.union(&partial(&cur)?)?;
        if step.len() == cur.len() {
            return Ok(cur);
        }
        cur = step;
    }
}

/// The verdict on reflexivity and generalized transitivity, with a witness
/// matrix when transitivity fails: its rows and columns all belong to the
/// relation while its diagonal does not.
#[derive(Clone, Debug)]
pub struct GquordReport {
    pub reflexive: bool,
    pub transitive: bool,
    pub witness: Option<LineTensor>,
}

impl GquordReport {
    pub fn is_gquord(&self) -> bool {
        self.reflexive && self.transitive
    }
}

/// Tests whether `rho` is a generalized quasiorder. Transitivity is decided
/// by hunting for a matrix whose diagonal escapes the relation, i.e. by
/// checking `partial(rho) ⊆ rho` one complement candidate at a time.
pub fn is_gquord(rho: &Relation) -> Result<GquordReport> {
    let space = check_space(rho)?;
    let reflexive = rho.is_reflexive();
    let index = RowIndex::build(rho);
    let k = rho.universe().size();
    let mut diag = vec![0u8; rho.arity()];
    for c in 0..space as u32 {
        if rho.contains_code(c) {
            continue;
        }
        codes::decode_into(c, k, &mut diag);
        if let Some(rows) = matrix_with_diagonal(rho, &index, &diag) {
            let witness = LineTensor::from_rows(&rows)?;
            debug_assert!(crate::tensor::models(rho, &witness)?);
            debug_assert!(!rho.contains(&witness.diagonal()));
            return Ok(GquordReport {
                reflexive,
                transitive: false,
                witness: Some(witness),
            });
        }
    }
    Ok(GquordReport {
        reflexive,
        transitive: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;

    fn u(k: usize) -> Universe {
        Universe::new(k).unwrap()
    }

    fn m3a_rho() -> Relation {
        Relation::new(u(3), 2, &[[0, 0], [1, 1], [2, 2], [0, 1], [1, 2]]).unwrap()
    }

    fn r1_rho() -> Relation {
        Relation::new(
            u(3),
            3,
            &[[0, 0, 0], [1, 1, 1], [2, 2, 2], [2, 0, 1], [1, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn partial_of_binary_is_relational_square() {
        let rho = m3a_rho();
        let square = rho.compose_binary(&rho).unwrap();
        assert_eq!(partial(&rho).unwrap(), square);
        assert!(square.contains(&[0, 2]));
    }

    #[test]
    fn partial_of_single_constant_tuple() {
        let rho = Relation::new(u(3), 3, &[[0, 0, 0]]).unwrap();
        assert_eq!(partial(&rho).unwrap(), rho);
    }

    #[test]
    fn partial_matches_naive() {
        let rho = m3a_rho();
        assert_eq!(partial(&rho).unwrap(), partial_naive(&rho).unwrap());
        let r1 = r1_rho();
        assert_eq!(partial(&r1).unwrap(), partial_naive(&r1).unwrap());
        let empty = Relation::empty(u(3), 2).unwrap();
        assert_eq!(partial(&empty).unwrap(), partial_naive(&empty).unwrap());
    }

    #[test]
    fn reflexive_relations_grow_under_partial() {
        let rho = m3a_rho();
        let d = partial(&rho).unwrap();
        assert!(rho.is_subset(&d));
    }

    #[test]
    fn reflexive_closure_of_empty() {
        let empty = Relation::empty(u(3), 2).unwrap();
        let r = closure(&empty, ClosureMode::Reflexive).unwrap();
        assert_eq!(r, Relation::equality(u(3)));
    }

    #[test]
    fn gquord_closure_of_counterexample_is_the_chain() {
        let rho = m3a_rho();
        let closed = closure(&rho, ClosureMode::Gquord).unwrap();
        let chain = Relation::new(u(3), 2, &[[0, 0], [0, 1], [0, 2], [1, 1], [1, 2], [2, 2]])
            .unwrap();
        assert!(closed.contains(&[0, 2]));
        assert_eq!(closed, chain);
    }

    #[test]
    fn transitive_closure_fixes_quasiorders() {
        let chain = Relation::new(u(3), 2, &[[0, 0], [0, 1], [0, 2], [1, 1], [1, 2], [2, 2]])
            .unwrap();
        assert_eq!(closure(&chain, ClosureMode::Transitive).unwrap(), chain);
    }

    #[test]
    fn ternary_example_is_gquord_but_projection_is_not() {
        let r1 = r1_rho();
        let report = is_gquord(&r1).unwrap();
        assert!(report.reflexive && report.transitive);

        let pr = r1.project(&[1, 2]).unwrap();
        let expected =
            Relation::new(u(3), 2, &[[0, 0], [1, 1], [2, 2], [0, 1], [1, 2]]).unwrap();
        assert_eq!(pr, expected);
        let report = is_gquord(&pr).unwrap();
        assert!(report.reflexive);
        assert!(!report.transitive);
    }

    #[test]
    fn counterexample_relation_fails_with_witness() {
        let rho = m3a_rho();
        let report = is_gquord(&rho).unwrap();
        assert!(report.reflexive);
        assert!(!report.transitive);
        let w = report.witness.expect("witness for failed transitivity");
        assert!(crate::tensor::models(&rho, &w).unwrap());
        assert!(!rho.contains(&w.diagonal()));
    }

    #[test]
    fn binary_gquord_test_is_the_quasiorder_test() {
        // over all reflexive binary relations on 2 elements
        for mask in 0..16u32 {
            let codes: Vec<u32> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let tuples: Vec<Vec<u8>> = codes
                .iter()
                .map(|&c| vec![(c / 2) as u8, (c % 2) as u8])
                .collect();
            let rho = Relation::new(u(2), 2, &tuples).unwrap();
            let report = is_gquord(&rho).unwrap();
            let reflexive = rho.contains(&[0, 0]) && rho.contains(&[1, 1]);
            let mut transitive = true;
            for a in 0..2u8 {
                for b in 0..2u8 {
                    for c in 0..2u8 {
                        if rho.contains(&[a, b]) && rho.contains(&[b, c]) && !rho.contains(&[a, c])
                        {
                            transitive = false;
                        }
                    }
                }
            }
            assert_eq!(report.reflexive, reflexive, "mask {mask}");
            // for binary relations the matrix condition is plain transitivity
            let via_partial = partial(&rho).unwrap().is_subset(&rho);
            assert_eq!(report.transitive, via_partial, "mask {mask}");
            assert_eq!(via_partial, transitive, "mask {mask}");
        }
    }

    #[test]
    fn diagonal_relations_are_gquords() {
        let d = Relation::diagonal(u(3), 3, &[vec![0, 2], vec![1]]).unwrap();
        assert!(is_gquord(&d).unwrap().is_gquord());
        let full = Relation::diagonal(u(2), 2, &[vec![0], vec![1]]).unwrap();
        assert!(is_gquord(&full).unwrap().is_gquord());
    }
}
