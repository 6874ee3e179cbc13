//! The executable side of the correspondence between transformation monoids
//! and their invariant generalized quasiorders: the table relation Γ of a
//! monoid, u-closedness, the u-closure, the translation property Ξ, and
//! bounded completeness checks.
//!
//! A monoid M is u-closed when the set `M*` of all operations whose
//! translations lie in M is a clone. Operationally that is a condition on
//! Γ_M, the k-ary relation of member tables: M is u-closed exactly when M
//! contains the constants and Γ_M is generalized transitive. Each k x k
//! matrix with rows and columns in Γ_M is the value table of a binary member
//! of `M*`, and its diagonal is the table of the identified operation, which
//! every u-closed supermonoid must absorb. The u-closure below saturates
//! exactly that rule.

use crate::error::{arg_err, capacity_err, Result};
use crate::monoid::Monoid;
use crate::op::OpTable;
use crate::partial::{is_gquord, partial};
use crate::preclone::{
    clone_generate_bounded_with_budget, star_members_with_budget, translations, ArityIndexedOpSet,
    DEFAULT_OP_BUDGET,
};
use crate::preserve::{end_of, pol_bounded_with_budget};
use crate::relation::Relation;

const UCL_MAX_UNIVERSE: usize = 6;

/// The k-ary relation of member tables: one k-tuple `(g(0), ..., g(k-1))`
/// per member. The monoid is recovered as the endomorphism set of this
/// relation.
pub fn gamma(m: &Monoid) -> Relation {
    let rel = m.table_relation();
    debug_assert_eq!(rel.len(), m.len());
    // cheap scales only; the round trip is exercised broadly in tests
    debug_assert!(
        m.universe().size() > 4
            || m.len() > 300
            || end_of(std::slice::from_ref(&rel)).map(|e| &e == m).unwrap_or(false)
    );
    rel
}

#[derive(Clone, Debug)]
pub enum UclosedWitness {
    /// A constant map missing from the monoid; u-closed monoids contain all
    /// of them.
    MissingConstant(u8),
    /// A binary operation whose translations all lie in the monoid while the
    /// table of its argument identification does not.
    DiagonalEscape { op: OpTable, diagonal: OpTable },
}

#[derive(Clone, Debug)]
pub struct UclosedReport {
    pub uclosed: bool,
    pub witness: Option<UclosedWitness>,
}

/// Decides u-closedness via the table relation: the monoid must contain all
/// constants and Γ must be generalized transitive. On failure the witness
/// matrix is handed back as the binary operation it encodes.
pub fn is_uclosed(m: &Monoid) -> Result<UclosedReport> {
    for a in m.universe().elements() {
        let c = OpTable::constant(m.universe(), a)?;
        if !m.contains(&c) {
            return Ok(UclosedReport {
                uclosed: false,
                witness: Some(UclosedWitness::MissingConstant(a)),
            });
        }
    }
    let report = is_gquord(&gamma(m))?;
    debug_assert!(report.reflexive);
    match report.witness {
        None => Ok(UclosedReport {
            uclosed: true,
            witness: None,
        }),
        Some(matrix) => {
            let op = OpTable::new(m.universe(), 2, matrix.entries().to_vec())?;
            let diagonal = OpTable::new(m.universe(), 1, matrix.diagonal())?;
            debug_assert!(crate::preclone::in_star(&op, m)?);
            debug_assert!(!m.contains(&diagonal));
            Ok(UclosedReport {
                uclosed: false,
                witness: Some(UclosedWitness::DiagonalEscape { op, diagonal }),
            })
        }
    }
}

#[derive(Clone, Debug)]
pub struct UclStep {
    /// Members gained in this round (new diagonals plus whatever the
    /// composition closure drags in).
    pub added: Vec<OpTable>,
    /// Size of Γ after the round, i.e. the monoid size.
    pub gamma_size: usize,
}

#[derive(Clone, Debug)]
pub struct UclTrace {
    pub start: Monoid,
    pub steps: Vec<UclStep>,
    pub result: Monoid,
}

/// The least u-closed monoid containing `m`.
///
/// Fixpoint derivation: close under composition with the constants added,
/// then repeatedly adjoin every diagonal of `partial(Γ)` as a unary map and
/// re-close, until `partial(Γ) ⊆ Γ`. Soundness: each adjoined diagonal comes
/// from a binary operation in `N*` with `N` inside the closure, and every
/// u-closed monoid above absorbs such diagonals. Completeness: at the
/// fixpoint Γ is reflexive and generalized transitive, so the result itself
/// is u-closed.
pub fn ucl(m: &Monoid) -> Result<UclTrace> {
    let universe = m.universe();
    if universe.size() > UCL_MAX_UNIVERSE {
        return capacity_err(format!(
            "u-closure is capped at {UCL_MAX_UNIVERSE} elements"
        ));
    }
    let mut steps = Vec::new();
    let mut gens: Vec<OpTable> = m.members().to_vec();
    for a in universe.elements() {
        gens.push(OpTable::constant(universe, a)?);
    }
    let mut cur = Monoid::generate(universe, &gens)?;
    if &cur != m {
        steps.push(UclStep {
            added: diff(&cur, m),
            gamma_size: cur.len(),
        });
    }
    loop {
        let gam = cur.table_relation();
        let grown = partial(&gam)?;
        let fresh: Vec<OpTable> = grown
            .codes()
            .iter()
            .filter(|&&c| !gam.contains_code(c))
            .map(|&c| OpTable::from_unary_code(universe, c))
            .collect();
        if fresh.is_empty() {
            break;
        }
        let mut gens: Vec<OpTable> = cur.members().to_vec();
        gens.extend(fresh);
        let next = Monoid::generate(universe, &gens)?;
        steps.push(UclStep {
            added: diff(&next, &cur),
            gamma_size: next.len(),
        });
        cur = next;
    }
    debug_assert!(is_uclosed(&cur)?.uclosed);
    Ok(UclTrace {
        start: m.clone(),
        steps,
        result: cur,
    })
}

fn diff(larger: &Monoid, smaller: &Monoid) -> Vec<OpTable> {
    larger
        .members()
        .iter()
        .filter(|f| !smaller.contains(f))
        .cloned()
        .collect()
}

#[derive(Clone, Debug)]
pub struct XiCounterexample {
    pub op: OpTable,
    /// Whether the operation preserves every relation of the set.
    pub in_pol: bool,
    /// Whether all its translations are endomorphisms of the set.
    pub in_star: bool,
}

#[derive(Clone, Debug)]
pub struct XiReport {
    pub holds: bool,
    /// The verification is bounded: equality was checked for all arities up
    /// to this bound only.
    pub checked_max_arity: usize,
    pub counterexample: Option<XiCounterexample>,
}

/// Checks the translation property for a relation set: the polymorphisms of
/// arity `<= max_arity` must be exactly the operations whose translations
/// are endomorphisms. The two sides are computed by independent searches
/// (table backtracking against the relations vs. line-constrained search
/// against Γ of the endomorphism monoid).
pub fn xi_check(q: &[Relation], max_arity: usize) -> Result<XiReport> {
    xi_check_with_budget(q, max_arity, DEFAULT_OP_BUDGET)
}

pub fn xi_check_with_budget(q: &[Relation], max_arity: usize, budget: usize) -> Result<XiReport> {
    if max_arity > 3 {
        return capacity_err("xi checks are capped at arity 3");
    }
    let end = end_of(q)?;
    let pol = pol_bounded_with_budget(q, max_arity, budget)?;
    for n in 1..=max_arity {
        let star = star_members_with_budget(&end, n, budget)?;
        let pol_n = pol.arity_slice(n);
        if let Some(op) = first_difference(pol_n, &star) {
            return Ok(XiReport {
                holds: false,
                checked_max_arity: max_arity,
                counterexample: Some(XiCounterexample {
                    in_pol: pol_n.binary_search(&op).is_ok(),
                    in_star: star.binary_search(&op).is_ok(),
                    op,
                }),
            });
        }
    }
    Ok(XiReport {
        holds: true,
        checked_max_arity: max_arity,
        counterexample: None,
    })
}

fn first_difference(a: &[OpTable], b: &[OpTable]) -> Option<OpTable> {
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => return Some(a[i].clone()),
            std::cmp::Ordering::Greater => return Some(b[j].clone()),
        }
    }
    a.get(i).or_else(|| b.get(j)).cloned()
}

#[derive(Clone, Debug)]
pub struct CompletenessWitness {
    pub arity: usize,
    pub op: OpTable,
    /// Whether the witness lies in the bounded clone (as opposed to only in
    /// the star side).
    pub in_clone: bool,
}

#[derive(Clone, Debug)]
pub struct CompletenessReport {
    pub complete: bool,
    /// Bounded verification: arities checked, nothing beyond.
    pub checked_max_arity: usize,
    /// The u-closure of the translations of the generators (with constants).
    pub monoid: Monoid,
    pub witness: Option<CompletenessWitness>,
}

/// Bounded completeness check for an algebra given by its operations: the
/// clone generated by the operations and the constants is compared against
/// the operations whose translations lie in the u-closure of the translation
/// monoid. Invariant generalized quasiorders see only translations, so the
/// right-hand side is the polymorphism side of the comparison.
pub fn gquord_complete_check(f: &[OpTable], max_arity: usize) -> Result<CompletenessReport> {
    gquord_complete_check_with_budget(f, max_arity, DEFAULT_OP_BUDGET)
}

pub fn gquord_complete_check_with_budget(
    f: &[OpTable],
    max_arity: usize,
    budget: usize,
) -> Result<CompletenessReport> {
    if f.is_empty() {
        return arg_err("completeness check needs at least one operation or a universe carrier");
    }
    let universe = f[0].universe();
    if f.iter().any(|g| g.universe() != universe) {
        return arg_err("universe mismatch among the operations");
    }
    if max_arity > 3 {
        return capacity_err("completeness checks are capped at arity 3");
    }
    let mut gens: Vec<OpTable> = Vec::new();
    for g in f {
        gens.extend(translations(g));
    }
    for a in universe.elements() {
        gens.push(OpTable::constant(universe, a)?);
    }
    let monoid = ucl(&Monoid::generate(universe, &gens)?)?.result;

    let mut clone_gens: Vec<OpTable> = f.to_vec();
    for a in universe.elements() {
        clone_gens.push(OpTable::constant(universe, a)?);
    }
    let clone = clone_generate_bounded_with_budget(universe, &clone_gens, max_arity, budget)?;

    for n in 1..=max_arity {
        let star = star_members_with_budget(&monoid, n, budget)?;
        let clone_n = clone.arity_slice(n);
        if let Some(op) = first_difference(clone_n, &star) {
            return Ok(CompletenessReport {
                complete: false,
                checked_max_arity: max_arity,
                monoid,
                witness: Some(CompletenessWitness {
                    arity: n,
                    in_clone: clone_n.binary_search(&op).is_ok(),
                    op,
                }),
            });
        }
    }
    Ok(CompletenessReport {
        complete: true,
        checked_max_arity: max_arity,
        monoid,
        witness: None,
    })
}

/// Convenience: the completeness check for the algebra with no basic
/// operations (the clone side degenerates to constants and projections).
pub fn gquord_complete_check_empty(
    universe: crate::universe::Universe,
    max_arity: usize,
) -> Result<CompletenessReport> {
    let id = OpTable::identity(universe);
    // the identity changes neither side: it is a projection and a translation
    gquord_complete_check(&[id], max_arity)
}

/// The slice comparison used by the reports, exposed for the census and the
/// acceptance suite: members of `M*` at one arity.
pub fn star_slice(m: &Monoid, arity: usize) -> Result<ArityIndexedOpSet> {
    let ops = star_members_with_budget(m, arity, DEFAULT_OP_BUDGET)?;
    ArityIndexedOpSet::from_ops(m.universe(), ops)
}
