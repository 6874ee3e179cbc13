//! The calculus of operation tables: argument rotation and swap, fictitious
//! arguments, argument identification, linearized composition, translations,
//! and membership in the translation-closed set `M*` of a monoid.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::codes;
use crate::error::{arg_err, capacity_err, Result};
use crate::monoid::Monoid;
use crate::op::OpTable;
use crate::relation::Relation;
use crate::universe::Universe;

/// Default cap on enumerated operation sets (star slices, bounded clones).
pub const DEFAULT_OP_BUDGET: usize = 1 << 22;

const STAR_MAX_ARITY: usize = 4;
const STAR_CELL_CAP: usize = 4096;

/// Cyclic argument rotation: `(zeta f)(x1, ..., xn) = f(x2, ..., xn, x1)`.
/// Unary operations are fixed.
pub fn zeta(f: &OpTable) -> OpTable {
    if f.arity() == 1 {
        return f.clone();
    }
    permute_args(f, &|args: &mut [u8]| args.rotate_left(1))
}

/// Swap of the first two arguments; unary operations are fixed.
pub fn tau(f: &OpTable) -> OpTable {
    if f.arity() == 1 {
        return f.clone();
    }
    permute_args(f, &|args: &mut [u8]| args.swap(0, 1))
}

fn permute_args(f: &OpTable, rearrange: &dyn Fn(&mut [u8])) -> OpTable {
    let k = f.universe().size();
    let n = f.arity();
    let mut args = vec![0u8; n];
    let mut table = vec![0u8; f.table().len()];
    for (idx, slot) in table.iter_mut().enumerate() {
        codes::decode_into(idx as u32, k, &mut args);
        rearrange(&mut args);
        *slot = f.value_at(&args);
    }
    OpTable::from_raw(f.universe(), n, table)
}

/// Adds a fictitious first argument:
/// `(nabla f)(x1, ..., x_{n+1}) = f(x2, ..., x_{n+1})`.
pub fn nabla(f: &OpTable) -> Result<OpTable> {
    let k = f.universe().size();
    let n = f.arity();
    // The first argument is the most significant digit, so the new table is
    // k copies of the old one.
    let mut table = Vec::new();
    if f.table().len().checked_mul(k).unwrap_or(usize::MAX) > 1 << 20 {
        return capacity_err("table too large for nabla");
    }
    for _ in 0..k {
        table.extend_from_slice(f.table());
    }
    Ok(OpTable::from_raw(f.universe(), n + 1, table))
}

/// Identifies the first two arguments:
/// `(delta f)(x1, ..., x_{n-1}) = f(x1, x1, x2, ..., x_{n-1})`.
/// Unary operations are fixed.
pub fn delta(f: &OpTable) -> OpTable {
    let n = f.arity();
    if n == 1 {
        return f.clone();
    }
    let k = f.universe().size();
    let mut args = vec![0u8; n];
    let mut small = vec![0u8; n - 1];
    let len = codes::pow(k, n - 1);
    let mut table = vec![0u8; len];
    for (idx, slot) in table.iter_mut().enumerate() {
        codes::decode_into(idx as u32, k, &mut small);
        args[0] = small[0];
        args[1] = small[0];
        args[2..n].copy_from_slice(&small[1..]);
        *slot = f.value_at(&args);
    }
    OpTable::from_raw(f.universe(), n - 1, table)
}

/// Linearized composition: for `f` n-ary and `g` m-ary,
/// `(f . g)(x1, ..., xm, x_{m+1}, ..., x_{m+n-1})
///   = f(g(x1, ..., xm), x_{m+1}, ..., x_{m+n-1})`.
pub fn circ(f: &OpTable, g: &OpTable) -> Result<OpTable> {
    if f.universe() != g.universe() {
        return arg_err("universe mismatch in composition");
    }
    let k = f.universe().size();
    let (n, m) = (f.arity(), g.arity());
    let arity = m + n - 1;
    let len = k.checked_pow(arity as u32).unwrap_or(usize::MAX);
    if len > 1 << 20 {
        return capacity_err(format!("composed arity {arity} too large"));
    }
    let mut args = vec![0u8; arity];
    let mut inner = vec![0u8; n];
    let mut table = vec![0u8; len];
    for (idx, slot) in table.iter_mut().enumerate() {
        codes::decode_into(idx as u32, k, &mut args);
        inner[0] = g.value_at(&args[..m]);
        inner[1..n].copy_from_slice(&args[m..]);
        *slot = f.value_at(&inner);
    }
    Ok(OpTable::from_raw(f.universe(), arity, table))
}

/// Full superposition with unary inner operations:
/// `f[g1, ..., gn](x) = f(g1(x), ..., gn(x))`.
pub fn compose_with_unaries(f: &OpTable, gs: &[OpTable]) -> Result<OpTable> {
    if gs.len() != f.arity() {
        return arg_err(format!(
            "expected {} inner operations, got {}",
            f.arity(),
            gs.len()
        ));
    }
    for g in gs {
        if !g.is_unary() || g.universe() != f.universe() {
            return arg_err("inner operations must be unary over the same universe");
        }
    }
    let k = f.universe().size();
    let mut args = vec![0u8; f.arity()];
    let mut table = vec![0u8; k];
    for (x, slot) in table.iter_mut().enumerate() {
        for (i, g) in gs.iter().enumerate() {
            args[i] = g.table()[x];
        }
        *slot = f.value_at(&args);
    }
    Ok(OpTable::from_raw(f.universe(), 1, table))
}

/// The translations of `f`: every unary map obtained by freezing all but one
/// argument. For unary `f` this is `{f}` itself. Computed from the table
/// slices along each axis; the result is sorted and deduplicated.
pub fn translations(f: &OpTable) -> Vec<OpTable> {
    let n = f.arity();
    if n == 1 {
        return vec![f.clone()];
    }
    let k = f.universe().size();
    let mut seen = BTreeSet::new();
    let mut args = vec![0u8; n];
    let mut frozen = vec![0u8; n - 1];
    for axis in 0..n {
        for base in 0..codes::pow(k, n - 1) as u32 {
            codes::decode_into(base, k, &mut frozen);
            let mut table = Vec::with_capacity(k);
            for v in 0..k as u8 {
                let mut fi = 0;
                for (j, slot) in args.iter_mut().enumerate() {
                    *slot = if j == axis {
                        v
                    } else {
                        let x = frozen[fi];
                        fi += 1;
                        x
                    };
                }
                table.push(f.value_at(&args));
            }
            seen.insert(table);
        }
    }
    seen.into_iter()
        .map(|t| OpTable::from_raw(f.universe(), 1, t))
        .collect()
}

/// Membership in `M* = { f | every translation of f lies in M }`.
pub fn in_star(f: &OpTable, m: &Monoid) -> Result<bool> {
    if f.universe() != m.universe() {
        return arg_err("universe mismatch");
    }
    Ok(translations(f).iter().all(|t| m.contains(t)))
}

/// All n-ary members of `M*`, enumerated by backtracking over value tables
/// viewed as n-dimensional tensors: an assignment is a member exactly when
/// every axis-parallel line of the tensor is the table of some element of M.
/// Cells are filled in mixed-radix order, so along every line the assigned
/// part is always a prefix, and dead prefixes are pruned against the sorted
/// table relation of M.
pub fn star_members(m: &Monoid, arity: usize) -> Result<Vec<OpTable>> {
    star_members_with_budget(m, arity, DEFAULT_OP_BUDGET)
}

pub fn star_members_with_budget(
    m: &Monoid,
    arity: usize,
    budget: usize,
) -> Result<Vec<OpTable>> {
    if arity == 0 {
        return arg_err("arity must be at least 1");
    }
    if arity > STAR_MAX_ARITY {
        return capacity_err(format!("star slices are capped at arity {STAR_MAX_ARITY}"));
    }
    let k = m.universe().size();
    let cells = k.checked_pow(arity as u32).unwrap_or(usize::MAX);
    if cells > STAR_CELL_CAP {
        return capacity_err(format!("table size {k}^{arity} exceeds the star search cap"));
    }
    let gamma = m.table_relation();
    let mut search = StarSearch::new(m.universe(), arity, &gamma, budget);
    search.run()?;
    Ok(search.found)
}

struct StarSearch<'a> {
    universe: Universe,
    arity: usize,
    k: usize,
    gamma: &'a Relation,
    /// For each cell and axis, the index of the line it lies on.
    line_of: Vec<Vec<usize>>,
    /// Per axis, per line: the prefix code of the values assigned so far.
    prefix: Vec<Vec<u32>>,
    /// Per cell: its coordinates.
    coords: Vec<Vec<u8>>,
    table: Vec<u8>,
    found: Vec<OpTable>,
    budget: usize,
}

impl<'a> StarSearch<'a> {
    fn new(universe: Universe, arity: usize, gamma: &'a Relation, budget: usize) -> Self {
        let k = universe.size();
        let cells = codes::pow(k, arity);
        let lines = codes::pow(k, arity - 1);
        let mut line_of = vec![vec![0usize; arity]; cells];
        let mut coords = vec![vec![0u8; arity]; cells];
        for c in 0..cells {
            codes::decode_into(c as u32, k, &mut coords[c]);
            for axis in 0..arity {
                let mut id = 0usize;
                for (j, &x) in coords[c].iter().enumerate() {
                    if j != axis {
                        id = id * k + x as usize;
                    }
                }
                line_of[c][axis] = id;
            }
        }
        StarSearch {
            universe,
            arity,
            k,
            gamma,
            line_of,
            prefix: vec![vec![0u32; lines]; arity],
            coords,
            table: vec![0u8; cells],
            found: Vec::new(),
            budget,
        }
    }

    fn run(&mut self) -> Result<()> {
        self.descend(0)
    }

    fn descend(&mut self, cell: usize) -> Result<()> {
        if cell == self.table.len() {
            if self.found.len() >= self.budget {
                return capacity_err("star enumeration exceeded its budget");
            }
            self.found.push(OpTable::from_raw(
                self.universe,
                self.arity,
                self.table.clone(),
            ));
            return Ok(());
        }
        for v in 0..self.k as u8 {
            let mut ok = true;
            for axis in 0..self.arity {
                let line = self.line_of[cell][axis];
                let depth = self.coords[cell][axis] as usize + 1;
                let p = self.prefix[axis][line] * self.k as u32 + v as u32;
                if !self.gamma.prefix_alive(p, depth) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let mut saved = [0u32; 4];
            for axis in 0..self.arity {
                let line = self.line_of[cell][axis];
                saved[axis] = self.prefix[axis][line];
                self.prefix[axis][line] = saved[axis] * self.k as u32 + v as u32;
            }
            self.table[cell] = v;
            self.descend(cell + 1)?;
            for axis in 0..self.arity {
                let line = self.line_of[cell][axis];
                self.prefix[axis][line] = saved[axis];
            }
        }
        Ok(())
    }
}

/// Operation sets indexed by arity, canonically ordered within each arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityIndexedOpSet {
    universe: Universe,
    per_arity: BTreeMap<usize, Vec<OpTable>>,
}

impl ArityIndexedOpSet {
    pub fn new(universe: Universe) -> ArityIndexedOpSet {
        ArityIndexedOpSet {
            universe,
            per_arity: BTreeMap::new(),
        }
    }

    pub fn from_ops(universe: Universe, ops: impl IntoIterator<Item = OpTable>) -> Result<Self> {
        let mut set = ArityIndexedOpSet::new(universe);
        for f in ops {
            set.insert(f)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, f: OpTable) -> Result<bool> {
        if f.universe() != self.universe {
            return arg_err("universe mismatch");
        }
        let slice = self.per_arity.entry(f.arity()).or_default();
        match slice.binary_search(&f) {
            Ok(_) => Ok(false),
            Err(pos) => {
                slice.insert(pos, f);
                Ok(true)
            }
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_arity.keys().copied()
    }

    pub fn arity_slice(&self, arity: usize) -> &[OpTable] {
        self.per_arity.get(&arity).map_or(&[], |v| v.as_slice())
    }

    pub fn contains(&self, f: &OpTable) -> bool {
        self.per_arity
            .get(&f.arity())
            .is_some_and(|v| v.binary_search(f).is_ok())
    }

    pub fn len(&self) -> usize {
        self.per_arity.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &OpTable> {
        self.per_arity.values().flatten()
    }
}

/// Saturates `generators` under rotation, swap, argument identification,
/// fictitious arguments and linearized composition, truncated to arities
/// `<= max_arity`, and seeded with all projections.
///
/// This is a lower approximation of the clone slice: memberships whose every
/// derivation passes through an intermediate arity above the bound are
/// missed. For sets of essentially unary generators it is exact.
pub fn clone_generate_bounded(
    universe: Universe,
    generators: &[OpTable],
    max_arity: usize,
) -> Result<ArityIndexedOpSet> {
    clone_generate_bounded_with_budget(universe, generators, max_arity, DEFAULT_OP_BUDGET)
}

pub fn clone_generate_bounded_with_budget(
    universe: Universe,
    generators: &[OpTable],
    max_arity: usize,
    budget: usize,
) -> Result<ArityIndexedOpSet> {
    if !(1..=STAR_MAX_ARITY).contains(&max_arity) {
        return capacity_err(format!(
            "bounded clone generation requires 1 <= max arity <= {STAR_MAX_ARITY}"
        ));
    }
    let mut set: HashSet<(usize, Vec<u8>)> = HashSet::new();
    let mut queue: Vec<OpTable> = Vec::new();
    let push = |f: OpTable, set: &mut HashSet<(usize, Vec<u8>)>, queue: &mut Vec<OpTable>| {
        if set.insert((f.arity(), f.table().to_vec())) {
            queue.push(f);
        }
    };
    for g in generators {
        if g.universe() != universe {
            return arg_err("generator over a different universe");
        }
        if g.arity() > max_arity {
            return arg_err(format!(
                "generator arity {} exceeds the bound {max_arity}",
                g.arity()
            ));
        }
        push(g.clone(), &mut set, &mut queue);
    }
    for n in 1..=max_arity {
        for i in 1..=n {
            push(
                OpTable::projection(universe, n, i)?,
                &mut set,
                &mut queue,
            );
        }
    }
    let mut all: Vec<OpTable> = queue.clone();
    while let Some(f) = queue.pop() {
        if set.len() > budget {
            return capacity_err("bounded clone generation exceeded its budget");
        }
        let mut derived = vec![zeta(&f), tau(&f), delta(&f)];
        if f.arity() < max_arity {
            derived.push(nabla(&f)?);
        }
        for g in &all {
            if f.arity() + g.arity() - 1 <= max_arity {
                derived.push(circ(&f, g)?);
            }
            if g.arity() + f.arity() - 1 <= max_arity {
                derived.push(circ(g, &f)?);
            }
        }
        for h in derived {
            if set.insert((h.arity(), h.table().to_vec())) {
                all.push(h.clone());
                queue.push(h);
            }
        }
    }
    ArityIndexedOpSet::from_ops(universe, all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(k: usize) -> Universe {
        Universe::new(k).unwrap()
    }

    fn m3a_f() -> OpTable {
        OpTable::new(u(3), 2, vec![0, 0, 1, 0, 0, 1, 1, 1, 2]).unwrap()
    }

    fn trivial3() -> Monoid {
        Monoid::trivial(u(3))
    }

    #[test]
    fn delta_identifies_first_two_arguments() {
        let g = delta(&m3a_f());
        assert_eq!(g.table(), &[0, 0, 2]);
        let h = OpTable::new(u(3), 1, vec![2, 1, 0]).unwrap();
        assert_eq!(delta(&h), h);
    }

    #[test]
    fn nabla_adds_fictitious_first_argument() {
        let id = OpTable::identity(u(2));
        let n = nabla(&id).unwrap();
        assert_eq!(n, OpTable::projection(u(2), 2, 2).unwrap());
        assert_eq!(n.table(), &[0, 1, 0, 1]);
    }

    #[test]
    fn zeta_and_tau_on_binary_ops() {
        let f = m3a_f();
        let zf = zeta(&f);
        let tf = tau(&f);
        // for binary operations both are the transpose
        assert_eq!(zf, tf);
        assert_eq!(zf.evaluate(&[0, 2]).unwrap(), f.evaluate(&[2, 0]).unwrap());
        let g = OpTable::new(u(3), 1, vec![1, 2, 0]).unwrap();
        assert_eq!(zeta(&g), g);
        assert_eq!(tau(&g), g);
    }

    #[test]
    fn zeta_rotates_ternary_arguments() {
        // f(x,y,z) = x on 2 elements; zeta f should be (x,y,z) -> y
        let e1 = OpTable::projection(u(2), 3, 1).unwrap();
        assert_eq!(zeta(&e1), OpTable::projection(u(2), 3, 2).unwrap());
    }

    #[test]
    fn circ_composition() {
        let f = m3a_f();
        let id = OpTable::identity(u(3));
        assert_eq!(circ(&id, &f).unwrap(), f);
        // freezing the first argument of f at 2 via circ with a constant
        let c2 = OpTable::constant(u(3), 2).unwrap();
        let frozen = circ(&f, &c2).unwrap();
        assert_eq!(frozen.arity(), 2);
        assert_eq!(frozen.table(), &[1, 1, 2, 1, 1, 2, 1, 1, 2]);
        // fictitious first argument: e22 . c_a is the binary second projection
        let e22 = OpTable::projection(u(3), 2, 2).unwrap();
        let r = circ(&e22, &c2).unwrap();
        assert_eq!(r, nabla(&OpTable::identity(u(3))).unwrap());
    }

    #[test]
    fn composition_with_unaries() {
        let f = m3a_f();
        let id = OpTable::identity(u(3));
        let c2 = OpTable::constant(u(3), 2).unwrap();
        let col = compose_with_unaries(&f, &[id.clone(), c2.clone()]).unwrap();
        assert_eq!(col.table(), &[1, 1, 2]);
        let diag = compose_with_unaries(&f, &[id.clone(), id]).unwrap();
        assert_eq!(diag, delta(&f));
        let cc = compose_with_unaries(&f, &[c2.clone(), c2]).unwrap();
        assert_eq!(cc, OpTable::constant(u(3), 2).unwrap());
    }

    #[test]
    fn translations_of_the_counterexample() {
        let ts = translations(&m3a_f());
        let tables: Vec<&[u8]> = ts.iter().map(|t| t.table()).collect();
        assert_eq!(tables, vec![&[0, 0, 1][..], &[1, 1, 2][..]]);
        let g = OpTable::new(u(3), 1, vec![2, 0, 1]).unwrap();
        assert_eq!(translations(&g), vec![g.clone()]);
    }

    #[test]
    fn translations_of_first_projection() {
        // e^2_1(x, a) = x and e^2_1(a, x) = a: identity plus all constants
        let e21 = OpTable::projection(u(3), 2, 1).unwrap();
        let ts = translations(&e21);
        let expected = Monoid::trivial(u(3));
        assert_eq!(ts.len(), 4);
        assert!(ts.iter().all(|t| expected.contains(t)));
    }

    #[test]
    fn star_membership() {
        let f = m3a_f();
        let end_rho = end_of_m3a();
        assert!(in_star(&f, &end_rho).unwrap());
        assert!(!in_star(&delta(&f), &end_rho).unwrap());
        let id = OpTable::identity(u(3));
        assert!(in_star(&id, &trivial3()).unwrap());
    }

    // End of the counterexample relation, built directly from its member
    // tables: all maps g with (g0,g1) and (g1,g2) edges of the relation.
    fn end_of_m3a() -> Monoid {
        let tables = [
            [0, 0, 0],
            [0, 0, 1],
            [0, 1, 1],
            [0, 1, 2],
            [1, 1, 1],
            [1, 1, 2],
            [1, 2, 2],
            [2, 2, 2],
        ];
        let members = tables
            .iter()
            .map(|t| OpTable::new(u(3), 1, t.to_vec()).unwrap())
            .collect();
        Monoid::new(u(3), members).unwrap()
    }

    #[test]
    fn star_slice_unary_is_the_monoid() {
        let t = trivial3();
        let unary = star_members(&t, 1).unwrap();
        assert_eq!(unary.len(), 4);
        assert!(unary.iter().all(|f| t.contains(f)));
    }

    #[test]
    fn star_slice_of_full_monoid_is_everything() {
        let full = Monoid::full(u(2)).unwrap();
        assert_eq!(star_members(&full, 2).unwrap().len(), 16);
    }

    #[test]
    fn star_slice_matches_brute_force() {
        // brute force over all 3^9 binary tables, checking translations
        let t = trivial3();
        let fast = star_members(&t, 2).unwrap();
        let mut slow = Vec::new();
        for code in 0..19683u32 {
            let table = crate::codes::decode(code, 3, 9);
            let f = OpTable::new(u(3), 2, table).unwrap();
            if in_star(&f, &t).unwrap() {
                slow.push(f);
            }
        }
        assert_eq!(fast, slow);

        let end_rho = end_of_m3a();
        let fast = star_members(&end_rho, 2).unwrap();
        let mut count = 0;
        for code in 0..19683u32 {
            let table = crate::codes::decode(code, 3, 9);
            let f = OpTable::new(u(3), 2, table).unwrap();
            if in_star(&f, &end_rho).unwrap() {
                count += 1;
                assert!(fast.binary_search(&f).is_ok());
            }
        }
        assert_eq!(fast.len(), count);
    }

    #[test]
    fn bounded_clone_of_nothing_is_projections() {
        let set = clone_generate_bounded(u(3), &[], 2).unwrap();
        assert_eq!(set.arity_slice(1).len(), 1);
        assert_eq!(set.arity_slice(2).len(), 2);
    }

    #[test]
    fn bounded_clone_of_constants_matches_star_of_trivial_monoid() {
        let t = trivial3();
        let mut gens = vec![OpTable::identity(u(3))];
        for a in 0..3 {
            gens.push(OpTable::constant(u(3), a).unwrap());
        }
        let clone = clone_generate_bounded(u(3), &gens, 2).unwrap();
        for n in 1..=2 {
            let star = star_members(&t, n).unwrap();
            assert_eq!(clone.arity_slice(n), star.as_slice());
        }
    }

    #[test]
    fn bounded_clone_matches_superposition_closure() {
        // generators: binary max with both constants on a 2-element universe
        let max = OpTable::new(u(2), 2, vec![0, 1, 1, 1]).unwrap();
        let c0 = OpTable::constant(u(2), 0).unwrap();
        let c1 = OpTable::constant(u(2), 1).unwrap();
        let bounded = clone_generate_bounded(u(2), &[max.clone(), c0, c1], 2).unwrap();

        // oracle: closure of the binary slice under full superposition
        // f(g(x,y), h(x,y)) plus the unary slice read off by diagonals
        let mut binaries: BTreeSet<Vec<u8>> = BTreeSet::new();
        binaries.insert(vec![0, 0, 1, 1]); // e1
        binaries.insert(vec![0, 1, 0, 1]); // e2
        binaries.insert(vec![0, 0, 0, 0]);
        binaries.insert(vec![1, 1, 1, 1]);
        binaries.insert(max.table().to_vec());
        loop {
            let snapshot: Vec<Vec<u8>> = binaries.iter().cloned().collect();
            let before = binaries.len();
            for f in &snapshot {
                for g in &snapshot {
                    for h in &snapshot {
                        let t: Vec<u8> = (0..4)
                            .map(|i| {
                                let (a, b) = (g[i], h[i]);
                                f[(a * 2 + b) as usize]
                            })
                            .collect();
                        binaries.insert(t);
                    }
                }
            }
            if binaries.len() == before {
                break;
            }
        }
        let got: BTreeSet<Vec<u8>> = bounded
            .arity_slice(2)
            .iter()
            .map(|f| f.table().to_vec())
            .collect();
        assert_eq!(got, binaries);
        assert!(bounded.contains(&max));
    }
}
