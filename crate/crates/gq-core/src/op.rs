use crate::codes;
use crate::error::{arg_err, capacity_err, Result};
use crate::universe::Universe;

/// Largest table length an operation may have (`k^n` entries).
const TABLE_CAP: usize = 1 << 20;

/// A total `n`-ary operation on a universe, stored as its full value table.
///
/// The entry at mixed-radix index `(x_1, ..., x_n)` is `f(x_1, ..., x_n)`;
/// see [`crate::codes`] for the index convention. All arities are at least 1;
/// constants are unary.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OpTable {
    universe: Universe,
    arity: usize,
    table: Vec<u8>,
}

impl OpTable {
    pub fn new(universe: Universe, arity: usize, table: Vec<u8>) -> Result<OpTable> {
        if arity == 0 {
            return arg_err("operation arity must be at least 1");
        }
        let k = universe.size();
        let len = k.checked_pow(arity as u32).unwrap_or(usize::MAX);
        if len > TABLE_CAP {
            return capacity_err(format!("value table of size {k}^{arity} exceeds the cap"));
        }
        if table.len() != len {
            return arg_err(format!(
                "value table must have {len} entries for arity {arity} over {k} elements, got {}",
                table.len()
            ));
        }
        if let Some(&bad) = table.iter().find(|&&v| !universe.contains(v)) {
            return arg_err(format!("table entry {bad} out of range for {k} elements"));
        }
        Ok(OpTable { universe, arity, table })
    }

    pub fn identity(universe: Universe) -> OpTable {
        let table = universe.elements().collect();
        OpTable { universe, arity: 1, table }
    }

    pub fn constant(universe: Universe, a: u8) -> Result<OpTable> {
        if !universe.contains(a) {
            return arg_err(format!("constant value {a} out of range"));
        }
        Ok(OpTable {
            universe,
            arity: 1,
            table: vec![a; universe.size()],
        })
    }

    /// The projection `e^n_i` onto the `i`-th of `n` arguments, `i` 1-based.
    pub fn projection(universe: Universe, arity: usize, index: usize) -> Result<OpTable> {
        if arity == 0 {
            return arg_err("projection arity must be at least 1");
        }
        if !(1..=arity).contains(&index) {
            return arg_err(format!("projection index {index} not in 1..={arity}"));
        }
        let k = universe.size();
        let len = codes::pow(k, arity);
        if len > TABLE_CAP {
            return capacity_err(format!("value table of size {k}^{arity} exceeds the cap"));
        }
        let mut table = vec![0u8; len];
        let mut args = vec![0u8; arity];
        for (idx, slot) in table.iter_mut().enumerate() {
            codes::decode_into(idx as u32, k, &mut args);
            *slot = args[index - 1];
        }
        Ok(OpTable { universe, arity, table })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn is_unary(&self) -> bool {
        self.arity == 1
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&v| v == self.table[0])
    }

    pub fn is_identity(&self) -> bool {
        self.arity == 1 && self.table.iter().enumerate().all(|(x, &v)| v as usize == x)
    }

    /// Table lookup at the mixed-radix index of `args`.
    pub fn evaluate(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity {
            return arg_err(format!(
                "expected {} arguments, got {}",
                self.arity,
                args.len()
            ));
        }
        if let Some(&bad) = args.iter().find(|&&v| !self.universe.contains(v)) {
            return arg_err(format!("argument {bad} out of range"));
        }
        Ok(self.table[codes::encode(args, self.universe.size()) as usize])
    }

    pub(crate) fn value_at(&self, args: &[u8]) -> u8 {
        self.table[codes::encode(args, self.universe.size()) as usize]
    }

    /// Componentwise application to `n` rows of common length: coordinate `j`
    /// of the result is `f(r_1(j), ..., r_n(j))`.
    pub fn apply_to_tuples(&self, rows: &[&[u8]]) -> Result<Vec<u8>> {
        if rows.len() != self.arity {
            return arg_err(format!("expected {} rows, got {}", self.arity, rows.len()));
        }
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return arg_err("rows must all have the same length");
        }
        let mut args = vec![0u8; self.arity];
        let mut out = Vec::with_capacity(m);
        for j in 0..m {
            for (i, row) in rows.iter().enumerate() {
                args[i] = row[j];
            }
            out.push(self.evaluate(&args)?);
        }
        Ok(out)
    }

    /// Unary composition `self ∘ g`, i.e. `x ↦ self(g(x))`.
    pub fn compose_unary(&self, g: &OpTable) -> Result<OpTable> {
        if self.universe != g.universe {
            return arg_err("universe mismatch in composition");
        }
        if !self.is_unary() || !g.is_unary() {
            return arg_err("unary composition requires unary operations");
        }
        let table = g.table.iter().map(|&x| self.table[x as usize]).collect();
        Ok(OpTable {
            universe: self.universe,
            arity: 1,
            table,
        })
    }

    /// The mixed-radix code of a unary table, viewing it as a k-tuple.
    pub fn unary_code(&self) -> u32 {
        debug_assert!(self.is_unary());
        codes::encode(&self.table, self.universe.size())
    }

    pub(crate) fn from_unary_code(universe: Universe, code: u32) -> OpTable {
        let k = universe.size();
        OpTable {
            universe,
            arity: 1,
            table: codes::decode(code, k, k),
        }
    }

    pub(crate) fn from_raw(universe: Universe, arity: usize, table: Vec<u8>) -> OpTable {
        debug_assert_eq!(table.len(), codes::pow(universe.size(), arity));
        OpTable { universe, arity, table }
    }
}
