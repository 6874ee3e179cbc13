use crate::codes;
use crate::error::{arg_err, capacity_err, Result};
use crate::relation::Relation;

const ENTRY_CAP: usize = 1 << 22;

/// An `n`-dimensional `m x ... x m` array of universe elements. Its
/// axis-parallel lines are the m-tuples obtained by fixing all indices but
/// one; `n = 2` is the ordinary matrix case with rows and columns.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LineTensor {
    arity: usize,
    side: usize,
    entries: Vec<u8>,
}

impl LineTensor {
    /// Entries in mixed-radix order over base `side` (first index most
    /// significant).
    pub fn new(arity: usize, side: usize, entries: Vec<u8>) -> Result<LineTensor> {
        if arity == 0 || side == 0 {
            return arg_err("tensor arity and side must be at least 1");
        }
        let count = side.checked_pow(arity as u32).unwrap_or(usize::MAX);
        if count > ENTRY_CAP {
            return capacity_err(format!("tensor of size {side}^{arity} exceeds the cap"));
        }
        if entries.len() != count {
            return arg_err(format!(
                "tensor needs {count} entries, got {}",
                entries.len()
            ));
        }
        Ok(LineTensor { arity, side, entries })
    }

    /// A square matrix from its rows.
    pub fn from_rows<T: AsRef<[u8]>>(rows: &[T]) -> Result<LineTensor> {
        let m = rows.len();
        if rows.iter().any(|r| r.as_ref().len() != m) {
            return arg_err("matrix rows must have length equal to their count");
        }
        let mut entries = Vec::with_capacity(m * m);
        for r in rows {
            entries.extend_from_slice(r.as_ref());
        }
        LineTensor::new(2, m, entries)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn get(&self, index: &[usize]) -> u8 {
        debug_assert_eq!(index.len(), self.arity);
        let mut pos = 0usize;
        for &i in index {
            debug_assert!(i < self.side);
            pos = pos * self.side + i;
        }
        self.entries[pos]
    }

    /// The main diagonal `(t[0,...,0], t[1,...,1], ..., t[m-1,...,m-1])`.
    pub fn diagonal(&self) -> Vec<u8> {
        (0..self.side)
            .map(|i| self.get(&vec![i; self.arity]))
            .collect()
    }

    /// All axis-parallel lines: for every axis and every choice of the other
    /// indices, the m-tuple read off by varying that axis.
    pub fn lines(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let rest = codes::pow(self.side, self.arity - 1);
        let mut fixed = vec![0u8; self.arity - 1];
        let mut index = vec![0usize; self.arity];
        for axis in 0..self.arity {
            for base in 0..rest as u32 {
                codes::decode_into(base, self.side, &mut fixed);
                let mut line = Vec::with_capacity(self.side);
                for v in 0..self.side {
                    let mut fi = 0;
                    for (slot, j) in index.iter_mut().zip(0..self.arity) {
                        *slot = if j == axis {
                            v
                        } else {
                            let x = fixed[fi] as usize;
                            fi += 1;
                            x
                        };
                    }
                    line.push(self.get(&index));
                }
                out.push(line);
            }
        }
        out
    }
}

/// True when every axis-parallel line of the tensor belongs to the relation.
pub fn models(rho: &Relation, tensor: &LineTensor) -> Result<bool> {
    if tensor.side() != rho.arity() {
        return arg_err("tensor side must equal the relation arity");
    }
    let k = rho.universe().size();
    if tensor.entries().iter().any(|&v| v as usize >= k) {
        return arg_err("tensor entry out of range for the relation's universe");
    }
    Ok(tensor.lines().iter().all(|line| rho.contains(line)))
}

/// The defining implication for generalized transitivity at tensor level:
/// returns `models(rho, t) -> diagonal(t) in rho`. For a generalized
/// quasiorder this must hold for every tensor of any dimension.
pub fn models_implies_diagonal(rho: &Relation, tensor: &LineTensor) -> Result<bool> {
    Ok(!models(rho, tensor)? || rho.contains(&tensor.diagonal()))
}
