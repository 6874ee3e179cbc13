use crate::codes;
use crate::error::{arg_err, capacity_err, Error, Result};
use crate::op::OpTable;
use crate::universe::Universe;

/// Relation arities are capped here; Γ-based work never needs more than
/// `m = k`, and cylindrification stays within this bound.
pub const MAX_ARITY: usize = 8;

/// Largest admissible tuple-code space `k^m`.
const CODE_SPACE_CAP: usize = 1 << 26;

/// An `m`-ary relation over a universe, kept in two synchronized forms:
/// a sorted list of mixed-radix tuple codes (the interchange representation)
/// and a bitset over the code space (the operational one). Every producing
/// operation maintains the canonical sorted order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Relation {
    universe: Universe,
    arity: usize,
    codes: Vec<u32>,
    bits: Vec<u64>,
}

fn check_shape(universe: Universe, arity: usize) -> Result<usize> {
    if arity == 0 {
        return arg_err("relation arity must be at least 1");
    }
    if arity > MAX_ARITY {
        return capacity_err(format!("relation arity {arity} exceeds the cap {MAX_ARITY}"));
    }
    let space = universe
        .size()
        .checked_pow(arity as u32)
        .unwrap_or(usize::MAX);
    if space > CODE_SPACE_CAP {
        return capacity_err(format!(
            "code space {}^{arity} exceeds the cap",
            universe.size()
        ));
    }
    Ok(space)
}

impl Relation {
    /// Builds a relation from explicit tuples. Duplicate tuples are rejected,
    /// matching the text format's contract.
    pub fn new<T: AsRef<[u8]>>(universe: Universe, arity: usize, tuples: &[T]) -> Result<Relation> {
        let space = check_shape(universe, arity)?;
        let k = universe.size();
        let mut bits = vec![0u64; space.div_ceil(64)];
        let mut codes = Vec::with_capacity(tuples.len());
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return arg_err(format!(
                    "tuple length {} does not match arity {arity}",
                    t.len()
                ));
            }
            if let Some(&bad) = t.iter().find(|&&v| !universe.contains(v)) {
                return arg_err(format!("coordinate {bad} out of range for {k} elements"));
            }
            let code = codes::encode(t, k);
            let (w, b) = (code as usize / 64, code as usize % 64);
            if bits[w] >> b & 1 == 1 {
                return arg_err(format!("duplicate tuple {t:?}"));
            }
            bits[w] |= 1 << b;
            codes.push(code);
        }
        codes.sort_unstable();
        Ok(Relation { universe, arity, codes, bits })
    }

    pub(crate) fn from_codes(
        universe: Universe,
        arity: usize,
        mut codes: Vec<u32>,
    ) -> Result<Relation> {
        let space = check_shape(universe, arity)?;
        codes.sort_unstable();
        codes.dedup();
        if let Some(&c) = codes.last() {
            if c as usize >= space {
                return arg_err(format!("tuple code {c} out of range"));
            }
        }
        let mut bits = vec![0u64; space.div_ceil(64)];
        for &c in &codes {
            bits[c as usize / 64] |= 1 << (c as usize % 64);
        }
        Ok(Relation { universe, arity, codes, bits })
    }

    pub fn empty(universe: Universe, arity: usize) -> Result<Relation> {
        Relation::from_codes(universe, arity, Vec::new())
    }

    /// The full relation `A^m`.
    pub fn full(universe: Universe, arity: usize) -> Result<Relation> {
        let space = check_shape(universe, arity)?;
        Relation::from_codes(universe, arity, (0..space as u32).collect())
    }

    /// The diagonal relation of a partition of the coordinate set `{0..m-1}`:
    /// all tuples that are constant on each block. Every diagonal relation is
    /// reflexive and generalized transitive.
    pub fn diagonal(universe: Universe, arity: usize, blocks: &[Vec<usize>]) -> Result<Relation> {
        check_shape(universe, arity)?;
        let mut seen = vec![false; arity];
        for block in blocks {
            if block.is_empty() {
                return arg_err("partition blocks must be nonempty");
            }
            for &i in block {
                if i >= arity || seen[i] {
                    return arg_err("blocks must partition the coordinate set");
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return arg_err("blocks must cover every coordinate");
        }
        let k = universe.size();
        let nblocks = blocks.len();
        let mut codes = Vec::with_capacity(codes::pow(k, nblocks));
        let mut tuple = vec![0u8; arity];
        let mut choice = vec![0u8; nblocks];
        for c in 0..codes::pow(k, nblocks) as u32 {
            codes::decode_into(c, k, &mut choice);
            for (b, block) in blocks.iter().enumerate() {
                for &i in block {
                    tuple[i] = choice[b];
                }
            }
            codes.push(codes::encode(&tuple, k));
        }
        Relation::from_codes(universe, arity, codes)
    }

    /// The binary equality relation on the universe.
    pub fn equality(universe: Universe) -> Relation {
        let k = universe.size() as u32;
        let codes = (0..k).map(|a| a * k + a).collect();
        Relation::from_codes(universe, 2, codes).expect("equality always fits")
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn tuples(&self) -> Vec<Vec<u8>> {
        let k = self.universe.size();
        self.codes
            .iter()
            .map(|&c| codes::decode(c, k, self.arity))
            .collect()
    }

    pub fn tuple_of(&self, code: u32) -> Vec<u8> {
        codes::decode(code, self.universe.size(), self.arity)
    }

    pub fn code_of(&self, tuple: &[u8]) -> Result<u32> {
        if tuple.len() != self.arity {
            return arg_err("tuple length does not match relation arity");
        }
        if tuple.iter().any(|&v| !self.universe.contains(v)) {
            return arg_err("tuple coordinate out of range");
        }
        Ok(codes::encode(tuple, self.universe.size()))
    }

    pub fn contains(&self, tuple: &[u8]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&v| self.universe.contains(v))
            && self.contains_code(codes::encode(tuple, self.universe.size()))
    }

    pub(crate) fn contains_code(&self, code: u32) -> bool {
        self.bits[code as usize / 64] >> (code as usize % 64) & 1 == 1
    }

    /// True when some member extends the given prefix (`depth` digits of a
    /// code, most significant first). Depth `m` degenerates to membership.
    /// The sorted code list doubles as the prefix trie: the tuples extending
    /// a prefix form a contiguous code interval.
    pub(crate) fn prefix_alive(&self, prefix: u32, depth: usize) -> bool {
        let span = codes::pow(self.universe.size(), self.arity - depth) as u32;
        let lo = prefix * span;
        let i = self.codes.partition_point(|&c| c < lo);
        i < self.codes.len() && self.codes[i] < lo + span
    }

    pub fn is_reflexive(&self) -> bool {
        self.universe.elements().all(|a| {
            let code = codes::encode(&vec![a; self.arity], self.universe.size());
            self.contains_code(code)
        })
    }

    pub fn reflexive_closure(&self) -> Relation {
        let k = self.universe.size();
        let mut codes = self.codes.clone();
        for a in self.universe.elements() {
            codes.push(codes::encode(&vec![a; self.arity], k));
        }
        Relation::from_codes(self.universe, self.arity, codes).expect("shape unchanged")
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.universe == other.universe
            && self.arity == other.arity
            && self.codes.iter().all(|&c| other.contains_code(c))
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_same_shape(other)?;
        let mut codes = self.codes.clone();
        codes.extend_from_slice(&other.codes);
        Relation::from_codes(self.universe, self.arity, codes)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.check_same_shape(other)?;
        let codes = self
            .codes
            .iter()
            .copied()
            .filter(|&c| other.contains_code(c))
            .collect();
        Relation::from_codes(self.universe, self.arity, codes)
    }

    fn check_same_shape(&self, other: &Relation) -> Result<()> {
        if self.universe != other.universe {
            return arg_err("universe mismatch");
        }
        if self.arity != other.arity {
            return arg_err("arity mismatch");
        }
        Ok(())
    }

    /// Coordinatewise image under a unary map.
    pub fn image_under(&self, g: &OpTable) -> Result<Relation> {
        if g.universe() != self.universe {
            return arg_err("universe mismatch");
        }
        if !g.is_unary() {
            return arg_err("image requires a unary map");
        }
        let k = self.universe.size();
        let table = g.table();
        let codes = self
            .codes
            .iter()
            .map(|&c| {
                let t = codes::decode(c, k, self.arity);
                let img: Vec<u8> = t.iter().map(|&x| table[x as usize]).collect();
                codes::encode(&img, k)
            })
            .collect();
        Relation::from_codes(self.universe, self.arity, codes)
    }

    /// Relational product of binary relations:
    /// `{(x, z) | exists y: (x, y) in self and (y, z) in other}`.
    pub fn compose_binary(&self, other: &Relation) -> Result<Relation> {
        self.check_same_shape(other)?;
        if self.arity != 2 {
            return arg_err("relational product is defined for binary relations");
        }
        let k = self.universe.size() as u32;
        let mut codes = Vec::new();
        for &c in &self.codes {
            let (x, y) = (c / k, c % k);
            for z in 0..k {
                if other.contains_code(y * k + z) {
                    codes.push(x * k + z);
                }
            }
        }
        Relation::from_codes(self.universe, 2, codes)
    }

    /// Tensor product over the paired universe; the element `(a, b)` is
    /// encoded as `a * k2 + b`. The product universe may have up to 9
    /// elements, relaxing the usual cap for this construction only.
    pub fn tensor_product(&self, other: &Relation) -> Result<Relation> {
        if self.arity != other.arity {
            return arg_err("tensor product requires equal arities");
        }
        let (k1, k2) = (self.universe.size(), other.universe.size());
        let product = Universe::new_product(k1 * k2)?;
        check_shape(product, self.arity)?;
        let k = (k1 * k2) as u32;
        let mut out = Vec::with_capacity(self.len() * other.len());
        let mut paired = vec![0u8; self.arity];
        for &c1 in &self.codes {
            let t1 = codes::decode(c1, k1, self.arity);
            for &c2 in &other.codes {
                let t2 = codes::decode(c2, k2, self.arity);
                for j in 0..self.arity {
                    paired[j] = t1[j] * k2 as u8 + t2[j];
                }
                out.push(codes::encode(&paired, k as usize));
            }
        }
        Relation::from_codes(product, self.arity, out)
    }

    /// Restriction to a subset `B`, re-indexed densely in the order given by
    /// the sorted subset. `B` must have at least 2 elements.
    pub fn restrict(&self, subset: &[u8]) -> Result<Relation> {
        let sub = validate_subset(self.universe, subset)?;
        let small = Universe::new(sub.len())?;
        let mut index = vec![None; self.universe.size()];
        for (i, &b) in sub.iter().enumerate() {
            index[b as usize] = Some(i as u8);
        }
        let k = self.universe.size();
        let mut out = Vec::new();
        'tuples: for &c in &self.codes {
            let t = codes::decode(c, k, self.arity);
            let mut small_t = vec![0u8; self.arity];
            for (j, &x) in t.iter().enumerate() {
                match index[x as usize] {
                    Some(i) => small_t[j] = i,
                    None => continue 'tuples,
                }
            }
            out.push(codes::encode(&small_t, sub.len()));
        }
        Relation::from_codes(small, self.arity, out)
    }

    /// Cylindrification `A^(n-m) x rho`: pads every tuple with
    /// unconstrained leading coordinates up to arity `n`.
    pub fn cylindrify(&self, arity: usize) -> Result<Relation> {
        if arity < self.arity {
            return arg_err("cylindrification cannot lower the arity");
        }
        check_shape(self.universe, arity)?;
        let k = self.universe.size();
        let extra = arity - self.arity;
        let span = codes::pow(k, self.arity) as u32;
        let mut out = Vec::with_capacity(self.len() * codes::pow(k, extra));
        for p in 0..codes::pow(k, extra) as u32 {
            for &c in &self.codes {
                out.push(p * span + c);
            }
        }
        Relation::from_codes(self.universe, arity, out)
    }

    /// Image under coordinate selection; `indices` are 0-based positions,
    /// kept in the given order, duplicates deduplicated in the result set.
    pub fn project(&self, indices: &[usize]) -> Result<Relation> {
        if indices.is_empty() {
            return arg_err("projection needs at least one coordinate");
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.arity) {
            return arg_err(format!("projection index {bad} out of range"));
        }
        let k = self.universe.size();
        let codes = self
            .codes
            .iter()
            .map(|&c| {
                let t = codes::decode(c, k, self.arity);
                let sel: Vec<u8> = indices.iter().map(|&i| t[i]).collect();
                codes::encode(&sel, k)
            })
            .collect();
        Relation::from_codes(self.universe, indices.len(), codes)
    }
}

pub(crate) fn validate_subset(universe: Universe, subset: &[u8]) -> Result<Vec<u8>> {
    let mut sub: Vec<u8> = subset.to_vec();
    sub.sort_unstable();
    sub.dedup();
    if sub.len() != subset.len() {
        return Err(Error::Arg("subset contains duplicates".into()));
    }
    if sub.len() < 2 {
        return Err(Error::Arg(
            "restriction needs a subset of at least 2 elements".into(),
        ));
    }
    if let Some(&bad) = sub.iter().find(|&&b| !universe.contains(b)) {
        return Err(Error::Arg(format!("subset element {bad} out of range")));
    }
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(k: usize) -> Universe {
        Universe::new(k).unwrap()
    }

    fn m3a_rho() -> Relation {
        Relation::new(u(3), 2, &[[0, 0], [1, 1], [2, 2], [0, 1], [1, 2]]).unwrap()
    }

    #[test]
    fn canonical_order_and_membership() {
        let r = m3a_rho();
        assert_eq!(r.len(), 5);
        assert_eq!(r.codes(), &[0, 1, 4, 5, 8]);
        assert!(r.contains(&[1, 2]));
        assert!(!r.contains(&[2, 0]));
        assert!(r.is_reflexive());
    }

    #[test]
    fn duplicates_rejected() {
        let err = Relation::new(u(3), 2, &[[0, 0], [0, 0]]).unwrap_err();
        assert!(matches!(err, Error::Arg(_)));
    }

    #[test]
    fn prefix_queries() {
        let r = m3a_rho();
        assert!(r.prefix_alive(0, 1)); // tuples starting with 0
        assert!(r.prefix_alive(2, 1)); // (2,2)
        assert!(!r.prefix_alive(7, 2)); // (2,1) absent
        assert!(r.prefix_alive(5, 2)); // (1,2) present
        assert!(r.prefix_alive(0, 0));
    }

    #[test]
    fn diagonal_relations() {
        let full = Relation::diagonal(u(2), 2, &[vec![0], vec![1]]).unwrap();
        assert_eq!(full.len(), 4);
        let delta = Relation::diagonal(u(3), 2, &[vec![0, 1]]).unwrap();
        assert_eq!(delta, Relation::equality(u(3)));
        assert_eq!(delta.tuples(), vec![vec![0, 0], vec![1, 1], vec![2, 2]]);
        assert!(Relation::diagonal(u(3), 2, &[vec![0]]).is_err());
        assert!(Relation::diagonal(u(3), 2, &[vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn restriction_filters_and_reindexes() {
        let r = m3a_rho();
        let s = r.restrict(&[0, 1]).unwrap();
        assert_eq!(s.tuples(), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        let delta = Relation::equality(u(3));
        let d2 = delta.restrict(&[0, 2]).unwrap();
        assert_eq!(d2, Relation::equality(u(2)));
        assert!(r.restrict(&[0]).is_err());
    }

    #[test]
    fn cylindrify_and_project() {
        let delta = Relation::equality(u(2));
        assert_eq!(delta.cylindrify(2).unwrap(), delta);
        let c = delta.cylindrify(3).unwrap();
        assert_eq!(c.len(), 4);
        for t in c.tuples() {
            assert_eq!(t[1], t[2]);
        }
        let r = m3a_rho();
        assert_eq!(r.project(&[0, 1]).unwrap(), r);
        let first = r.project(&[0]).unwrap();
        assert_eq!(first.len(), 3);
        assert!(r.project(&[2]).is_err());
        assert!(r.project(&[]).is_err());
    }

    #[test]
    fn binary_composition() {
        let r = m3a_rho();
        let rr = r.compose_binary(&r).unwrap();
        assert!(rr.contains(&[0, 2])); // 0 -> 1 -> 2
        assert!(rr.contains(&[0, 0]));
        assert!(!rr.contains(&[2, 0]));
    }

    #[test]
    fn tensor_product_sizes() {
        let d2 = Relation::equality(u(2));
        let p = d2.tensor_product(&d2).unwrap();
        assert_eq!(p.universe().size(), 4);
        assert_eq!(p, Relation::equality(Universe::new(4).unwrap()));
        let f2 = Relation::full(u(2), 2).unwrap();
        let pf = f2.tensor_product(&f2).unwrap();
        assert_eq!(pf.len(), 16);
        let f3 = Relation::full(u(3), 2).unwrap();
        let p9 = f3.tensor_product(&f3).unwrap();
        assert_eq!(p9.universe().size(), 9);
        assert_eq!(p9.len(), 81);
    }

    #[test]
    fn image_under_map() {
        let r = m3a_rho();
        let g = OpTable::new(u(3), 1, vec![0, 0, 2]).unwrap();
        let img = r.image_under(&g).unwrap();
        assert!(img.contains(&[0, 2])); // image of (1,2)
        assert!(!img.contains(&[1, 2]));
    }
}
