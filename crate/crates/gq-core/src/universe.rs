use crate::error::{arg_err, Result};

/// A finite base set; its elements are the indices `0..k-1`.
///
/// Regular universes are capped at `k <= 7`: the Γ-based algorithms work on
/// k-ary relations and become infeasible beyond that. Product universes
/// created by the tensor product operations may go up to `k <= 9`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Universe {
    size: u8,
}

impl Universe {
    pub const MIN_SIZE: usize = 2;
    pub const MAX_SIZE: usize = 7;
    pub(crate) const MAX_PRODUCT_SIZE: usize = 9;

    pub fn new(size: usize) -> Result<Universe> {
        if !(Self::MIN_SIZE..=Self::MAX_SIZE).contains(&size) {
            return arg_err(format!(
                "universe size must be between {} and {}, got {}",
                Self::MIN_SIZE,
                Self::MAX_SIZE,
                size
            ));
        }
        Ok(Universe { size: size as u8 })
    }

    /// Constructor used by the tensor product operations, which relax the
    /// size cap to 9 (for that one construction only).
    pub(crate) fn new_product(size: usize) -> Result<Universe> {
        if !(Self::MIN_SIZE..=Self::MAX_PRODUCT_SIZE).contains(&size) {
            return arg_err(format!(
                "product universe size must be between {} and {}, got {}",
                Self::MIN_SIZE,
                Self::MAX_PRODUCT_SIZE,
                size
            ));
        }
        Ok(Universe { size: size as u8 })
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.size
    }

    pub fn contains(&self, a: u8) -> bool {
        a < self.size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_bounds_enforced() {
        assert!(Universe::new(1).is_err());
        assert!(Universe::new(8).is_err());
        for k in 2..=7 {
            assert_eq!(Universe::new(k).unwrap().size(), k);
        }
        assert_eq!(Universe::new_product(9).unwrap().size(), 9);
        assert!(Universe::new_product(10).is_err());
    }
}
