//! Mixed-radix tuple codes.
//!
//! A tuple `(x_1, ..., x_m)` over `{0..k-1}` is encoded big-endian as
//! `code = x_1 * k^(m-1) + x_2 * k^(m-2) + ... + x_m`. The first coordinate
//! is the most significant digit. Operation tables, relation storage, Γ
//! construction and the text formats all share this one convention.

/// `k^e`, checked to fit in `u32`; callers guard sizes beforehand.
pub(crate) fn pow(k: usize, e: usize) -> usize {
    k.checked_pow(e as u32).expect("code space overflow")
}


pub(crate) fn encode(tuple: &[u8], k: usize) -> u32 {
    let mut code = 0u32;
    for &x in tuple {
        code = code * k as u32 + x as u32;
    }
    code
}

pub(crate) fn decode_into(mut code: u32, k: usize, buf: &mut [u8]) {
    for slot in buf.iter_mut().rev() {
        *slot = (code % k as u32) as u8;
        code /= k as u32;
    }
}

pub(crate) fn decode(code: u32, k: usize, m: usize) -> Vec<u8> {
    let mut buf = vec![0u8; m];
    decode_into(code, k, &mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let k = 3;
        for code in 0..27u32 {
            let t = decode(code, k, 3);
            assert_eq!(encode(&t, k), code);
        }
        assert_eq!(encode(&[1, 2], 3), 5);
        assert_eq!(decode(5, 3, 2), vec![1, 2]);
    }
}
