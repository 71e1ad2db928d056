//! Arithmetic in the prime field F_p for moduli below 2^32.

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate. Keeps every product of
/// two reduced residues inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut f = 3u64;
    while f * f <= p {
        if p.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Validates a modulus: prime and below [`MAX_MODULUS`].
pub fn check_modulus(p: u64) -> Result<()> {
    if p >= MAX_MODULUS {
        return Err(Error::Parameter(format!("modulus {p} exceeds 2^32")));
    }
    if !is_prime(p) {
        return Err(Error::Parameter(format!("modulus {p} is not prime")));
    }
    Ok(())
}

/// The prime field F_p. All arguments are assumed reduced (< p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Field {
    pub fn new(p: u64) -> Result<Self> {
        check_modulus(p)?;
        Ok(Field { p })
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&x| is_prime(x)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(check_modulus(4).is_err());
        assert!(check_modulus(1).is_err());
        assert!(check_modulus(4_294_967_311).is_err());
    }

    #[test]
    fn inverses_mod_seven() {
        let f = Field::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.pow(0, 0), 1);
        assert_eq!(f.pow(3, 6), 1);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.neg(0), 0);
    }
}
