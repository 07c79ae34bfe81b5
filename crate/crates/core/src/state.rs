use std::fmt;

use crate::error::{Error, Result};

/// Largest agent count representable by the bit-packed vector types.
pub const MAX_VECTOR_AGENTS: usize = 64;

macro_rules! bit_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            n: usize,
            bits: u64,
        }

        impl $name {
            pub fn new(n: usize, bits: u64) -> Result<Self> {
                if n > MAX_VECTOR_AGENTS {
                    return Err(Error::TooLarge {
                        what: "agent count",
                        size: n,
                        limit: MAX_VECTOR_AGENTS,
                    });
                }
                if n < 64 && bits >> n != 0 {
                    return Err(Error::InvalidParams(format!(
                        "bit pattern {bits:#b} has bits beyond n = {n}"
                    )));
                }
                Ok(Self { n, bits })
            }

            pub fn zeros(n: usize) -> Self {
                assert!(n <= MAX_VECTOR_AGENTS);
                Self { n, bits: 0 }
            }

            pub fn ones(n: usize) -> Self {
                assert!(n <= MAX_VECTOR_AGENTS);
                Self { n, bits: full_mask(n) }
            }

            /// Parses a string of `0`/`1` characters; character `i` is agent `i`.
            pub fn parse(s: &str) -> Result<Self> {
                let mut bits = 0u64;
                let mut n = 0;
                for (i, c) in s.chars().enumerate() {
                    match c {
                        '0' => {}
                        '1' if i < MAX_VECTOR_AGENTS => bits |= 1 << i,
                        '1' => {}
                        other => {
                            return Err(Error::InvalidParams(format!(
                                "unexpected character {other:?} in bit string"
                            )))
                        }
                    }
                    n += 1;
                }
                Self::new(n, bits)
            }

            pub fn len(&self) -> usize {
                self.n
            }

            pub fn is_empty(&self) -> bool {
                self.n == 0
            }

            pub fn bits(&self) -> u64 {
                self.bits
            }

            pub fn get(&self, i: usize) -> bool {
                debug_assert!(i < self.n);
                self.bits >> i & 1 == 1
            }

            pub fn set(&mut self, i: usize, value: bool) {
                assert!(i < self.n);
                if value {
                    self.bits |= 1 << i;
                } else {
                    self.bits &= !(1 << i);
                }
            }

            pub fn count_ones(&self) -> usize {
                self.bits.count_ones() as usize
            }

            pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
                (0..self.n).filter(move |&i| self.get(i))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for i in 0..self.n {
                    f.write_str(if self.get(i) { "1" } else { "0" })?;
                }
                Ok(())
            }
        }
    };
}

bit_vector! {
    /// Opinion labels of every agent; bit `i` set means agent `i` is a supporter.
    VectorState
}

bit_vector! {
    /// Payment decisions; bit `i` set means agent `i` is paid this epoch.
    VectorAction
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl VectorAction {
    /// Number of paid non-supporters and paid supporters in `state`.
    pub fn split(&self, state: &VectorState) -> AggregateAction {
        let ell = (self.bits & !state.bits).count_ones() as usize;
        let k = (self.bits & state.bits).count_ones() as usize;
        AggregateAction { ell, k }
    }
}

/// Payments counted by the payee's current opinion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AggregateAction {
    /// Paid non-supporters.
    pub ell: usize,
    /// Paid supporters.
    pub k: usize,
}

impl AggregateAction {
    pub const NONE: Self = Self { ell: 0, k: 0 };

    pub fn new(ell: usize, k: usize) -> Self {
        Self { ell, k }
    }

    pub fn total(&self) -> usize {
        self.ell + self.k
    }

    pub fn cost(&self, c_ns: u64, c_s: u64) -> u64 {
        self.ell as u64 * c_ns + self.k as u64 * c_s
    }

    /// Whether the payments fit the population in supporter-count state `s`.
    pub fn fits(&self, n: usize, s: usize) -> bool {
        s <= n && self.k <= s && self.ell <= n - s
    }

    pub(crate) fn check(&self, n: usize, s: usize) -> Result<()> {
        if s > n {
            return Err(Error::StateOutOfRange { state: s, n });
        }
        if !self.fits(n, s) {
            return Err(Error::InfeasibleAction {
                ell: self.ell,
                k: self.k,
                state: s,
                n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for AggregateAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ell, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s = VectorState::parse("101").unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.get(0) && !s.get(1) && s.get(2));
        assert_eq!(s.to_string(), "101");
        assert_eq!(s.count_ones(), 2);
        assert!(VectorState::parse("10x").is_err());
    }

    #[test]
    fn stray_bits_rejected() {
        assert!(VectorState::new(2, 0b100).is_err());
        assert!(VectorState::new(65, 0).is_err());
        assert_eq!(VectorState::ones(64).count_ones(), 64);
    }

    #[test]
    fn split_counts_by_label() {
        let state = VectorState::parse("1100").unwrap();
        let pay = VectorAction::parse("0110").unwrap();
        assert_eq!(pay.split(&state), AggregateAction::new(1, 1));
    }

    #[test]
    fn aggregate_fit() {
        assert!(AggregateAction::new(4, 3).fits(7, 3));
        assert!(!AggregateAction::new(5, 3).fits(7, 3));
        assert!(!AggregateAction::new(0, 4).fits(7, 3));
        assert_eq!(AggregateAction::new(2, 2).cost(10, 5), 30);
    }
}
