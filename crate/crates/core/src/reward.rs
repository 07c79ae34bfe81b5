use crate::error::{Error, Result};
use crate::state::VectorState;

/// Per-epoch reward of `s` supporters at rate `g`.
pub fn reward_aggregate(s: usize, g: u64) -> u64 {
    s as u64 * g
}

/// Per-epoch reward `g . state` with agent-specific rates.
pub fn reward_vector(state: &VectorState, rates: &[u64]) -> Result<u64> {
    if rates.len() != state.len() {
        return Err(Error::LengthMismatch {
            expected: state.len(),
            got: rates.len(),
        });
    }
    Ok(state.ones_iter().map(|i| rates[i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate() {
        assert_eq!(reward_aggregate(7, 8), 56);
        assert_eq!(reward_aggregate(0, 8), 0);
        assert_eq!(reward_aggregate(3, 8), 24);
    }

    #[test]
    fn vector() {
        let n = 5;
        assert_eq!(
            reward_vector(&VectorState::ones(n), &[8; 5]).unwrap(),
            8 * n as u64
        );
        assert_eq!(
            reward_vector(&VectorState::zeros(3), &[4, 5, 6]).unwrap(),
            0
        );
        let s = VectorState::parse("101").unwrap();
        assert_eq!(reward_vector(&s, &[1, 2, 3]).unwrap(), 4);
        assert!(reward_vector(&s, &[1, 2]).is_err());
    }
}
