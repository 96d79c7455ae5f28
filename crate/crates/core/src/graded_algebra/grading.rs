use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer grading, or cyclic grading by an even modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grading {
    Integer,
    Cyclic(u32),
}

impl std::fmt::Display for Grading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Grading::Integer => write!(f, "ℤ"),
            Grading::Cyclic(d) => write!(f, "ℤ/{d}"),
        }
    }
}

impl Grading {
    /// `d = 0` is the integer grading; odd moduli are rejected because
    /// parity would not be well defined on residues.
    pub fn cyclic(d: u32) -> Result<Self> {
        match d {
            0 => Ok(Grading::Integer),
            d if d % 2 == 1 => Err(Error::InvalidGrading(format!("modulus {d} is odd"))),
            d => Ok(Grading::Cyclic(d)),
        }
    }

    pub fn modulus(&self) -> Option<u32> {
        match self {
            Grading::Integer => None,
            Grading::Cyclic(d) => Some(*d),
        }
    }

    pub fn reduce(&self, deg: i64) -> i64 {
        match self {
            Grading::Integer => deg,
            Grading::Cyclic(d) => deg.rem_euclid(*d as i64),
        }
    }

    pub fn is_odd(&self, deg: i64) -> bool {
        deg.rem_euclid(2) == 1
    }

    pub fn shift(&self, deg: i64, by: i64) -> i64 {
        self.reduce(deg + by)
    }

    pub fn same(&self, a: i64, b: i64) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    /// Reduce further modulo an even `d`.
    pub fn coarsen(&self, d: u32) -> Result<Grading> {
        let g = Grading::cyclic(d)?;
        match (self, g) {
            (_, Grading::Integer) => Ok(*self),
            (Grading::Integer, g) => Ok(g),
            (Grading::Cyclic(m), Grading::Cyclic(n)) if m % n == 0 => Ok(g),
            (Grading::Cyclic(m), _) => Err(Error::InvalidGrading(format!("cannot reduce ℤ/{m} grading mod {d}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues() {
        let g = Grading::cyclic(4).unwrap();
        assert_eq!(g.reduce(-1), 3);
        assert!(g.is_odd(g.reduce(-1)));
        assert!(Grading::cyclic(3).is_err());
        assert_eq!(Grading::cyclic(0).unwrap(), Grading::Integer);
    }
}
