//! Finite state spaces with a fixed bijection onto `0..size`.
//!
//! Matrices are packed row-major and polynomials low-degree-first, digit `i`
//! carrying weight `n^i`. Bit vectors are read as a binary number whose most
//! significant bit is the leftmost cell.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numtheory::gcd;

/// Hard ceiling on the number of states in any space.
pub const MAX_STATES: u64 = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// All residues `0..n`.
    Zn(u64),
    /// Residues `1..n`.
    ZnNonzero(u64),
    /// Residues coprime to `n`.
    ZnUnits(u64),
    /// Residues `2..n`.
    ZnFromTwo(u64),
    /// All 2x2 matrices over `Z_n`.
    Mat2(u64),
    /// Upper triangular 2x2 matrices over `Z_n`.
    UpperTri2(u64),
    /// `Z_n[x] / (x^k)`.
    PolyQuot(u64, u32),
    /// Bit vectors of width `w`.
    BitVec(u32),
}

impl SpaceKind {
    /// Modulus of the underlying coefficient ring; `2` for bit vectors.
    pub fn modulus(&self) -> u64 {
        match *self {
            SpaceKind::Zn(n)
            | SpaceKind::ZnNonzero(n)
            | SpaceKind::ZnUnits(n)
            | SpaceKind::ZnFromTwo(n)
            | SpaceKind::Mat2(n)
            | SpaceKind::UpperTri2(n)
            | SpaceKind::PolyQuot(n, _) => n,
            SpaceKind::BitVec(_) => 2,
        }
    }

    pub fn is_residue(&self) -> bool {
        matches!(
            self,
            SpaceKind::Zn(_)
                | SpaceKind::ZnNonzero(_)
                | SpaceKind::ZnUnits(_)
                | SpaceKind::ZnFromTwo(_)
        )
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceKind::Zn(n) => write!(f, "zn:{n}"),
            SpaceKind::ZnNonzero(n) => write!(f, "znz:{n}"),
            SpaceKind::ZnUnits(n) => write!(f, "units:{n}"),
            SpaceKind::ZnFromTwo(n) => write!(f, "from2:{n}"),
            SpaceKind::Mat2(n) => write!(f, "mat2:{n}"),
            SpaceKind::UpperTri2(n) => write!(f, "ut2:{n}"),
            SpaceKind::PolyQuot(n, k) => write!(f, "poly:{n}:{k}"),
            SpaceKind::BitVec(w) => write!(f, "bits:{w}"),
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidSpace(format!("bad {what} `{s}`")))
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let kind = match parts.as_slice() {
            ["zn", n] => SpaceKind::Zn(parse_num(n, "modulus")?),
            ["znz", n] => SpaceKind::ZnNonzero(parse_num(n, "modulus")?),
            ["units", n] => SpaceKind::ZnUnits(parse_num(n, "modulus")?),
            ["from2", n] => SpaceKind::ZnFromTwo(parse_num(n, "modulus")?),
            ["mat2", n] => SpaceKind::Mat2(parse_num(n, "modulus")?),
            ["ut2", n] => SpaceKind::UpperTri2(parse_num(n, "modulus")?),
            ["poly", n, k] => {
                SpaceKind::PolyQuot(parse_num(n, "modulus")?, parse_num(k, "degree")?)
            }
            ["bits", w] => SpaceKind::BitVec(parse_num(w, "width")?),
            _ => return Err(Error::InvalidSpace(format!("unrecognized specifier `{s}`"))),
        };
        Ok(kind)
    }
}

/// A validated finite state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    kind: SpaceKind,
    size: u64,
    /// Sorted units, only for `ZnUnits`.
    units: Option<Arc<Vec<u64>>>,
}

/// An element of a [`StateSpace`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum State {
    Residue(u64),
    /// Row-major `[a, b, c, d]` for `[[a, b], [c, d]]`.
    Matrix([u64; 4]),
    /// Coefficients, lowest degree first.
    Poly(Vec<u64>),
    /// Cell `i` is `cells[i]`.
    Bits(Vec<bool>),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Residue(r) => write!(f, "{r}"),
            State::Matrix([a, b, c, d]) => write!(f, "[[{a},{b}],[{c},{d}]]"),
            State::Poly(coeffs) => {
                let parts: Vec<String> = coeffs.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            State::Bits(cells) => {
                for &c in cells {
                    f.write_str(if c { "1" } else { "0" })?;
                }
                Ok(())
            }
        }
    }
}

impl StateSpace {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        let invalid = |msg: &str| Err(Error::InvalidSpace(format!("{kind}: {msg}")));
        let size: u128 = match kind {
            SpaceKind::Zn(n) => {
                if n < 1 {
                    return invalid("modulus must be at least 1");
                }
                n as u128
            }
            SpaceKind::ZnNonzero(n) => {
                if n < 2 {
                    return invalid("modulus must be at least 2");
                }
                n as u128 - 1
            }
            SpaceKind::ZnUnits(n) => {
                if n < 1 {
                    return invalid("modulus must be at least 1");
                }
                // Counted below, after the cap check on n itself.
                n as u128
            }
            SpaceKind::ZnFromTwo(n) => {
                if n < 3 {
                    return invalid("modulus must be at least 3");
                }
                n as u128 - 2
            }
            SpaceKind::Mat2(n) => {
                if n < 1 {
                    return invalid("modulus must be at least 1");
                }
                (n as u128).saturating_pow(4)
            }
            SpaceKind::UpperTri2(n) => {
                if n < 1 {
                    return invalid("modulus must be at least 1");
                }
                (n as u128).saturating_pow(3)
            }
            SpaceKind::PolyQuot(n, k) => {
                if n < 1 || k < 1 {
                    return invalid("modulus and degree must be at least 1");
                }
                (n as u128).saturating_pow(k)
            }
            SpaceKind::BitVec(w) => {
                if w < 1 {
                    return invalid("width must be at least 1");
                }
                1u128.checked_shl(w).unwrap_or(u128::MAX)
            }
        };
        if size > MAX_STATES as u128 {
            return Err(Error::SpaceTooLarge {
                size,
                cap: MAX_STATES,
            });
        }
        let mut space = StateSpace {
            kind,
            size: size as u64,
            units: None,
        };
        if let SpaceKind::ZnUnits(n) = kind {
            let units: Vec<u64> = (0..n).filter(|&r| gcd(r, n) == 1).collect();
            space.size = units.len() as u64;
            space.units = Some(Arc::new(units));
        }
        Ok(space)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> u64 {
        self.kind.modulus()
    }

    /// Residue stored at `index`, for residue spaces.
    pub(crate) fn residue_at(&self, index: u64) -> u64 {
        match self.kind {
            SpaceKind::Zn(_) => index,
            SpaceKind::ZnNonzero(_) => index + 1,
            SpaceKind::ZnFromTwo(_) => index + 2,
            SpaceKind::ZnUnits(_) => self.units.as_ref().expect("units table")[index as usize],
            _ => unreachable!("residue_at on {}", self.kind),
        }
    }

    /// Index of a residue already reduced mod `n`, or `None` when the residue
    /// lies outside the subspace.
    pub(crate) fn index_of_residue(&self, r: u64) -> Option<u64> {
        match self.kind {
            SpaceKind::Zn(_) => Some(r),
            SpaceKind::ZnNonzero(_) => r.checked_sub(1),
            SpaceKind::ZnFromTwo(_) => r.checked_sub(2),
            SpaceKind::ZnUnits(_) => self
                .units
                .as_ref()
                .expect("units table")
                .binary_search(&r)
                .ok()
                .map(|i| i as u64),
            _ => unreachable!("index_of_residue on {}", self.kind),
        }
    }

    fn digits(&self) -> (u64, usize) {
        match self.kind {
            SpaceKind::Mat2(n) => (n, 4),
            SpaceKind::UpperTri2(n) => (n, 3),
            SpaceKind::PolyQuot(n, k) => (n, k as usize),
            SpaceKind::BitVec(w) => (2, w as usize),
            _ => unreachable!(),
        }
    }

    pub(crate) fn unpack(&self, mut index: u64, out: &mut [u64]) {
        let (n, _) = self.digits();
        for d in out.iter_mut() {
            *d = index % n;
            index /= n;
        }
    }

    pub(crate) fn pack(&self, digits: &[u64]) -> u64 {
        let (n, _) = self.digits();
        digits.iter().rev().fold(0, |acc, &d| acc * n + d)
    }

    pub(crate) fn matrix_at(&self, index: u64) -> [u64; 4] {
        match self.kind {
            SpaceKind::Mat2(_) => {
                let mut m = [0; 4];
                self.unpack(index, &mut m);
                m
            }
            SpaceKind::UpperTri2(_) => {
                let mut d = [0; 3];
                self.unpack(index, &mut d);
                [d[0], d[1], 0, d[2]]
            }
            _ => unreachable!(),
        }
    }

    /// `None` when `m` is not upper triangular in an upper-triangular space.
    pub(crate) fn index_of_matrix(&self, m: &[u64; 4]) -> Option<u64> {
        match self.kind {
            SpaceKind::Mat2(_) => Some(self.pack(m)),
            SpaceKind::UpperTri2(_) => (m[2] == 0).then(|| self.pack(&[m[0], m[1], m[3]])),
            _ => unreachable!(),
        }
    }

    pub fn state_at(&self, index: u64) -> Result<State> {
        if index >= self.size {
            return Err(Error::OutOfRange {
                index,
                size: self.size,
            });
        }
        let state = match self.kind {
            SpaceKind::Zn(_)
            | SpaceKind::ZnNonzero(_)
            | SpaceKind::ZnUnits(_)
            | SpaceKind::ZnFromTwo(_) => State::Residue(self.residue_at(index)),
            SpaceKind::Mat2(_) | SpaceKind::UpperTri2(_) => State::Matrix(self.matrix_at(index)),
            SpaceKind::PolyQuot(_, k) => {
                let mut coeffs = vec![0; k as usize];
                self.unpack(index, &mut coeffs);
                State::Poly(coeffs)
            }
            SpaceKind::BitVec(w) => {
                State::Bits((0..w).map(|i| (index >> (w - 1 - i)) & 1 == 1).collect())
            }
        };
        Ok(state)
    }

    pub fn index_of(&self, state: &State) -> Result<u64> {
        let reject = || Error::NotInSpace(self.kind.to_string());
        let n = self.modulus();
        match (self.kind, state) {
            (k, State::Residue(r)) if k.is_residue() => {
                if *r >= n {
                    return Err(reject());
                }
                self.index_of_residue(*r).ok_or_else(reject)
            }
            (SpaceKind::Mat2(_) | SpaceKind::UpperTri2(_), State::Matrix(m)) => {
                if m.iter().any(|&e| e >= n) {
                    return Err(reject());
                }
                self.index_of_matrix(m).ok_or_else(reject)
            }
            (SpaceKind::PolyQuot(_, k), State::Poly(coeffs)) => {
                if coeffs.len() != k as usize || coeffs.iter().any(|&c| c >= n) {
                    return Err(reject());
                }
                Ok(self.pack(coeffs))
            }
            (SpaceKind::BitVec(w), State::Bits(cells)) => {
                if cells.len() != w as usize {
                    return Err(reject());
                }
                Ok(cells.iter().fold(0, |acc, &c| (acc << 1) | u64::from(c)))
            }
            _ => Err(reject()),
        }
    }

    /// Every state in index order.
    pub fn enumerate(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.size).map(move |i| self.state_at(i).expect("index in range"))
    }
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

impl FromStr for StateSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateSpace::new(s.parse()?)
    }
}

/// A space kind with the modulus left open, for sweeps over `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceTemplate {
    Zn,
    ZnNonzero,
    ZnUnits,
    ZnFromTwo,
    Mat2,
    UpperTri2,
    PolyQuot(u32),
    BitVec,
}

impl SpaceTemplate {
    pub fn at(&self, n: u64) -> Result<StateSpace> {
        let kind = match *self {
            SpaceTemplate::Zn => SpaceKind::Zn(n),
            SpaceTemplate::ZnNonzero => SpaceKind::ZnNonzero(n),
            SpaceTemplate::ZnUnits => SpaceKind::ZnUnits(n),
            SpaceTemplate::ZnFromTwo => SpaceKind::ZnFromTwo(n),
            SpaceTemplate::Mat2 => SpaceKind::Mat2(n),
            SpaceTemplate::UpperTri2 => SpaceKind::UpperTri2(n),
            SpaceTemplate::PolyQuot(k) => SpaceKind::PolyQuot(n, k),
            SpaceTemplate::BitVec => {
                let w = u32::try_from(n).map_err(|_| Error::InvalidSpace(format!("width {n}")))?;
                SpaceKind::BitVec(w)
            }
        };
        StateSpace::new(kind)
    }

    /// Smallest parameter for which the template yields a valid space.
    pub fn min_param(&self) -> u64 {
        match self {
            SpaceTemplate::ZnNonzero => 2,
            SpaceTemplate::ZnFromTwo => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for SpaceTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTemplate::Zn => f.write_str("zn"),
            SpaceTemplate::ZnNonzero => f.write_str("znz"),
            SpaceTemplate::ZnUnits => f.write_str("units"),
            SpaceTemplate::ZnFromTwo => f.write_str("from2"),
            SpaceTemplate::Mat2 => f.write_str("mat2"),
            SpaceTemplate::UpperTri2 => f.write_str("ut2"),
            SpaceTemplate::PolyQuot(k) => write!(f, "poly:{k}"),
            SpaceTemplate::BitVec => f.write_str("bits"),
        }
    }
}

impl FromStr for SpaceTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        Ok(match parts.as_slice() {
            ["zn"] => SpaceTemplate::Zn,
            ["znz"] => SpaceTemplate::ZnNonzero,
            ["units"] => SpaceTemplate::ZnUnits,
            ["from2"] => SpaceTemplate::ZnFromTwo,
            ["mat2"] => SpaceTemplate::Mat2,
            ["ut2"] => SpaceTemplate::UpperTri2,
            ["poly", k] => SpaceTemplate::PolyQuot(parse_num(k, "degree")?),
            ["bits"] => SpaceTemplate::BitVec,
            _ => return Err(Error::InvalidSpace(format!("unrecognized template `{s}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn space(s: &str) -> StateSpace {
        s.parse().unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(space("zn:5").size(), 5);
        assert_eq!(space("mat2:5").size(), 625);
        assert_eq!(space("bits:9").size(), 512);
        assert_eq!(space("units:15").size(), 8);
        assert_eq!(space("ut2:5").size(), 125);
        assert_eq!(space("poly:5:6").size(), 15625);
        assert_eq!(space("from2:6").size(), 4);
        assert!(matches!(
            "from2:2".parse::<StateSpace>(),
            Err(Error::InvalidSpace(_))
        ));
        assert!(matches!(
            "bits:26".parse::<StateSpace>(),
            Err(Error::SpaceTooLarge { .. })
        ));
        assert!(matches!(
            "mat2:100".parse::<StateSpace>(),
            Err(Error::SpaceTooLarge { .. })
        ));
        assert!("zn:0".parse::<StateSpace>().is_err());
        assert!("zz:4".parse::<StateSpace>().is_err());
    }

    #[test]
    fn indexing_examples() {
        assert_eq!(space("zn:7").index_of(&State::Residue(3)), Ok(3));
        assert_eq!(space("poly:5:6").index_of(&State::Poly(vec![0; 6])), Ok(0));
        let m2 = space("mat2:2");
        let id = m2.index_of(&State::Matrix([1, 0, 0, 1])).unwrap();
        assert_eq!(id, 1 + 8);
        assert_eq!(m2.state_at(id), Ok(State::Matrix([1, 0, 0, 1])));
        assert_eq!(space("zn:7").state_at(3), Ok(State::Residue(3)));
        assert_eq!(space("znz:7").state_at(0), Ok(State::Residue(1)));
        assert_eq!(space("units:15").state_at(0), Ok(State::Residue(1)));
        assert!(space("zn:7").state_at(7).is_err());
        assert!(space("znz:7").index_of(&State::Residue(0)).is_err());
        assert!(space("units:15").index_of(&State::Residue(5)).is_err());
        assert!(space("ut2:3")
            .index_of(&State::Matrix([1, 0, 1, 1]))
            .is_err());
        assert!(space("zn:7").index_of(&State::Bits(vec![true])).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let residues = |s: &str| -> Vec<u64> {
            space(s)
                .enumerate()
                .map(|st| match st {
                    State::Residue(r) => r,
                    other => panic!("{other:?}"),
                })
                .collect()
        };
        assert_eq!(residues("from2:6"), vec![2, 3, 4, 5]);
        assert_eq!(residues("units:8"), vec![1, 3, 5, 7]);
        assert_eq!(residues("units:15"), vec![1, 2, 4, 7, 8, 11, 13, 14]);
        let bits: Vec<String> = space("bits:2").enumerate().map(|s| s.to_string()).collect();
        assert_eq!(bits, vec!["00", "01", "10", "11"]);
    }

    #[test]
    fn exhaustive_round_trip() {
        let mut specs = Vec::new();
        for n in 1..=7 {
            specs.push(format!("zn:{n}"));
            specs.push(format!("units:{n}"));
            specs.push(format!("mat2:{n}"));
            specs.push(format!("ut2:{n}"));
            for k in 1..=4 {
                specs.push(format!("poly:{n}:{k}"));
            }
            if n >= 2 {
                specs.push(format!("znz:{n}"));
            }
            if n >= 3 {
                specs.push(format!("from2:{n}"));
            }
        }
        for w in 1..=10 {
            specs.push(format!("bits:{w}"));
        }
        for spec in specs {
            let sp = space(&spec);
            let mut seen = HashSet::new();
            for (i, st) in sp.enumerate().enumerate() {
                assert_eq!(sp.index_of(&st), Ok(i as u64), "{spec}");
                assert!(seen.insert(st), "{spec}: repeated state");
            }
            assert_eq!(seen.len() as u64, sp.size());
        }
    }

    #[test]
    fn units_match_nonzero_for_primes() {
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            let a: Vec<State> = space(&format!("units:{p}")).enumerate().collect();
            let b: Vec<State> = space(&format!("znz:{p}")).enumerate().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn specifiers_round_trip() {
        for s in [
            "zn:31", "znz:7", "units:15", "from2:6", "mat2:5", "ut2:5", "poly:4:6", "bits:9",
        ] {
            assert_eq!(space(s).to_string(), s);
        }
        for s in ["zn", "znz", "poly:3", "bits"] {
            assert_eq!(s.parse::<SpaceTemplate>().unwrap().to_string(), s);
        }
    }
}
