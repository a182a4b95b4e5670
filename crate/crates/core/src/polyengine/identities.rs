use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::relstruct::{decode_tuple, encode_tuple};

use super::OpTable;

/// A system of identities for a single operation symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentitySystem {
    /// `f(x,…,x) = x`, at any arity.
    Idempotent,
    /// `s(x,y,x,z,y,z) = s(y,x,z,x,z,y)`.
    Siggers,
    /// `f(x1,…,xn) = f(x2,…,xn,x1)`.
    Cyclic(usize),
    /// `w(x,…,x,y) = w(x,…,y,x) = ⋯ = w(y,x,…,x)`.
    Wnu(usize),
    /// `m(x,x,y) = m(x,y,x) = m(y,x,x) = x`.
    Majority,
    /// `m(x,x,y) = m(x,y,x) = m(y,x,x) = y`.
    Minority,
    /// Idempotent, commutative and associative binary operation.
    Semilattice,
}

impl IdentitySystem {
    /// The arity the identities force, if any.
    pub fn fixed_arity(self) -> Option<usize> {
        match self {
            IdentitySystem::Idempotent => None,
            IdentitySystem::Siggers => Some(6),
            IdentitySystem::Cyclic(n) | IdentitySystem::Wnu(n) => Some(n),
            IdentitySystem::Majority | IdentitySystem::Minority => Some(3),
            IdentitySystem::Semilattice => Some(2),
        }
    }

    pub(crate) fn validate(self, arity: usize) -> Result<()> {
        match self {
            IdentitySystem::Cyclic(n) | IdentitySystem::Wnu(n) if n < 2 => {
                return Err(Error::Parameter(format!("{self} needs arity at least 2")))
            }
            _ => {}
        }
        match self.fixed_arity() {
            Some(a) if a != arity => Err(Error::Parameter(format!(
                "{self} has arity {a}, requested {arity}"
            ))),
            _ if arity == 0 => Err(Error::Parameter("arity must be positive".into())),
            _ => Ok(()),
        }
    }

    /// Direct check of the identities over every value assignment.
    pub fn satisfied_by(self, op: &OpTable) -> bool {
        if self.validate(op.arity()).is_err() {
            return false;
        }
        let d = op.domain_size();
        let n = op.arity();
        let elems = 0..d;
        match self {
            IdentitySystem::Idempotent => elems.into_iter().all(|x| op.apply(&vec![x; n]) == x),
            IdentitySystem::Siggers => triples(d).all(|(x, y, z)| {
                op.apply(&[x, y, x, z, y, z]) == op.apply(&[y, x, z, x, z, y])
            }),
            IdentitySystem::Cyclic(_) => (0..d.pow(n as u32)).all(|c| {
                let mut args = decode_tuple(c, n, d);
                let v = op.apply(&args);
                args.rotate_left(1);
                op.apply(&args) == v
            }),
            IdentitySystem::Wnu(_) => pairs(d).all(|(x, y)| {
                let first = op.apply(&near_unanimous(n, x, y, 0));
                (1..n).all(|i| op.apply(&near_unanimous(n, x, y, i)) == first)
            }),
            IdentitySystem::Majority | IdentitySystem::Minority => pairs(d).all(|(x, y)| {
                let expect = if self == IdentitySystem::Majority { x } else { y };
                [[x, x, y], [x, y, x], [y, x, x]]
                    .iter()
                    .all(|a| op.apply(a) == expect)
            }),
            IdentitySystem::Semilattice => {
                IdentitySystem::Idempotent.satisfied_by(op)
                    && pairs(d).all(|(x, y)| op.apply(&[x, y]) == op.apply(&[y, x]))
                    && is_associative(op)
            }
        }
    }

    /// Table cells forced equal to each other and cells forced to a value.
    pub(crate) fn cell_constraints(self, arity: usize, d: usize) -> CellConstraints {
        let enc = |a: &[usize]| encode_tuple(a, d);
        let mut cc = CellConstraints::default();
        let idempotent = |cc: &mut CellConstraints| {
            for x in 0..d {
                cc.pins.push((enc(&vec![x; arity]), x));
            }
        };
        match self {
            IdentitySystem::Idempotent => idempotent(&mut cc),
            IdentitySystem::Siggers => {
                for (x, y, z) in triples(d) {
                    cc.equal.push((enc(&[x, y, x, z, y, z]), enc(&[y, x, z, x, z, y])));
                }
            }
            IdentitySystem::Cyclic(n) => {
                for c in 0..d.pow(n as u32) {
                    let mut args = decode_tuple(c, n, d);
                    args.rotate_left(1);
                    cc.equal.push((c, enc(&args)));
                }
            }
            IdentitySystem::Wnu(n) => {
                for (x, y) in pairs(d) {
                    for i in 1..n {
                        cc.equal.push((
                            enc(&near_unanimous(n, x, y, 0)),
                            enc(&near_unanimous(n, x, y, i)),
                        ));
                    }
                }
            }
            IdentitySystem::Majority | IdentitySystem::Minority => {
                for (x, y) in pairs(d) {
                    let v = if self == IdentitySystem::Majority { x } else { y };
                    for a in [[x, x, y], [x, y, x], [y, x, x]] {
                        cc.pins.push((enc(&a), v));
                    }
                }
            }
            IdentitySystem::Semilattice => {
                idempotent(&mut cc);
                for (x, y) in pairs(d) {
                    cc.equal.push((enc(&[x, y]), enc(&[y, x])));
                }
            }
        }
        cc
    }
}

#[derive(Debug, Default)]
pub(crate) struct CellConstraints {
    pub equal: Vec<(usize, usize)>,
    pub pins: Vec<(usize, usize)>,
}

pub(crate) fn is_associative(op: &OpTable) -> bool {
    triples(op.domain_size()).all(|(x, y, z)| {
        op.apply(&[x, op.apply(&[y, z])]) == op.apply(&[op.apply(&[x, y]), z])
    })
}

/// `(x,…,x)` with `y` at position `at`.
fn near_unanimous(n: usize, x: usize, y: usize, at: usize) -> Vec<usize> {
    let mut v = vec![x; n];
    v[at] = y;
    v
}

fn pairs(d: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..d).flat_map(move |x| (0..d).map(move |y| (x, y)))
}

fn triples(d: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    pairs(d).flat_map(move |(x, y)| (0..d).map(move |z| (x, y, z)))
}

impl fmt::Display for IdentitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentitySystem::Idempotent => f.write_str("idempotent"),
            IdentitySystem::Siggers => f.write_str("siggers"),
            IdentitySystem::Cyclic(n) => write!(f, "cyclic:{n}"),
            IdentitySystem::Wnu(n) => write!(f, "wnu:{n}"),
            IdentitySystem::Majority => f.write_str("majority"),
            IdentitySystem::Minority => f.write_str("minority"),
            IdentitySystem::Semilattice => f.write_str("semilattice"),
        }
    }
}

impl FromStr for IdentitySystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let param = |rest: &str| -> Result<usize> {
            rest.parse()
                .map_err(|_| Error::Parameter(format!("bad identity parameter `{rest}`")))
        };
        Ok(match s.as_str() {
            "idempotent" => IdentitySystem::Idempotent,
            "siggers" => IdentitySystem::Siggers,
            "majority" => IdentitySystem::Majority,
            "minority" => IdentitySystem::Minority,
            "semilattice" => IdentitySystem::Semilattice,
            _ => {
                if let Some(rest) = s.strip_prefix("cyclic:") {
                    IdentitySystem::Cyclic(param(rest)?)
                } else if let Some(rest) = s.strip_prefix("wnu:") {
                    IdentitySystem::Wnu(param(rest)?)
                } else {
                    return Err(Error::Parameter(format!("unknown identity system `{s}`")));
                }
            }
        })
    }
}
