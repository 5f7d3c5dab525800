//! Finite groups given by Cayley tables, and involutions on them.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Cayley table is not a Latin square: {0}")]
    NotLatinSquare(String),
    #[error("element {e} is not a two-sided identity (fails at {g})")]
    NoIdentity { e: usize, g: usize },
    #[error("inverse table is wrong at element {g}")]
    BadInverse { g: usize },
    #[error("multiplication is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("alpha is not an involution at element {g}")]
    NotInvolutive { g: usize },
    #[error("alpha moves the identity")]
    MovesIdentity,
    #[error("alpha(g^-1) != alpha(g)^-1 at element {g}")]
    InverseIncompatible { g: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    n: usize,
    mul: Vec<Vec<usize>>,
    e: usize,
    inv: Vec<usize>,
}

impl FiniteGroup {
    /// Validates raw tables exhaustively (Latin square, identity, inverses,
    /// all `n³` associativity triples) and reports the first violation.
    pub fn validate(mul: Vec<Vec<usize>>, e: usize, inv: Vec<usize>) -> Result<Self, GroupError> {
        let n = mul.len();
        if n == 0 {
            return Err(GroupError::InvalidParameter("empty group".into()));
        }
        if let Some(row) = mul.iter().position(|r| r.len() != n) {
            return Err(GroupError::InvalidParameter(format!(
                "row {row} of the table has length {} instead of {n}",
                mul[row].len()
            )));
        }
        if inv.len() != n {
            return Err(GroupError::InvalidParameter(format!(
                "inverse table has length {} instead of {n}",
                inv.len()
            )));
        }
        if e >= n || inv.iter().chain(mul.iter().flatten()).any(|&x| x >= n) {
            return Err(GroupError::InvalidParameter(format!(
                "indices must lie in 0..{n}"
            )));
        }
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                if std::mem::replace(&mut seen_row[mul[i][j]], true) {
                    return Err(GroupError::NotLatinSquare(format!(
                        "row {i} repeats {}",
                        mul[i][j]
                    )));
                }
                if std::mem::replace(&mut seen_col[mul[j][i]], true) {
                    return Err(GroupError::NotLatinSquare(format!(
                        "column {i} repeats {}",
                        mul[j][i]
                    )));
                }
            }
        }
        if let Some(g) = (0..n).find(|&g| mul[e][g] != g || mul[g][e] != g) {
            return Err(GroupError::NoIdentity { e, g });
        }
        if let Some(g) = (0..n).find(|&g| mul[g][inv[g]] != e || mul[inv[g]][g] != e) {
            return Err(GroupError::BadInverse { g });
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a][b];
                for c in 0..n {
                    if mul[ab][c] != mul[a][mul[b][c]] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(Self { n, mul, e, inv })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.e
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inv
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|g| (0..g).all(|h| self.mul[g][h] == self.mul[h][g]))
    }

    /// `L_g` as an index permutation: `h ↦ g·h`.
    pub fn left_translation(&self, g: usize) -> Vec<usize> {
        self.mul[g].clone()
    }

    /// Builds a group from a multiplication rule, deriving identity and
    /// inverses, then validates it.
    pub fn from_rule(n: usize, rule: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidParameter(
                "group order must be >= 1".into(),
            ));
        }
        let mul: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| rule(a, b)).collect())
            .collect();
        let e = (0..n)
            .find(|&x| (0..n).all(|g| mul[x][g] == g && mul[g][x] == g))
            .ok_or(GroupError::NoIdentity { e: 0, g: 0 })?;
        let inv = (0..n)
            .map(|g| (0..n).find(|&h| mul[g][h] == e).unwrap_or(0))
            .collect();
        Self::validate(mul, e, inv)
    }
}

pub fn cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_rule(n, |a, b| (a + b) % n)
}

/// Dihedral group of order `2n`; element `a + n·b` is `r^a s^b` with
/// `s r s = r⁻¹`.
pub fn dihedral(n: usize) -> Result<FiniteGroup, GroupError> {
    if n == 0 {
        return Err(GroupError::InvalidParameter(
            "dihedral(n) needs n >= 1".into(),
        ));
    }
    FiniteGroup::from_rule(2 * n, |x, y| {
        let (a, b) = (x % n, x / n);
        let (c, d) = (y % n, y / n);
        let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
        rot + n * ((b + d) % 2)
    })
}

/// `G₁ × G₂` with `(g₁, g₂)` at index `g₁·|G₂| + g₂`.
pub fn direct_product(g1: &FiniteGroup, g2: &FiniteGroup) -> FiniteGroup {
    let n2 = g2.order();
    FiniteGroup::from_rule(g1.order() * n2, |x, y| {
        g1.mul(x / n2, y / n2) * n2 + g2.mul(x % n2, y % n2)
    })
    .expect("product of groups is a group")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    perm: Vec<usize>,
}

impl Involution {
    pub fn validate(group: &FiniteGroup, perm: Vec<usize>) -> Result<Self, GroupError> {
        let n = group.order();
        if perm.len() != n || perm.iter().any(|&p| p >= n) {
            return Err(GroupError::InvalidParameter(format!(
                "alpha must be a table of {n} indices in 0..{n}"
            )));
        }
        if perm[group.identity()] != group.identity() {
            return Err(GroupError::MovesIdentity);
        }
        if let Some(g) = (0..n).find(|&g| perm[perm[g]] != g) {
            return Err(GroupError::NotInvolutive { g });
        }
        if let Some(g) = (0..n).find(|&g| perm[group.inv(g)] != group.inv(perm[g])) {
            return Err(GroupError::InverseIncompatible { g });
        }
        Ok(Self { perm })
    }

    pub fn apply(&self, g: usize) -> usize {
        self.perm[g]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Diagnostic only: `α(gh) = α(g)α(h)`.
    pub fn is_homomorphism(&self, group: &FiniteGroup) -> bool {
        group.elements().all(|g| {
            group
                .elements()
                .all(|h| self.perm[group.mul(g, h)] == group.mul(self.perm[g], self.perm[h]))
        })
    }

    /// Diagnostic only: `α(gh) = α(h)α(g)`.
    pub fn is_antihomomorphism(&self, group: &FiniteGroup) -> bool {
        group.elements().all(|g| {
            group
                .elements()
                .all(|h| self.perm[group.mul(g, h)] == group.mul(self.perm[h], self.perm[g]))
        })
    }
}

pub fn identity_involution(group: &FiniteGroup) -> Involution {
    Involution::validate(group, group.elements().collect()).expect("identity is an involution")
}

/// `α(g) = g⁻¹`.
pub fn inverse_involution(group: &FiniteGroup) -> Result<Involution, GroupError> {
    Involution::validate(group, group.inverse_table().to_vec())
}
