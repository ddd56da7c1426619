use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table must be {m}×{m} with entries below {m}")]
    Shape { m: usize },
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
}

/// A finite group given by its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates the table exhaustively.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let m = table.len();
        if m == 0 || table.iter().any(|row| row.len() != m || row.iter().any(|&x| x >= m)) {
            return Err(GroupError::Shape { m });
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let inverse = (0..m)
            .map(|x| {
                (0..m)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or(GroupError::NoInverse(x))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for r in 0..m {
            for s in 0..m {
                for t in 0..m {
                    if table[table[r][s]][t] != table[r][table[s][t]] {
                        return Err(GroupError::NotAssociative(r, s, t));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { table, identity, inverse })
    }

    pub fn cyclic(m: usize) -> Self {
        let table = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        Self::from_table(table).expect("cyclic group table is valid")
    }

    /// `G × H` with `(g, h)` stored at index `g + |G|·h`.
    pub fn direct_product(g: &Self, h: &Self) -> Self {
        let (mg, mh) = (g.order(), h.order());
        let table = (0..mg * mh)
            .map(|x| {
                (0..mg * mh)
                    .map(|y| g.mul(x % mg, y % mg) + mg * h.mul(x / mg, y / mg))
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("product of valid tables is valid")
    }

    /// `Z/2 × Z/2`; index `i` is the pair `(i & 1, i >> 1)`.
    pub fn klein_four() -> Self {
        Self::direct_product(&Self::cyclic(2), &Self::cyclic(2))
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
}
