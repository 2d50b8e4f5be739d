//! Integer lattices given by generating rows: Hermite form, membership,
//! kernels and Smith invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Row = Vec<BigInt>;

fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Echelon basis built one row at a time, with pivots positive and entries
/// above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, Default)]
pub struct Hermite {
    dim: usize,
    /// Rows sorted by pivot column.
    rows: Vec<(usize, Row)>,
}

impl Hermite {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new() }
    }

    pub fn from_rows(dim: usize, rows: impl IntoIterator<Item = Row>) -> Self {
        let mut h = Self::new(dim);
        for r in rows {
            h.insert(r);
        }
        h
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The reduced echelon basis (canonical for the lattice).
    pub fn basis(&self) -> Vec<Row> {
        let mut rows: Vec<(usize, Row)> = self.rows.clone();
        for pos in (0..rows.len()).rev() {
            let (c, row) = rows[pos].clone();
            for r in rows.iter_mut().take(pos) {
                let k = r.1[c].div_floor(&row[c]);
                if !k.is_zero() {
                    for (x, y) in r.1.iter_mut().zip(&row) {
                        *x -= &k * y;
                    }
                }
            }
        }
        rows.into_iter().map(|(_, r)| r).collect()
    }

    pub fn pivots(&self) -> Vec<(usize, BigInt)> {
        self.rows.iter().map(|(c, r)| (*c, r[*c].clone())).collect()
    }

    fn lead(v: &Row) -> Option<usize> {
        v.iter().position(|x| !x.is_zero())
    }

    pub fn insert(&mut self, mut v: Row) {
        assert_eq!(v.len(), self.dim);
        loop {
            let c = match Self::lead(&v) {
                Some(c) => c,
                None => return,
            };
            match self.rows.binary_search_by_key(&c, |(col, _)| *col) {
                Err(pos) => {
                    if v[c].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows.insert(pos, (c, v));
                    self.reduce_from(pos);
                    return;
                }
                Ok(pos) => {
                    let r = &self.rows[pos].1;
                    let (a, b) = (r[c].clone(), v[c].clone());
                    if b.is_multiple_of(&a) {
                        let k = &b / &a;
                        for (x, y) in v.iter_mut().zip(r) {
                            *x -= &k * y;
                        }
                        continue;
                    }
                    let (g, s, t) = xgcd(&a, &b);
                    let (ag, bg) = (&a / &g, &b / &g);
                    let new_row: Row = r.iter().zip(&v).map(|(x, y)| &s * x + &t * y).collect();
                    let rest: Row = r.iter().zip(&v).map(|(x, y)| &ag * y - &bg * x).collect();
                    self.rows[pos].1 = new_row;
                    self.reduce_from(pos);
                    v = rest;
                }
            }
        }
    }

    /// Make the pivot at `pos` positive and reduce the entries of its column
    /// in the rows above, then reduce the row itself by the rows below.
    fn reduce_from(&mut self, pos: usize) {
        let (c, _) = self.rows[pos];
        if self.rows[pos].1[c].is_negative() {
            self.rows[pos].1.iter_mut().for_each(|x| *x = -&*x);
        }
        for j in pos + 1..self.rows.len() {
            let (cj, rj) = self.rows[j].clone();
            let k = self.rows[pos].1[cj].div_floor(&rj[cj]);
            if !k.is_zero() {
                for (x, y) in self.rows[pos].1.iter_mut().zip(&rj) {
                    *x -= &k * y;
                }
            }
        }
        let row = self.rows[pos].1.clone();
        for i in 0..pos {
            let k = self.rows[i].1[c].div_floor(&row[c]);
            if !k.is_zero() {
                for (x, y) in self.rows[i].1.iter_mut().zip(&row) {
                    *x -= &k * y;
                }
            }
        }
    }

    /// Integer coefficients expressing `x` in the basis, when it is a member.
    pub fn solve(&self, x: &Row) -> Option<Vec<BigInt>> {
        let mut rem = x.clone();
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (c, r) in &self.rows {
            if let Some(l) = Self::lead(&rem) {
                if l < *c {
                    return None;
                }
            }
            let (q, m) = rem[*c].div_rem(&r[*c]);
            if !m.is_zero() {
                return None;
            }
            for (a, b) in rem.iter_mut().zip(r) {
                *a -= &q * b;
            }
            coeffs.push(q);
        }
        rem.iter().all(|a| a.is_zero()).then_some(coeffs)
    }

    pub fn contains(&self, x: &Row) -> bool {
        self.solve(x).is_some()
    }

    /// Product of the pivots: the index in the saturated lattice spanned by
    /// the pivot columns.
    pub fn pivot_product(&self) -> BigInt {
        self.rows.iter().map(|(c, r)| r[*c].clone()).product()
    }
}

/// `{v in Z^k : v M ≡ 0 mod moduli}` for a `k x t` matrix `M`.
pub fn kernel_mod(m: &[Row], moduli: &[BigInt]) -> Vec<Row> {
    let k = m.len();
    let t = moduli.len();
    let mut h = Hermite::new(t + k);
    for (i, row) in m.iter().enumerate() {
        let mut v = row.clone();
        v.extend((0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        h.insert(v);
    }
    for (j, q) in moduli.iter().enumerate() {
        let mut v = vec![BigInt::zero(); t + k];
        v[j] = q.clone();
        h.insert(v);
    }
    h.basis()
        .into_iter()
        .filter(|r| r[..t].iter().all(|x| x.is_zero()))
        .map(|r| r[t..].to_vec())
        .collect()
}

/// Smith normal form `P M Q = D`, keeping `Q`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal entries, nonnegative, each dividing the next; zeros last.
    pub diag: Vec<BigInt>,
    /// Column transform, `cols x cols`.
    pub q: Vec<Row>,
}

pub fn smith(m: &[Row]) -> Smith {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Row> = m.to_vec();
    let mut q: Vec<Row> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_op = |a: &mut Vec<Row>, q: &mut Vec<Row>, dst: usize, src: usize, k: &BigInt| {
        // column dst += k * column src
        for r in a.iter_mut() {
            let v = &r[src] * k;
            r[dst] += v;
        }
        for r in q.iter_mut() {
            let v = &r[src] * k;
            r[dst] += v;
        }
    };
    let swap_cols = |a: &mut Vec<Row>, q: &mut Vec<Row>, i: usize, j: usize| {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
        for r in q.iter_mut() {
            r.swap(i, j);
        }
    };
    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = match best {
                Some(x) => x,
                None => break,
            };
            a.swap(t, bi);
            swap_cols(&mut a, &mut q, t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                let k = a[i][t].div_floor(&a[t][t]);
                if !k.is_zero() {
                    let pivot_row = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= &k * y;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let k = -a[t][j].div_floor(&a[t][t]);
                if !k.is_zero() {
                    col_op(&mut a, &mut q, j, t, &k);
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the rest of the block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
            match bad {
                Some((i, _)) => {
                    let r = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&r) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
    }
    let mut diag: Vec<BigInt> = (0..n).map(|i| a[i][i].abs()).collect();
    for i in 0..n {
        if a[i][i].is_negative() {
            for r in q.iter_mut() {
                r[i] = -&r[i];
            }
        }
    }
    diag.resize(cols, BigInt::zero());
    Smith { diag, q }
}

/// Invariant factors other than 1 of the cokernel of the row span of `m`
/// inside `Z^cols`; zeros stand for free summands.
pub fn cokernel_invariants(m: &[Row], cols: usize) -> Vec<BigInt> {
    if m.is_empty() {
        return vec![BigInt::zero(); cols];
    }
    smith(m).diag.into_iter().filter(|d| !d.is_one()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Row {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hermite_membership() {
        let h = Hermite::from_rows(3, [r(&[2, 0, 0]), r(&[0, 3, 0]), r(&[1, 1, 1])]);
        assert_eq!(h.rank(), 3);
        assert_eq!(h.pivot_product(), BigInt::from(6));
        assert!(h.contains(&r(&[3, 4, 1])));
        assert!(!h.contains(&r(&[1, 0, 0])));
        let c = h.solve(&r(&[3, 4, 1])).unwrap();
        let mut back = vec![BigInt::zero(); 3];
        for (k, row) in c.iter().zip(h.basis()) {
            for (x, y) in back.iter_mut().zip(row) {
                *x += k * y;
            }
        }
        assert_eq!(back, r(&[3, 4, 1]));
    }

    #[test]
    fn smith_invariants() {
        let m = vec![r(&[2, 4, 4]), r(&[-6, 6, 12]), r(&[10, -4, -16])];
        let s = smith(&m);
        assert_eq!(s.diag, r(&[2, 6, 12]));
        assert_eq!(cokernel_invariants(&[r(&[4, 0]), r(&[0, 6])], 2), r(&[2, 12]));
    }

    #[test]
    fn smith_transform_is_unimodular_on_columns() {
        let m = vec![r(&[4, 6]), r(&[6, 4])];
        let s = smith(&m);
        // rows of m Q stay in the lattice generated by diag(D) after a row change
        let mq: Vec<Row> = m
            .iter()
            .map(|row| {
                (0..2)
                    .map(|j| row.iter().zip(&s.q).map(|(x, qr)| x * &qr[j]).sum())
                    .collect()
            })
            .collect();
        let h = Hermite::from_rows(2, mq);
        let d = Hermite::from_rows(2, [r(&[2, 0]), r(&[0, 10])]);
        assert_eq!(h.basis(), d.basis());
    }

    #[test]
    fn kernel_of_map_mod() {
        // v -> 2 v0 + 3 v1 mod 6
        let k = kernel_mod(&[r(&[2]), r(&[3])], &[BigInt::from(6)]);
        let h = Hermite::from_rows(2, k);
        assert!(h.contains(&r(&[3, 0])));
        assert!(h.contains(&r(&[0, 2])));
        assert!(!h.contains(&r(&[1, 0])));
        assert_eq!(h.pivot_product(), BigInt::from(6));
    }
}
