//! Dense linear algebra over the binary field.
//!
//! Vectors and matrix rows are packed 64 bits to a word, bit `i` of a vector
//! living in word `i / 64` at position `i % 64`. Unused high bits of the last
//! word are always zero, so equality and hashing work on the raw words.
//!
//! Levels of a channel signal are indexed from the top: index 0 is the most
//! significant level, which is the convention [`shift_channel_matrix`] uses.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Gf2Vector { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Gf2Vector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1 == 1);
        }
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Gf2Vector::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Gf2Vector::zeros(len);
        v.set(index, true);
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Gf2Vector { len, words: (0..words_for(len)).map(|_| rng.gen()).collect() };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// In-place `self += other`. Panics on length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &Gf2Vector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn add(&self, other: &Gf2Vector) -> Result<Gf2Vector> {
        if self.len != other.len {
            return Err(Error::dim("vector add", self.len, other.len));
        }
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    pub fn dot(&self, other: &Gf2Vector) -> bool {
        assert_eq!(self.len, other.len);
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    /// Bits `range.start..range.end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> Gf2Vector {
        assert!(start <= end && end <= self.len);
        let mut out = Gf2Vector::zeros(end - start);
        for i in self.ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    pub fn concat(parts: &[&Gf2Vector]) -> Gf2Vector {
        let len = parts.iter().map(|p| p.len).sum();
        let mut out = Gf2Vector::zeros(len);
        let mut offset = 0;
        for p in parts {
            for i in p.ones() {
                out.set(offset + i, true);
            }
            offset += p.len;
        }
        out
    }

    /// Packs bits MSB-first into bytes and renders them as lowercase hex.
    /// The bit length is not encoded.
    pub fn to_hex(&self) -> String {
        let mut bytes = vec![0u8; self.len.div_ceil(8)];
        for i in self.ones() {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
        hex::encode(bytes)
    }

    pub fn from_hex(len: usize, s: &str) -> Result<Gf2Vector> {
        let bytes = hex::decode(s).map_err(|_| Error::Parse { what: "hex bit vector", input: s.to_string() })?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::dim("from_hex", len, bytes.len() * 8));
        }
        let mut v = Gf2Vector::zeros(len);
        for i in 0..len {
            if bytes[i / 8] & (0x80 >> (i % 8)) != 0 {
                v.set(i, true);
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, "]")
    }
}

/// Row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Gf2Vector>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix { cols, rows: vec![Gf2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Gf2Vector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dim("from_rows", cols, bad.len()));
        }
        Ok(Gf2Matrix { cols, rows })
    }

    /// Builds a matrix from a row-major slice of 0/1 entries.
    pub fn from_bits(rows: usize, cols: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::dim("from_bits", rows * cols, bits.len()));
        }
        Ok(Gf2Matrix { cols, rows: bits.chunks(cols.max(1)).take(rows).map(Gf2Vector::from_bits).collect() })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Gf2Matrix { cols, rows: (0..rows).map(|_| Gf2Vector::random(cols, rng)).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &Gf2Vector {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut Gf2Vector {
        &mut self.rows[i]
    }

    pub fn rows(&self) -> &[Gf2Vector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.rows[r].set(c, bit)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Gf2Vector::is_zero)
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn add(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.nrows() != other.nrows() || self.cols != other.cols {
            return Err(Error::dim("matrix add", self.shape(), other.shape()));
        }
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != other.nrows() {
            return Err(Error::dim("matmul", self.shape(), other.shape()));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = Gf2Vector::zeros(other.cols);
                for k in row.ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(Gf2Matrix { cols: other.cols, rows })
    }

    pub fn mul_vec(&self, v: &Gf2Vector) -> Result<Gf2Vector> {
        if self.cols != v.len() {
            return Err(Error::dim("matvec", self.shape(), v.len()));
        }
        Ok(Gf2Vector::from_bools(self.rows.iter().map(|r| r.dot(v))))
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.nrows() != other.nrows() {
            return Err(Error::dim("hstack", self.shape(), other.shape()));
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| Gf2Vector::concat(&[a, b])).collect();
        Ok(Gf2Matrix { cols: self.cols + other.cols, rows })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != other.cols {
            return Err(Error::dim("vstack", self.shape(), other.shape()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Gf2Matrix { cols: self.cols, rows })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Gf2Matrix {
        Gf2Matrix { cols: self.cols, rows: idx.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Gf2Matrix {
        let rows = self.rows.iter().map(|r| Gf2Vector::from_bools(idx.iter().map(|&c| r.get(c)))).collect();
        Gf2Matrix { cols: idx.len(), rows }
    }

    /// Columns `start..end`.
    pub fn col_range(&self, start: usize, end: usize) -> Gf2Matrix {
        Gf2Matrix { cols: end - start, rows: self.rows.iter().map(|r| r.slice(start, end)).collect() }
    }

    pub fn push_row(&mut self, row: Gf2Vector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::dim("push_row", self.cols, row.len()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn shape(&self) -> String {
        format!("{}x{}", self.nrows(), self.cols)
    }

    /// Row rank by packed Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Gf2Vector> = self.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for r in tail.iter_mut() {
                if r.get(col) {
                    r.xor_assign(pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Exact affine solution set of `self · x = b`.
    pub fn solve_all(&self, b: &Gf2Vector) -> Result<Solution> {
        if b.len() != self.nrows() {
            return Err(Error::dim("solve_all", self.shape(), b.len()));
        }
        let n = self.cols;
        let mut rows = self.rows.clone();
        let mut rhs: Vec<bool> = b.iter().collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for col in 0..n {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            rhs.swap(r, p);
            let pivot = rows[r].clone();
            let pivot_rhs = rhs[r];
            for i in 0..rows.len() {
                if i != r && rows[i].get(col) {
                    rows[i].xor_assign(&pivot);
                    rhs[i] ^= pivot_rhs;
                }
            }
            pivots.push(col);
            r += 1;
        }
        if rhs[r..].iter().any(|&bit| bit) {
            return Ok(Solution::Inconsistent);
        }
        let mut particular = Gf2Vector::zeros(n);
        for (i, &col) in pivots.iter().enumerate() {
            particular.set(col, rhs[i]);
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let kernel = (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = Gf2Vector::unit(n, f);
                for (i, &col) in pivots.iter().enumerate() {
                    if rows[i].get(f) {
                        v.set(col, true);
                    }
                }
                v
            })
            .collect();
        Ok(Solution::Affine(AffineSpace { particular, kernel }))
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}", self.shape())?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Inconsistent,
    Affine(AffineSpace),
}

impl Solution {
    pub fn affine(&self) -> Option<&AffineSpace> {
        match self {
            Solution::Affine(a) => Some(a),
            Solution::Inconsistent => None,
        }
    }
}

/// `particular + span(kernel)`; the kernel vectors are linearly independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub particular: Gf2Vector,
    pub kernel: Vec<Gf2Vector>,
}

impl AffineSpace {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn contains(&self, x: &Gf2Vector) -> bool {
        let Ok(diff) = x.add(&self.particular) else {
            return false;
        };
        if diff.is_zero() {
            return true;
        }
        let n = diff.len();
        let basis = Gf2Matrix { cols: n, rows: self.kernel.clone() };
        let mut with = basis.clone();
        with.rows.push(diff);
        with.rank() == basis.rank()
    }

    /// Whether every point of the space agrees on the coordinates in `coords`.
    pub fn is_unique_on(&self, coords: &[usize]) -> bool {
        self.kernel.iter().all(|k| coords.iter().all(|&c| !k.get(c)))
    }

    /// Whether every point of the space has the same image under `map`
    /// applied to the coordinates `offset..offset + map.ncols()`.
    pub fn is_unique_under(&self, map: &Gf2Matrix, offset: usize) -> bool {
        self.kernel.iter().all(|k| map.mul_vec(&k.slice(offset, offset + map.ncols())).is_ok_and(|v| v.is_zero()))
    }
}

/// Slow reference rank on unpacked bytes, kept for differential testing of
/// the packed elimination in [`Gf2Matrix::rank`].
pub fn rank_naive(m: &Gf2Matrix) -> usize {
    let mut a: Vec<Vec<u8>> = m.rows.iter().map(|r| r.iter().map(u8::from).collect()).collect();
    let cols = m.cols;
    let mut rank = 0;
    for c in 0..cols {
        let mut pivot = None;
        for (r, row) in a.iter().enumerate().skip(rank) {
            if row[c] == 1 {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && row[c] == 1 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The q×q down-shift matrix: `(S x)[0] = 0`, `(S x)[k] = x[k-1]`.
pub fn shift_matrix(q: usize) -> Gf2Matrix {
    let mut s = Gf2Matrix::zeros(q, q);
    for k in 1..q {
        s.set(k, k - 1, true);
    }
    s
}

/// `S^(q-n)`: keeps the top `n` levels of the input, landing them on the
/// bottom `n` output levels.
pub fn shift_channel_matrix(q: usize, n: usize) -> Result<Gf2Matrix> {
    if n > q {
        return Err(Error::param(format!("channel exponent {n} exceeds q = {q}")));
    }
    let shift = q - n;
    let mut m = Gf2Matrix::zeros(q, q);
    for k in shift..q {
        m.set(k, k - shift, true);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat_pow(m: &Gf2Matrix, e: usize) -> Gf2Matrix {
        let mut acc = Gf2Matrix::identity(m.nrows());
        for _ in 0..e {
            acc = acc.mul(m).unwrap();
        }
        acc
    }

    #[test]
    fn shift_channel_edge_cases() {
        assert_eq!(shift_channel_matrix(3, 3).unwrap(), Gf2Matrix::identity(3));
        assert!(shift_channel_matrix(3, 0).unwrap().is_zero());
        assert_eq!(shift_channel_matrix(4, 2).unwrap().rank(), 2);
        assert!(matches!(shift_channel_matrix(2, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn shift_channel_matches_power_of_shift() {
        for q in 0..=8 {
            let s = shift_matrix(q);
            for n in 0..=q {
                let h = shift_channel_matrix(q, n).unwrap();
                assert_eq!(h, mat_pow(&s, q - n), "q={q} n={n}");
                assert_eq!(h.rank(), n);
            }
        }
    }

    #[test]
    fn shift_keeps_top_levels_at_bottom() {
        // x = (1,0,1,1) top first; S^(4-2) keeps (1,0) and puts it on levels 2,3.
        let h = shift_channel_matrix(4, 2).unwrap();
        let x = Gf2Vector::from_bits(&[1, 0, 1, 1]);
        assert_eq!(h.mul_vec(&x).unwrap(), Gf2Vector::from_bits(&[0, 0, 1, 0]));
    }

    #[test]
    fn composed_shifts_associate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = 5;
        for n1 in 0..=q {
            for n2 in 0..=q {
                let v = Gf2Vector::random(q, &mut rng);
                let a = shift_channel_matrix(q, n1).unwrap();
                let b = shift_channel_matrix(q, n2).unwrap();
                let lhs = a.mul_vec(&b.mul_vec(&v).unwrap()).unwrap();
                let rhs = mat_pow(&shift_matrix(q), 2 * q - n1 - n2).mul_vec(&v).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn rank_basics() {
        assert_eq!(Gf2Matrix::identity(5).rank(), 5);
        assert_eq!(Gf2Matrix::zeros(3, 4).rank(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = Gf2Matrix::random(4, 7, &mut rng);
        assert_eq!(m.vstack(&m).unwrap().rank(), m.rank());
    }

    #[test]
    fn add_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = Gf2Matrix::random(6, 9, &mut rng);
        assert!(m.add(&m).unwrap().is_zero());
        let v = Gf2Vector::random(9, &mut rng);
        assert_eq!(Gf2Matrix::identity(9).mul_vec(&v).unwrap(), v);
        assert!(m.add(&Gf2Matrix::zeros(6, 8)).is_err());
        assert!(m.mul(&Gf2Matrix::zeros(8, 2)).is_err());
        assert!(m.mul_vec(&Gf2Vector::zeros(3)).is_err());
    }

    #[test]
    fn rank_agrees_with_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let r = rng.gen_range(0..13);
            let c = rng.gen_range(0..13);
            let m = Gf2Matrix::random(r, c, &mut rng);
            let rank = m.rank();
            assert_eq!(rank, rank_naive(&m));
            assert!(rank <= r.min(c));
        }
        // Packed path across word boundaries.
        for _ in 0..20 {
            let m = Gf2Matrix::random(90, 130, &mut rng);
            assert_eq!(m.rank(), rank_naive(&m));
        }
    }

    #[test]
    fn rank_nullity_and_stacking_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let c = rng.gen_range(1..=12);
            let a = Gf2Matrix::random(rng.gen_range(0..=12), c, &mut rng);
            let b = Gf2Matrix::random(rng.gen_range(0..=12), c, &mut rng);
            let sol = a.solve_all(&Gf2Vector::zeros(a.nrows())).unwrap();
            assert_eq!(a.rank() + sol.affine().unwrap().dimension(), c);
            let stacked = a.vstack(&b).unwrap().rank();
            assert!(stacked >= a.rank().max(b.rank()));
            assert!(stacked <= a.rank() + b.rank());
        }
    }

    #[test]
    fn solve_identity_and_zero() {
        let v = Gf2Vector::from_bits(&[1, 0, 1]);
        let sol = Gf2Matrix::identity(3).solve_all(&v).unwrap();
        let aff = sol.affine().unwrap();
        assert_eq!(aff.particular, v);
        assert!(aff.kernel.is_empty());

        let sol = Gf2Matrix::zeros(2, 3).solve_all(&Gf2Vector::zeros(2)).unwrap();
        assert_eq!(sol.affine().unwrap().dimension(), 3);

        let sol = Gf2Matrix::zeros(2, 3).solve_all(&Gf2Vector::from_bits(&[0, 1])).unwrap();
        assert_eq!(sol, Solution::Inconsistent);

        assert!(Gf2Matrix::zeros(2, 3).solve_all(&Gf2Vector::zeros(3)).is_err());
    }

    #[test]
    fn solve_full_row_rank_system_contains_planted_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 50 {
            let a = Gf2Matrix::random(4, 6, &mut rng);
            if a.rank() != 4 {
                continue;
            }
            let x0 = Gf2Vector::random(6, &mut rng);
            let b = a.mul_vec(&x0).unwrap();
            let aff = a.solve_all(&b).unwrap().affine().unwrap().clone();
            assert_eq!(aff.dimension(), 2);
            assert!(aff.contains(&x0));
            for k in &aff.kernel {
                assert!(a.mul_vec(k).unwrap().is_zero());
            }
            assert_eq!(a.mul_vec(&aff.particular).unwrap(), b);
            checked += 1;
        }
    }

    #[test]
    fn uniqueness_on_coordinates() {
        // x0 + x1 = 1, x2 free
        let a = Gf2Matrix::from_bits(1, 3, &[1, 1, 0]).unwrap();
        let aff = a.solve_all(&Gf2Vector::from_bits(&[1])).unwrap().affine().unwrap().clone();
        assert!(!aff.is_unique_on(&[0]));
        assert!(!aff.is_unique_on(&[2]));
        let a = Gf2Matrix::from_bits(2, 3, &[1, 0, 0, 0, 1, 1]).unwrap();
        let aff = a.solve_all(&Gf2Vector::from_bits(&[1, 0])).unwrap().affine().unwrap().clone();
        assert!(aff.is_unique_on(&[0]));
        assert!(!aff.is_unique_on(&[1]));
    }

    #[test]
    fn hex_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in [0, 1, 7, 8, 9, 64, 65, 130] {
            let v = Gf2Vector::random(len, &mut rng);
            assert_eq!(Gf2Vector::from_hex(len, &v.to_hex()).unwrap(), v);
        }
    }

    #[test]
    fn slicing_and_stacking() {
        let v = Gf2Vector::from_bits(&[1, 1, 0, 1, 0]);
        assert_eq!(v.slice(1, 4), Gf2Vector::from_bits(&[1, 0, 1]));
        let w = Gf2Vector::concat(&[&v.slice(0, 2), &v.slice(2, 5)]);
        assert_eq!(w, v);
        let m = Gf2Matrix::from_bits(2, 3, &[1, 0, 1, 0, 1, 1]).unwrap();
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.hstack(&m).unwrap().col_range(3, 6), m);
        assert_eq!(m.select_cols(&[2, 0]), Gf2Matrix::from_bits(2, 2, &[1, 1, 1, 0]).unwrap());
    }
}
