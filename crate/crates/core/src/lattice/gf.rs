//! Prime-field linear algebra used by the projective and affine builders.
//!
//! Vectors over `F_q` are stored as `Vec<u32>` with entries in `0..q`.

pub(crate) fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub(crate) fn new(q: u32) -> Self {
        debug_assert!(is_prime(q as u64));
        PrimeField { q }
    }

    pub(crate) fn order(&self) -> u32 {
        self.q
    }

    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.q
    }

    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.q - b) % self.q
    }

    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub(crate) fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "zero has no inverse");
        // a^(q-2) by Fermat
        let mut base = a as u64;
        let mut exp = self.q - 2;
        let mut acc = 1u64;
        let m = self.q as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc as u32
    }

    /// Reduced row-echelon form; zero rows are dropped.
    pub(crate) fn rref(&self, mut rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
        let width = rows.first().map_or(0, |r| r.len());
        let mut pivot_row = 0;
        for col in 0..width {
            let Some(found) = (pivot_row..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(pivot_row, found);
            let inv = self.inv(rows[pivot_row][col]);
            for v in rows[pivot_row].iter_mut() {
                *v = self.mul(*v, inv);
            }
            let pivot = rows[pivot_row].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != pivot_row && row[col] != 0 {
                    let factor = row[col];
                    for (v, p) in row.iter_mut().zip(&pivot) {
                        *v = self.sub(*v, self.mul(factor, *p));
                    }
                }
            }
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
        rows.truncate(pivot_row);
        rows
    }

    /// Scales a nonzero vector so its first nonzero coordinate is 1.
    pub(crate) fn normalize(&self, v: &mut [u32]) -> bool {
        let Some(lead) = v.iter().copied().find(|&x| x != 0) else {
            return false;
        };
        let inv = self.inv(lead);
        for x in v.iter_mut() {
            *x = self.mul(*x, inv);
        }
        true
    }

    /// Calls `f` on every vector of the span of `basis` (including zero).
    pub(crate) fn for_each_in_span(&self, basis: &[Vec<u32>], width: usize, mut f: impl FnMut(&[u32])) {
        let k = basis.len();
        let mut coeffs = vec![0u32; k];
        let mut v = vec![0u32; width];
        loop {
            v.iter_mut().for_each(|x| *x = 0);
            for (c, b) in coeffs.iter().zip(basis) {
                if *c != 0 {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = self.add(*x, self.mul(*c, *y));
                    }
                }
            }
            f(&v);
            // odometer increment
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                coeffs[i] += 1;
                if coeffs[i] < self.q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    /// Index of a vector read as a base-q number, most significant coordinate first.
    pub(crate) fn vector_index(&self, v: &[u32]) -> usize {
        v.iter().fold(0usize, |acc, &x| acc * self.q as usize + x as usize)
    }

    pub(crate) fn vector_from_index(&self, mut index: usize, width: usize) -> Vec<u32> {
        let mut v = vec![0u32; width];
        for slot in v.iter_mut().rev() {
            *slot = (index % self.q as usize) as u32;
            index /= self.q as usize;
        }
        v
    }
}

/// Number of `k`-dimensional subspaces of `F_q^r`, or `None` on overflow.
pub(crate) fn gaussian_binomial(r: u32, k: u32, q: u64) -> Option<u128> {
    if k > r {
        return Some(0);
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.checked_mul(q.checked_pow(r - i)?.checked_sub(1)?)?;
        den = den.checked_mul(q.checked_pow(i + 1)?.checked_sub(1)?)?;
    }
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let primes: Vec<u64> = (0..30).filter(|&q| is_prime(q)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn inverses_mod_7() {
        let f = PrimeField::new(7);
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn rref_drops_dependent_rows() {
        let f = PrimeField::new(3);
        let rows = vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 2]];
        assert_eq!(f.rref(rows), vec![vec![1, 2, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn gaussian_binomials_small() {
        assert_eq!(gaussian_binomial(3, 1, 2), Some(7));
        assert_eq!(gaussian_binomial(4, 2, 2), Some(35));
        assert_eq!(gaussian_binomial(4, 2, 3), Some(130));
        assert_eq!(gaussian_binomial(2, 3, 3), Some(0));
    }

    #[test]
    fn span_enumeration_counts() {
        let f = PrimeField::new(3);
        let mut count = 0;
        f.for_each_in_span(&[vec![1, 0, 2], vec![0, 1, 1]], 3, |_| count += 1);
        assert_eq!(count, 9);
    }
}
