//! Permanent and determinant of small dense complex matrices (row-major).

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Permanent by Ryser's inclusion-exclusion formula, visiting column
/// subsets in Gray-code order: `O(2^n n)`.
///
/// # Panics
/// If `a.len() != n * n` or `n >= 64`.
pub fn ryser_permanent(a: &[Complex64], n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    assert!(n < 64, "permanent order too large");
    if n == 0 {
        return ONE;
    }
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        let bit = 1u64 << col;
        gray ^= bit;
        if gray & bit != 0 {
            for (s, row) in row_sums.iter_mut().zip(a.chunks_exact(n)) {
                *s += row[col];
            }
        } else {
            for (s, row) in row_sums.iter_mut().zip(a.chunks_exact(n)) {
                *s -= row[col];
            }
        }
        let prod = row_sums.iter().fold(ONE, |p, s| p * s);
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Permanent of the `n x n` matrix whose columns are the `d` distinct
/// columns of `cols` (row-major `n x d`), column `c` repeated `mult[c]`
/// times, with `sum mult = n`.
///
/// Ryser's sum only depends on how many copies of each distinct column a
/// subset holds, so it runs over `prod (mult[c] + 1)` count vectors
/// weighted by binomials, visited in reflected mixed-radix Gray order.
/// With all multiplicities 1 this is plain Ryser.
///
/// # Panics
/// If the shapes disagree.
pub fn ryser_permanent_grouped(cols: &[Complex64], n: usize, mult: &[usize]) -> Complex64 {
    let d = mult.len();
    assert_eq!(cols.len(), n * d, "column block must be n x d");
    assert_eq!(mult.iter().sum::<usize>(), n, "multiplicities must sum to n");
    if n == 0 {
        return ONE;
    }
    let mut counts = vec![0usize; d];
    let mut dir = vec![true; d];
    let mut row_sums = vec![ZERO; n];
    let mut weight = 1.0f64;
    let mut odd = false;
    let mut total = ZERO;
    loop {
        let mut c = 0;
        while c < d {
            let can_move = if dir[c] { counts[c] < mult[c] } else { counts[c] > 0 };
            if can_move {
                break;
            }
            dir[c] = !dir[c];
            c += 1;
        }
        if c == d {
            break;
        }
        let (old, nu) = (counts[c] as f64, mult[c] as f64);
        if dir[c] {
            // C(nu, s+1) = C(nu, s) (nu - s) / (s + 1)
            weight = weight * (nu - old) / (old + 1.0);
            counts[c] += 1;
            for (s, row) in row_sums.iter_mut().zip(cols.chunks_exact(d)) {
                *s += row[c];
            }
        } else {
            weight = weight * old / (nu - old + 1.0);
            counts[c] -= 1;
            for (s, row) in row_sums.iter_mut().zip(cols.chunks_exact(d)) {
                *s -= row[c];
            }
        }
        odd = !odd;
        let prod = row_sums.iter().fold(ONE, |p, s| p * s) * weight;
        if odd {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Determinant by LU factorisation with partial pivoting.
///
/// # Panics
/// If `a.len() != n * n`.
pub fn determinant(a: &[Complex64], n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut lu = a.to_vec();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| lu[x * n + col].norm().total_cmp(&lu[y * n + col].norm()))
            .unwrap();
        let p = lu[pivot * n + col];
        if p == ZERO {
            return ZERO;
        }
        if pivot != col {
            for c in 0..n {
                lu.swap(col * n + c, pivot * n + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let factor = lu[r * n + col] / p;
            if factor == ZERO {
                continue;
            }
            for c in col + 1..n {
                let v = lu[col * n + c];
                lu[r * n + c] -= factor * v;
            }
        }
    }
    det
}
