//! Integer matrices: Smith normal form with transforms, determinants, and the
//! lattice questions built on them (row-span membership, kernels modulo N).

use crate::arith;

pub type Mat = Vec<Vec<i128>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("matrix shape mismatch")]
    Shape,
    #[error("matrix is not invertible over Z")]
    NotUnimodular,
}

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal, `d_i | d_{i+1}`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Mat,
    pub v: Mat,
    /// Diagonal entries, length `min(rows, cols)`, nonnegative; zeros trail.
    pub diag: Vec<i128>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d != 0).count()
    }
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn from_i64(a: &[Vec<i64>]) -> Mat {
    a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Result<Mat, LinalgError> {
    let inner = b.len();
    if a.iter().any(|r| r.len() != inner) {
        return Err(LinalgError::Shape);
    }
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0i128; cols]; a.len()];
    for (i, row) in a.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for j in 0..cols {
                let t = x.checked_mul(b[k][j]).ok_or(LinalgError::Overflow)?;
                out[i][j] = out[i][j].checked_add(t).ok_or(LinalgError::Overflow)?;
            }
        }
    }
    Ok(out)
}

pub fn mul_vec(a: &Mat, x: &[i128]) -> Result<Vec<i128>, LinalgError> {
    let col: Mat = x.iter().map(|&v| vec![v]).collect();
    Ok(mul(a, &col)?.into_iter().map(|r| r[0]).collect())
}

/// Row vector times matrix.
pub fn vec_mul(x: &[i128], a: &Mat) -> Result<Vec<i128>, LinalgError> {
    Ok(mul(&vec![x.to_vec()], a)?.remove(0))
}

/// Determinant by fraction-free elimination.
pub fn det(a: &Mat) -> Result<i128, LinalgError> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(LinalgError::Shape);
    }
    if n == 0 {
        return Ok(1);
    }
    let mut m = a.clone();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else { return Ok(0) };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a1 = m[i][j].checked_mul(m[k][k]).ok_or(LinalgError::Overflow)?;
                let a2 = m[i][k].checked_mul(m[k][j]).ok_or(LinalgError::Overflow)?;
                m[i][j] = a1.checked_sub(a2).ok_or(LinalgError::Overflow)? / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Inverse of a unimodular matrix via its Smith form.
pub fn inverse_unimodular(a: &Mat) -> Result<Mat, LinalgError> {
    let n = a.len();
    let s = smith(a)?;
    if s.diag.len() != n || s.diag.iter().any(|&d| d != 1) {
        return Err(LinalgError::NotUnimodular);
    }
    // u a v = I  =>  a^{-1} = v u
    mul(&s.v, &s.u)
}

fn row_op(m: &mut Mat, dst: usize, src: usize, k: i128) -> Result<(), LinalgError> {
    if k == 0 {
        return Ok(());
    }
    for j in 0..m[dst].len() {
        let t = m[src][j].checked_mul(k).ok_or(LinalgError::Overflow)?;
        m[dst][j] = m[dst][j].checked_add(t).ok_or(LinalgError::Overflow)?;
    }
    Ok(())
}

fn col_op(m: &mut Mat, dst: usize, src: usize, k: i128) -> Result<(), LinalgError> {
    if k == 0 {
        return Ok(());
    }
    for row in m.iter_mut() {
        let t = row[src].checked_mul(k).ok_or(LinalgError::Overflow)?;
        row[dst] = row[dst].checked_add(t).ok_or(LinalgError::Overflow)?;
    }
    Ok(())
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith(a: &Mat) -> Result<Smith, LinalgError> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != cols) {
        return Err(LinalgError::Shape);
    }
    let mut m = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // pivot: smallest nonzero absolute value in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            m.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut m, t, pj);
            swap_cols(&mut v, t, pj);
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let k = m[i][t] / p;
                row_op(&mut m, i, t, -k)?;
                row_op(&mut u, i, t, -k)?;
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let k = m[t][j] / p;
                col_op(&mut m, j, t, -k)?;
                col_op(&mut v, j, t, -k)?;
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_op(&mut m, t, i, 1)?;
                    row_op(&mut u, t, i, 1)?;
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diag = (0..steps).map(|i| m[i][i]).collect();
    Ok(Smith { u, v, diag })
}

/// Whether `x` lies in `rowspan(a) + r Z^n`; `r = 0` means the row span alone.
pub fn in_row_span_mod(a: &Mat, x: &[i128], r: i128) -> Result<bool, LinalgError> {
    let n = x.len();
    if a.is_empty() {
        return Ok(x.iter().all(|&c| if r == 0 { c == 0 } else { c % r == 0 }));
    }
    if a[0].len() != n {
        return Err(LinalgError::Shape);
    }
    let s = smith(a)?;
    // rowspan(a) = rowspan(d v^{-1}); test x v against d
    let xv = vec_mul(x, &s.v)?;
    Ok(xv.iter().enumerate().all(|(j, &c)| {
        let d = s.diag.get(j).copied().unwrap_or(0);
        let g = arith::gcd_i128(d, r);
        if g == 0 {
            c == 0
        } else {
            c % g == 0
        }
    }))
}

/// Some integer `y` with `y a = x`, if one exists.
pub fn solve_row_combination(a: &Mat, x: &[i128]) -> Result<Option<Vec<i128>>, LinalgError> {
    if a.is_empty() {
        return Ok(x.iter().all(|&c| c == 0).then(Vec::new));
    }
    if a[0].len() != x.len() {
        return Err(LinalgError::Shape);
    }
    let s = smith(a)?;
    let xv = vec_mul(x, &s.v)?;
    let mut z = vec![0i128; a.len()];
    for (j, &c) in xv.iter().enumerate() {
        let d = s.diag.get(j).copied().unwrap_or(0);
        if d == 0 {
            if c != 0 {
                return Ok(None);
            }
        } else if c % d != 0 {
            return Ok(None);
        } else {
            z[j] = c / d;
        }
    }
    Ok(Some(vec_mul(&z, &s.u)?))
}

/// Generators and orders of `{x in (Z/N)^n : a x = 0 mod N}`; the group is the direct
/// sum of the cyclic groups generated by the returned vectors.
pub fn kernel_mod(a: &Mat, n_mod: i128) -> Result<Vec<(Vec<i128>, i128)>, LinalgError> {
    let cols = a.first().map_or(0, |r| r.len());
    let s = smith(a)?;
    let mut out = Vec::new();
    for j in 0..cols {
        let d = s.diag.get(j).copied().unwrap_or(0);
        let g = arith::gcd_i128(d, n_mod);
        let order = if d == 0 { n_mod } else { g };
        if order <= 1 {
            continue;
        }
        let step = n_mod / order;
        let gen: Vec<i128> = (0..cols).map(|i| (s.v[i][j] * step).rem_euclid(n_mod)).collect();
        out.push((gen, order));
    }
    Ok(out)
}

/// Invariant factors (each > 1, ascending, dividing the next) of a direct sum of
/// cyclic groups with the given orders; a `0` order stands for Z and is kept last.
pub fn normalize_cyclic(orders: &[u64]) -> Vec<u64> {
    let free = orders.iter().filter(|&&o| o == 0).count();
    let mut per_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
    for &o in orders.iter().filter(|&&o| o > 1) {
        for (l, e) in arith::factorize(o) {
            per_prime.entry(l).or_default().push(l.pow(e));
        }
    }
    let len = per_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for mut powers in per_prime.into_values() {
        powers.sort_unstable();
        let off = len - powers.len();
        for (i, pw) in powers.into_iter().enumerate() {
            out[off + i] *= pw;
        }
    }
    out.extend(std::iter::repeat(0).take(free));
    out
}

/// Invariant factors of `Z^n / rowspan(rel)`, ones dropped, zeros (free part) last.
pub fn cokernel_invariants(rel: &Mat, n: usize) -> Result<Vec<u64>, LinalgError> {
    if rel.is_empty() {
        return Ok(vec![0; n]);
    }
    let s = smith(rel)?;
    let mut orders: Vec<u64> = (0..n)
        .map(|j| s.diag.get(j).copied().unwrap_or(0) as u64)
        .collect();
    orders.retain(|&o| o != 1);
    Ok(normalize_cyclic(&orders))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i128]]) -> Mat {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn smith_certificate() {
        let a = m(&[&[-4, 2, 2], &[2, -4, 2], &[2, 2, -4]]);
        let s = smith(&a).unwrap();
        assert_eq!(s.diag, vec![2, 6, 0]);
        let d = mul(&mul(&s.u, &a).unwrap(), &s.v).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[i][j], if i == j { s.diag[i] } else { 0 });
            }
        }
        assert_eq!(det(&s.u).unwrap().abs(), 1);
        assert_eq!(det(&s.v).unwrap().abs(), 1);
    }

    #[test]
    fn determinants_and_inverse() {
        assert_eq!(det(&m(&[&[2, 1], &[1, 1]])).unwrap(), 1);
        assert_eq!(det(&m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])).unwrap(), -1);
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse_unimodular(&a).unwrap();
        assert_eq!(mul(&a, &inv).unwrap(), identity(2));
        assert_eq!(inverse_unimodular(&m(&[&[2, 0], &[0, 1]])).unwrap_err(), LinalgError::NotUnimodular);
    }

    #[test]
    fn span_membership_mod_r() {
        let a = m(&[&[-3, 3], &[3, -3]]);
        assert!(in_row_span_mod(&a, &[1, 1], 2).unwrap());
        assert!(!in_row_span_mod(&a, &[1, 0], 2).unwrap());
        assert!(in_row_span_mod(&a, &[0, 0], 5).unwrap());
        assert!(in_row_span_mod(&a, &[6, -6], 0).unwrap());
        assert!(!in_row_span_mod(&a, &[1, -1], 0).unwrap());
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let k = kernel_mod(&m(&[&[0, 0], &[0, 0]]), 4).unwrap();
        let orders: Vec<_> = k.iter().map(|g| g.1).collect();
        assert_eq!(orders, vec![4, 4]);
    }

    #[test]
    fn normalize() {
        assert_eq!(normalize_cyclic(&[2, 3, 4]), vec![2, 12]);
        assert_eq!(normalize_cyclic(&[6, 18]), vec![6, 18]);
        assert_eq!(normalize_cyclic(&[1, 1]), Vec::<u64>::new());
        assert_eq!(cokernel_invariants(&m(&[&[2, 0], &[0, 3]]), 2).unwrap(), vec![6]);
    }
}
