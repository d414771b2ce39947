//! Dense linear algebra over F_p on row vectors of residues.

use crate::fp;

pub type Row = Vec<u32>;

/// Reduced row-echelon form. Zero rows are dropped, pivots are normalised to
/// one and rows come out ordered by ascending pivot column.
pub fn rref(mut rows: Vec<Row>, p: u32) -> (Vec<Row>, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let li = fp::inv(rows[r][col], p);
        if li != 1 {
            for c in rows[r][col..].iter_mut() {
                *c = fp::mul(*c, li, p);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (c, &pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if pv != 0 {
                    *c = fp::sub(*c, fp::mul(f, pv, p), p);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Row], p: u32) -> usize {
    rref(rows.to_vec(), p).0.len()
}

/// Reduces `v` against an RREF basis; the result is zero iff `v` lies in the span.
pub fn reduce(v: &[u32], basis: &[Row], pivots: &[usize], p: u32) -> Row {
    let mut out = v.to_vec();
    for (row, &pc) in basis.iter().zip(pivots) {
        let f = out[pc];
        if f == 0 {
            continue;
        }
        for (c, &b) in out.iter_mut().zip(row) {
            if b != 0 {
                *c = fp::sub(*c, fp::mul(f, b, p), p);
            }
        }
    }
    out
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&c| c == 0)
}

/// Basis of the right kernel `{x : M x = 0}` where `M` is given by rows of length `ncols`.
pub fn kernel(rows: Vec<Row>, ncols: usize, p: u32) -> Vec<Row> {
    let (red, pivots) = rref(rows, p);
    let mut is_pivot = vec![false; ncols];
    for &pc in &pivots {
        is_pivot[pc] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![0u32; ncols];
        x[free] = 1;
        for (row, &pc) in red.iter().zip(&pivots) {
            x[pc] = fp::neg(row[free], p);
        }
        out.push(x);
    }
    out
}

/// Solves `x · B = target` for a coefficient vector `x` over the given rows,
/// returning `None` when the target is outside their span.
pub fn solve_combination(rows: &[Row], target: &[u32], p: u32) -> Option<Row> {
    let k = rows.len();
    let n = target.len();
    // columns: each original row becomes a column of the augmented system
    let mut aug: Vec<Row> = (0..n)
        .map(|j| {
            let mut r: Row = rows.iter().map(|row| row[j]).collect();
            r.push(target[j]);
            r
        })
        .collect();
    if aug.is_empty() {
        return Some(vec![0; k]);
    }
    let (red, pivots) = rref(std::mem::take(&mut aug), p);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![0u32; k];
    for (row, &pc) in red.iter().zip(&pivots) {
        x[pc] = row[k];
    }
    Some(x)
}

pub fn mat_vec(cols: &[Row], v: &[u32], p: u32) -> Row {
    // `cols[j]` is the image of the j-th basis vector
    let n = cols.first().map_or(0, |c| c.len());
    let mut acc = vec![0u64; n];
    for (c, &vj) in cols.iter().zip(v) {
        if vj == 0 {
            continue;
        }
        for (a, &x) in acc.iter_mut().zip(c) {
            *a += vj as u64 * x as u64;
        }
    }
    acc.into_iter().map(|a| (a % p as u64) as u32).collect()
}

/// Composition of linear maps given by image columns: returns columns of `a ∘ b`.
pub fn compose(a: &[Row], b: &[Row], p: u32) -> Vec<Row> {
    b.iter().map(|col| mat_vec(a, col, p)).collect()
}

pub fn add_rows(a: &[u32], b: &[u32], p: u32) -> Row {
    a.iter().zip(b).map(|(&x, &y)| fp::add(x, y, p)).collect()
}

pub fn scale_row(a: &[u32], c: u32, p: u32) -> Row {
    a.iter().map(|&x| fp::mul(x, c, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_canonical() {
        let rows = vec![vec![0, 1, 1], vec![1, 1, 0], vec![1, 0, 1]];
        let (r, piv) = rref(rows, 2);
        assert_eq!(r, vec![vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(piv, vec![0, 1]);
    }

    #[test]
    fn kernel_is_annihilated() {
        let p = 3;
        let m = vec![vec![1, 2, 0, 1], vec![0, 1, 1, 2]];
        let k = kernel(m.clone(), 4, p);
        assert_eq!(k.len(), 2);
        for x in &k {
            for row in &m {
                let s: u32 = row.iter().zip(x).fold(0, |a, (&r, &v)| fp::add(a, fp::mul(r, v, p), p));
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn combination_found_or_rejected() {
        let rows = vec![vec![1, 0, 1], vec![0, 1, 1]];
        assert_eq!(solve_combination(&rows, &[1, 1, 0], 2), Some(vec![1, 1]));
        assert_eq!(solve_combination(&rows, &[0, 0, 1], 2), None);
    }
}
