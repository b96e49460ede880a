use std::fmt;

use super::gauss::GaussRational;
use super::poly::{MultiPoly, Vars};
use crate::error::{Error, Result};

/// Dense row-major matrix of polynomials over one variable list.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    nrows: usize,
    ncols: usize,
    vars: Vars,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zeros(vars: &Vars, nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            vars: vars.clone(),
            entries: vec![MultiPoly::zero(vars); nrows * ncols],
        }
    }

    pub fn identity(vars: &Vars, n: usize) -> Self {
        let mut m = Self::zeros(vars, n, n);
        for k in 0..n {
            m.set(k, k, MultiPoly::one(vars));
        }
        m
    }

    pub fn from_rows(vars: &Vars, rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::DimensionMismatch("matrix must be non-empty".into()));
        }
        let mut entries = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for p in row {
                if p.vars() != vars {
                    return Err(Error::VariableMismatch {
                        left: vars.names().join(", "),
                        right: p.vars().names().join(", "),
                    });
                }
                entries.push(p);
            }
        }
        Ok(Self {
            nrows,
            ncols,
            vars: vars.clone(),
            entries,
        })
    }

    /// Constant matrix from exact scalars.
    pub fn from_constants(vars: &Vars, rows: &[Vec<GaussRational>]) -> Result<Self> {
        Self::from_rows(
            vars,
            rows.iter()
                .map(|r| r.iter().map(|c| MultiPoly::constant(vars, c.clone())).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: MultiPoly) {
        assert_eq!(p.vars(), &self.vars, "entry variable list");
        self.entries[r * self.ncols + c] = p;
    }

    pub fn entries(&self) -> &[MultiPoly] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[MultiPoly]> {
        self.entries.chunks(self.ncols)
    }

    pub fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Self {
        let entries: Vec<MultiPoly> = self.entries.iter().map(f).collect();
        let vars = entries.first().map_or(self.vars.clone(), |p| p.vars().clone());
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            vars,
            entries,
        }
    }

    pub fn try_map(&self, f: impl Fn(&MultiPoly) -> Result<MultiPoly>) -> Result<Self> {
        let entries: Vec<MultiPoly> = self.entries.iter().map(f).collect::<Result<_>>()?;
        let vars = entries.first().map_or(self.vars.clone(), |p| p.vars().clone());
        Ok(Self {
            nrows: self.nrows,
            ncols: self.ncols,
            vars,
            entries,
        })
    }

    pub fn embed(&self, target: &Vars) -> Result<Self> {
        self.try_map(|p| p.embed(target))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale_poly(&MultiPoly::from_int(&other.vars, -1)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        if self.vars != other.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.names().join(", "),
                right: other.vars.names().join(", "),
            });
        }
        let mut out = Self::zeros(&self.vars, self.nrows, other.ncols);
        for r in 0..self.nrows {
            for c in 0..other.ncols {
                let mut acc = MultiPoly::zero(&self.vars);
                for k in 0..self.ncols {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn scale_poly(&self, s: &MultiPoly) -> Self {
        self.map(|p| p * s)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.vars, self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Formal conjugate (coefficients conjugated, variables real).
    pub fn conj(&self) -> Self {
        self.map(MultiPoly::conj)
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// Kronecker product; row-major convention `(A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l]`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.names().join(", "),
                right: other.vars.names().join(", "),
            });
        }
        let (r1, c1, r2, c2) = (self.nrows, self.ncols, other.nrows, other.ncols);
        let mut out = Self::zeros(&self.vars, r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in 0..c1 {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        out.set(i * r2 + k, j * c2 + l, a * other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn derivative(&self, var: &str) -> Result<Self> {
        self.try_map(|p| p.derivative(var))
    }

    pub fn substitute_values(
        &self,
        values: &std::collections::BTreeMap<String, GaussRational>,
    ) -> Result<Self> {
        self.try_map(|p| p.substitute_values(values))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_zero)
    }

    /// All entries as exact constants, row-major; `None` if any entry still
    /// involves a variable.
    pub fn to_constants(&self) -> Option<Vec<GaussRational>> {
        self.entries.iter().map(MultiPoly::as_constant).collect()
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    ///
    /// Every intermediate entry is a minor of the input, so the divisions by
    /// the previous pivot are exact polynomial divisions.
    pub fn det_bareiss(&self) -> Result<MultiPoly> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.nrows,
                cols: self.ncols,
            });
        }
        let n = self.nrows;
        let mut a: Vec<Vec<MultiPoly>> = self.rows().map(<[MultiPoly]>::to_vec).collect();
        let mut prev = MultiPoly::one(&self.vars);
        let mut negate = false;
        for k in 0..n {
            if a[k][k].is_zero() {
                // Smallest nonzero pivot candidate keeps intermediates small.
                let swap = (k + 1..n)
                    .filter(|&r| !a[r][k].is_zero())
                    .min_by_key(|&r| a[r][k].nterms());
                match swap {
                    Some(r) => {
                        a.swap(k, r);
                        negate = !negate;
                    }
                    // An all-zero column below the diagonal means a singular matrix.
                    None => return Ok(MultiPoly::zero(&self.vars)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = if k == 0 { num } else { num.exact_div(&prev)? };
                }
                a[i][k] = MultiPoly::zero(&self.vars);
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if negate { -&det } else { det })
    }

    /// Determinant by Laplace expansion along rows, memoizing minors on
    /// column subsets. Division-free; preferred for sparse structured
    /// matrices such as Sylvester matrices.
    pub fn det_minor_expansion(&self) -> Result<MultiPoly> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.nrows,
                cols: self.ncols,
            });
        }
        let n = self.nrows;
        if n > 20 {
            return Err(Error::InvalidArgument(format!(
                "minor expansion limited to 20x20, got {n}x{n}"
            )));
        }
        // minors[mask] = det of the bottom |mask| rows restricted to columns in mask.
        let mut minors: std::collections::HashMap<u32, MultiPoly> = std::collections::HashMap::new();
        minors.insert(0, MultiPoly::one(&self.vars));
        let mut layer: Vec<u32> = vec![0];
        for size in 1..=n {
            let row = n - size;
            let mut next: Vec<u32> = Vec::new();
            let mut next_minors = std::collections::HashMap::new();
            for &mask in &layer {
                for col in 0..n {
                    if mask & (1 << col) == 0 && !next_minors.contains_key(&(mask | 1 << col)) {
                        next.push(mask | 1 << col);
                        next_minors.insert(mask | 1 << col, MultiPoly::zero(&self.vars));
                    }
                }
            }
            for &mask in &next {
                let mut acc = MultiPoly::zero(&self.vars);
                let mut sign_pos = true;
                for col in 0..n {
                    if mask & (1 << col) == 0 {
                        continue;
                    }
                    let entry = self.get(row, col);
                    let sub = &minors[&(mask & !(1 << col))];
                    if !entry.is_zero() && !sub.is_zero() {
                        let t = entry * sub;
                        acc = if sign_pos { &acc + &t } else { &acc - &t };
                    }
                    sign_pos = !sign_pos;
                }
                next_minors.insert(mask, acc);
            }
            minors = next_minors;
            layer = next;
        }
        Ok(minors.remove(&((1u32 << n) - 1)).expect("full minor"))
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} over {:?}", self.nrows, self.ncols, self.vars)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Rank of a constant matrix over the Gaussian rationals.
pub fn rank(rows: usize, cols: usize, entries: &[GaussRational]) -> usize {
    let mut a: Vec<Vec<GaussRational>> = entries.chunks(cols).map(<[GaussRational]>::to_vec).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][c].inv().expect("nonzero pivot");
        for r in rank + 1..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for j in c..cols {
                let t = &f * &a[rank][j];
                a[r][j] -= &t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
