use serde::Serialize;

use super::chisq::chi_square_sf;
use crate::corpus::AnnotationMatrix;
use crate::error::{Error, Result};

/// Degrees of freedom assigned to a partitioned component of `n_t` columns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DfConvention {
    #[default]
    ClassSize,
    ClassSizeMinusOne,
}

impl DfConvention {
    fn df(self, columns: u32) -> u32 {
        match self {
            DfConvention::ClassSize => columns,
            DfConvention::ClassSizeMinusOne => columns - 1,
        }
    }
}

/// Share of Q contributed by the columns with `T_j = strength`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub strength: u32,
    pub site_count: u32,
    /// `n_t · (t − T̄)²`, this class's share of the numerator sum of squares.
    pub sum_squares: f64,
    pub q: f64,
    pub df: u32,
    /// `None` when `df` is 0.
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CochranResult {
    pub q: f64,
    pub df: u32,
    pub p: f64,
    /// `Σ_j (T_j − T̄)²`.
    pub sum_squares: f64,
    /// `j·Σu_i − Σu_i²`.
    pub denominator: u64,
    pub components: Vec<Component>,
}

struct Moments {
    j: u64,
    col_sum: u64,
    col_sq_sum: u64,
    denominator: u64,
}

fn moments(m: &AnnotationMatrix) -> Result<Moments> {
    let j = m.sites() as u64;
    let row_sum: u64 = m.row_totals().iter().map(|&u| u64::from(u)).sum();
    let row_sq_sum: u64 = m.row_totals().iter().map(|&u| u64::from(u).pow(2)).sum();
    let denominator = j * row_sum - row_sq_sum;
    if denominator == 0 {
        return Err(Error::Degenerate(
            "no boundary variance (every subject marked all sites or none)".into(),
        ));
    }
    let col_sq_sum = m.col_totals().iter().map(|&t| u64::from(t).pow(2)).sum();
    Ok(Moments {
        j,
        col_sum: row_sum,
        col_sq_sum,
        denominator,
    })
}

/// Cochran's Q over the columns (sites) of the matrix, with `df = j − 1`
/// and components under [`DfConvention::ClassSize`].
pub fn cochran_q(m: &AnnotationMatrix) -> Result<CochranResult> {
    cochran_q_with(m, DfConvention::default())
}

pub fn cochran_q_with(m: &AnnotationMatrix, convention: DfConvention) -> Result<CochranResult> {
    let mo = moments(m)?;
    if mo.j < 2 {
        return Err(Error::Degenerate("Q needs at least two sites".into()));
    }
    // j·Σ(T_j − T̄)² = jΣT² − (ΣT)², an integer.
    let scaled_ss = mo.j * mo.col_sq_sum - mo.col_sum * mo.col_sum;
    let q = ((mo.j - 1) * scaled_ss) as f64 / mo.denominator as f64;
    let df = (mo.j - 1) as u32;
    Ok(CochranResult {
        q,
        df,
        p: chi_square_sf(q, df)?,
        sum_squares: scaled_ss as f64 / mo.j as f64,
        denominator: mo.denominator,
        components: components(m, &mo, convention)?,
    })
}

/// Per-strength components of Q. Every component shares the full-matrix
/// mean column total and denominator, so the `q` values sum to Q.
pub fn partition_q(m: &AnnotationMatrix, convention: DfConvention) -> Result<Vec<Component>> {
    let mo = moments(m)?;
    components(m, &mo, convention)
}

fn components(m: &AnnotationMatrix, mo: &Moments, convention: DfConvention) -> Result<Vec<Component>> {
    let mut counts = vec![0u32; m.subjects() + 1];
    for &t in m.col_totals() {
        counts[t as usize] += 1;
    }
    let j = mo.j as f64;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(t, &n)| {
            // n_t (t − T̄)² = n_t (j·t − ΣT)² / j²
            let dev = (mo.j * t as u64).abs_diff(mo.col_sum);
            let scaled = u64::from(n) * dev * dev;
            let q = (mo.j - 1) as f64 * scaled as f64 / (j * mo.denominator as f64);
            let df = convention.df(n);
            let p = if df == 0 { None } else { Some(chi_square_sf(q, df)?) };
            Ok(Component {
                strength: t as u32,
                site_count: n,
                sum_squares: scaled as f64 / (j * j),
                q,
                df,
                p,
            })
        })
        .collect()
}
