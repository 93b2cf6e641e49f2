use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::Narrative;
use crate::error::{Error, Result};

/// Subjects × boundary-sites binary matrix with cached row totals (`u_i`,
/// boundaries per subject) and column totals (`T_j`, subjects per site).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationMatrix {
    narrative_id: String,
    subjects: Vec<String>,
    sites: usize,
    cells: Vec<bool>,
    row_totals: Vec<u32>,
    col_totals: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct AnnotationRecord {
    narrative_id: String,
    subjects: Vec<String>,
    sites: usize,
    matrix: Vec<Vec<i64>>,
}

impl AnnotationMatrix {
    pub fn new(
        narrative_id: impl Into<String>,
        subjects: Vec<String>,
        rows: &[Vec<u8>],
    ) -> Result<Self> {
        let sites = rows.first().map_or(0, Vec::len);
        let rows: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|&c| i64::from(c)).collect())
            .collect();
        Self::validated(narrative_id.into(), subjects, sites, &rows)
    }

    /// Matrix with generated subject ids `s1..si`, for synthetic data.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let subjects = (1..=rows.len()).map(|k| format!("s{k}")).collect();
        Self::new("synthetic", subjects, rows)
    }

    fn validated(
        narrative_id: String,
        subjects: Vec<String>,
        sites: usize,
        rows: &[Vec<i64>],
    ) -> Result<Self> {
        if subjects.is_empty() {
            return Err(Error::schema("subjects", "no subjects"));
        }
        if sites == 0 {
            return Err(Error::schema("sites", "matrix has no boundary sites"));
        }
        if rows.len() != subjects.len() {
            return Err(Error::schema(
                "matrix",
                format!("{} rows for {} subjects", rows.len(), subjects.len()),
            ));
        }
        let mut seen = HashSet::new();
        for s in &subjects {
            if !seen.insert(s.as_str()) {
                return Err(Error::schema("subjects", format!("duplicate subject id {s:?}")));
            }
        }
        let mut cells = Vec::with_capacity(subjects.len() * sites);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != sites {
                return Err(Error::schema(
                    format!("matrix[{i}] ({})", subjects[i]),
                    format!("column-count mismatch: {} cells, expected {sites}", row.len()),
                ));
            }
            for (j, &c) in row.iter().enumerate() {
                match c {
                    0 => cells.push(false),
                    1 => cells.push(true),
                    other => {
                        return Err(Error::schema(
                            format!("matrix[{i}][{j}]"),
                            format!("cell value {other} is not 0 or 1"),
                        ))
                    }
                }
            }
        }
        let row_totals = cells
            .chunks(sites)
            .map(|r| r.iter().filter(|&&c| c).count() as u32)
            .collect();
        let mut col_totals = vec![0u32; sites];
        for row in cells.chunks(sites) {
            for (t, &c) in col_totals.iter_mut().zip(row) {
                *t += u32::from(c);
            }
        }
        Ok(Self {
            narrative_id,
            subjects,
            sites,
            cells,
            row_totals,
            col_totals,
        })
    }

    /// Loads an annotation file and checks it against its narrative.
    pub fn from_reader(reader: impl Read, narrative: &Narrative) -> Result<Self> {
        let record: AnnotationRecord =
            serde_json::from_reader(reader).map_err(|e| Error::json("annotations", e))?;
        if record.narrative_id != narrative.id() {
            return Err(Error::schema(
                "narrative_id",
                format!(
                    "annotations are for {:?}, narrative is {:?}",
                    record.narrative_id,
                    narrative.id()
                ),
            ));
        }
        if record.sites != narrative.site_count() {
            return Err(Error::schema(
                "sites",
                format!(
                    "declared {} sites, narrative has {}",
                    record.sites,
                    narrative.site_count()
                ),
            ));
        }
        Self::validated(record.narrative_id, record.subjects, record.sites, &record.matrix)
    }

    pub fn from_json(bytes: &[u8], narrative: &Narrative) -> Result<Self> {
        Self::from_reader(bytes, narrative)
    }

    pub fn to_json(&self) -> String {
        let record = AnnotationRecord {
            narrative_id: self.narrative_id.clone(),
            subjects: self.subjects.clone(),
            sites: self.sites,
            matrix: self
                .cells
                .chunks(self.sites)
                .map(|r| r.iter().map(|&c| i64::from(c)).collect())
                .collect(),
        };
        serde_json::to_string(&record).expect("annotations serialize")
    }

    pub fn narrative_id(&self) -> &str {
        &self.narrative_id
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subjects
    }

    pub fn subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn cell(&self, subject: usize, site: usize) -> bool {
        self.cells[subject * self.sites + site]
    }

    pub fn row(&self, subject: usize) -> &[bool] {
        &self.cells[subject * self.sites..(subject + 1) * self.sites]
    }

    pub fn row_totals(&self) -> &[u32] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[u32] {
        &self.col_totals
    }

    /// Σ u_i (= Σ T_j).
    pub fn total_marks(&self) -> u64 {
        self.row_totals.iter().map(|&u| u64::from(u)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals() {
        let m = AnnotationMatrix::from_rows(&[vec![1, 1, 0, 0], vec![1, 0, 0, 0], vec![1, 0, 0, 0]])
            .unwrap();
        assert_eq!(m.row_totals(), &[2, 1, 1]);
        assert_eq!(m.col_totals(), &[3, 1, 0, 0]);
        assert_eq!(m.total_marks(), 4);
    }

    #[test]
    fn all_zero() {
        let m = AnnotationMatrix::from_rows(&vec![vec![0; 5]; 3]).unwrap();
        assert_eq!(m.row_totals(), &[0, 0, 0]);
        assert_eq!(m.col_totals(), &[0; 5]);
    }

    #[test]
    fn rejects_bad_cells_and_shapes() {
        let err = AnnotationMatrix::from_rows(&[vec![0, 2]]).unwrap_err();
        assert!(err.to_string().contains("cell value 2"), "{err}");
        let err = AnnotationMatrix::from_rows(&[vec![0, 1], vec![1]]).unwrap_err();
        assert!(err.to_string().contains("column-count mismatch"), "{err}");
        let err = AnnotationMatrix::new(
            "n",
            vec!["a".into(), "a".into()],
            &[vec![0, 1], vec![1, 0]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate subject"), "{err}");
        assert!(AnnotationMatrix::from_rows(&[]).is_err());
    }
}
