use serde::Serialize;
use steklov_core::oracle::{annulus_table, disk_table};

use crate::error::LabResult;
use crate::output::Artifacts;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleDomain {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub mode: u32,
    pub multiplicity: u32,
}

/// Closed-form spectrum table, `oracle.csv`.
pub fn cmd_oracle(domain: OracleDomain, count: usize) -> LabResult<Artifacts> {
    let table = match domain {
        OracleDomain::Disk { radius } => disk_table(radius, count)?,
        OracleDomain::Annulus { inner, outer } => annulus_table(inner, outer, count)?,
    };
    let rows: Vec<OracleRow> = table
        .iter()
        .enumerate()
        .map(|(index, e)| OracleRow { index, eigenvalue: e.value, mode: e.mode, multiplicity: e.multiplicity })
        .collect();
    let mut out = Artifacts { summary: format!("{} closed-form eigenvalues", rows.len()), ..Default::default() };
    out.csv("oracle.csv", &rows)?;
    Ok(out)
}
