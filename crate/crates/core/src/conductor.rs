//! Closed-form conductor exponents at odd primes, over Q and over K.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{k_splitting, val_int, Val};
use crate::classify::{bad_odd_primes, classify_case, CaseRow, FamilyInstance, Field, RowTag};
use crate::cluster::{nu_top, picture_for_row};
use crate::error::{domain, internal, Result};

/// Total and wild exponents per row. `mutated` shifts one row's totals by one,
/// which lets the verification harness prove it notices a wrong table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ExponentTable {
    pub mutated: Option<RowTag>,
}

impl ExponentTable {
    pub fn standard() -> ExponentTable {
        ExponentTable { mutated: None }
    }

    pub fn mutated(row: RowTag) -> ExponentTable {
        ExponentTable { mutated: Some(row) }
    }

    pub fn total(&self, field: Field, row: RowTag, r: u64) -> u64 {
        let m = (r - 1) / 2;
        let base = match (field, row) {
            (_, RowTag::Good) => 0,
            (_, RowTag::R1) => m,
            (_, RowTag::R2) | (_, RowTag::R3) | (_, RowTag::R8) => r - 1,
            (Field::Q, RowTag::R4) | (Field::Q, RowTag::R7) => r,
            (Field::Q, RowTag::R5) => 2 * r - 1,
            (Field::Q, RowTag::R6) => (3 * r - 1) / 2,
            (Field::K, RowTag::R4) | (Field::K, RowTag::R7) => 3 * (r - 1) / 2,
            (Field::K, RowTag::R5) => (r - 1) * (r + 2) / 2,
            (Field::K, RowTag::R6) => (r - 1) * (r + 5) / 4,
        };
        base + (self.mutated == Some(row)) as u64
    }

    pub fn wild(&self, field: Field, row: RowTag, r: u64) -> u64 {
        let m = (r - 1) / 2;
        let q_wild = match row {
            RowTag::R4 | RowTag::R7 => 1,
            RowTag::R5 => r,
            RowTag::R6 => r.div_ceil(2),
            _ => 0,
        };
        match field {
            Field::Q => q_wild,
            Field::K => m * q_wild,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConductor {
    pub q: u64,
    pub field: Field,
    pub row: CaseRow,
    pub tame: u64,
    pub wild: u64,
    pub total: u64,
}

/// Discriminant valuation δ of Q_q(γ) over Q_q for the irreducible rows.
fn root_field_disc_valuation(row: &CaseRow, r: u64) -> Option<u64> {
    match row.tag {
        RowTag::R2 => Some(r * val_int(&num_bigint::BigInt::from(r), row.q).unwrap_or(0) + r - 1),
        RowTag::R5 => Some(r + r - 1),
        RowTag::R4 | RowTag::R7 => Some(r),
        RowTag::R6 => Some((3 * r - 1) / 2),
        _ => None,
    }
}

pub fn local_from_row(row: &CaseRow, r: u64, field: Field, table: &ExponentTable) -> Result<LocalConductor> {
    let total = table.total(field, row.tag, r);
    let wild = table.wild(field, row.tag, r);
    if wild > total {
        return internal(format!("wild part {} exceeds total {} in row {}", wild, total, row.tag));
    }
    if (row.reducible || row.q != r) && wild != 0 {
        return internal(format!("row {} has wild part with a tame splitting field", row.tag));
    }
    if field == Field::Q {
        if let Some(delta) = root_field_disc_valuation(row, r) {
            if wild + r - 1 != delta {
                return internal(format!("row {}: wild {} but δ − r + 1 = {}", row.tag, wild, delta + 1 - r));
            }
        }
    }
    Ok(LocalConductor { q: row.q, field, row: row.clone(), tame: total - wild, wild, total })
}

pub fn conductor_exponent(inst: &FamilyInstance, q: u64, field: Field) -> Result<LocalConductor> {
    conductor_exponent_with(inst, q, field, &ExponentTable::standard())
}

pub fn conductor_exponent_with(
    inst: &FamilyInstance,
    q: u64,
    field: Field,
    table: &ExponentTable,
) -> Result<LocalConductor> {
    let row = classify_case(inst, q)?;
    local_from_row(&row, inst.r, field, table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealEntry {
    pub q: u64,
    pub f: u64,
    pub g: u64,
    pub exp: u64,
    pub row: RowTag,
    pub tame: u64,
    pub wild: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredIdeal {
    pub field: Field,
    pub entries: Vec<IdealEntry>,
}

impl FactoredIdeal {
    /// Absolute norm of the ideal, as Σ over primes of f·g·exp per rational prime.
    pub fn norm_exponents(&self) -> Vec<(u64, u64)> {
        self.entries.iter().map(|e| (e.q, e.exp * e.f * e.g)).collect()
    }
}

impl fmt::Display for FactoredIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| match self.field {
                Field::Q => format!("{}^{}", e.q, e.exp),
                Field::K if e.g == 1 => format!("({}; f={})^{}", e.q, e.f, e.exp),
                Field::K => format!("({}; f={}, g={})^{}", e.q, e.f, e.g, e.exp),
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

pub fn odd_conductor(inst: &FamilyInstance, field: Field) -> Result<FactoredIdeal> {
    let mut entries = vec![];
    for q in bad_odd_primes(inst)? {
        let lc = conductor_exponent(inst, q, field)?;
        if lc.total < (inst.r - 1) / 2 {
            return internal(format!("bad prime {} has exponent {} below (r-1)/2", q, lc.total));
        }
        let (f, g) = match field {
            Field::Q => (1, 1),
            Field::K => {
                let k = k_splitting(q, inst.r)?;
                (k.f, k.g)
            }
        };
        entries.push(IdealEntry { q, f, g, exp: lc.total, row: lc.row.tag, tame: lc.tame, wild: lc.wild });
    }
    Ok(FactoredIdeal { field, entries })
}

/// Conductor exponent over K at the prime above r of the twist of C by a uniformizer (row R8 only).
pub fn semistable_twist_exponent(inst: &FamilyInstance) -> Result<u64> {
    let row = classify_case(inst, inst.r)?;
    if row.tag != RowTag::R8 {
        return domain(format!("needs v_r(Δ) >= 3 and r ∤ s, found row {}", row.tag));
    }
    let pic = picture_for_row(&row, inst.r, Field::K)?;
    if pic.depth() != Val::int(1) {
        return internal("top depth over K in row R8 is not 1");
    }
    // the twist by a uniformizer has leading coefficient of valuation 1
    let nu = nu_top(&pic, &Val::int(1))?;
    let even = nu.is_integer() && nu.to_integer().to_i64().is_some_and(|x| x % 2 == 0);
    if !even {
        return internal(format!("ν of the twisted top cluster is {}, expected even", nu));
    }
    Ok(pic.twins().len() as u64)
}
