//! The 16-row hyper-entangled state table.

use std::fmt;

use serde::Serialize;

use crate::bell::{classify_exchange, hyper_state, parity_rule, BellLabel, HyperLabel, SymmetryClass};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DofTag {
    Boson,
    Fermion,
}

impl DofTag {
    fn of(label: BellLabel) -> Self {
        if label.is_fermion() {
            Self::Fermion
        } else {
            Self::Boson
        }
    }
}

impl fmt::Display for DofTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Boson => "Boson",
            Self::Fermion => "Fermion",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogRow {
    pub label: HyperLabel,
    pub polarization: DofTag,
    pub oam: DofTag,
    /// From counting Fermion factors.
    pub parity_class: SymmetryClass,
    /// From applying the swap operator to the state.
    pub swap_class: SymmetryClass,
}

impl CatalogRow {
    pub fn agrees(&self) -> bool {
        self.parity_class == self.swap_class
    }
}

impl Serialize for CatalogRow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row {
            state: String,
            polarization: DofTag,
            oam: DofTag,
            parity_class: String,
            swap_class: String,
        }
        Row {
            state: self.label.to_string(),
            polarization: self.polarization,
            oam: self.oam,
            parity_class: self.parity_class.to_string(),
            swap_class: self.swap_class.to_string(),
        }
        .serialize(serializer)
    }
}

pub fn cli_catalog() -> Vec<CatalogRow> {
    HyperLabel::all()
        .map(|label| {
            let [pol, oam] = label.dofs();
            CatalogRow {
                label,
                polarization: DofTag::of(pol),
                oam: DofTag::of(oam),
                parity_class: parity_rule(&label.dofs()).expect("two labels"),
                swap_class: classify_exchange(&hyper_state(label)),
            }
        })
        .collect()
}

/// Fixed-width text table with a trailing count line.
pub fn render_catalog(rows: &[CatalogRow]) -> String {
    let mut out = format!("{:<12} {:<8} {:<8} {:<14} swap\n", "state", "pol", "oam", "parity");
    for r in rows {
        out.push_str(&format!(
            "{:<12} {:<8} {:<8} {:<14} {}\n",
            r.label.to_string(),
            r.polarization.to_string(),
            r.oam.to_string(),
            r.parity_class.to_string(),
            r.swap_class,
        ));
    }
    let sym = rows.iter().filter(|r| r.swap_class == SymmetryClass::Symmetric).count();
    let anti = rows.iter().filter(|r| r.swap_class == SymmetryClass::Antisymmetric).count();
    out.push_str(&format!("{} states: {sym} symmetric, {anti} antisymmetric\n", rows.len()));
    out
}
