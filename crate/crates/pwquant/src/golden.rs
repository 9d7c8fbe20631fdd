//! The shipped table of canonical sequences, `data/table1.json`.

use serde::Deserialize;

pub const TABLE1_JSON: &str = include_str!("../data/table1.json");

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct TableRow {
    pub n: usize,
    /// Block sizes followed by the trailing 1 for the tail.
    pub sequence: Vec<u32>,
    #[serde(rename = "V_n")]
    pub v_n: String,
}

pub fn table1() -> Vec<TableRow> {
    serde_json::from_str(TABLE1_JSON).expect("shipped table parses")
}
