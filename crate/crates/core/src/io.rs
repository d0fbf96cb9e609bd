//! Machine-readable serialization: complex matrices as row-major `[re, im]`
//! pair arrays, basis families as label-keyed JSON maps, probability and
//! count tables as CSV with coefficient-tuple element labels.

use crate::mub::BasisFamily;
use crate::tomo::{CountTable, ProbabilityTable};
use crate::CMat;
use serde_json::{json, Value};

/// Row-major JSON encoding of a complex matrix.
pub fn matrix_to_json(m: &CMat) -> Value {
    let entries: Vec<[f64; 2]> = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| [m[(r, c)].re, m[(r, c)].im]))
        .collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "entries": entries })
}

pub fn matrix_from_json(v: &Value) -> Option<CMat> {
    let rows = v.get("rows")?.as_u64()? as usize;
    let cols = v.get("cols")?.as_u64()? as usize;
    let entries = v.get("entries")?.as_array()?;
    if entries.len() != rows * cols {
        return None;
    }
    let mut m = CMat::zeros(rows, cols);
    for (k, e) in entries.iter().enumerate() {
        let pair = e.as_array()?;
        m[(k / cols, k % cols)] =
            num_complex::Complex64::new(pair.first()?.as_f64()?, pair.get(1)?.as_f64()?);
    }
    Some(m)
}

/// JSON map from setup label (`ray:(…)` / `ideal:(…)`) to basis matrix.
pub fn family_to_json(family: &BasisFamily) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("ring".into(), json!(family.ctx().canonical_string()));
    let mut setups = serde_json::Map::new();
    for (label, u) in family.setups() {
        setups.insert(label.to_string(), matrix_to_json(u));
    }
    map.insert("setups".into(), Value::Object(setups));
    Value::Object(map)
}

/// CSV rows `setup_kind,setup_elem,outcome_elem,value`, outcomes in
/// canonical element order. The header can carry a comment line isolated
/// from the data (reproducibility contract: identical config and seed give
/// byte-identical data rows).
pub fn probability_table_to_csv(table: &ProbabilityTable, family: &BasisFamily) -> String {
    let mut out = String::from("setup_kind,setup_elem,outcome_elem,value\n");
    let ctx = family.ctx();
    let space = family.space();
    for (label, p) in &table.setups {
        for idx in 0..ctx.size() {
            let elem = ctx.elem(idx);
            out.push_str(&format!(
                "{},\"{}\",\"{}\",{}\n",
                label.kind_str(),
                label.elem().coeff_tuple(),
                elem.coeff_tuple(),
                fmt_float(p[space.hilbert_index(&elem)]),
            ));
        }
    }
    out
}

/// CSV rows `setup_kind,setup_elem,outcome_elem,count` plus the per-setup
/// shot count in a trailing column.
pub fn count_table_to_csv(table: &CountTable, family: &BasisFamily) -> String {
    let mut out = String::from("setup_kind,setup_elem,outcome_elem,count,shots\n");
    let ctx = family.ctx();
    let space = family.space();
    for (label, counts) in &table.setups {
        for idx in 0..ctx.size() {
            let elem = ctx.elem(idx);
            out.push_str(&format!(
                "{},\"{}\",\"{}\",{},{}\n",
                label.kind_str(),
                label.elem().coeff_tuple(),
                elem.coeff_tuple(),
                counts[space.hilbert_index(&elem)],
                table.shots,
            ));
        }
    }
    out
}

/// Locale-independent float rendering for CSV cells.
pub fn fmt_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v:.12e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingContext;
    use crate::tomo::{born_probabilities, DensityMatrix};

    #[test]
    fn matrix_round_trip() {
        let fam = BasisFamily::for_ring(RingContext::new(2, 1, None).unwrap()).unwrap();
        let f = fam.space().fourier();
        let v = matrix_to_json(&f);
        let back = matrix_from_json(&v).unwrap();
        assert!((f - back).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-15);
    }

    #[test]
    fn csv_shape() {
        let fam = BasisFamily::for_ring(RingContext::new(2, 1, None).unwrap()).unwrap();
        let probs =
            born_probabilities(&DensityMatrix::maximally_mixed(4), &fam).unwrap();
        let csv = probability_table_to_csv(&probs, &fam);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 6 * 4);
        assert_eq!(lines[0], "setup_kind,setup_elem,outcome_elem,value");
        assert!(lines[1].starts_with("ray,\"(0)\",\"(0)\","));
    }
}
