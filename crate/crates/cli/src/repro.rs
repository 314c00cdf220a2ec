use serde_json::{json, Value};

use loclambda::catalog::{build_phase_space, CatalogName};
use loclambda::io::format_float;
use loclambda::mbpc::{magic_cluster, Graph, MagicClusterSpec};
use loclambda::robustness::robustness;

use crate::Report;

pub const COLUMNS: [CatalogName; 5] = [CatalogName::Lc2, CatalogName::Lc1, CatalogName::Det, CatalogName::Cnc, CatalogName::Stab];

/// Published robustness values, rows L3 then K3, in [`COLUMNS`] order.
pub const REFERENCE: [[f64; 5]; 2] = [[1.043, 1.040, 1.207, 1.283, 2.219], [1.000, 1.052, 1.244, 1.283, 2.219]];

pub const TOLERANCE: f64 = 2e-3;

pub fn table1() -> loclambda::Result<Report> {
    let states = [("L3", Graph::path(3)), ("K3", Graph::complete(3))]
        .into_iter()
        .map(|(name, g)| Ok((name, magic_cluster(&MagicClusterSpec::all_magic(g))?)))
        .collect::<loclambda::Result<Vec<_>>>()?;
    let mut rows = vec![vec![0.0; COLUMNS.len()]; states.len()];
    for (j, name) in COLUMNS.iter().enumerate() {
        let catalog = build_phase_space(*name, 3)?;
        for (i, (_, rho)) in states.iter().enumerate() {
            rows[i][j] = robustness(rho, &catalog)?.0;
        }
    }
    let mut text = format!("{:<6}", "state");
    for name in COLUMNS {
        text.push_str(&format!("{:>22}", name.as_str()));
    }
    let mut cells: Vec<Value> = Vec::new();
    let mut all_ok = true;
    for (i, (state, _)) in states.iter().enumerate() {
        text.push_str(&format!("\n{state:<6}"));
        for (j, name) in COLUMNS.iter().enumerate() {
            let (got, want) = (rows[i][j], REFERENCE[i][j]);
            let ok = (got - want).abs() <= TOLERANCE;
            all_ok &= ok;
            text.push_str(&format!("{:>22}", format!("{got:.3} ({want:.3}{})", if ok { "" } else { " !" })));
            cells.push(json!({ "state": state, "catalog": name.as_str(), "value": got, "reference": want, "ok": ok }));
        }
    }
    text.push_str(&format!("\ncomputed (reference), ! marks a difference above {}", format_float(TOLERANCE)));
    Ok(Report { text, json: json!({ "cells": cells, "tolerance": TOLERANCE, "all_ok": all_ok }), negative: !all_ok })
}
