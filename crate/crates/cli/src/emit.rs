//! Canonical text for declarations. Every string produced here parses back
//! to an equal value.

use zjet::{Domain, GradedMatrix, Morphism};

pub fn ring(name: &str, dom: &Domain, form_cap: u32) -> String {
    let mut s = format!("ring {name} n={} cap={}", dom.n(), dom.cap());
    if form_cap != dom.cap() {
        s.push_str(&format!(" formcap={form_cap}"));
    }
    s.push_str(" coords [");
    let coords = dom.coords();
    for (i, c) in coords.coords().iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{}:{}", c.name, c.degree));
    }
    s.push(']');
    s
}

pub fn morphism(name: &str, source: &str, target: &str, phi: &Morphism) -> String {
    format!("morphism {name} : {source} -> {target} {phi:?}")
}

fn degree_list(ds: &[zjet::Degree]) -> String {
    let parts: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn matrix(name: &str, m: &GradedMatrix) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|e| e.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("matrix {name} rows {} cols {} = [{}]", degree_list(m.row_degrees()), degree_list(m.col_degrees()), rows.join(", "))
}
