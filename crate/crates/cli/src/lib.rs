//! Request parsing and dispatch for the `freycond` binary.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize};

use freycond::classify::{classify_case, make_instance, Field};
use freycond::cluster::{cluster_picture, render_ascii, to_json};
use freycond::conductor::{conductor_exponent_with, odd_conductor, ExponentTable, FactoredIdeal};
use freycond::oracle::{root_difference_valuations, ValMultiset};
use freycond::signatures::{build_gfe, signature_report, GfeInput, Signature, SignatureReport};
use freycond::verify::run_verify;
use freycond::{Error, Result};

/// An integer given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Int, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Lit {
            Signed(i64),
            Unsigned(u64),
            Text(String),
        }
        match Lit::deserialize(d)? {
            Lit::Signed(n) => Ok(Int(n.into())),
            Lit::Unsigned(n) => Ok(Int(n.into())),
            Lit::Text(s) => parse_int(&s).map_err(serde::de::Error::custom),
        }
    }
}

pub fn parse_int(s: &str) -> Result<Int> {
    BigInt::from_str(s.trim())
        .map(Int)
        .map_err(|_| Error::Parse(format!("not an integer: {:?}", s)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
pub enum FieldSel {
    #[default]
    Q,
    K,
    #[serde(alias = "both")]
    Both,
}

impl FieldSel {
    pub fn fields(self) -> Vec<Field> {
        match self {
            FieldSel::Q => vec![Field::Q],
            FieldSel::K => vec![Field::K],
            FieldSel::Both => vec![Field::Q, Field::K],
        }
    }
}

impl FromStr for FieldSel {
    type Err = Error;
    fn from_str(s: &str) -> Result<FieldSel> {
        match s {
            "Q" | "q" => Ok(FieldSel::Q),
            "K" | "k" => Ok(FieldSel::K),
            "both" | "Both" => Ok(FieldSel::Both),
            _ => Err(Error::Parse(format!("unknown field {:?} (expected Q, K or both)", s))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {:?} (expected text or json)", s))),
        }
    }
}

fn default_seed() -> u64 {
    7
}

fn default_count() -> u64 {
    100
}

fn default_rs() -> Vec<u64> {
    vec![5, 7]
}

fn one() -> Int {
    Int(1.into())
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase", deny_unknown_fields)]
pub enum Request {
    Conductor {
        r: u64,
        z: Int,
        s: Int,
        #[serde(default)]
        field: FieldSel,
    },
    Cluster {
        r: u64,
        z: Int,
        s: Int,
        q: u64,
        #[serde(default)]
        field: FieldSel,
        #[serde(default)]
        check_oracle: bool,
    },
    Signature {
        signature: Signature,
        r: u64,
        #[serde(default)]
        q: Option<u64>,
        #[serde(default)]
        p: Option<u64>,
        #[serde(default = "one")]
        A: Int,
        #[serde(default = "one")]
        B: Int,
        #[serde(default = "one")]
        C: Int,
        #[serde(default)]
        a: Option<Int>,
        #[serde(default)]
        b: Option<Int>,
        #[serde(default)]
        c: Option<Int>,
        #[serde(default)]
        ap: Option<Int>,
        #[serde(default)]
        bp: Option<Int>,
        #[serde(default)]
        cp: Option<Int>,
    },
    Verify {
        #[serde(default = "default_seed")]
        seed: u64,
        #[serde(default = "default_count")]
        count: u64,
        #[serde(default = "default_rs")]
        r: Vec<u64>,
    },
}

/// One JSON request per line.
pub fn parse_request(line: &str) -> Result<Request> {
    serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))
}

/// Printed output and process exit code of a successful dispatch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, exit_code: 0 }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report types serialize")
}

pub fn run(req: &Request, format: Format, table: &ExponentTable) -> Result<Outcome> {
    match req {
        Request::Conductor { r, z, s, field } => cmd_conductor(*r, &z.0, &s.0, *field, format, table),
        Request::Cluster { r, z, s, q, field, check_oracle } => {
            cmd_cluster(*r, &z.0, &s.0, *q, *field, *check_oracle, format)
        }
        Request::Signature { signature, r, q, p, A, B, C, a, b, c, ap, bp, cp } => {
            let big = |x: &Option<Int>| x.as_ref().map(|i| i.0.clone());
            let input = GfeInput {
                signature: *signature,
                r: *r,
                q: *q,
                p: *p,
                A: A.0.clone(),
                B: B.0.clone(),
                C: C.0.clone(),
                a: big(a),
                b: big(b),
                c: big(c),
                ap: big(ap),
                bp: big(bp),
                cp: big(cp),
            };
            cmd_signature(&input, format)
        }
        Request::Verify { seed, count, r } => cmd_verify(*seed, *count, r, format, table),
    }
}

fn cmd_conductor(r: u64, z: &BigInt, s: &BigInt, sel: FieldSel, format: Format, table: &ExponentTable) -> Result<Outcome> {
    let inst = make_instance(r, z, s)?;
    let mut ideals: Vec<FactoredIdeal> = vec![];
    let mut text = String::new();
    for field in sel.fields() {
        let mut ideal = odd_conductor(&inst, field)?;
        if table.mutated.is_some() {
            for e in ideal.entries.iter_mut() {
                let lc = conductor_exponent_with(&inst, e.q, field, table)?;
                (e.exp, e.tame, e.wild) = (lc.total, lc.tame, lc.wild);
            }
        }
        writeln!(text, "over {}", field).unwrap();
        for e in &ideal.entries {
            writeln!(text, "{}: row {}, tame {}, wild {}, total {}", e.q, e.row, e.tame, e.wild, e.exp).unwrap();
        }
        writeln!(text, "N_odd = {}", ideal).unwrap();
        ideals.push(ideal);
    }
    Ok(Outcome::ok(match format {
        Format::Text => text.trim_end().to_string(),
        Format::Json if ideals.len() == 1 => json(&ideals[0]),
        Format::Json => json(&ideals),
    }))
}

#[derive(Serialize)]
struct ClusterReport {
    q: u64,
    field: Field,
    row: freycond::classify::RowTag,
    picture: String,
    tree: freycond::cluster::ClusterJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'static str>,
}

fn cmd_cluster(r: u64, z: &BigInt, s: &BigInt, q: u64, sel: FieldSel, check: bool, format: Format) -> Result<Outcome> {
    let inst = make_instance(r, z, s)?;
    let row = classify_case(&inst, q)?;
    let oracle = if check {
        let pic = cluster_picture(&inst, q, Field::Q)?;
        let want = root_difference_valuations(r, z, s, q)?;
        Some(if ValMultiset::from_pairs(pic.pair_valuations()) == want { "MATCH" } else { "MISMATCH" })
    } else {
        None
    };
    let mut reports = vec![];
    for field in sel.fields() {
        let pic = cluster_picture(&inst, q, field)?;
        reports.push(ClusterReport { q, field, row: row.tag, picture: render_ascii(&pic)?, tree: to_json(&pic), oracle });
    }
    let code = if oracle == Some("MISMATCH") { 1 } else { 0 };
    let text = match format {
        Format::Json if reports.len() == 1 => json(&reports[0]),
        Format::Json => json(&reports),
        Format::Text => {
            let mut t = String::new();
            for rep in &reports {
                writeln!(t, "q = {}, row {}, over {}", rep.q, rep.row, rep.field).unwrap();
                writeln!(t, "{}", rep.picture).unwrap();
                writeln!(t, "{}", json(&rep.tree)).unwrap();
            }
            if let Some(o) = oracle {
                writeln!(t, "oracle: {}", o).unwrap();
            }
            t.trim_end().to_string()
        }
    };
    Ok(Outcome { text, exit_code: code })
}

/// ρ-conductor with the prime above r written 𝔯 and the primes above q written 𝔮_q.
pub fn rho_shape(ideal: &FactoredIdeal, r: u64) -> String {
    let mut entries: Vec<_> = ideal.entries.iter().collect();
    entries.sort_by_key(|e| (e.q != r, e.q));
    let parts: Vec<String> = entries
        .into_iter()
        .map(|e| {
            let base = if e.q == r { "𝔯".to_string() } else { format!("𝔮_{}", e.q) };
            if e.exp == 1 {
                base
            } else {
                format!("{}^{}", base, e.exp)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}

fn signature_text(rep: &SignatureReport) -> String {
    let mut t = String::new();
    write!(t, "signature {}, r = {}", rep.signature, rep.r).unwrap();
    if rep.formal {
        write!(t, " (formal instance)").unwrap();
    }
    writeln!(t).unwrap();
    writeln!(t, "z = {}, s = {}, Δ = {}", rep.z, rep.s, rep.delta).unwrap();
    writeln!(t, "GL2-type: {} ({})", if rep.gl2_type { "yes" } else { "no" }, rep.gl2_basis).unwrap();
    writeln!(t, "F over Q_{}: {}", rep.r, if rep.reducible_at_r { "reducible" } else { "irreducible" }).unwrap();
    if let Some(e) = rep.epsilon_r {
        writeln!(t, "ε_r = {}", e).unwrap();
    }
    if let Some(rho) = &rep.rho_conductor {
        writeln!(t, "ρ-conductor = {}", rho_shape(rho, rep.r)).unwrap();
        writeln!(t, "            = {}", rho).unwrap();
    }
    for h in &rep.hgm_wild {
        write!(t, "wild exponent at {}: {} (row {}", h.prime, h.wild, h.row).unwrap();
        match &h.branch {
            Some(b) => writeln!(t, ", case {})", b).unwrap(),
            None => writeln!(t, ", outside the case list)").unwrap(),
        }
    }
    if let Some(n) = &rep.note {
        writeln!(t, "note: {}", n).unwrap();
    }
    t.trim_end().to_string()
}

fn cmd_signature(input: &GfeInput, format: Format) -> Result<Outcome> {
    let g = build_gfe(input)?;
    let rep = signature_report(&g)?;
    Ok(Outcome::ok(match format {
        Format::Text => signature_text(&rep),
        Format::Json => json(&rep),
    }))
}

fn cmd_verify(seed: u64, count: u64, rs: &[u64], format: Format, table: &ExponentTable) -> Result<Outcome> {
    let rep = run_verify(seed, count, rs, table)?;
    let code = if rep.all_pass() { 0 } else { 1 };
    let text = match format {
        Format::Text => rep.to_string(),
        Format::Json => json(&rep),
    };
    Ok(Outcome { text, exit_code: code })
}

/// Run every request in a batch; the exit code is the most severe one seen.
pub fn run_batch(input: &str, format: Format, table: &ExponentTable) -> Outcome {
    let mut text = String::new();
    let mut worst = 0;
    for line in input.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (out, code) = match parse_request(line).and_then(|req| run(&req, format, table)) {
            Ok(o) => (o.text, o.exit_code),
            Err(e) => {
                let code = e.exit_code();
                let msg = match format {
                    Format::Text => format!("error: {}", e),
                    Format::Json => json(&serde_json::json!({ "error": e.to_string(), "exit_code": code })),
                };
                (msg, code)
            }
        };
        worst = severity(worst, code);
        text.push_str(&out);
        text.push('\n');
        if format == Format::Text {
            text.push('\n');
        }
    }
    Outcome { text: text.trim_end().to_string(), exit_code: worst }
}

/// 1 (internal inconsistency) outranks 2 (bad input), which outranks 0.
fn severity(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        0 => 0,
        2 => 1,
        _ => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}
