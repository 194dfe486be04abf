//! Problem-file ingestion.
//!
//! A problem file is JSON:
//!
//! ```json
//! {
//!   "n": 1, "p": [2, 1],
//!   "backend": "grid",
//!   "mu": 0.5,
//!   "series_degree": 6,
//!   "grid": { "n_rad": 128, "n_ang": 256 },
//!   "r0": 0.5,
//!   "omega": {
//!     "0,0": [["0.3*z1", "0"], ["0", "-0.3*z1"]],
//!     "1,-1": { "": [["z1"], ["1"]] }
//!   },
//!   "psi": [["exp(0.3*z1*zb1)", "zb1"]]
//! }
//! ```
//!
//! Entry keys are `"s,k"`.  An entry value is either a bare matrix of
//! coefficient expressions — the single component dz̄_{1..q} (the only one in
//! one variable) — or a map from index tuples (`""`, `"1"`, `"1,2"`, …) to
//! matrices, for higher ambient dimension.

use std::collections::BTreeMap;


use dbar_core::grid::{sample_series, GridCoeff, GridCtx, GridSpec};
use dbar_core::resolution::{AugmentedData, ConnectionData};
use dbar_core::series::{SeriesCoeff, SeriesCtx};
use dbar_core::MatrixForm;
use serde::Deserialize;

use crate::expr::{self, Expr};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    pub p: Vec<usize>,
    pub backend: String,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub series_degree: Option<u32>,
    #[serde(default)]
    pub grid: Option<GridDims>,
    #[serde(default)]
    pub r0: Option<f64>,
    pub omega: BTreeMap<String, FormSpec>,
    #[serde(default)]
    pub psi: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
pub struct GridDims {
    pub n_rad: usize,
    pub n_ang: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Matrix(Vec<Vec<String>>),
    Components(BTreeMap<String, Vec<Vec<String>>>),
}

/// A problem loaded onto one of the two backends.
pub enum Problem {
    Series { data: AugmentedData<SeriesCoeff>, meta: Meta },
    Grid { data: AugmentedData<GridCoeff>, meta: Meta },
}

pub struct Meta {
    pub n: usize,
    pub m: usize,
    pub p: Vec<usize>,
    pub backend: String,
    pub mu: f64,
    pub series_degree: Option<u32>,
    pub grid: Option<(usize, usize)>,
    pub r0: f64,
}

pub fn load(path: &str) -> Result<Problem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    build(file, path)
}

fn parse_entry_key(key: &str) -> Result<(usize, i64), String> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("bad entry key '{key}': expected \"s,k\""));
    }
    let s = parts[0].trim().parse::<usize>().map_err(|_| format!("bad s in key '{key}'"))?;
    let k = parts[1].trim().parse::<i64>().map_err(|_| format!("bad k in key '{key}'"))?;
    Ok((s, k))
}

fn parse_index_key(key: &str, degree: usize, n: usize) -> Result<Vec<u8>, String> {
    let key = key.trim();
    if key.is_empty() {
        if degree != 0 {
            return Err(format!("empty index tuple for a degree-{degree} entry"));
        }
        return Ok(vec![]);
    }
    let idx: Vec<u8> = key
        .split(',')
        .map(|t| t.trim().parse::<u8>().map_err(|_| format!("bad index tuple '{key}'")))
        .collect::<Result<_, _>>()?;
    if idx.len() != degree {
        return Err(format!("index tuple '{key}' has length {}, expected {degree}", idx.len()));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i == 0 || i as usize > n) {
        return Err(format!("index tuple '{key}' must be strictly increasing within 1..={n}"));
    }
    Ok(idx)
}

fn parse_matrix(
    rows: usize,
    cols: usize,
    matrix: &[Vec<String>],
    n: usize,
    where_: &str,
) -> Result<Vec<Expr>, String> {
    if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
        return Err(format!(
            "{where_}: expected a {rows}x{cols} matrix, got {}x{}",
            matrix.len(),
            matrix.first().map(|r| r.len()).unwrap_or(0)
        ));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for (i, row) in matrix.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let e = expr::parse(cell, n)
                .map_err(|err| format!("{where_}[{i}][{j}] = '{cell}': {err}"))?;
            out.push(e);
        }
    }
    Ok(out)
}

struct EntrySpec {
    s: usize,
    k: i64,
    rows: usize,
    cols: usize,
    degree: usize,
    components: Vec<(Vec<u8>, Vec<Expr>)>,
}

fn collect_entries(file: &ProblemFile, m: usize) -> Result<Vec<EntrySpec>, String> {
    let n = file.n;
    let p = &file.p;
    let size = |i: i64| -> usize {
        if i >= 0 && (i as usize) < p.len() {
            p[i as usize]
        } else {
            0
        }
    };
    let mut out = Vec::new();
    for (key, spec) in &file.omega {
        let (s, k) = parse_entry_key(key)?;
        if s > m || k < -1 || k > (m - s) as i64 || (s, k) == (0, -1) {
            return Err(format!(
                "entry '{key}' is out of range for a length-{m} resolution"
            ));
        }
        let rows = size(s as i64 + k);
        let cols = size(s as i64);
        let degree = (k + 1) as usize;
        if degree > n {
            return Err(format!(
                "entry '{key}' would have degree {degree} in ambient dimension {n}; \
                 such forms vanish and must be omitted"
            ));
        }
        let mut components = Vec::new();
        match spec {
            FormSpec::Matrix(matrix) => {
                let idx: Vec<u8> = (1..=degree as u8).collect();
                let exprs = parse_matrix(rows, cols, matrix, n, &format!("omega[{key}]"))?;
                components.push((idx, exprs));
            }
            FormSpec::Components(map) => {
                for (ikey, matrix) in map {
                    let idx = parse_index_key(ikey, degree, n)?;
                    let exprs = parse_matrix(
                        rows,
                        cols,
                        matrix,
                        n,
                        &format!("omega[{key}][{ikey}]"),
                    )?;
                    components.push((idx, exprs));
                }
            }
        }
        out.push(EntrySpec { s, k, rows, cols, degree, components });
    }
    Ok(out)
}

fn build(file: ProblemFile, path: &str) -> Result<Problem, String> {
    if file.p.is_empty() {
        return Err(format!("{path}: p must list at least p_0"));
    }
    let m = file.p.len() - 1;
    if let Some(decl) = file.m {
        if decl != m {
            return Err(format!("{path}: m = {decl} disagrees with p (length {})", m + 1));
        }
    }
    if file.n == 0 {
        return Err(format!("{path}: ambient dimension must be at least 1"));
    }
    let mu = file.mu.unwrap_or(0.5);
    if !(mu > 0.0 && mu < 1.0) {
        return Err(format!("{path}: mu must lie in (0,1)"));
    }
    let entries = collect_entries(&file, m)?;

    match file.backend.as_str() {
        "series" => {
            let acc = file.series_degree.unwrap_or(6);
            let ctx = SeriesCtx { n: file.n };
            let mut conn = ConnectionData::<SeriesCoeff>::zero(&ctx, file.p.clone())
                .map_err(|e| e.to_string())?;
            for e in &entries {
                let mut form = MatrixForm::zero(&ctx, e.rows, e.cols, e.degree);
                for (idx, exprs) in &e.components {
                    let coeffs: Vec<SeriesCoeff> = exprs
                        .iter()
                        .map(|x| expr::eval_series(x, &ctx, acc))
                        .collect::<Result<_, _>>()?;
                    form.set_component(idx.clone(), coeffs).map_err(|er| er.to_string())?;
                }
                conn.set_entry(e.s, e.k, form).map_err(|er| er.to_string())?;
            }
            let psi = match &file.psi {
                Some(matrix) => {
                    let rows = matrix.len();
                    let cols = file.p[0];
                    let exprs = parse_matrix(rows, cols, matrix, file.n, "psi")?;
                    let coeffs: Vec<SeriesCoeff> = exprs
                        .iter()
                        .map(|x| expr::eval_series(x, &ctx, acc))
                        .collect::<Result<_, _>>()?;
                    Some(
                        MatrixForm::from_matrix(&ctx, rows, cols, coeffs)
                            .map_err(|er| er.to_string())?,
                    )
                }
                None => None,
            };
            let meta = Meta {
                n: file.n,
                m,
                p: file.p.clone(),
                backend: "series".into(),
                mu,
                series_degree: Some(acc),
                grid: None,
                r0: file.r0.unwrap_or(1.0),
            };
            let data = AugmentedData::new(conn, psi).map_err(|er| er.to_string())?;
            Ok(Problem::Series { data, meta })
        }
        "grid" => {
            if file.n != 1 {
                return Err(format!(
                    "{path}: the grid backend is one-dimensional; numeric problems with \
                     n = {} are an unsupported configuration",
                    file.n
                ));
            }
            let dims = file.grid.as_ref().ok_or_else(|| {
                format!("{path}: grid backend requires a \"grid\" {{n_rad, n_ang}} block")
            })?;
            let r0 = file.r0.unwrap_or(0.5);
            let spec = GridSpec::new(dims.n_rad, dims.n_ang).map_err(|e| e.to_string())?;
            let ctx = GridCtx::new(spec, r0).map_err(|e| e.to_string())?;
            let mut conn = ConnectionData::<GridCoeff>::zero(&ctx, file.p.clone())
                .map_err(|e| e.to_string())?;
            let nodes = ctx.nodes();
            let eval_grid = |x: &Expr| -> GridCoeff {
                let samples = nodes.iter().map(|z| expr::eval_point(x, &[*z])).collect();
                GridCoeff::from_samples(&ctx, samples).expect("node count matches")
            };
            for e in &entries {
                let mut form = MatrixForm::zero(&ctx, e.rows, e.cols, e.degree);
                for (idx, exprs) in &e.components {
                    let coeffs: Vec<GridCoeff> = exprs.iter().map(&eval_grid).collect();
                    form.set_component(idx.clone(), coeffs).map_err(|er| er.to_string())?;
                }
                conn.set_entry(e.s, e.k, form).map_err(|er| er.to_string())?;
            }
            let psi = match &file.psi {
                Some(matrix) => {
                    let rows = matrix.len();
                    let cols = file.p[0];
                    let exprs = parse_matrix(rows, cols, matrix, file.n, "psi")?;
                    let coeffs: Vec<GridCoeff> = exprs.iter().map(&eval_grid).collect();
                    Some(
                        MatrixForm::from_matrix(&ctx, rows, cols, coeffs)
                            .map_err(|er| er.to_string())?,
                    )
                }
                None => None,
            };
            let meta = Meta {
                n: 1,
                m,
                p: file.p.clone(),
                backend: "grid".into(),
                mu,
                series_degree: None,
                grid: Some((dims.n_rad, dims.n_ang)),
                r0,
            };
            let data = AugmentedData::new(conn, psi).map_err(|er| er.to_string())?;
            Ok(Problem::Grid { data, meta })
        }
        other => Err(format!("{path}: unknown backend '{other}' (expected series|grid)")),
    }
}

/// Samples a series problem onto a grid (for numeric commands on exact input).
pub fn series_to_grid(
    data: &AugmentedData<SeriesCoeff>,
    ctx: &GridCtx,
) -> Result<AugmentedData<GridCoeff>, String> {
    let conn = &data.conn;
    let mut out =
        ConnectionData::<GridCoeff>::zero(ctx, conn.sizes().to_vec()).map_err(|e| e.to_string())?;
    for (&(s, k), form) in conn.stored_entries() {
        let sampled = form
            .map_coeffs(ctx, &mut |c: &SeriesCoeff| sample_series(ctx, c))
            .map_err(|e| e.to_string())?;
        out.set_entry(s, k, sampled).map_err(|e| e.to_string())?;
    }
    let psi = match &data.psi {
        Some(p) => Some(
            p.map_coeffs(ctx, &mut |c: &SeriesCoeff| sample_series(ctx, c))
                .map_err(|e| e.to_string())?,
        ),
        None => None,
    };
    AugmentedData::new(out, psi).map_err(|e| e.to_string())
}
