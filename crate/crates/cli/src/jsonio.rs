//! Deterministic JSON output and the kernel file schema.
//!
//! Floats are serialized with 17 significant digits (`{:.16e}`) so every
//! value round-trips losslessly through the text form; struct fields
//! serialize in declaration order, making identical inputs produce
//! byte-identical output.

use std::io;

use serde::{Deserialize, Serialize};

struct SigFig17;

impl serde_json::ser::Formatter for SigFig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize with the fixed float format; appends a trailing newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFig17);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Format one float the same way the JSON writer does.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// The kernel file schema, emitted by `kernel` and accepted by `classify`
/// and `decompose`. `factor_poly` is optional on input so kernels from
/// external generators compose too.
#[derive(Debug, Serialize, Deserialize)]
pub struct KernelFile {
    pub t: f64,
    pub q: usize,
    pub p: usize,
    pub h: f64,
    pub design: Vec<f64>,
    pub kernel: Vec<f64>,
    #[serde(default)]
    pub factor_poly: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct FitOutput {
    pub t: f64,
    pub q: usize,
    pub p: usize,
    pub h: f64,
    pub estimate: f64,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub h: f64,
    pub estimate: f64,
}

#[derive(Debug, Serialize)]
pub struct CurveOutput {
    pub q: usize,
    pub p: usize,
    pub weight: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Serialize)]
pub struct MomentJson {
    pub residuals: Vec<f64>,
    pub normalizers: Vec<f64>,
    pub passed: bool,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
pub struct SignChangesJson {
    pub count: usize,
    pub change_spans: Vec<[usize; 2]>,
    pub zero_tol: f64,
}

#[derive(Debug, Serialize)]
pub struct ClassifyOutput {
    pub t: f64,
    pub q: usize,
    pub p: usize,
    pub h: f64,
    pub moment: MomentJson,
    pub sign_changes: SignChangesJson,
}

#[derive(Debug, Serialize)]
pub struct DecomposeOutput {
    pub t: f64,
    pub q: usize,
    pub p: usize,
    pub h: f64,
    pub design: Vec<f64>,
    pub kernel: Vec<f64>,
    pub factor_poly: Vec<f64>,
    pub weights: Vec<f64>,
    pub nodes: Vec<f64>,
    pub s: u8,
    pub h_poly: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SymmetryOutput {
    pub t: f64,
    pub q: usize,
    pub p: usize,
    pub h: f64,
    pub symmetric_design: bool,
    pub order_gap_even: bool,
    pub schemes: Vec<String>,
    pub pairwise_max_diff: Vec<Vec<f64>>,
    pub parity: Vec<String>,
    pub verdict: String,
    pub tol: f64,
}
