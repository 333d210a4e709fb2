use gauss_neumann::Error;
use std::fmt;
use std::io::Write;
use std::path::Path;

/// A run that could not produce its report, mapped to the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or input files; exit 2.
    Usage(String),
    /// A check the input was required to pass failed; exit 1.
    Verdict(String),
    /// Solver or I/O failure; exit 3.
    Solver(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Verdict(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "usage error: {s}"),
            Failure::Verdict(s) => write!(f, "verdict failure: {s}"),
            Failure::Solver(s) => write!(f, "solver failure: {s}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            Error::Precondition(_) => Failure::Verdict(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

/// Twelve significant digits, `.` as decimal separator, exponent form outside [1e-5, 1e15).
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..15).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        let text = format!("{x:.decimals$}");
        // rounding can carry into a new leading digit
        let digits = text.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        if digits.trim_start_matches('0').len() > 12 && decimals > 0 {
            let decimals = decimals - 1;
            return format!("{x:.decimals$}");
        }
        text
    } else {
        format!("{x:.11e}")
    }
}

pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Solver(format!("cannot write {}: {e}", path.display()));
    let name = path.file_name().ok_or_else(|| Failure::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut file = std::fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

pub fn emit(body: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, body.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Solver(format!("cannot write to standard output: {e}")))
        }
    }
}
