//! Report emission: JSON with round-trip-exact floats, and the CSV table.
//!
//! Every float is printed as `{:.16e}` — seventeen significant digits —
//! so parsing the output recovers the exact bit pattern and golden files
//! stay stable across platforms and thread counts.

use std::io::{self, Write};

use serde::Serialize;

/// Fixed seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Wrapper printed around every JSON report.
#[derive(Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub tool_version: &'static str,
    pub seed: u64,
    pub resolved_config: C,
    pub report: R,
}

pub fn envelope<C: Serialize, R: Serialize>(seed: u64, config: C, report: R) -> Envelope<C, R> {
    Envelope {
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        resolved_config: config,
        report,
    }
}

/// `serde_json` formatter that widens every float to 17 significant digits.
struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.7e}")
    }
}

/// Serialize to a single JSON line with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17);
    value
        .serialize(&mut ser)
        .expect("report serialization is infallible");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// One float in the same 17-digit form, for CSV cells.
pub fn g17(value: f64) -> String {
    format!("{value:.16e}")
}
