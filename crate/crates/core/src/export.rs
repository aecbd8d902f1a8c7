//! Plain-text writers. Every real is printed with 17 significant digits, so
//! identical inputs give byte-identical files. States are 1-based on output.

use std::io::{self, Write};

use crate::kernels::{MarkovKernel, TridiagonalKernel};
use crate::spectra::Spectrum;

/// `x` with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        // Keep -0 and 0 identical on output.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

/// Rows `i,j,K` for the nonzero entries.
pub fn write_kernel_csv(kernel: &MarkovKernel, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "i,j,K")?;
    let n = kernel.dim();
    for i in 0..n {
        let cols: Box<dyn Iterator<Item = usize>> = match kernel {
            MarkovKernel::Dense(_) => Box::new(0..n),
            MarkovKernel::Chain(_) => Box::new(i.saturating_sub(1)..(i + 2).min(n)),
        };
        for j in cols {
            let v = kernel.get(i, j);
            if v != 0.0 {
                writeln!(w, "{},{},{}", i + 1, j + 1, fmt_real(v))?;
            }
        }
    }
    Ok(())
}

/// Rows `i,c,a,b`.
pub fn write_chain_csv(kernel: &TridiagonalKernel, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "i,c,a,b")?;
    for i in 0..kernel.dim() {
        let (c, a, b) = kernel.row(i);
        writeln!(w, "{},{},{},{}", i + 1, fmt_real(c), fmt_real(a), fmt_real(b))?;
    }
    Ok(())
}

/// One eigenvalue per line, ascending.
pub fn write_spectrum(spectrum: &Spectrum, mut w: impl Write) -> io::Result<()> {
    for x in spectrum.ascending() {
        writeln!(w, "{}", fmt_real(*x))?;
    }
    Ok(())
}

pub fn read_spectrum(text: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| l.trim().parse()).collect()
}

/// Rows `k,moment`.
pub fn write_moment_table(rows: &[(usize, f64)], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "k,moment")?;
    for (k, m) in rows {
        writeln!(w, "{k},{}", fmt_real(*m))?;
    }
    Ok(())
}

/// Rows `l,lhs,rhs,diff`.
pub fn write_trace_csv(rows: &[(usize, f64, f64, f64)], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "l,lhs,rhs,diff")?;
    for (l, a, b, d) in rows {
        writeln!(w, "{l},{},{},{}", fmt_real(*a), fmt_real(*b), fmt_real(*d))?;
    }
    Ok(())
}
