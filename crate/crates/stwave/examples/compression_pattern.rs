//! A-priori compression pattern of the temporal form matrices: per-level
//! size, kept-entry counts, and growth ratios demonstrating the O(N) trend,
//! plus a coordinate dump of one small pattern for plotting.

use stwave::compress::{compressed_form, FormKind};
use stwave::wavelet::MultiscaleBasis;

fn main() -> stwave::Result<()> {
    println!("{:>2} {:>6} {:>9} {:>8} {:>7}", "j", "N", "nnz", "%", "growth");
    let mut prev: Option<usize> = None;
    for level in 4u32..=12 {
        let basis = MultiscaleBasis::new(2, level)?;
        let (pattern, _) = compressed_form(&basis, FormKind::Derivative);
        let growth = prev
            .map(|p| format!("{:.3}", pattern.nnz() as f64 / p as f64))
            .unwrap_or_default();
        println!(
            "{:>2} {:>6} {:>9} {:>8.2} {:>7}",
            level,
            basis.len(),
            pattern.nnz(),
            pattern.percent(),
            growth
        );
        prev = Some(pattern.nnz());
    }

    let basis = MultiscaleBasis::new(2, 5)?;
    let (pattern, _) = compressed_form(&basis, FormKind::Derivative);
    println!("\n# retained coordinates at j=5 (row,col), one per line:");
    for row in 0..pattern.n {
        for &col in pattern.row(row) {
            println!("{row},{col}");
        }
    }
    Ok(())
}
