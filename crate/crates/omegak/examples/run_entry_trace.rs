//! Runs three catalog entries end to end and prints the page-by-page
//! story: kernel and cokernel of the first map, the second page with
//! bidegrees, declared differentials, declared extensions, and the final
//! comparison against the target.

use omegak::catalog::Catalog;
use omegak::specseq::run_entry;

fn main() -> omegak::Result<()> {
    let cat = Catalog::shipped()?;
    // One collapse, one with differentials, one with a corrected extension
    // chain that still carries the originally stated form.
    for id in ["OOR000", "UOO132", "RKR557"] {
        let entry = cat.lookup_entry(id)?;
        println!("{id}: {} -> {} -> {}", entry.fiber, entry.total, entry.base);
        let outcome = run_entry(&entry.spec, 24)?;
        for line in &outcome.trace {
            println!("    {line}");
        }
        for note in &outcome.notes {
            println!("    note: {note}");
        }
        println!();
    }
    Ok(())
}
