//! Walks the shipped catalog: every space with its component group,
//! presentation, and graded dimensions, then the entry inventory.

fn main() -> omegak::Result<()> {
    let cat = omegak::catalog::Catalog::shipped()?;
    println!(
        "catalog {} ({} spaces, {} entries, checksum {}...)",
        cat.version,
        cat.spaces.len(),
        cat.entries.len(),
        &cat.checksum[..12]
    );

    println!("\nspaces, with dimensions through degree 8:");
    for s in &cat.spaces {
        let series = s.presentation.series(8)?;
        let dims: Vec<String> = series.coeffs().iter().map(|c| c.to_string()).collect();
        println!(
            "  {:6}  pi0 = {:3}  {}",
            s.name(),
            s.pi0.to_string(),
            s.presentation
        );
        println!("          dims: {}", dims.join(", "));
    }

    println!("\nentries by family prefix:");
    let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
    for e in &cat.entries {
        let prefix: String = e.spec.id.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
        *counts.entry(prefix).or_default() += 1;
    }
    for (prefix, count) in counts {
        println!("  {prefix:4} {count}");
    }

    let (maps, sss) = cat.kr_involvement();
    println!("\n{maps} evaluated maps and {sss} spectral sequences involve the fourth theory");
    Ok(())
}
