//! Prints F(c), F(ξ), M1 and M2 for the four FDP procedures at γ = 0.05.
use critconst::*;
use std::time::Instant;

fn main() -> Result<()> {
    let sizes: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().expect("n")).collect();
    let sizes = if sizes.is_empty() { vec![10, 25, 50, 100] } else { sizes };
    for n in sizes {
        let mut line = format!("{n:>5}");
        for a in [fdp_su_matrix(n, 0.05)?, fdp_sd_matrix(n, 0.05)?] {
            for base in [bh_constants(n)?, lr_fdp_constants(n, 0.05)?] {
                let start = Instant::now();
                let (c, _) = rescale(&base, &a)?;
                let s = solve(&build_problem(&a, &c, None)?)?;
                line.push_str(&format!(
                    " | {:.2} {:.2} {:.2} {:.2} ({} piv, {:.1}s)",
                    s.floor_objective,
                    s.objective,
                    s.m1.unwrap_or(f64::NAN),
                    s.m2.unwrap_or(f64::NAN),
                    s.iterations,
                    start.elapsed().as_secs_f64()
                ));
            }
        }
        println!("{line}");
    }
    Ok(())
}
