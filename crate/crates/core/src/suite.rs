//! The published verdict table and the sweep runner behind the `suite` verb.
//!
//! The default cell list reproduces the verdict table reported for the four
//! benchmark families at their reference widths, including the two
//! threshold pairs (FISCHER bounded liveness flips between four and five
//! processes, LEADER M4 likewise). A sweep instead visits every feasible
//! width up to a cap and compares against [`expected_verdict`].

use rayon::prelude::*;

use crate::benchgen::{min_n, BenchSpec, Category, Family};
use crate::checker::{check_file, CheckOptions, Verdict};
use crate::parse::parse_pes;

/// One benchmark instance to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub family: Family,
    pub n: u32,
    pub category: Category,
}

impl Cell {
    const fn new(family: Family, n: u32, category: Category) -> Cell {
        Cell { family, n, category }
    }
}

/// The outcome of checking one cell.
#[derive(Clone, Debug)]
pub struct CellResult {
    pub cell: Cell,
    pub expected: Verdict,
    /// The verdict, or the failure rendered as text.
    pub got: Result<Verdict, String>,
    pub ms: u128,
}

impl CellResult {
    pub fn pass(&self) -> bool {
        self.got.as_ref().map_or(false, |v| *v == self.expected)
    }
}

/// The reference verdict for a family, category and width.
///
/// Two properties are width-sensitive: FISCHER's bounded liveness holds for
/// up to four processes and fails from five on, and so does LEADER's
/// infinitely-often-elected property. LEADER's leads-to property holds only
/// at width two, where the third process it names cannot vote. Every other
/// verdict is stable in the width.
pub fn expected_verdict(family: Family, category: Category, n: u32) -> Verdict {
    use Category::*;
    use Verdict::*;
    match family {
        Family::Csma => match category {
            As | Al | M2 | M4 => Valid,
            Bs | Bl | M1 | M3 => Invalid,
            M4ap => unreachable!("GRC-only category"),
        },
        Family::Fischer => match category {
            As | Al => Valid,
            Bs if n <= 4 => Valid,
            Bs | Bl | M1 | M2 | M3 | M4 => Invalid,
            M4ap => unreachable!("GRC-only category"),
        },
        Family::Grc => match category {
            As | Al | M4 => Valid,
            Bs | Bl | M1 | M2 | M3 | M4ap => Invalid,
        },
        Family::Leader => match category {
            As | Al | M2 | M3 => Valid,
            M1 if n == 2 => Valid,
            M4 if n <= 4 => Valid,
            Bs | Bl | M1 | M4 => Invalid,
            M4ap => unreachable!("GRC-only category"),
        },
    }
}

/// The reference verdict table: every reported family × category cell at
/// its reference width, plus the two threshold pairs.
pub fn table_cells() -> Vec<Cell> {
    use Category::*;
    use Family::*;
    vec![
        Cell::new(Csma, 2, As),
        Cell::new(Csma, 3, Bs),
        Cell::new(Csma, 2, Al),
        Cell::new(Csma, 2, Bl),
        Cell::new(Csma, 2, M1),
        Cell::new(Csma, 2, M2),
        Cell::new(Csma, 3, M3),
        Cell::new(Csma, 2, M4),
        Cell::new(Fischer, 2, As),
        Cell::new(Fischer, 4, Bs),
        Cell::new(Fischer, 5, Bs),
        Cell::new(Fischer, 2, Al),
        Cell::new(Fischer, 2, Bl),
        Cell::new(Fischer, 2, M1),
        Cell::new(Fischer, 3, M2),
        Cell::new(Fischer, 2, M3),
        Cell::new(Fischer, 2, M4),
        Cell::new(Grc, 2, As),
        Cell::new(Grc, 2, Bs),
        Cell::new(Grc, 2, Al),
        Cell::new(Grc, 2, Bl),
        Cell::new(Grc, 2, M1),
        Cell::new(Grc, 2, M2),
        Cell::new(Grc, 2, M3),
        Cell::new(Grc, 2, M4),
        Cell::new(Grc, 2, M4ap),
        Cell::new(Leader, 2, As),
        Cell::new(Leader, 3, Bs),
        Cell::new(Leader, 2, Al),
        Cell::new(Leader, 3, Bl),
        Cell::new(Leader, 2, M1),
        Cell::new(Leader, 3, M1),
        Cell::new(Leader, 3, M2),
        Cell::new(Leader, 2, M3),
        Cell::new(Leader, 2, M4),
        Cell::new(Leader, 4, M4),
        Cell::new(Leader, 5, M4),
    ]
}

/// Every feasible cell with width at most `max_n`, in deterministic
/// (family, width, category) order.
pub fn sweep_cells(max_n: u32) -> Vec<Cell> {
    let mut cells = Vec::new();
    for family in Family::ALL {
        for n in 2..=max_n {
            for &category in family.categories() {
                if n >= min_n(family, category) {
                    cells.push(Cell::new(family, n, category));
                }
            }
        }
    }
    cells
}

/// Check every cell in parallel; results come back in input order.
pub fn run_cells(cells: &[Cell], opts: &CheckOptions) -> Vec<CellResult> {
    cells
        .par_iter()
        .map(|cell| {
            let expected = expected_verdict(cell.family, cell.category, cell.n);
            let t0 = std::time::Instant::now();
            let got = check_cell(cell, opts);
            CellResult { cell: *cell, expected, got, ms: t0.elapsed().as_millis() }
        })
        .collect()
}

fn check_cell(cell: &Cell, opts: &CheckOptions) -> Result<Verdict, String> {
    let text = BenchSpec::new(cell.family, cell.n, cell.category)
        .generate()
        .map_err(|e| e.to_string())?;
    let file = parse_pes(&text).map_err(|e| e.to_string())?;
    check_file(&file, opts)
        .map(|out| out.verdict)
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_table_matches_the_published_verdicts() {
        let results = run_cells(&table_cells(), &CheckOptions::default());
        let failures: Vec<String> = results
            .iter()
            .filter(|r| !r.pass())
            .map(|r| format!("{:?}: expected {:?}, got {:?}", r.cell, r.expected, r.got))
            .collect();
        assert!(failures.is_empty(), "mismatched cells:\n{}", failures.join("\n"));
    }

    #[test]
    fn sweeps_respect_minimum_widths() {
        let cells = sweep_cells(2);
        assert!(cells
            .iter()
            .all(|c| c.n >= min_n(c.family, c.category) && c.n == 2));
        // Categories needing a third process appear only from width 3 on.
        assert!(!cells
            .iter()
            .any(|c| c.family == Family::Csma && c.category == Category::Bs));
        let wider = sweep_cells(3);
        assert!(wider
            .iter()
            .any(|c| c.family == Family::Csma && c.category == Category::Bs && c.n == 3));
        // Order is deterministic: family-major, then width, then category.
        let mut sorted = cells.clone();
        sorted.sort_by_key(|c| {
            (
                Family::ALL.iter().position(|f| *f == c.family),
                c.n,
                c.family.categories().iter().position(|k| *k == c.category),
            )
        });
        assert_eq!(cells, sorted);
    }

    #[test]
    fn a_two_process_sweep_passes_everywhere() {
        let results = run_cells(&sweep_cells(2), &CheckOptions::default());
        assert!(results.iter().all(|r| r.pass()));
    }
}
