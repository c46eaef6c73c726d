use alloc::vec::Vec;
use core::time::Duration;

use num_traits::Zero;
use thiserror::Error;

use crate::eval::{sigma_of_table, CountTable};
use crate::ilp::{solve_native, Deadline, NoDeadline, SolveOptions, SolveOutcome, SortRefinement};
use crate::threshold::{Rational, Threshold};
use crate::view::StructureView;

/// Supplies a fresh deadline for every probe and measures how long the
/// probe took. The core crate has no clock, so both are injected.
pub trait ProbeTimer {
    type Deadline: Deadline;
    fn start(&self) -> Self::Deadline;
    fn elapsed(&self, d: &Self::Deadline) -> Option<Duration>;
}

/// No time limit, no measurements.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTimer;

impl ProbeTimer for NoTimer {
    type Deadline = NoDeadline;

    fn start(&self) -> NoDeadline {
        NoDeadline
    }

    fn elapsed(&self, _: &NoDeadline) -> Option<Duration> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    HighestTheta,
    LowestK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// k = 1, 2, ... until the first feasible probe.
    #[default]
    Up,
    /// k = |Λ|, |Λ|-1, ... until the first infeasible probe.
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Feasible,
    Infeasible,
    Unknown,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Feasible => "feasible",
            Outcome::Infeasible => "infeasible",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub k: usize,
    pub theta: Threshold,
    pub outcome: Outcome,
    pub elapsed: Option<Duration>,
    pub refinement: Option<SortRefinement>,
}

impl Probe {
    pub fn is_feasible(&self) -> bool {
        self.refinement.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub mode: SearchMode,
    /// In execution order.
    pub probes: Vec<Probe>,
}

impl SearchReport {
    /// The last feasible probe.
    pub fn best_probe(&self) -> Option<&Probe> {
        self.probes.iter().rev().find(|p| p.is_feasible())
    }

    pub fn best(&self) -> Option<&SortRefinement> {
        self.best_probe().and_then(|p| p.refinement.as_ref())
    }

    pub fn best_k(&self) -> Option<usize> {
        self.best_probe().map(|p| p.k)
    }

    pub fn best_theta(&self) -> Option<&Threshold> {
        self.best_probe().map(|p| &p.theta)
    }

    /// Whether the search stopped on a timed-out probe.
    pub fn timed_out(&self) -> bool {
        self.probes.last().is_some_and(|p| p.outcome == Outcome::Unknown)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("k must be at least 1")]
    ZeroSorts,
    #[error("threshold step must be positive")]
    ZeroStep,
}

fn probe<T: ProbeTimer>(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    theta: &Threshold,
    opts: SolveOptions,
    timer: &T,
) -> Probe {
    let d = timer.start();
    let out = solve_native(view, table, k, theta, opts, &d);
    let elapsed = timer.elapsed(&d);
    let (outcome, refinement) = match out {
        SolveOutcome::Feasible { refinement, .. } => (Outcome::Feasible, Some(refinement)),
        SolveOutcome::Infeasible => (Outcome::Infeasible, None),
        SolveOutcome::Unknown => (Outcome::Unknown, None),
    };
    Probe { k, theta: theta.clone(), outcome, elapsed, refinement }
}

/// Raises θ from σ_r of the whole view in steps of `step`, clamped at 1,
/// until a probe with `k` sorts is infeasible or times out.
pub fn search_highest_theta<T: ProbeTimer>(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    step: &Rational,
    opts: SolveOptions,
    timer: &T,
) -> Result<SearchReport, SearchError> {
    if k == 0 {
        return Err(SearchError::ZeroSorts);
    }
    if step.is_zero() {
        return Err(SearchError::ZeroStep);
    }
    let mut theta = Threshold::new(sigma_of_table(table).value()).expect("σ lies in [0, 1]");
    let mut probes = Vec::new();
    loop {
        let p = probe(view, table, k, &theta, opts, timer);
        let go_on = p.is_feasible() && !theta.is_one();
        probes.push(p);
        if !go_on {
            break;
        }
        theta = theta.saturating_add(step);
    }
    Ok(SearchReport { mode: SearchMode::HighestTheta, probes })
}

/// Looks for the fewest sorts reaching `theta`.
pub fn search_lowest_k<T: ProbeTimer>(
    view: &StructureView,
    table: &CountTable,
    theta: &Threshold,
    direction: Direction,
    opts: SolveOptions,
    timer: &T,
) -> SearchReport {
    let l = view.signature_count();
    let mut probes = Vec::new();
    match direction {
        Direction::Up => {
            for k in 1..=l {
                let p = probe(view, table, k, theta, opts, timer);
                let stop = p.outcome != Outcome::Infeasible;
                probes.push(p);
                if stop {
                    break;
                }
            }
        }
        Direction::Down => {
            for k in (1..=l).rev() {
                let p = probe(view, table, k, theta, opts, timer);
                let stop = !p.is_feasible();
                probes.push(p);
                if stop {
                    break;
                }
            }
        }
    }
    SearchReport { mode: SearchMode::LowestK, probes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::build_count_table;
    use crate::rule::{builtin_rule, Builtin, Rule};
    use crate::testutil::{arb_matrix, uniform_rows, one_wide_row, view_from_matrix};
    use crate::view::build_view;
    use alloc::vec;
    use proptest::prelude::*;

    fn cov() -> Rule {
        builtin_rule(&Builtin::Cov).unwrap()
    }

    fn step() -> Rational {
        Rational::new(1u32.into(), 100u32.into())
    }

    fn setup(v: &StructureView, r: &Rule) -> CountTable {
        build_count_table(v, r).unwrap()
    }

    #[test]
    fn d2_highest_theta_with_two_sorts() {
        let v = build_view(&one_wide_row(3)).unwrap();
        let t = setup(&v, &cov());
        let rep = search_highest_theta(&v, &t, 2, &step(), SolveOptions::default(), &NoTimer).unwrap();
        assert_eq!(rep.best_theta(), Some(&Threshold::one()));
        assert_eq!(rep.best().unwrap().k_used(), 2);
        assert_eq!(rep.probes[0].theta, Threshold::from_fraction(2, 3).unwrap());
        // 2/3 + j/100 for j = 0..=33, then the clamped 1.
        assert_eq!(rep.probes.len(), 35);
        assert!(rep.probes.iter().all(|p| p.is_feasible()));
    }

    #[test]
    fn single_sort_stops_above_sigma() {
        let v = build_view(&one_wide_row(3)).unwrap();
        let t = setup(&v, &cov());
        let rep = search_highest_theta(&v, &t, 1, &step(), SolveOptions::default(), &NoTimer).unwrap();
        assert_eq!(rep.best_theta(), Some(&Threshold::from_fraction(2, 3).unwrap()));
        assert_eq!(rep.probes.len(), 2);
        assert_eq!(rep.probes[1].outcome, Outcome::Infeasible);
    }

    #[test]
    fn one_signature_cannot_split() {
        let v = view_from_matrix(&[vec![true, false], vec![true, false]]);
        let t = setup(&v, &cov());
        let rep = search_highest_theta(&v, &t, 2, &step(), SolveOptions::default(), &NoTimer).unwrap();
        assert_eq!(rep.best_theta(), Some(&Threshold::one()));
        assert_eq!(rep.probes.len(), 1);
    }

    #[test]
    fn bad_arguments() {
        let v = build_view(&uniform_rows(2)).unwrap();
        let t = setup(&v, &cov());
        let opts = SolveOptions::default();
        assert_eq!(search_highest_theta(&v, &t, 0, &step(), opts, &NoTimer), Err(SearchError::ZeroSorts));
        assert_eq!(search_highest_theta(&v, &t, 1, &Rational::zero(), opts, &NoTimer), Err(SearchError::ZeroStep));
    }

    #[test]
    fn lowest_k_on_one_wide_row() {
        let v = build_view(&one_wide_row(3)).unwrap();
        let t = setup(&v, &cov());
        let th = Threshold::from_fraction(9, 10).unwrap();
        for dir in [Direction::Up, Direction::Down] {
            let rep = search_lowest_k(&v, &t, &th, dir, SolveOptions::default(), &NoTimer);
            assert_eq!(rep.best_k(), Some(2), "{dir:?}");
        }
        let rep = search_lowest_k(&v, &t, &Threshold::zero(), Direction::Up, SolveOptions::default(), &NoTimer);
        assert_eq!(rep.best_k(), Some(1));
        let u = build_view(&uniform_rows(3)).unwrap();
        let tu = setup(&u, &cov());
        let rep = search_lowest_k(&u, &tu, &Threshold::one(), Direction::Up, SolveOptions::default(), &NoTimer);
        assert_eq!(rep.best_k(), Some(1));
    }

    #[test]
    fn unreachable_threshold_has_no_best() {
        // Every single-signature sub-view has only 1-cells.
        let zeros = crate::rule::parse_rule("$c=$c -> val($c)=0").unwrap();
        let v = view_from_matrix(&[vec![true, true], vec![true, false], vec![true, false]]);
        let t = setup(&v, &zeros);
        let th = Threshold::one();
        let up = search_lowest_k(&v, &t, &th, Direction::Up, SolveOptions::default(), &NoTimer);
        let down = search_lowest_k(&v, &t, &th, Direction::Down, SolveOptions::default(), &NoTimer);
        assert_eq!(up.best_k(), None);
        assert_eq!(up.probes.len(), 2);
        assert_eq!(down.best_k(), None);
        assert_eq!(down.probes.len(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn up_and_down_agree(rows in arb_matrix(6, 4), num in 0u64..=4) {
            let v = view_from_matrix(&rows);
            let th = Threshold::from_fraction(num, 4).unwrap();
            for r in [cov(), builtin_rule(&Builtin::Sim).unwrap()] {
                let t = setup(&v, &r);
                let up = search_lowest_k(&v, &t, &th, Direction::Up, SolveOptions::default(), &NoTimer);
                let down = search_lowest_k(&v, &t, &th, Direction::Down, SolveOptions::default(), &NoTimer);
                prop_assert_eq!(up.best_k(), down.best_k());
            }
        }

        #[test]
        fn highest_theta_bounds(rows in arb_matrix(6, 4), k in 1usize..=3) {
            let v = view_from_matrix(&rows);
            let t = setup(&v, &cov());
            let rep = search_highest_theta(&v, &t, k, &step(), SolveOptions::default(), &NoTimer).unwrap();
            let sigma = sigma_of_table(&t).value();
            let best = rep.best_theta().unwrap().value().clone();
            prop_assert!(best >= sigma);
            prop_assert!(best <= Rational::new(1u32.into(), 1u32.into()));
            let n = rep.probes.len();
            prop_assert!(rep.probes[..n - 1].iter().all(|p| p.is_feasible()));
        }
    }
}
