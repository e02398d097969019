//! Parameter sweeps evaluated on a bounded thread pool.

use rayon::prelude::*;

use crate::emit::Table;
use crate::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub values: Vec<f64>,
}

impl Sweep {
    /// Parses `name=start:stop:count` into `count` evenly spaced values,
    /// sorted ascending.
    pub fn parse(text: &str) -> CliResult<Sweep> {
        let bad = || CliError::Usage(format!("sweep `{text}` is not of the form name=start:stop:count"));
        let (name, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if name.is_empty() || parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let mut values: Vec<f64> = if count == 1 {
            vec![start]
        } else {
            (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect()
        };
        if let Some(last) = values.last_mut() {
            if count > 1 {
                *last = stop;
            }
        }
        values.sort_by(f64::total_cmp);
        Ok(Sweep { name: name.trim().to_string(), values })
    }
}

/// Thread cap from WAVEMIX_THREADS; unset or invalid means rayon's default.
pub fn thread_cap() -> Option<usize> {
    std::env::var("WAVEMIX_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Evaluates `point` at every sweep value in parallel and concatenates the
/// tables in sweep order, each prefixed with the swept value.
pub fn run_sweep<F>(sweep: &Sweep, point: F) -> CliResult<Table>
where
    F: Fn(f64) -> CliResult<Table> + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let results: Vec<CliResult<Table>> = pool.install(|| sweep.values.par_iter().map(|&x| point(x)).collect());
    let mut tables = Vec::with_capacity(results.len());
    for (r, &x) in results.into_iter().zip(&sweep.values) {
        tables.push(r?.with_leading(&sweep.name, x));
    }
    Ok(Table::concat(tables).expect("a sweep has at least one value"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emit::Cell;

    #[test]
    fn parses_and_sorts() {
        let s = Sweep::parse("rabi_a=1.0:0.1:10").unwrap();
        assert_eq!(s.name, "rabi_a");
        assert_eq!(s.values.len(), 10);
        assert_eq!(s.values[0], 0.1);
        assert_eq!(s.values[9], 1.0);
        assert!(s.values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_point() {
        assert_eq!(Sweep::parse("delta=0.5:2:1").unwrap().values, vec![0.5]);
    }

    #[test]
    fn malformed_sweeps_are_usage_errors() {
        for bad in ["rabi_a", "rabi_a=1:2", "=1:2:3", "x=a:1:2", "x=0:1:0", "x=0:inf:3"] {
            assert!(matches!(Sweep::parse(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn results_come_back_in_sweep_order() {
        let s = Sweep::parse("x=0:1:33").unwrap();
        let t = run_sweep(&s, |x| {
            let mut t = Table::new(&["y"]);
            t.push(vec![Cell::Float(2.0 * x)]);
            Ok(t)
        })
        .unwrap();
        for (row, x) in t.rows.iter().zip(&s.values) {
            assert_eq!(row, &vec![Cell::Float(*x), Cell::Float(2.0 * x)]);
        }
    }

    #[test]
    fn first_failure_in_order_is_reported() {
        let s = Sweep::parse("x=0:1:5").unwrap();
        let err = run_sweep(&s, |x| if x > 0.3 { Err(CliError::Usage(format!("{x}"))) } else { Ok(Table::new(&[])) });
        match err {
            Err(CliError::Usage(m)) => assert_eq!(m, "0.5"),
            other => panic!("{other:?}"),
        }
    }
}
