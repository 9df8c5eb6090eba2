//! Coverage matrices and program spectra.
//!
//! A [`CoverageRecord`] is the raw input of the whole pipeline: which
//! statements each test executed, plus the pass/fail verdict of every test.
//! A [`Spectrum`] condenses a record (restricted to a chosen
//! [`SuiteSelection`]) into the four per-statement counters used by every
//! risk evaluation formula:
//!
//! * `n_cf` / `n_uf` — failed tests that did / did not cover the statement,
//! * `n_cs` / `n_us` — successful tests that did / did not cover it.
//!
//! Per statement, `n_cf + n_uf` equals the number of failed tests in the
//! selection and `n_cs + n_us` the number of successful ones, so the derived
//! totals `n_c = n_cf + n_cs`, `n_u = n_uf + n_us` and `n = n_f + n_s` are
//! available without extra bookkeeping.

use crate::error::{Error, Result};

/// Outcome of one test run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Boolean coverage of `num_statements x num_tests` plus one verdict per test.
///
/// Immutable after construction; statement and test indices are 0-based
/// internally. The text format (see [`CoverageRecord::parse`]) numbers tests
/// and statements from 1.
#[derive(Debug, Clone)]
pub struct CoverageRecord {
    num_statements: usize,
    num_tests: usize,
    /// Row-major by statement: `covers[s * num_tests + t]`.
    covers: Vec<bool>,
    verdicts: Vec<Verdict>,
}

impl CoverageRecord {
    /// Builds a record from a statement-major bit matrix.
    pub fn new(
        num_statements: usize,
        num_tests: usize,
        covers: Vec<bool>,
        verdicts: Vec<Verdict>,
    ) -> Result<Self> {
        if num_statements == 0 {
            return Err(Error::domain("coverage record needs at least one statement"));
        }
        if num_tests == 0 {
            return Err(Error::domain("coverage record needs at least one test"));
        }
        if covers.len() != num_statements * num_tests {
            return Err(Error::domain(format!(
                "coverage matrix has {} cells, expected {}",
                covers.len(),
                num_statements * num_tests
            )));
        }
        if verdicts.len() != num_tests {
            return Err(Error::domain(format!(
                "got {} verdicts for {} tests",
                verdicts.len(),
                num_tests
            )));
        }
        Ok(CoverageRecord {
            num_statements,
            num_tests,
            covers,
            verdicts,
        })
    }

    /// Parses the plain-text coverage format.
    ///
    /// Line 1 is the header `statements=<J> tests=<P>`, followed by one line
    /// per test: `J` characters of `0`/`1`, a single space, and `P` or `F`.
    /// Row `i` is test `t_{i+1}`; column `j` is statement `s_{j+1}`. Lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());

        let (header_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty coverage file"))?;
        let (num_statements, num_tests) = parse_header(header_no, header)?;
        if num_statements == 0 {
            return Err(Error::parse(header_no, "no statements"));
        }
        if num_tests == 0 {
            return Err(Error::parse(header_no, "no tests"));
        }

        let mut covers = vec![false; num_statements * num_tests];
        let mut verdicts = Vec::with_capacity(num_tests);
        for t in 0..num_tests {
            let (line_no, line) = lines.next().ok_or_else(|| {
                Error::parse(header_no, format!("expected {num_tests} test rows, found {t}"))
            })?;
            let line = line.trim();
            let (bits, verdict) = line.split_once(' ').ok_or_else(|| {
                Error::parse(line_no, "expected `<bits> <P|F>`")
            })?;
            if bits.len() != num_statements {
                return Err(Error::parse(
                    line_no,
                    format!("row has {} columns, expected {num_statements}", bits.len()),
                ));
            }
            for (s, ch) in bits.chars().enumerate() {
                match ch {
                    '1' => covers[s * num_tests + t] = true,
                    '0' => {}
                    other => {
                        return Err(Error::parse(
                            line_no,
                            format!("invalid coverage character {other:?}"),
                        ))
                    }
                }
            }
            verdicts.push(match verdict.trim() {
                "P" => Verdict::Pass,
                "F" => Verdict::Fail,
                other => {
                    return Err(Error::parse(
                        line_no,
                        format!("invalid verdict {other:?}, expected P or F"),
                    ))
                }
            });
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(line_no, "unexpected data after last test row"));
        }
        CoverageRecord::new(num_statements, num_tests, covers, verdicts)
    }

    pub fn num_statements(&self) -> usize {
        self.num_statements
    }

    pub fn num_tests(&self) -> usize {
        self.num_tests
    }

    pub fn covers(&self, statement: usize, test: usize) -> bool {
        self.covers[statement * self.num_tests + test]
    }

    pub fn verdict(&self, test: usize) -> Verdict {
        self.verdicts[test]
    }

    /// 0-based ids of failed tests, in record order.
    pub fn failed_ids(&self) -> Vec<usize> {
        (0..self.num_tests)
            .filter(|&t| self.verdicts[t] == Verdict::Fail)
            .collect()
    }

    /// 0-based ids of passed tests, in record order.
    pub fn passed_ids(&self) -> Vec<usize> {
        (0..self.num_tests)
            .filter(|&t| self.verdicts[t] == Verdict::Pass)
            .collect()
    }

    /// Renders the record in the text format accepted by [`CoverageRecord::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "statements={} tests={}\n",
            self.num_statements, self.num_tests
        );
        for t in 0..self.num_tests {
            for s in 0..self.num_statements {
                out.push(if self.covers(s, t) { '1' } else { '0' });
            }
            out.push(' ');
            out.push(match self.verdicts[t] {
                Verdict::Pass => 'P',
                Verdict::Fail => 'F',
            });
            out.push('\n');
        }
        out
    }
}

fn parse_header(line_no: usize, header: &str) -> Result<(usize, usize)> {
    let mut statements = None;
    let mut tests = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("malformed header field {field:?}")))?;
        let value: usize = value
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid number in {field:?}")))?;
        match key {
            "statements" => statements = Some(value),
            "tests" => tests = Some(value),
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown header field {other:?}"),
                ))
            }
        }
    }
    match (statements, tests) {
        (Some(s), Some(t)) => Ok((s, t)),
        _ => Err(Error::parse(
            line_no,
            "header must be `statements=<J> tests=<P>`",
        )),
    }
}

/// The subset of tests a spectrum is computed over.
///
/// Construction validates ids against a concrete record: every id must be in
/// range, carry the matching verdict, and appear at most once per side.
#[derive(Debug, Clone)]
pub struct SuiteSelection {
    failed: Vec<usize>,
    passed: Vec<usize>,
}

impl SuiteSelection {
    pub fn new(cov: &CoverageRecord, failed: Vec<usize>, passed: Vec<usize>) -> Result<Self> {
        check_side(cov, &failed, Verdict::Fail)?;
        check_side(cov, &passed, Verdict::Pass)?;
        Ok(SuiteSelection { failed, passed })
    }

    /// Selects every test in the record.
    pub fn full(cov: &CoverageRecord) -> Self {
        SuiteSelection {
            failed: cov.failed_ids(),
            passed: cov.passed_ids(),
        }
    }

    pub fn failed(&self) -> &[usize] {
        &self.failed
    }

    pub fn passed(&self) -> &[usize] {
        &self.passed
    }
}

fn check_side(cov: &CoverageRecord, ids: &[usize], want: Verdict) -> Result<()> {
    let mut seen = vec![false; cov.num_tests()];
    for &t in ids {
        if t >= cov.num_tests() {
            return Err(Error::domain(format!(
                "test id {} out of range (suite has {} tests)",
                t + 1,
                cov.num_tests()
            )));
        }
        if cov.verdict(t) != want {
            return Err(Error::domain(format!(
                "test {} has the wrong verdict for this selection side",
                t + 1
            )));
        }
        if seen[t] {
            return Err(Error::domain(format!("duplicate test id {}", t + 1)));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Per-statement spectrum counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectrumRow {
    pub n_cf: u32,
    pub n_uf: u32,
    pub n_cs: u32,
    pub n_us: u32,
}

impl SpectrumRow {
    /// Tests covering the statement, regardless of verdict.
    pub fn n_c(&self) -> u32 {
        self.n_cf + self.n_cs
    }

    /// Tests not covering the statement.
    pub fn n_u(&self) -> u32 {
        self.n_uf + self.n_us
    }
}

/// Spectrum of a coverage record under one suite selection.
#[derive(Debug, Clone)]
pub struct Spectrum {
    rows: Vec<SpectrumRow>,
    n_f: u32,
    n_s: u32,
}

impl Spectrum {
    pub fn rows(&self) -> &[SpectrumRow] {
        &self.rows
    }

    pub fn row(&self, statement: usize) -> &SpectrumRow {
        &self.rows[statement]
    }

    pub fn num_statements(&self) -> usize {
        self.rows.len()
    }

    /// Failed tests in the selection.
    pub fn n_f(&self) -> u32 {
        self.n_f
    }

    /// Successful tests in the selection.
    pub fn n_s(&self) -> u32 {
        self.n_s
    }

    /// Total tests in the selection.
    pub fn n(&self) -> u32 {
        self.n_f + self.n_s
    }

    /// Builds a spectrum directly from rows; used by tests and enumeration
    /// harnesses that want spectra no concrete coverage matrix produced.
    pub fn from_rows(rows: Vec<SpectrumRow>, n_f: u32, n_s: u32) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::domain("spectrum needs at least one statement"));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.n_cf + r.n_uf != n_f || r.n_cs + r.n_us != n_s {
                return Err(Error::domain(format!(
                    "row {} is inconsistent with suite totals",
                    i + 1
                )));
            }
        }
        Ok(Spectrum { rows, n_f, n_s })
    }
}

/// Counts the four spectrum components for every statement over `sel`.
///
/// `sel` is re-validated against `cov`, so mixing a selection with a record
/// it was not built from is caught here rather than producing bad counts.
pub fn compute_spectrum(cov: &CoverageRecord, sel: &SuiteSelection) -> Result<Spectrum> {
    check_side(cov, sel.failed(), Verdict::Fail)?;
    check_side(cov, sel.passed(), Verdict::Pass)?;
    let n_f = sel.failed().len() as u32;
    let n_s = sel.passed().len() as u32;
    let rows = (0..cov.num_statements())
        .map(|s| {
            let n_cf = sel.failed().iter().filter(|&&t| cov.covers(s, t)).count() as u32;
            let n_cs = sel.passed().iter().filter(|&&t| cov.covers(s, t)).count() as u32;
            SpectrumRow {
                n_cf,
                n_uf: n_f - n_cf,
                n_cs,
                n_us: n_s - n_cs,
            }
        })
        .collect();
    Ok(Spectrum { rows, n_f, n_s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata::{motivating_coverage, MOTIVATING_COVERAGE};

    #[test]
    fn parses_the_motivating_record() {
        let cov = motivating_coverage();
        assert_eq!(cov.num_statements(), 11);
        assert_eq!(cov.num_tests(), 10);
        // t1 covers s1..s4 only.
        assert!(cov.covers(0, 0) && cov.covers(3, 0));
        assert!(!cov.covers(4, 0));
        assert_eq!(cov.failed_ids(), vec![2, 3, 4, 6, 7, 9]);
        assert_eq!(cov.passed_ids(), vec![0, 1, 5, 8]);
    }

    #[test]
    fn round_trips_through_text() {
        let cov = motivating_coverage();
        let cov2 = CoverageRecord::parse(&cov.to_text()).unwrap();
        assert_eq!(cov2.to_text(), cov.to_text());
    }

    #[test]
    fn full_suite_spectrum_matches_known_counts() {
        let cov = motivating_coverage();
        let spec = compute_spectrum(&cov, &SuiteSelection::full(&cov)).unwrap();
        assert_eq!(spec.n_f(), 6);
        assert_eq!(spec.n_s(), 4);
        assert_eq!(spec.n(), 10);
        // s3 is covered by t1, t5, t8: one pass, two fails.
        assert_eq!(
            *spec.row(2),
            SpectrumRow { n_cf: 2, n_uf: 4, n_cs: 1, n_us: 3 }
        );
        // s9 is covered exactly by the four fails of the second fault.
        assert_eq!(
            *spec.row(8),
            SpectrumRow { n_cf: 4, n_uf: 2, n_cs: 0, n_us: 4 }
        );
        assert_eq!(spec.row(8).n_c(), 4);
        assert_eq!(spec.row(8).n_u(), 6);
    }

    #[test]
    fn single_failure_selection_counts() {
        let cov = motivating_coverage();
        let sel = SuiteSelection::new(&cov, vec![4], cov.passed_ids()).unwrap();
        let spec = compute_spectrum(&cov, &sel).unwrap();
        assert_eq!(spec.n_f(), 1);
        // s5 is covered by t5 and by no passed test.
        assert_eq!(
            *spec.row(4),
            SpectrumRow { n_cf: 1, n_uf: 0, n_cs: 0, n_us: 4 }
        );
    }

    #[test]
    fn selection_rejects_wrong_verdict_and_out_of_range() {
        let cov = motivating_coverage();
        assert!(SuiteSelection::new(&cov, vec![0], vec![]).is_err());
        assert!(SuiteSelection::new(&cov, vec![2], vec![99]).is_err());
        assert!(SuiteSelection::new(&cov, vec![2, 2], vec![]).is_err());
    }

    #[test]
    fn mismatched_selection_is_caught_at_spectrum_time() {
        let cov = motivating_coverage();
        let sel = SuiteSelection::new(&cov, vec![2], vec![0]).unwrap();
        let tiny = CoverageRecord::parse("statements=1 tests=1\n1 F\n").unwrap();
        assert!(compute_spectrum(&tiny, &sel).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = CoverageRecord::parse("statements=2 tests=1\n10\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = CoverageRecord::parse("statements=2 tests=1\n101 F\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = CoverageRecord::parse("statements=2 tests=1\n10 X\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = CoverageRecord::parse("statements=0 tests=0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn comment_lines_are_ignored() {
        assert!(MOTIVATING_COVERAGE.contains('#'));
        assert!(CoverageRecord::parse(MOTIVATING_COVERAGE).is_ok());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let mut text = String::from("statements=2 tests=3\n10 P\n");
        assert!(CoverageRecord::parse(&text).is_err());
        text.push_str("01 F\n11 P\n");
        assert!(CoverageRecord::parse(&text).is_ok());
        text.push_str("00 P\n");
        assert!(CoverageRecord::parse(&text).is_err());
    }
}
