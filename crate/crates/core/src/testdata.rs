//! Shared fixture: the two-fault example program whose suite of ten tests
//! exercises every module. Tests t3, t4, t7, t10 fail because of one fault
//! (statement s9) and t5, t8 because of another (statement s6).

use crate::coverage::CoverageRecord;

pub const MOTIVATING_COVERAGE: &str = "\
statements=11 tests=10
# rows are tests t1..t10, columns statements s1..s11
11110000000 P
11000011011 P
11000011100 F
11000011100 F
11101100000 F
11000011011 P
11000011100 F
11101100000 F
11000011011 P
11000011100 F
";

/// Fault labels for the six failed tests: `<test_id> <fault_id>`.
pub const MOTIVATING_ORACLE: &str = "\
5 0
8 0
3 1
4 1
7 1
10 1
";

pub fn motivating_coverage() -> CoverageRecord {
    CoverageRecord::parse(MOTIVATING_COVERAGE).unwrap()
}
