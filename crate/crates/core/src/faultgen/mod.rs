//! Fault-injection corpus generation.
//!
//! Two complementary sources of labelled failure data:
//!
//! * [`program`], [`mutate`], [`synth`]: a micro-language whose programs
//!   are mutated into multi-fault versions, executed differentially
//!   against a test suite, and labelled with per-failure root causes.
//! * [`synthetic`]: direct sampling of coverage records with planted
//!   fault paths, for experiments that need many versions with controlled
//!   fault counts and noise.

pub mod mutate;
pub mod program;
pub mod synth;
pub mod synthetic;

pub use mutate::{
    apply, apply_all, known_vars, mutation_pool, FaultType, Mutation, MutationKind, OperandSlot,
};
pub use program::{run, ArithOp, Execution, Operand, Program, RelOp, Stmt};
pub use synth::{label_oracle, synthesize_version, FaultyVersion, LabeledVersion};
pub use synthetic::sample_synthetic_spectrum;

/// A median-of-three routine used throughout the tests and the README
/// walkthrough: eleven numbered lines (IN, SET, IF, and ELSE count; END and
/// OUT do not) across four arithmetic paths.
pub const EXAMPLE_PROGRAM: &str = "\
IN x y z
IF x < y
  IF y < z
    SET m = y + 0
  ELSE
    SET m = z + 0
  END
ELSE
  IF x < z
    SET m = x + 0
  ELSE
    SET m = z + 0
  END
END
OUT m
";

pub fn example_program() -> Program {
    Program::parse(EXAMPLE_PROGRAM).expect("the example program parses")
}

/// Ten inputs that exercise all four paths of [`EXAMPLE_PROGRAM`].
pub fn example_suite() -> Vec<Vec<i64>> {
    vec![
        vec![1, 2, 4],
        vec![9, 4, 2],
        vec![3, 1, 7],
        vec![5, 2, 9],
        vec![2, 6, 5],
        vec![8, 3, 5],
        vec![4, 2, 6],
        vec![1, 4, 2],
        vec![7, 1, 6],
        vec![6, 3, 8],
    ]
}
