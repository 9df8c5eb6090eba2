//! Single-statement mutations over the micro-language.
//!
//! Assignment faults edit a SET line in place; predicate faults edit an IF
//! line or drop its ELSE arm. No mutation adds, removes, or renumbers
//! coverage columns, so every variant of a program shares the base
//! program's statement universe.

use crate::error::{Error, Result};
use crate::faultgen::program::{ArithOp, Operand, Program, RelOp, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperandSlot {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MutationKind {
    /// Replaces a literal operand of a SET line.
    ConstantChange { slot: OperandSlot, new_value: i64 },
    /// Replaces the arithmetic operator of a SET line.
    OperatorSwap { new_op: ArithOp },
    /// Replaces a variable operand of a SET line.
    VariableSubstitution { slot: OperandSlot, new_var: String },
    /// Flips an IF condition to its complement.
    RelationalNegation,
    /// Replaces an IF comparison with a non-complementary one.
    RelationalSwap { new_op: RelOp },
    /// Removes the whole ELSE arm of an IF.
    ElseDeletion,
}

impl MutationKind {
    pub fn is_assignment_fault(&self) -> bool {
        matches!(
            self,
            MutationKind::ConstantChange { .. }
                | MutationKind::OperatorSwap { .. }
                | MutationKind::VariableSubstitution { .. }
        )
    }

    pub fn is_predicate_fault(&self) -> bool {
        !self.is_assignment_fault()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    /// Coverage column of the edited line.
    pub statement: usize,
    pub kind: MutationKind,
}

/// Fault class of a version, derived from the mutations it carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FaultType {
    Assignment,
    Predicate,
    Hybrid,
}

impl FaultType {
    pub fn classify(mutations: &[Mutation]) -> Option<FaultType> {
        let assignment = mutations.iter().any(|m| m.kind.is_assignment_fault());
        let predicate = mutations.iter().any(|m| m.kind.is_predicate_fault());
        match (assignment, predicate) {
            (true, false) => Some(FaultType::Assignment),
            (false, true) => Some(FaultType::Predicate),
            (true, true) => Some(FaultType::Hybrid),
            (false, false) => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FaultType::Assignment => "TypeA",
            FaultType::Predicate => "TypeP",
            FaultType::Hybrid => "TypeH",
        }
    }

    pub fn parse(input: &str) -> Option<FaultType> {
        match input.trim() {
            "TypeA" => Some(FaultType::Assignment),
            "TypeP" => Some(FaultType::Predicate),
            "TypeH" => Some(FaultType::Hybrid),
            _ => None,
        }
    }
}

impl std::fmt::Display for FaultType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn walk<'a>(body: &'a [Stmt], visit: &mut impl FnMut(&'a Stmt)) {
    for stmt in body {
        visit(stmt);
        if let Stmt::If { then_body, else_arm, .. } = stmt {
            walk(then_body, visit);
            if let Some(arm) = else_arm {
                walk(&arm.body, visit);
            }
        }
    }
}

/// All variables the program mentions, in first-appearance order.
pub fn known_vars(program: &Program) -> Vec<String> {
    fn note(vars: &mut Vec<String>, name: &str) {
        if !vars.iter().any(|v| v == name) {
            vars.push(name.to_string());
        }
    }
    fn note_operand(vars: &mut Vec<String>, operand: &Operand) {
        if let Operand::Var(name) = operand {
            note(vars, name);
        }
    }
    let mut vars: Vec<String> = Vec::new();
    walk(program.body(), &mut |stmt| match stmt {
        Stmt::In { vars: names, .. } => {
            for name in names {
                note(&mut vars, name);
            }
        }
        Stmt::Set { target, left, right, .. } => {
            note(&mut vars, target);
            note_operand(&mut vars, left);
            note_operand(&mut vars, right);
        }
        Stmt::If { left, right, .. } => {
            note_operand(&mut vars, left);
            note_operand(&mut vars, right);
        }
        Stmt::Out { value } => note_operand(&mut vars, value),
    });
    vars
}

/// Enumerates every applicable mutation, in statement order and a fixed
/// kind order within each statement, so a pool index is a stable name for
/// a fault.
pub fn mutation_pool(program: &Program) -> Vec<Mutation> {
    let vars = known_vars(program);
    let mut pool = Vec::new();
    walk(program.body(), &mut |stmt| match stmt {
        Stmt::Set { id, left, op, right, .. } => {
            let slots = [(OperandSlot::Left, left), (OperandSlot::Right, right)];
            for (slot, operand) in slots {
                if let Operand::Const(c) = operand {
                    for new_value in [c.wrapping_add(1), c.wrapping_sub(1)] {
                        pool.push(Mutation {
                            statement: *id,
                            kind: MutationKind::ConstantChange { slot, new_value },
                        });
                    }
                }
            }
            for new_op in ArithOp::ALL {
                if new_op != *op {
                    pool.push(Mutation {
                        statement: *id,
                        kind: MutationKind::OperatorSwap { new_op },
                    });
                }
            }
            for (slot, operand) in slots {
                if let Operand::Var(name) = operand {
                    for other in &vars {
                        if other != name {
                            pool.push(Mutation {
                                statement: *id,
                                kind: MutationKind::VariableSubstitution {
                                    slot,
                                    new_var: other.clone(),
                                },
                            });
                        }
                    }
                }
            }
        }
        Stmt::If { id, op, else_arm, .. } => {
            pool.push(Mutation { statement: *id, kind: MutationKind::RelationalNegation });
            for new_op in RelOp::ALL {
                if new_op != *op && new_op != op.negated() {
                    pool.push(Mutation {
                        statement: *id,
                        kind: MutationKind::RelationalSwap { new_op },
                    });
                }
            }
            if else_arm.is_some() {
                pool.push(Mutation { statement: *id, kind: MutationKind::ElseDeletion });
            }
        }
        _ => {}
    });
    pool
}

fn pick_slot<'a>(
    slot: OperandSlot,
    left: &'a mut Operand,
    right: &'a mut Operand,
) -> &'a mut Operand {
    match slot {
        OperandSlot::Left => left,
        OperandSlot::Right => right,
    }
}

fn mutate_stmt(stmt: &mut Stmt, mutation: &Mutation) -> Result<()> {
    let misapplied = |what: &str| {
        Err(Error::generation(format!(
            "statement {} {what}",
            mutation.statement + 1
        )))
    };
    match (stmt, &mutation.kind) {
        (Stmt::Set { left, right, .. }, MutationKind::ConstantChange { slot, new_value }) => {
            let target = pick_slot(*slot, left, right);
            match target {
                Operand::Const(c) if *c != *new_value => *target = Operand::Const(*new_value),
                Operand::Const(_) => return misapplied("already holds that constant"),
                Operand::Var(_) => return misapplied("has a variable in that slot"),
            }
        }
        (Stmt::Set { op, .. }, MutationKind::OperatorSwap { new_op }) => {
            if op == new_op {
                return misapplied("already uses that operator");
            }
            *op = *new_op;
        }
        (Stmt::Set { left, right, .. }, MutationKind::VariableSubstitution { slot, new_var }) => {
            let target = pick_slot(*slot, left, right);
            match target {
                Operand::Var(v) if v != new_var => *target = Operand::Var(new_var.clone()),
                Operand::Var(_) => return misapplied("already reads that variable"),
                Operand::Const(_) => return misapplied("has a constant in that slot"),
            }
        }
        (Stmt::If { op, .. }, MutationKind::RelationalNegation) => *op = op.negated(),
        (Stmt::If { op, .. }, MutationKind::RelationalSwap { new_op }) => {
            if op == new_op {
                return misapplied("already uses that comparison");
            }
            *op = *new_op;
        }
        (Stmt::If { else_arm, .. }, MutationKind::ElseDeletion) => {
            if else_arm.take().is_none() {
                return misapplied("has no ELSE arm to delete");
            }
        }
        (Stmt::Set { .. }, _) => return misapplied("is an assignment, not a predicate"),
        (Stmt::If { .. }, _) => return misapplied("is a predicate, not an assignment"),
        _ => return misapplied("cannot be mutated"),
    }
    Ok(())
}

fn apply_in(body: &mut [Stmt], mutation: &Mutation) -> Result<bool> {
    for stmt in body {
        if stmt.id() == Some(mutation.statement) {
            mutate_stmt(stmt, mutation)?;
            return Ok(true);
        }
        if let Stmt::If { then_body, else_arm, .. } = stmt {
            if apply_in(then_body, mutation)? {
                return Ok(true);
            }
            if let Some(arm) = else_arm {
                if arm.id == mutation.statement {
                    return Err(Error::generation(format!(
                        "statement {} is an ELSE marker and cannot be mutated",
                        mutation.statement + 1
                    )));
                }
                if apply_in(&mut arm.body, mutation)? {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Applies one mutation, leaving the input program untouched.
pub fn apply(program: &Program, mutation: &Mutation) -> Result<Program> {
    let mut mutated = program.clone();
    if !apply_in(&mut mutated.body, mutation)? {
        return Err(Error::generation(format!(
            "no statement {} in this program",
            mutation.statement + 1
        )));
    }
    Ok(mutated)
}

/// Applies a sequence of mutations in order.
pub fn apply_all(program: &Program, mutations: &[Mutation]) -> Result<Program> {
    mutations.iter().try_fold(program.clone(), |p, m| apply(&p, m))
}
