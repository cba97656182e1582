//! A BSS-machine interpreter over exact `Quad` registers.
//!
//! Every executed instruction costs one time unit except the final `Halt`.
//! Registers are addressed from 1 and the tape grows with zeros on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum Instruction {
    Add { lhs: usize, rhs: usize, dst: usize },
    Sub { lhs: usize, rhs: usize, dst: usize },
    Mul { lhs: usize, rhs: usize, dst: usize },
    /// `dst ← constants[constant]`.
    Const { constant: usize, dst: usize },
    /// Jump to `target` when register `test` is `≥ 0`, else fall through.
    Branch { test: usize, target: usize },
    Copy { src: usize, dst: usize },
    Halt,
}

impl Instruction {
    pub fn arith(op: ArithOp, lhs: usize, rhs: usize, dst: usize) -> Self {
        match op {
            ArithOp::Add => Instruction::Add { lhs, rhs, dst },
            ArithOp::Sub => Instruction::Sub { lhs, rhs, dst },
            ArithOp::Mul => Instruction::Mul { lhs, rhs, dst },
        }
    }

    fn registers(&self) -> Vec<usize> {
        match *self {
            Instruction::Add { lhs, rhs, dst }
            | Instruction::Sub { lhs, rhs, dst }
            | Instruction::Mul { lhs, rhs, dst } => vec![lhs, rhs, dst],
            Instruction::Const { dst, .. } => vec![dst],
            Instruction::Branch { test, .. } => vec![test],
            Instruction::Copy { src, dst } => vec![src, dst],
            Instruction::Halt => vec![],
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    #[serde(default)]
    constants: Vec<Quad>,
    instructions: Vec<Instruction>,
    #[serde(default = "one_output")]
    outputs: usize,
}

fn one_output() -> usize {
    1
}

/// A validated program: exactly one `Halt`, every branch and constant
/// reference in range, every register index at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProgram")]
pub struct BssProgram {
    constants: Vec<Quad>,
    instructions: Vec<Instruction>,
    /// Registers `1..=outputs` form the output.
    outputs: usize,
    #[serde(skip)]
    halt: usize,
}

impl TryFrom<RawProgram> for BssProgram {
    type Error = Error;
    fn try_from(raw: RawProgram) -> Result<Self> {
        BssProgram::new(raw.constants, raw.instructions, raw.outputs)
    }
}

impl BssProgram {
    pub fn new(constants: Vec<Quad>, instructions: Vec<Instruction>, outputs: usize) -> Result<Self> {
        let halts: Vec<usize> = instructions
            .iter()
            .enumerate()
            .filter(|(_, ins)| **ins == Instruction::Halt)
            .map(|(k, _)| k)
            .collect();
        let [halt] = halts[..] else {
            return Err(Error::Validation(format!(
                "program needs exactly one halt instruction, found {}",
                halts.len()
            )));
        };
        for (k, ins) in instructions.iter().enumerate() {
            if ins.registers().contains(&0) {
                return Err(Error::Validation(format!("instruction {k}: registers are numbered from 1")));
            }
            match *ins {
                Instruction::Branch { target, .. } if target >= instructions.len() => {
                    return Err(Error::Validation(format!("instruction {k}: branch target {target} out of range")));
                }
                Instruction::Const { constant, .. } if constant >= constants.len() => {
                    return Err(Error::Validation(format!("instruction {k}: no constant {constant}")));
                }
                _ => {}
            }
        }
        Ok(BssProgram {
            constants,
            instructions,
            outputs,
            halt,
        })
    }

    pub fn constants(&self) -> &[Quad] {
        &self.constants
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn halt_index(&self) -> usize {
        self.halt
    }
}

/// The configuration quadruple: current instruction, copy counters `i` and
/// `j`, and the register tape (`registers[0]` is `x₁`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BssConfig {
    pub instr: usize,
    pub i: u64,
    pub j: u64,
    pub registers: Vec<Quad>,
}

impl BssConfig {
    pub fn initial(input: &[Quad]) -> Self {
        BssConfig {
            instr: 0,
            i: 1,
            j: 1,
            registers: input.to_vec(),
        }
    }

    pub fn get(&self, reg: usize) -> Quad {
        self.registers.get(reg - 1).cloned().unwrap_or_default()
    }

    fn set(&mut self, reg: usize, v: Quad) {
        if self.registers.len() < reg {
            self.registers.resize(reg, Quad::zero());
        }
        self.registers[reg - 1] = v;
    }
}

/// Applies one instruction. Copy instructions advance both copy counters.
pub fn step(mut cfg: BssConfig, prog: &BssProgram) -> Result<BssConfig> {
    let ins = prog
        .instructions
        .get(cfg.instr)
        .ok_or_else(|| Error::Machine(format!("no instruction {}", cfg.instr)))?;
    let mut next = cfg.instr + 1;
    match *ins {
        Instruction::Add { lhs, rhs, dst } => cfg.set(dst, &cfg.get(lhs) + &cfg.get(rhs)),
        Instruction::Sub { lhs, rhs, dst } => cfg.set(dst, &cfg.get(lhs) - &cfg.get(rhs)),
        Instruction::Mul { lhs, rhs, dst } => cfg.set(dst, &cfg.get(lhs) * &cfg.get(rhs)),
        Instruction::Const { constant, dst } => cfg.set(dst, prog.constants[constant].clone()),
        Instruction::Branch { test, target } => {
            if cfg.get(test).signum() >= 0 {
                next = target;
            }
        }
        Instruction::Copy { src, dst } => {
            cfg.set(dst, cfg.get(src));
            cfg.i += 1;
            cfg.j += 1;
        }
        Instruction::Halt => return Err(Error::Machine("step called on the halt instruction".into())),
    }
    cfg.instr = next;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub output: Vec<Quad>,
    pub time: u64,
    pub halted: bool,
}

/// Runs from the initial configuration on `input`.
///
/// `fuel` bounds instruction fetches, the final `Halt` included, so a run of
/// time `t` needs fuel `t + 1`. On exhaustion the current output registers
/// are returned with `halted = false`.
pub fn run(prog: &BssProgram, input: &[Quad], fuel: u64) -> Result<RunResult> {
    let mut cfg = BssConfig::initial(input);
    let mut time = 0;
    let halted = loop {
        if time == fuel {
            break false;
        }
        if cfg.instr == prog.halt {
            break true;
        }
        cfg = step(cfg, prog)?;
        time += 1;
    };
    Ok(RunResult {
        output: (1..=prog.outputs).map(|r| cfg.get(r)).collect(),
        time,
        halted,
    })
}

/// `x ↦ frac(2x)` on `[0, 1)` in five steps on either branch.
pub fn doubling_program() -> BssProgram {
    use Instruction::*;
    BssProgram::new(
        vec![Quad::one()],
        vec![
            Add { lhs: 1, rhs: 1, dst: 1 },
            Const { constant: 0, dst: 2 },
            Sub { lhs: 1, rhs: 2, dst: 3 },
            Branch { test: 3, target: 5 },
            Branch { test: 2, target: 6 },
            Copy { src: 3, dst: 1 },
            Halt,
        ],
        1,
    )
    .expect("shipped program is valid")
}

/// Decides `y ∈ I_r` on input `(y, r)` with `r` a nonnegative integer.
///
/// Rejects `y ∉ [0, 1)`, then doubles `y` modulo 1 `r` times and accepts iff
/// the result is 0. Output register 1 holds 1 on accept, 0 on reject.
pub fn precision_checker_program() -> BssProgram {
    use Instruction::*;
    // r1 = z, r2 = remaining rounds, r3 = 1, r4 = scratch, r5 = 0 (never written)
    const LOOP: usize = 5;
    const ZERO_TEST: usize = 15;
    const ACCEPT: usize = 18;
    const REJECT: usize = 20;
    const HALT: usize = 21;
    BssProgram::new(
        vec![Quad::one()],
        vec![
            Const { constant: 0, dst: 3 },
            Branch { test: 1, target: 3 },
            Branch { test: 3, target: REJECT },
            Sub { lhs: 1, rhs: 3, dst: 4 },
            Branch { test: 4, target: REJECT },
            // LOOP
            Sub { lhs: 2, rhs: 3, dst: 4 },
            Branch { test: 4, target: 8 },
            Branch { test: 3, target: ZERO_TEST },
            Copy { src: 4, dst: 2 },
            Add { lhs: 1, rhs: 1, dst: 1 },
            Sub { lhs: 1, rhs: 3, dst: 4 },
            Branch { test: 4, target: 13 },
            Branch { test: 3, target: LOOP },
            Copy { src: 4, dst: 1 },
            Branch { test: 3, target: LOOP },
            // ZERO_TEST: z ≥ 0 here, so z = 0 iff −z ≥ 0
            Sub { lhs: 5, rhs: 1, dst: 4 },
            Branch { test: 4, target: ACCEPT },
            Branch { test: 3, target: REJECT },
            // ACCEPT
            Copy { src: 3, dst: 1 },
            Branch { test: 3, target: HALT },
            // REJECT
            Copy { src: 5, dst: 1 },
            Halt,
        ],
        1,
    )
    .expect("shipped program is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quad {
        s.parse().unwrap()
    }

    fn single(ins: Instruction, regs: &[&str]) -> BssConfig {
        let prog = BssProgram::new(vec![], vec![ins, Instruction::Halt], 1).unwrap();
        let cfg = BssConfig::initial(&regs.iter().map(|s| q(s)).collect::<Vec<_>>());
        step(cfg, &prog).unwrap()
    }

    #[test]
    fn instruction_semantics() {
        let cfg = single(Instruction::Add { lhs: 1, rhs: 2, dst: 3 }, &["1/2", "1/2"]);
        assert_eq!(cfg.get(3), Quad::one());
        assert_eq!(cfg.instr, 1);

        let cfg = single(Instruction::Branch { test: 1, target: 1 }, &["-1 + sqrt2"]);
        assert_eq!(cfg.instr, 1);
        let prog = BssProgram::new(
            vec![],
            vec![Instruction::Branch { test: 1, target: 2 }, Instruction::Halt, Instruction::Halt],
            1,
        );
        assert!(prog.is_err());

        let cfg = single(Instruction::Copy { src: 1, dst: 7 }, &["(3 + 4*sqrt2)/4"]);
        assert_eq!(cfg.get(7), cfg.get(1));
        assert_eq!(cfg.registers.len(), 7);
        assert_eq!(cfg.get(4), Quad::zero());
        assert_eq!((cfg.i, cfg.j), (2, 2));
    }

    #[test]
    fn branch_on_negative_falls_through() {
        let prog = BssProgram::new(
            vec![],
            vec![Instruction::Branch { test: 1, target: 0 }, Instruction::Halt],
            1,
        )
        .unwrap();
        let cfg = step(BssConfig::initial(&[q("1 - sqrt2")]), &prog).unwrap();
        assert_eq!(cfg.instr, 1);
    }

    #[test]
    fn doubling() {
        let prog = doubling_program();
        let r = run(&prog, &[q("3/8")], 100).unwrap();
        assert_eq!(r.output, vec![q("3/4")]);
        assert!(r.halted);
        assert_eq!(r.time, 5);
        assert_eq!(run(&prog, &[q("3/4")], 100).unwrap().time, 5);
        assert_eq!(run(&prog, &[q("3/4")], 100).unwrap().output, vec![q("1/2")]);
    }

    #[test]
    fn fuel() {
        let prog = doubling_program();
        let none = run(&prog, &[q("1/4")], 0).unwrap();
        assert!(!none.halted);
        assert_eq!(none.time, 0);
        let short = run(&prog, &[q("3/8")], 5).unwrap();
        assert!(!short.halted);
        assert!(run(&prog, &[q("3/8")], 6).unwrap().halted);
        let trivial = BssProgram::new(vec![], vec![Instruction::Halt], 0).unwrap();
        assert!(!run(&trivial, &[], 0).unwrap().halted);
        assert!(run(&trivial, &[], 1).unwrap().halted);
    }

    #[test]
    fn precision_checker() {
        let prog = precision_checker_program();
        let r = run(&prog, &[q("3/8"), Quad::from_int(4)], 1000).unwrap();
        assert_eq!(r.output, vec![Quad::one()]);
        let r = run(&prog, &[q("3/8"), Quad::from_int(2)], 1000).unwrap();
        assert_eq!(r.output, vec![Quad::zero()]);
        for bad in ["-1/4", "1", "sqrt2/4"] {
            let r = run(&prog, &[q(bad), Quad::from_int(8)], 1000).unwrap();
            assert!(r.halted);
            assert_eq!(r.output, vec![Quad::zero()], "{bad}");
        }
    }

    #[test]
    fn json() {
        let text = r#"{"constants": ["1"], "instructions": [
            {"op": "const", "constant": 0, "dst": 2},
            {"op": "add", "lhs": 1, "rhs": 2, "dst": 1},
            {"op": "halt"}]}"#;
        let prog: BssProgram = serde_json::from_str(text).unwrap();
        assert_eq!(prog.outputs(), 1);
        assert_eq!(run(&prog, &[q("sqrt2")], 10).unwrap().output, vec![q("(1 + 1*sqrt2)")]);
        let back: BssProgram = serde_json::from_str(&serde_json::to_string(&prog).unwrap()).unwrap();
        assert_eq!(back, prog);
        let no_halt = r#"{"instructions": [{"op": "copy", "src": 1, "dst": 2}]}"#;
        assert!(serde_json::from_str::<BssProgram>(no_halt).is_err());
        let zero_reg = r#"{"instructions": [{"op": "copy", "src": 0, "dst": 2}, {"op": "halt"}]}"#;
        assert!(serde_json::from_str::<BssProgram>(zero_reg).is_err());
    }
}
