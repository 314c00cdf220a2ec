//! Adaptive measurement schedules.
//!
//! Step `i` measures an original qubit in `X` or `Y`, chosen from the
//! outcomes of the earlier steps. A rule maps outcome prefixes to axes; the
//! longest key that is a prefix of the realized outcome string wins, so `""`
//! acts as the default.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pauli::Axis;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleStep {
    /// 0-based qubit of the initial register.
    pub qubit: usize,
    pub basis: BTreeMap<String, Axis>,
}

impl ScheduleStep {
    pub fn fixed(qubit: usize, axis: Axis) -> Self {
        ScheduleStep { qubit, basis: BTreeMap::from([(String::new(), axis)]) }
    }

    pub fn axis_for(&self, prefix: &str) -> Result<Axis> {
        self.basis
            .iter()
            .filter(|(k, _)| prefix.starts_with(k.as_str()))
            .max_by_key(|(k, _)| k.len())
            .map(|(_, a)| *a)
            .ok_or_else(|| Error::invalid(format!("no basis rule for qubit {} after outcomes {prefix:?}", self.qubit + 1)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementSchedule {
    steps: Vec<ScheduleStep>,
}

impl MeasurementSchedule {
    pub fn new(steps: Vec<ScheduleStep>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &steps {
            if !seen.insert(s.qubit) {
                return Err(Error::invalid(format!("qubit {} is measured twice", s.qubit + 1)));
            }
            for (k, a) in &s.basis {
                if !matches!(a, Axis::X | Axis::Y) {
                    return Err(Error::invalid(format!("schedules measure X or Y only, got {}", a.letter())));
                }
                if k.chars().any(|c| c != '0' && c != '1') {
                    return Err(Error::invalid(format!("outcome prefix {k:?} is not a bit string")));
                }
            }
        }
        Ok(MeasurementSchedule { steps })
    }

    /// The same axes in every branch.
    pub fn fixed(steps: &[(usize, Axis)]) -> Result<Self> {
        MeasurementSchedule::new(steps.iter().map(|&(q, a)| ScheduleStep::fixed(q, a)).collect())
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Largest original qubit index plus one.
    pub fn min_qubits(&self) -> usize {
        self.steps.iter().map(|s| s.qubit + 1).max().unwrap_or(0)
    }

    pub fn check_register(&self, n: usize) -> Result<()> {
        if self.min_qubits() > n {
            return Err(Error::invalid(format!("schedule addresses qubit {} of a {n}-qubit state", self.min_qubits())));
        }
        Ok(())
    }

    /// Position of step `i`'s qubit in the register left after the earlier
    /// destructive measurements.
    pub fn register_index(&self, i: usize) -> usize {
        let q = self.steps[i].qubit;
        q - self.steps[..i].iter().filter(|s| s.qubit < q).count()
    }
}
