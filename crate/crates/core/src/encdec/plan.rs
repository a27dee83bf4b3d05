use crate::codespec::{Constraint, FrozenRule};
use crate::error::{Error, Result};
use crate::gf2::{polar_transform, BitMatrix};

/// How the decoder and encoder treat one input position `u_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Info,
    Zero,
    /// `u_i = u_j` for an earlier `j`.
    Copy(usize),
    /// `u_i` is the XOR of the listed earlier positions.
    Parity(Vec<usize>),
}

/// Per-index rule table that both the encoder and the successive decoders
/// follow. Every frozen value depends only on earlier positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreezingPlan {
    n: usize,
    slots: Vec<Slot>,
    info: Vec<usize>,
}

impl FreezingPlan {
    pub fn from_constraint(c: &Constraint) -> Self {
        let spec = c.spec();
        let mut slots = vec![Slot::Info; spec.len()];
        for (i, rule) in c.frozen_rules() {
            slots[i] = match rule {
                FrozenRule::Zero => Slot::Zero,
                FrozenRule::Dynamic { source } => Slot::Copy(source),
            };
        }
        FreezingPlan {
            n: spec.n(),
            slots,
            info: spec.info_set().to_vec(),
        }
    }

    /// Decoding plan for an arbitrary full-rank constraint matrix. Each row
    /// is reduced so that its last one is a pivot no other row touches; the
    /// pivot becomes a frozen position fed by the row's remaining columns.
    pub fn from_matrix(v: &BitMatrix) -> Result<Self> {
        let len = v.cols();
        if !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "constraint width {len} is not a power of two"
            )));
        }
        let (red, pivots) = v.rref_trailing();
        if pivots.len() < v.rows() {
            return Err(Error::RankDeficient {
                rank: pivots.len(),
                rows: v.rows(),
            });
        }
        let mut slots = vec![Slot::Info; len];
        for (row, &p) in pivots.iter().enumerate() {
            let sources: Vec<usize> = red.row_support(row).into_iter().filter(|&c| c != p).collect();
            slots[p] = match sources.as_slice() {
                [] => Slot::Zero,
                [j] => Slot::Copy(*j),
                _ => Slot::Parity(sources),
            };
        }
        let info = (0..len).filter(|&i| slots[i] == Slot::Info).collect();
        Ok(FreezingPlan {
            n: len.trailing_zeros() as usize,
            slots,
            info,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn dim(&self) -> usize {
        self.info.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, i: usize) -> &Slot {
        &self.slots[i]
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    /// Value of frozen position `i` given earlier decisions `u`.
    #[inline]
    pub fn frozen_value(&self, i: usize, u: &[u8]) -> u8 {
        match &self.slots[i] {
            Slot::Zero => 0,
            Slot::Copy(j) => u[*j],
            Slot::Parity(js) => js.iter().fold(0, |acc, &j| acc ^ u[j]),
            Slot::Info => unreachable!("position {i} carries information"),
        }
    }

    /// Input vector `u` with `v` on the information positions.
    pub fn input_vector(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.info.len() {
            return Err(Error::DimensionMismatch(format!(
                "information word has {} bits, code dimension is {}",
                v.len(),
                self.info.len()
            )));
        }
        let mut u = vec![0u8; self.len()];
        let mut next = v.iter();
        for i in 0..self.len() {
            u[i] = match self.slots[i] {
                Slot::Info => *next.next().expect("length checked") & 1,
                _ => self.frozen_value(i, &u),
            };
        }
        Ok(u)
    }

    pub fn encode(&self, v: &[u8]) -> Result<Vec<u8>> {
        let mut x = self.input_vector(v)?;
        polar_transform(&mut x);
        Ok(x)
    }

    /// Information bits of a codeword: `u = x G_N` read at the information
    /// positions.
    pub fn info_of_codeword(&self, x: &[u8]) -> Vec<u8> {
        let mut u = x.to_vec();
        polar_transform(&mut u);
        self.info.iter().map(|&i| u[i]).collect()
    }

    /// True when `x` satisfies every frozen rule.
    pub fn contains(&self, x: &[u8]) -> bool {
        if x.len() != self.len() {
            return false;
        }
        let mut u = x.to_vec();
        polar_transform(&mut u);
        (0..self.len()).all(|i| matches!(self.slots[i], Slot::Info) || self.frozen_value(i, &u) == u[i])
    }
}
