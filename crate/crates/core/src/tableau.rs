//! Runge-Kutta tableaus for the stage solver.
//!
//! The Gauss collocation methods of orders 2, 4 and 6 satisfy the symplectic
//! coefficient condition `b_i a_ij + b_j a_ji = b_i b_j`, which is exactly
//! what makes the stepper conserve the discrete mass and quadratic energy.
//! Explicit Euler is provided as a negative control that violates it.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tableau {
    name: &'static str,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Tableau {
    /// The `s`-stage Gauss collocation tableau (order `2s`), `s in {1, 2, 3}`.
    pub fn gauss(s: usize) -> Result<Self> {
        let (name, a, b, c) = match s {
            1 => (
                "gauss-2",
                vec![vec![0.5]],
                vec![1.0],
                vec![0.5],
            ),
            2 => {
                let r = 3f64.sqrt() / 6.0;
                (
                    "gauss-4",
                    vec![
                        vec![0.25, 0.25 - r],
                        vec![0.25 + r, 0.25],
                    ],
                    vec![0.5, 0.5],
                    vec![0.5 - r, 0.5 + r],
                )
            }
            3 => {
                let r = 15f64.sqrt();
                (
                    "gauss-6",
                    vec![
                        vec![5.0 / 36.0, 2.0 / 9.0 - r / 15.0, 5.0 / 36.0 - r / 30.0],
                        vec![5.0 / 36.0 + r / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r / 24.0],
                        vec![5.0 / 36.0 + r / 30.0, 2.0 / 9.0 + r / 15.0, 5.0 / 36.0],
                    ],
                    vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
                    vec![0.5 - r / 10.0, 0.5, 0.5 + r / 10.0],
                )
            }
            other => return Err(Error::UnsupportedStages(other)),
        };
        Ok(Self { name, a, b, c })
    }

    /// Explicit Euler. Violates the symplectic condition (defect 1); used to
    /// demonstrate that the condition is necessary for conservation.
    pub fn explicit_euler() -> Self {
        Self {
            name: "explicit-euler",
            a: vec![vec![0.0]],
            b: vec![1.0],
            c: vec![0.0],
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// `max_ij |b_i a_ij + b_j a_ji - b_i b_j|`.
    pub fn symplectic_defect(&self) -> f64 {
        let s = self.stages();
        let mut worst = 0.0f64;
        for i in 0..s {
            for j in 0..s {
                let d = self.b[i] * self.a[i][j] + self.b[j] * self.a[j][i]
                    - self.b[i] * self.b[j];
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// `max_i |c_i - sum_j a_ij|` (collocation consistency).
    pub fn row_sum_defect(&self) -> f64 {
        self.c
            .iter()
            .zip(&self.a)
            .map(|(c, row)| (c - row.iter().sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }

    /// `|sum_i b_i - 1|`.
    pub fn weight_defect(&self) -> f64 {
        (self.b.iter().sum::<f64>() - 1.0).abs()
    }
}
