//! Coefficient arithmetic for forms and vectors in a 3-d chart.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector3(pub [f64; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OneForm(pub [f64; 3]);

/// Components `[w01, w02, w12]` of `w01 dx0^dx1 + w02 dx0^dx2 + w12 dx1^dx2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoForm(pub [f64; 3]);

impl Vector3 {
    pub fn scale(self, s: f64) -> Self {
        Vector3(self.0.map(|x| x * s))
    }

    pub fn max_abs_diff(&self, other: &Vector3) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }
}

impl OneForm {
    pub fn apply(&self, v: &Vector3) -> f64 {
        self.0[0] * v.0[0] + self.0[1] * v.0[1] + self.0[2] * v.0[2]
    }

    pub fn wedge(&self, b: &OneForm) -> TwoForm {
        let (a, b) = (self.0, b.0);
        TwoForm([a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[1] * b[2] - a[2] * b[1]])
    }

    /// Density of `self ^ w` against `dx0^dx1^dx2`.
    pub fn wedge_two(&self, w: &TwoForm) -> f64 {
        let a = self.0;
        let w = w.0;
        a[0] * w[2] - a[1] * w[1] + a[2] * w[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl TwoForm {
    /// Component `w_ij` for any index pair.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 1) => self.0[0],
            (0, 2) => self.0[1],
            (1, 2) => self.0[2],
            (1, 0) => -self.0[0],
            (2, 0) => -self.0[1],
            (2, 1) => -self.0[2],
            _ => 0.0,
        }
    }

    /// Interior product `i_v w`, i.e. `(i_v w)_j = sum_i v_i w_ij`.
    pub fn contract(&self, v: &Vector3) -> OneForm {
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|i| v.0[i] * self.get(i, j)).sum();
        }
        OneForm(out)
    }

    pub fn eval(&self, u: &Vector3, v: &Vector3) -> f64 {
        self.contract(u).apply(v)
    }

    pub fn scale(self, s: f64) -> Self {
        TwoForm(self.0.map(|x| x * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &TwoForm) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }
}

fn shifted(x: [f64; 3], i: usize, h: f64) -> [f64; 3] {
    let mut y = x;
    y[i] += h;
    y
}

/// Centred-difference exterior derivative of a 1-form field.
pub fn d_one_form(field: impl Fn([f64; 3]) -> OneForm, x: [f64; 3], h: f64) -> TwoForm {
    let mut der = [[0.0; 3]; 3]; // der[i][j] = d_i a_j
    for (i, row) in der.iter_mut().enumerate() {
        let (p, m) = (field(shifted(x, i, h)), field(shifted(x, i, -h)));
        for j in 0..3 {
            row[j] = (p.0[j] - m.0[j]) / (2.0 * h);
        }
    }
    TwoForm([der[0][1] - der[1][0], der[0][2] - der[2][0], der[1][2] - der[2][1]])
}

/// Centred-difference exterior derivative of a 2-form field, as a density
/// against `dx0^dx1^dx2`.
pub fn d_two_form(field: impl Fn([f64; 3]) -> TwoForm, x: [f64; 3], h: f64) -> f64 {
    let der = |i: usize, comp: usize| {
        (field(shifted(x, i, h)).0[comp] - field(shifted(x, i, -h)).0[comp]) / (2.0 * h)
    };
    der(0, 2) - der(1, 1) + der(2, 0)
}

/// Centred-difference gradient of a function.
pub fn d_function(field: impl Fn([f64; 3]) -> f64, x: [f64; 3], h: f64) -> OneForm {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (field(shifted(x, i, h)) - field(shifted(x, i, -h))) / (2.0 * h);
    }
    OneForm(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_and_contract() {
        let dx = OneForm([1.0, 0.0, 0.0]);
        let dy = OneForm([0.0, 1.0, 0.0]);
        let dz = OneForm([0.0, 0.0, 1.0]);
        assert_eq!(dx.wedge(&dy), TwoForm([1.0, 0.0, 0.0]));
        assert_eq!(dx.wedge_two(&dy.wedge(&dz)), 1.0);
        assert_eq!(dz.wedge_two(&dx.wedge(&dy)), 1.0);
        assert_eq!(dy.wedge_two(&dx.wedge(&dz)), -1.0);
        let w = dx.wedge(&dy);
        assert_eq!(w.contract(&Vector3([1.0, 0.0, 0.0])), dy);
        assert_eq!(w.contract(&Vector3([0.0, 1.0, 0.0])), OneForm([-1.0, 0.0, 0.0]));
    }

    #[test]
    fn exterior_derivatives() {
        // a = x1 x2 dx0 -> da = x2 dx1^dx0 + x1 dx2^dx0
        let a = |x: [f64; 3]| OneForm([x[1] * x[2], 0.0, 0.0]);
        let da = d_one_form(a, [0.3, 0.5, 0.7], 1e-4);
        assert!(da.max_abs_diff(&TwoForm([-0.7, -0.5, 0.0])) < 1e-9);
        // d(da) = 0
        let dd = d_two_form(|x| d_one_form(a, x, 1e-4), [0.3, 0.5, 0.7], 1e-3);
        assert!(dd.abs() < 1e-6);
    }
}
