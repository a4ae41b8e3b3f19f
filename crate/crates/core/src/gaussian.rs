//! Covariance-matrix engine for multimode Gaussian states.
//!
//! Quadratures are ordered `X1, P1, X2, P2, ...` and normalized so the vacuum
//! covariance is the identity. The symplectic form is block diagonal with one
//! `[[0, 1], [-1, 0]]` block per mode.
//!
//! Every operation returns a new state; states are plain values and can be
//! shared freely between threads.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{check_range, invalid, Result};

/// A named mode of a [`GaussianState`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLabel {
    pub name: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    labels: Vec<ModeLabel>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// `n` vacuum modes labelled `m0, m1, ...`.
    pub fn vacuum(n: usize) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
        Self::vacuum_labeled(&names)
    }

    /// Vacuum state with one mode per name, in order.
    pub fn vacuum_labeled<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(invalid("a state needs at least one mode"));
        }
        let mut labels: Vec<ModeLabel> = Vec::with_capacity(n);
        for (index, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if labels.iter().any(|l| l.name == name) {
                return Err(invalid(format!("duplicate mode name `{name}`")));
            }
            labels.push(ModeLabel { name: name.to_string(), index });
        }
        Ok(GaussianState {
            labels,
            mean: DVector::zeros(2 * n),
            cov: DMatrix::identity(2 * n, 2 * n),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().find(|l| l.name == name).map(|l| l.index)
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// The 2x2 covariance block of a single mode.
    pub fn mode_cov(&self, mode: usize) -> Result<Matrix2<f64>> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        Ok(Matrix2::new(
            self.cov[(i, i)],
            self.cov[(i, i + 1)],
            self.cov[(i + 1, i)],
            self.cov[(i + 1, i + 1)],
        ))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes() {
            Ok(())
        } else {
            Err(invalid(format!(
                "mode {mode} out of range for a {}-mode state",
                self.n_modes()
            )))
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            return Err(invalid("operation needs two distinct modes"));
        }
        Ok(())
    }

    /// Applies a symplectic (or any real linear) map `s` to mean and covariance.
    fn transform(&self, s: &DMatrix<f64>) -> Self {
        let mut out = GaussianState {
            labels: self.labels.clone(),
            mean: s * &self.mean,
            cov: s * &self.cov * s.transpose(),
        };
        out.symmetrize();
        out
    }

    fn symmetrize(&mut self) {
        let t = self.cov.transpose();
        self.cov = (&self.cov + t) * 0.5;
    }

    /// Phase-insensitive amplifier pair with intensity gain `gain`:
    /// `a -> sqrt(G) a + sqrt(G-1) b^dag` and the same with `a`, `b` swapped.
    ///
    /// With real coefficients the X-difference and P-sum of the two modes are
    /// the squeezed joint quadratures.
    pub fn apply_two_mode_squeeze(&self, mode_a: usize, mode_b: usize, gain: f64) -> Result<Self> {
        self.check_pair(mode_a, mode_b)?;
        if !(gain >= 1.0) || !gain.is_finite() {
            return Err(invalid(format!("gain must be finite and >= 1, got {gain}")));
        }
        let c = gain.sqrt();
        let s = (gain - 1.0).sqrt();
        let (xa, pa, xb, pb) = (2 * mode_a, 2 * mode_a + 1, 2 * mode_b, 2 * mode_b + 1);
        let mut m = DMatrix::identity(2 * self.n_modes(), 2 * self.n_modes());
        m[(xa, xa)] = c;
        m[(xa, xb)] = s;
        m[(pa, pa)] = c;
        m[(pa, pb)] = -s;
        m[(xb, xb)] = c;
        m[(xb, xa)] = s;
        m[(pb, pb)] = c;
        m[(pb, pa)] = -s;
        Ok(self.transform(&m))
    }

    /// Beam splitter of intensity transmittance `t` against a vacuum ancilla.
    pub fn apply_loss(&self, mode: usize, t: f64) -> Result<Self> {
        self.check_mode(mode)?;
        check_range("transmittance", t, 0.0, 1.0)?;
        Ok(self.mix_with_ancilla(mode, t, 1.0))
    }

    /// Models imperfect homodyne visibility `v`: a beam splitter of intensity
    /// transmittance `v^2` whose open port carries an independent isotropic
    /// ancilla of variance `1 + eps * (ancilla_variance - 1)`.
    pub fn apply_visibility_mixer(
        &self,
        mode: usize,
        v: f64,
        eps: f64,
        ancilla_variance: f64,
    ) -> Result<Self> {
        self.check_mode(mode)?;
        check_range("visibility", v, 0.0, 1.0)?;
        check_range("eps", eps, 0.0, 1.0)?;
        if !(ancilla_variance >= 1.0) || !ancilla_variance.is_finite() {
            return Err(invalid(format!(
                "ancilla variance must be finite and >= 1, got {ancilla_variance}"
            )));
        }
        let anc = 1.0 + eps * (ancilla_variance - 1.0);
        Ok(self.mix_with_ancilla(mode, v * v, anc))
    }

    fn mix_with_ancilla(&self, mode: usize, t: f64, ancilla_variance: f64) -> Self {
        let dim = 2 * self.n_modes();
        let mut m = DMatrix::identity(dim, dim);
        let r = t.sqrt();
        m[(2 * mode, 2 * mode)] = r;
        m[(2 * mode + 1, 2 * mode + 1)] = r;
        let mut out = self.transform(&m);
        let added = (1.0 - t) * ancilla_variance;
        out.cov[(2 * mode, 2 * mode)] += added;
        out.cov[(2 * mode + 1, 2 * mode + 1)] += added;
        out
    }

    /// `Var(X cos(phase) + P sin(phase))` of one mode.
    pub fn quadrature_variance(&self, mode: usize, phase: f64) -> Result<f64> {
        let b = self.mode_cov(mode)?;
        let (s, c) = phase.sin_cos();
        Ok(c * c * b[(0, 0)] + s * s * b[(1, 1)] + 2.0 * c * s * b[(0, 1)])
    }

    /// `Var((Q_a + sign * Q_b) / sqrt(2))` where `Q_i` is the `phase_i`
    /// quadrature of mode `i`. Two uncorrelated vacua give 1.
    pub fn joint_quadrature_variance(
        &self,
        mode_a: usize,
        phase_a: f64,
        mode_b: usize,
        phase_b: f64,
        sign: Sign,
    ) -> Result<f64> {
        self.check_pair(mode_a, mode_b)?;
        let mut u = DVector::zeros(2 * self.n_modes());
        let k = std::f64::consts::FRAC_1_SQRT_2;
        let (sa, ca) = phase_a.sin_cos();
        let (sb, cb) = phase_b.sin_cos();
        let sg = sign.factor();
        u[2 * mode_a] = k * ca;
        u[2 * mode_a + 1] = k * sa;
        u[2 * mode_b] = sg * k * cb;
        u[2 * mode_b + 1] = sg * k * sb;
        Ok((u.transpose() * &self.cov * &u)[(0, 0)])
    }

    /// Checks `cov + i*Omega >= 0` within `tol`, using the real 4n x 4n
    /// representation `[[cov, -Omega], [Omega, cov]]` of the Hermitian matrix.
    pub fn is_physical(&self, tol: f64) -> bool {
        let dim = 2 * self.n_modes();
        let omega = symplectic_form(self.n_modes());
        let mut big = DMatrix::zeros(2 * dim, 2 * dim);
        big.view_mut((0, 0), (dim, dim)).copy_from(&self.cov);
        big.view_mut((dim, dim), (dim, dim)).copy_from(&self.cov);
        big.view_mut((0, dim), (dim, dim)).copy_from(&(-&omega));
        big.view_mut((dim, 0), (dim, dim)).copy_from(&omega);
        big.symmetric_eigenvalues().iter().all(|&e| e >= -tol)
    }
}

/// Block-diagonal symplectic form for `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Relative sign of the second mode in a joint quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}
