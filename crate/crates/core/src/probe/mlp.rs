use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ProbeError;

/// One-hidden-layer perceptron: input dropout, linear, ReLU, linear.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// hidden x input
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// output x hidden
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub dropout: f64,
}

/// Gradients with the same shapes as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

/// Intermediate values of a batched forward pass, kept for backprop.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input after dropout (n x input).
    pub x: Array2<f64>,
    /// ReLU output (n x hidden).
    pub h: Array2<f64>,
    /// Network output (n x output).
    pub out: Array2<f64>,
}

/// Rounds every entry to the nearest f32 so the parameters survive a
/// 32-bit checkpoint unchanged.
pub(crate) fn round_f32<D: ndarray::Dimension>(a: &mut ndarray::Array<f64, D>) {
    a.mapv_inplace(|v| f64::from(v as f32));
}

impl MlpParams {
    pub fn zeros(input: usize, hidden: usize, output: usize, dropout: f64) -> Self {
        Self {
            w1: Array2::zeros((hidden, input)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((output, hidden)),
            b2: Array1::zeros(output),
            dropout,
        }
    }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases,
    /// rounded to f32.
    pub fn init(
        input: usize,
        hidden: usize,
        output: usize,
        dropout: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let mut p = Self::zeros(input, hidden, output, dropout);
        let a1 = 1.0 / (input as f64).sqrt();
        let a2 = 1.0 / (hidden as f64).sqrt();
        p.w1.mapv_inplace(|_| rng.random_range(-a1..a1));
        p.b1.mapv_inplace(|_| rng.random_range(-a1..a1));
        p.w2.mapv_inplace(|_| rng.random_range(-a2..a2));
        p.b2.mapv_inplace(|_| rng.random_range(-a2..a2));
        p.round_to_f32();
        p
    }

    pub fn round_to_f32(&mut self) {
        round_f32(&mut self.w1);
        round_f32(&mut self.b1);
        round_f32(&mut self.w2);
        round_f32(&mut self.b2);
    }

    pub fn input_dim(&self) -> usize {
        self.w1.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.w2.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Batched forward pass. `mask`, when given, is the inverted-dropout mask
    /// (already scaled by 1/(1-rate)) applied to the input.
    pub fn forward_batch(
        &self,
        x: ArrayView2<f64>,
        mask: Option<&Array2<f64>>,
    ) -> Result<ForwardCache, ProbeError> {
        if x.ncols() != self.input_dim() {
            return Err(ProbeError::DimensionMismatch(self.input_dim(), x.ncols()));
        }
        let x = match mask {
            Some(m) => &x * m,
            None => x.to_owned(),
        };
        let mut h = x.dot(&self.w1.t());
        h += &self.b1;
        h.mapv_inplace(|v| v.max(0.0));
        let mut out = h.dot(&self.w2.t());
        out += &self.b2;
        Ok(ForwardCache { x, h, out })
    }

    /// Eval-mode outputs (no dropout).
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, ProbeError> {
        Ok(self.forward_batch(x, None)?.out)
    }

    /// Backpropagates `dout` (n x output, gradient of the loss w.r.t. the
    /// outputs) through the cached pass.
    pub fn backward(&self, cache: &ForwardCache, dout: ArrayView2<f64>) -> Gradients {
        let w2 = dout.t().dot(&cache.h);
        let b2 = dout.sum_axis(Axis(0));
        let mut dh = dout.dot(&self.w2);
        // ReLU gate: h > 0 exactly where the pre-activation was positive.
        dh.zip_mut_with(&cache.h, |g, &h| {
            if h <= 0.0 {
                *g = 0.0;
            }
        });
        let w1 = dh.t().dot(&cache.x);
        let b1 = dh.sum_axis(Axis(0));
        Gradients { w1, b1, w2, b2 }
    }
}

/// Inverted-dropout mask: zero with probability `rate`, otherwise
/// `1/(1-rate)`.
pub fn dropout_mask(rows: usize, cols: usize, rate: f64, rng: &mut impl Rng) -> Array2<f64> {
    let keep = 1.0 / (1.0 - rate);
    Array2::from_shape_simple_fn((rows, cols), || {
        if rng.random::<f64>() < rate {
            0.0
        } else {
            keep
        }
    })
}

/// Single-vector forward pass. In train mode the dropout mask is drawn from
/// a generator seeded with `seed`; eval mode ignores the seed.
pub fn mlp_forward(
    p: &MlpParams,
    x: &[f64],
    train_mode: bool,
    seed: u64,
) -> Result<Vec<f64>, ProbeError> {
    let x = ArrayView2::from_shape((1, x.len()), x).expect("row vector");
    let mask = (train_mode && p.dropout > 0.0).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        dropout_mask(1, x.ncols(), p.dropout, &mut rng)
    });
    Ok(p.forward_batch(x, mask.as_ref())?.out.row(0).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_params_give_zero() {
        let p = MlpParams::zeros(3, 4, 2, 0.0);
        assert_eq!(
            mlp_forward(&p, &[1.0, 2.0, 3.0], false, 0).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn hand_arithmetic() {
        let mut p = MlpParams::zeros(1, 1, 1, 0.0);
        p.w1 = array![[2.0]];
        p.w2 = array![[3.0]];
        assert_eq!(mlp_forward(&p, &[1.0], false, 0).unwrap(), vec![6.0]);
        p.w1 = array![[-1.0]];
        p.b2 = array![0.25];
        assert_eq!(mlp_forward(&p, &[1.0], false, 0).unwrap(), vec![0.25]);
    }

    #[test]
    fn dimension_checked() {
        let p = MlpParams::zeros(3, 4, 2, 0.0);
        assert!(matches!(
            mlp_forward(&p, &[1.0], false, 0),
            Err(ProbeError::DimensionMismatch(3, 1))
        ));
    }

    #[test]
    fn dropout_only_in_train_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = MlpParams::init(16, 8, 2, 0.5, &mut rng);
        let x: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
        let a = mlp_forward(&p, &x, false, 1).unwrap();
        assert_eq!(a, mlp_forward(&p, &x, false, 2).unwrap());
        let t1 = mlp_forward(&p, &x, true, 1).unwrap();
        assert_eq!(t1, mlp_forward(&p, &x, true, 1).unwrap());
        assert_ne!(t1, a);
    }

    #[test]
    fn init_is_f32_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = MlpParams::init(5, 3, 2, 0.1, &mut rng);
        assert!(p.w1.iter().all(|&v| f64::from(v as f32) == v));
        assert!(p.w1.iter().all(|&v| v.abs() <= 1.0 / 5f64.sqrt()));
    }
}
