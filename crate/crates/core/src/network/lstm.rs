use rand::Rng;
use serde::{Deserialize, Serialize};

/// Single-layer LSTM with a forget gate.
///
/// Gate blocks are stacked in the order input, forget, output, candidate:
/// `w` is `4h × input`, `u` is `4h × h` and `b` has `4h` entries, all
/// row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub input: usize,
    pub hidden: usize,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmGrads {
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

impl LstmGrads {
    pub fn zeros(p: &LstmParams) -> Self {
        LstmGrads { w: vec![0.0; p.w.len()], u: vec![0.0; p.u.len()], b: vec![0.0; p.b.len()] }
    }

    pub fn add(&mut self, other: &LstmGrads) {
        for (a, b) in [(&mut self.w, &other.w), (&mut self.u, &other.u), (&mut self.b, &other.b)] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
}

/// Cached activations of one forward pass.
#[derive(Debug, Clone)]
pub struct LstmTrace {
    xs: Vec<Vec<f64>>,
    /// Post-activation gates per step: `[i | f | o | g]`.
    gates: Vec<Vec<f64>>,
    cs: Vec<Vec<f64>>,
    hs: Vec<Vec<f64>>,
}

impl LstmTrace {
    /// Final hidden state.
    pub fn output(&self) -> &[f64] {
        self.hs.last().expect("non-empty sequence")
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LstmParams {
    /// Uniform Glorot initialization for the matrices, zero biases.
    pub fn random(input: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let wb = (6.0 / (input + hidden) as f64).sqrt();
        let ub = (6.0 / (2 * hidden) as f64).sqrt();
        LstmParams {
            input,
            hidden,
            w: (0..4 * hidden * input).map(|_| rng.gen_range(-wb..=wb)).collect(),
            u: (0..4 * hidden * hidden).map(|_| rng.gen_range(-ub..=ub)).collect(),
            b: vec![0.0; 4 * hidden],
        }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmParams {
            input,
            hidden,
            w: vec![0.0; 4 * hidden * input],
            u: vec![0.0; 4 * hidden * hidden],
            b: vec![0.0; 4 * hidden],
        }
    }

    /// Run the sequence from `h_0 = c_0 = 0`. Panics on an empty sequence;
    /// callers check.
    pub fn forward(&self, xs: Vec<Vec<f64>>) -> LstmTrace {
        assert!(!xs.is_empty(), "LSTM input sequence is empty");
        let h = self.hidden;
        let mut trace = LstmTrace {
            gates: Vec::with_capacity(xs.len()),
            cs: Vec::with_capacity(xs.len()),
            hs: Vec::with_capacity(xs.len()),
            xs: Vec::new(),
        };
        let zero = vec![0.0; h];
        for (t, x) in xs.iter().enumerate() {
            debug_assert_eq!(x.len(), self.input);
            let h_prev = if t == 0 { &zero } else { &trace.hs[t - 1] };
            let c_prev = if t == 0 { &zero } else { &trace.cs[t - 1] };
            let mut a = self.b.clone();
            for (r, ar) in a.iter_mut().enumerate() {
                let wr = &self.w[r * self.input..(r + 1) * self.input];
                let ur = &self.u[r * h..(r + 1) * h];
                *ar += wr.iter().zip(x).map(|(p, q)| p * q).sum::<f64>()
                    + ur.iter().zip(h_prev).map(|(p, q)| p * q).sum::<f64>();
            }
            for (k, v) in a.iter_mut().enumerate() {
                *v = if k < 3 * h { sigmoid(*v) } else { v.tanh() };
            }
            let mut c = vec![0.0; h];
            let mut hn = vec![0.0; h];
            for j in 0..h {
                let (i, f, o, g) = (a[j], a[h + j], a[2 * h + j], a[3 * h + j]);
                c[j] = f * c_prev[j] + i * g;
                hn[j] = o * c[j].tanh();
            }
            trace.gates.push(a);
            trace.cs.push(c);
            trace.hs.push(hn);
        }
        trace.xs = xs;
        trace
    }

    /// Backpropagate `d_out` (gradient w.r.t. the final hidden state),
    /// accumulating parameter gradients and returning input gradients.
    pub fn backward(&self, trace: &LstmTrace, d_out: &[f64], grads: &mut LstmGrads) -> Vec<Vec<f64>> {
        let h = self.hidden;
        let n = self.input;
        let steps = trace.xs.len();
        let zero = vec![0.0; h];
        let mut dh = d_out.to_vec();
        let mut dc = vec![0.0; h];
        let mut dxs = vec![vec![0.0; n]; steps];
        let mut da = vec![0.0; 4 * h];
        for t in (0..steps).rev() {
            let g = &trace.gates[t];
            let c = &trace.cs[t];
            let c_prev = if t == 0 { &zero } else { &trace.cs[t - 1] };
            let h_prev = if t == 0 { &zero } else { &trace.hs[t - 1] };
            for j in 0..h {
                let (i, f, o, cand) = (g[j], g[h + j], g[2 * h + j], g[3 * h + j]);
                let tc = c[j].tanh();
                let d_o = dh[j] * tc;
                let dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
                da[j] = dcj * cand * i * (1.0 - i);
                da[h + j] = dcj * c_prev[j] * f * (1.0 - f);
                da[2 * h + j] = d_o * o * (1.0 - o);
                da[3 * h + j] = dcj * i * (1.0 - cand * cand);
                dc[j] = dcj * f;
            }
            let x = &trace.xs[t];
            let dx = &mut dxs[t];
            let mut dh_prev = vec![0.0; h];
            for (r, &dar) in da.iter().enumerate() {
                if dar == 0.0 {
                    continue;
                }
                grads.b[r] += dar;
                let wr = &self.w[r * n..(r + 1) * n];
                let gw = &mut grads.w[r * n..(r + 1) * n];
                for k in 0..n {
                    gw[k] += dar * x[k];
                    dx[k] += dar * wr[k];
                }
                let ur = &self.u[r * h..(r + 1) * h];
                let gu = &mut grads.u[r * h..(r + 1) * h];
                for k in 0..h {
                    gu[k] += dar * h_prev[k];
                    dh_prev[k] += dar * ur[k];
                }
            }
            dh = dh_prev;
        }
        dxs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_give_zero_output() {
        let p = LstmParams::zeros(3, 4);
        let out = p.forward(vec![vec![1.0, -2.0, 0.5], vec![3.0, 3.0, 3.0]]);
        assert!(out.output().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_step_by_hand() {
        // 1-d input and hidden; gate pre-activations w*x + b with h_0 = 0
        let p = LstmParams {
            input: 1,
            hidden: 1,
            w: vec![0.5, -0.3, 0.8, 1.2],
            u: vec![0.7, 0.1, -0.4, 0.2],
            b: vec![0.1, 0.2, -0.1, 0.05],
        };
        let x = 2.0;
        let i = sigmoid(0.5 * x + 0.1);
        let _f = sigmoid(-0.3 * x + 0.2);
        let o = sigmoid(0.8 * x - 0.1);
        let g = (1.2 * x + 0.05_f64).tanh();
        let c = i * g;
        let expected = o * c.tanh();
        let got = p.forward(vec![vec![x]]).output()[0];
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
        // σ(1.5)·tanh(σ(1.1)·tanh(2.45)), evaluated separately
        assert!((got - 0.513_962_305_586_045_2).abs() < 1e-12);
    }

    #[test]
    fn forward_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = LstmParams::random(3, 4, &mut rng);
        let xs = vec![vec![0.1, 0.2, 0.3], vec![-0.3, 0.0, 1.0]];
        assert_eq!(p.forward(xs.clone()).output(), p.forward(xs).output());
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut p = LstmParams::random(3, 2, &mut rng);
        p.b.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
        let xs: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let proj = [0.7, -1.3];
        let objective = |p: &LstmParams, xs: &[Vec<f64>]| -> f64 {
            p.forward(xs.to_vec()).output().iter().zip(proj).map(|(a, b)| a * b).sum()
        };
        let trace = p.forward(xs.clone());
        let mut grads = LstmGrads::zeros(&p);
        let dxs = p.backward(&trace, &proj, &mut grads);
        let eps = 1e-5;
        let check = |analytic: f64, plus: f64, minus: f64| {
            let fd = (plus - minus) / (2.0 * eps);
            let err = (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-7);
            assert!(err < 1e-6, "fd {fd} analytic {analytic}");
        };
        for k in 0..p.w.len() {
            let (mut a, mut b) = (p.clone(), p.clone());
            a.w[k] += eps;
            b.w[k] -= eps;
            check(grads.w[k], objective(&a, &xs), objective(&b, &xs));
        }
        for k in 0..p.u.len() {
            let (mut a, mut b) = (p.clone(), p.clone());
            a.u[k] += eps;
            b.u[k] -= eps;
            check(grads.u[k], objective(&a, &xs), objective(&b, &xs));
        }
        for k in 0..p.b.len() {
            let (mut a, mut b) = (p.clone(), p.clone());
            a.b[k] += eps;
            b.b[k] -= eps;
            check(grads.b[k], objective(&a, &xs), objective(&b, &xs));
        }
        for t in 0..xs.len() {
            for k in 0..3 {
                let (mut a, mut b) = (xs.clone(), xs.clone());
                a[t][k] += eps;
                b[t][k] -= eps;
                check(dxs[t][k], objective(&p, &a), objective(&p, &b));
            }
        }
    }
}
