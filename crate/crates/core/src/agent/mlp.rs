//! Minimal dense feed-forward network with hand-rolled backpropagation.
//!
//! Weights are plain `f64` buffers (row-major, one row per output unit), so
//! forward/backward passes are simple loops and parameters can be streamed
//! to the flat binary checkpoint format documented at [`Mlp::save`].

use std::io::{self, Read, Write};

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// Rectifier, used on hidden layers.
    Relu,
    /// Symmetric saturating output, used by the actor.
    Tanh,
    /// Pass-through output, used by the critic.
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative given pre-activation `z` and post-activation `y`.
    fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }

    fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Identity => 2,
        }
    }

    fn from_tag(tag: u8) -> io::Result<Self> {
        match tag {
            0 => Ok(Activation::Relu),
            1 => Ok(Activation::Tanh),
            2 => Ok(Activation::Identity),
            _ => Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("unknown activation tag {tag}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

/// Per-layer activations recorded during a forward pass, consumed by
/// [`Mlp::backward`].
pub struct ForwardTrace {
    input: Vec<f64>,
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.post.last().expect("network has at least one layer")
    }
}

/// Parameter-shaped gradient accumulator.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zero(&mut self) {
        for g in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            g.fill(0.0);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .flat_map(|g| g.iter())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for g in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            for v in g.iter_mut() {
                *v *= factor;
            }
        }
    }
}

const MLP_MAGIC: &[u8; 4] = b"MLP1";

impl Mlp {
    /// Builds a network with the given layer sizes (input first). Hidden
    /// layers are rectified; the output layer uses `output_activation`.
    /// Weights and biases start uniform in +-1/sqrt(fan_in).
    pub fn new<R: Rng>(sizes: &[usize], output_activation: Activation, rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        assert!(sizes.iter().all(|&s| s > 0), "layer sizes must be positive");
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let (in_dim, out_dim) = (w[0], w[1]);
                let bound = 1.0 / (in_dim as f64).sqrt();
                let activation = if k + 2 == sizes.len() {
                    output_activation
                } else {
                    Activation::Relu
                };
                Layer {
                    in_dim,
                    out_dim,
                    weights: (0..in_dim * out_dim)
                        .map(|_| rng.random_range(-bound..=bound))
                        .collect(),
                    biases: (0..out_dim).map(|_| rng.random_range(-bound..=bound)).collect(),
                    activation,
                }
            })
            .collect();
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim)
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.input_dim(), "input dimension mismatch");
        let mut x = input.to_vec();
        for layer in &self.layers {
            let mut next = vec![0.0; layer.out_dim];
            for (o, out) in next.iter_mut().enumerate() {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                let mut z = layer.biases[o];
                for (w, xi) in row.iter().zip(&x) {
                    z += w * xi;
                }
                *out = layer.activation.apply(z);
            }
            x = next;
        }
        x
    }

    /// Forward pass that keeps the per-layer activations for backprop.
    pub fn forward_trace(&self, input: &[f64]) -> ForwardTrace {
        assert_eq!(input.len(), self.input_dim(), "input dimension mismatch");
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut x = input;
        for layer in &self.layers {
            let mut z = vec![0.0; layer.out_dim];
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                let mut acc = layer.biases[o];
                for (w, xi) in row.iter().zip(x) {
                    acc += w * xi;
                }
                *zo = acc;
            }
            let y: Vec<f64> = z.iter().map(|&v| layer.activation.apply(v)).collect();
            pre.push(z);
            post.push(y);
            x = post.last().unwrap();
        }
        ForwardTrace {
            input: input.to_vec(),
            pre,
            post,
        }
    }

    /// Backpropagates `output_grad` (the loss gradient at the network output)
    /// through the trace. Parameter gradients are accumulated into `grads`;
    /// the returned vector is the loss gradient at the network input.
    pub fn backward(
        &self,
        trace: &ForwardTrace,
        output_grad: &[f64],
        grads: &mut Gradients,
    ) -> Vec<f64> {
        assert_eq!(output_grad.len(), self.output_dim());
        let mut upstream = output_grad.to_vec();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let pre = &trace.pre[l];
            let post = &trace.post[l];
            let below: &[f64] = if l == 0 { &trace.input } else { &trace.post[l - 1] };
            // d(loss)/d(pre-activation)
            let delta: Vec<f64> = (0..layer.out_dim)
                .map(|o| upstream[o] * layer.activation.derivative(pre[o], post[o]))
                .collect();
            let gw = &mut grads.weights[l];
            for (o, &d) in delta.iter().enumerate() {
                let row = &mut gw[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (g, xi) in row.iter_mut().zip(below) {
                    *g += d * xi;
                }
                grads.biases[l][o] += d;
            }
            let mut down = vec![0.0; layer.in_dim];
            for (o, &d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (dn, w) in down.iter_mut().zip(row) {
                    *dn += w * d;
                }
            }
            upstream = down;
        }
        upstream
    }

    pub fn zero_gradients(&self) -> Gradients {
        Gradients {
            weights: self.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: self.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    /// Adds `scale * grads` to the parameters (negative scale descends).
    pub fn apply_gradients(&mut self, grads: &Gradients, scale: f64) {
        for (l, layer) in self.layers.iter_mut().enumerate() {
            for (w, g) in layer.weights.iter_mut().zip(&grads.weights[l]) {
                *w += scale * g;
            }
            for (b, g) in layer.biases.iter_mut().zip(&grads.biases[l]) {
                *b += scale * g;
            }
        }
    }

    /// Blends `source` into `self`: each parameter moves by
    /// `kappa * (source - self)`. With kappa = 1 this copies `source`; when
    /// the two networks already agree it leaves every bit unchanged.
    pub fn blend_from(&mut self, source: &Mlp, kappa: f64) {
        assert_eq!(self.layers.len(), source.layers.len(), "shape mismatch");
        if kappa == 1.0 {
            self.clone_from(source);
            return;
        }
        for (dst, src) in self.layers.iter_mut().zip(&source.layers) {
            assert_eq!(dst.weights.len(), src.weights.len(), "shape mismatch");
            for (d, s) in dst.weights.iter_mut().zip(&src.weights) {
                *d += kappa * (s - *d);
            }
            for (d, s) in dst.biases.iter_mut().zip(&src.biases) {
                *d += kappa * (s - *d);
            }
        }
    }

    /// Writes the network in the flat binary format:
    /// magic `MLP1`, u32 layer count, then per layer u32 in-dim, u32 out-dim,
    /// u8 activation tag; then per layer the row-major weights followed by
    /// the biases, all little-endian f64.
    pub fn save<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(MLP_MAGIC)?;
        w.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for layer in &self.layers {
            w.write_all(&(layer.in_dim as u32).to_le_bytes())?;
            w.write_all(&(layer.out_dim as u32).to_le_bytes())?;
            w.write_all(&[layer.activation.tag()])?;
        }
        for layer in &self.layers {
            for v in layer.weights.iter().chain(layer.biases.iter()) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load<R: Read>(r: &mut R) -> io::Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MLP_MAGIC {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad network magic"));
        }
        let n_layers = read_u32(r)? as usize;
        if n_layers == 0 || n_layers > 64 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad layer count"));
        }
        let mut shapes = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            let in_dim = read_u32(r)? as usize;
            let out_dim = read_u32(r)? as usize;
            let mut tag = [0u8; 1];
            r.read_exact(&mut tag)?;
            shapes.push((in_dim, out_dim, Activation::from_tag(tag[0])?));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for (in_dim, out_dim, activation) in shapes {
            let mut weights = vec![0.0; in_dim * out_dim];
            let mut biases = vec![0.0; out_dim];
            for v in weights.iter_mut().chain(biases.iter_mut()) {
                *v = read_f64(r)?;
            }
            layers.push(Layer {
                in_dim,
                out_dim,
                weights,
                biases,
                activation,
            });
        }
        Ok(Self { layers })
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
