//! Recurrent cells: parameter bundles, forward passes, and exact BPTT.
//!
//! Five cell families share one parameter layout: a list of recurrent
//! n×n blocks, a matching list of input blocks and biases (one triple
//! per gate), and a linear readout. Vanilla cells have a single "gate";
//! LSTM has four (i, f, g, o); GRU has three (r, z, n). Gradients are
//! computed by hand-written reverse-time accumulation and are exact up
//! to rounding — the finite-difference checker below is the referee.

use crate::error::{Error, Result};
use crate::initializers::{init_dense, InitializerKind};
use crate::linalg::{Matrix, Rng};
use crate::scalar::{lit, Scalar};

use super::loss::{loss_grads, LossKind, Targets};

/// Which recurrence a [`CellParams`] bundle implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    /// `h_t = W_h h_{t−1} + W_x x_t + b` (identity activation).
    LinearRnn,
    /// `h_t = tanh(W_h h_{t−1} + W_x x_t + b)`.
    TanhRnn,
    /// `h_t = relu(W_h h_{t−1} + W_x x_t + b)`.
    ReluRnn,
    /// Standard LSTM with gates i, f, g, o and a cell state.
    Lstm,
    /// GRU with gates r, z and candidate n (reset applied inside the
    /// candidate, `tanh(W_xn x + r∘(W_hn h) + b_n)`).
    Gru,
}

impl CellKind {
    /// Stable lowercase identifier used in configs and filenames.
    pub fn name(&self) -> &'static str {
        match self {
            CellKind::LinearRnn => "linear",
            CellKind::TanhRnn => "tanh",
            CellKind::ReluRnn => "relu",
            CellKind::Lstm => "lstm",
            CellKind::Gru => "gru",
        }
    }

    /// Parse a [`name`](Self::name) back into a kind.
    pub fn parse(s: &str) -> Result<CellKind> {
        match s {
            "linear" => Ok(CellKind::LinearRnn),
            "tanh" => Ok(CellKind::TanhRnn),
            "relu" => Ok(CellKind::ReluRnn),
            "lstm" => Ok(CellKind::Lstm),
            "gru" => Ok(CellKind::Gru),
            other => Err(Error::Config(format!("unknown cell kind '{other}'"))),
        }
    }

    /// Per-gate name suffixes; vanilla cells have one unnamed gate.
    pub fn gate_labels(&self) -> &'static [&'static str] {
        match self {
            CellKind::LinearRnn | CellKind::TanhRnn | CellKind::ReluRnn => &[""],
            CellKind::Lstm => &["i", "f", "g", "o"],
            CellKind::Gru => &["r", "z", "n"],
        }
    }
}

fn block_name(prefix: &str, label: &str) -> String {
    if label.is_empty() {
        prefix.to_string()
    } else {
        format!("{prefix}{label}")
    }
}

/// All weights and biases of one recurrent model, including the readout.
///
/// Block names are stable: `w_h`/`w_x`/`b` for vanilla cells,
/// `w_hi…w_ho`/`w_xi…w_xo`/`b_i…b_o` for LSTM, `w_hr`/`w_hz`/`w_hn` (and
/// the `w_x*`/`b_*` counterparts) for GRU, plus `w_y`/`b_y`. The same
/// struct shape doubles as a gradient or moment bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct CellParams<T> {
    kind: CellKind,
    input_size: usize,
    hidden_size: usize,
    output_size: usize,
    /// Recurrent n×n blocks, one per gate, in `gate_labels` order.
    w_h: Vec<Matrix<T>>,
    /// Input n×d blocks, one per gate.
    w_x: Vec<Matrix<T>>,
    /// Bias rows (1×n), one per gate.
    b: Vec<Matrix<T>>,
    /// Readout weights, output_size×n.
    w_y: Matrix<T>,
    /// Readout bias, 1×output_size.
    b_y: Matrix<T>,
}

impl<T: Scalar> CellParams<T> {
    /// An all-zero parameter bundle (also the gradient/moment template).
    pub fn zeros(
        kind: CellKind,
        input_size: usize,
        hidden_size: usize,
        output_size: usize,
    ) -> CellParams<T> {
        let gates = kind.gate_labels().len();
        CellParams {
            kind,
            input_size,
            hidden_size,
            output_size,
            w_h: (0..gates).map(|_| Matrix::zeros(hidden_size, hidden_size)).collect(),
            w_x: (0..gates).map(|_| Matrix::zeros(hidden_size, input_size)).collect(),
            b: (0..gates).map(|_| Matrix::zeros(1, hidden_size)).collect(),
            w_y: Matrix::zeros(output_size, hidden_size),
            b_y: Matrix::zeros(1, output_size),
        }
    }

    /// Initialize a model: every recurrent block from `recurrent_init`,
    /// every input block and the readout from `input_init`, biases zero.
    ///
    /// Blocks are drawn in block-directory order from the single `rng`,
    /// so equal seeds produce bitwise-equal models.
    pub fn init(
        kind: CellKind,
        input_size: usize,
        hidden_size: usize,
        output_size: usize,
        recurrent_init: InitializerKind,
        input_init: InitializerKind,
        rng: &mut Rng,
    ) -> Result<CellParams<T>> {
        if input_size == 0 || hidden_size == 0 || output_size == 0 {
            return Err(Error::Config(format!(
                "cell sizes must be positive, got input {input_size}, hidden {hidden_size}, output {output_size}"
            )));
        }
        let mut p = CellParams::zeros(kind, input_size, hidden_size, output_size);
        for m in p.w_h.iter_mut() {
            *m = init_dense(recurrent_init, hidden_size, hidden_size, rng)?;
        }
        for m in p.w_x.iter_mut() {
            *m = init_dense(input_init, hidden_size, input_size, rng)?;
        }
        p.w_y = init_dense(input_init, output_size, hidden_size, rng)?;
        Ok(p)
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// The recurrent n×n blocks with their names, in gate order.
    pub fn recurrent_blocks(&self) -> Vec<(String, &Matrix<T>)> {
        self.kind
            .gate_labels()
            .iter()
            .zip(&self.w_h)
            .map(|(label, m)| (block_name("w_h", label), m))
            .collect()
    }

    /// Every block with its name: recurrent, input, bias, then readout.
    pub fn blocks(&self) -> Vec<(String, &Matrix<T>)> {
        let labels = self.kind.gate_labels();
        let mut out = Vec::new();
        for (label, m) in labels.iter().zip(&self.w_h) {
            out.push((block_name("w_h", label), m));
        }
        for (label, m) in labels.iter().zip(&self.w_x) {
            out.push((block_name("w_x", label), m));
        }
        for (label, m) in labels.iter().zip(&self.b) {
            out.push((block_name("b_", label).trim_end_matches('_').to_string(), m));
        }
        out.push(("w_y".to_string(), &self.w_y));
        out.push(("b_y".to_string(), &self.b_y));
        out
    }

    /// Mutable view of every block, same order and names as [`blocks`].
    pub fn blocks_mut(&mut self) -> Vec<(String, &mut Matrix<T>)> {
        let labels = self.kind.gate_labels();
        let mut out: Vec<(String, &mut Matrix<T>)> = Vec::new();
        for (label, m) in labels.iter().zip(self.w_h.iter_mut()) {
            out.push((block_name("w_h", label), m));
        }
        for (label, m) in labels.iter().zip(self.w_x.iter_mut()) {
            out.push((block_name("w_x", label), m));
        }
        for (label, m) in labels.iter().zip(self.b.iter_mut()) {
            out.push((block_name("b_", label).trim_end_matches('_').to_string(), m));
        }
        out.push(("w_y".to_string(), &mut self.w_y));
        out.push(("b_y".to_string(), &mut self.b_y));
        out
    }

    /// A zero bundle with this model's exact shape.
    pub fn zeros_like(&self) -> CellParams<T> {
        CellParams::zeros(self.kind, self.input_size, self.hidden_size, self.output_size)
    }

    /// Overwrite the forget-gate bias with a constant (LSTM only).
    ///
    /// Freshly initialized gates start at zero bias; call this to start
    /// the forget gate open (a common choice is 1).
    pub fn set_forget_bias(&mut self, value: T) -> Result<()> {
        if self.kind != CellKind::Lstm {
            return Err(Error::Config(format!(
                "forget-gate bias applies to lstm cells only, got {}",
                self.kind.name()
            )));
        }
        for v in self.b[1].as_mut_slice() {
            *v = value;
        }
        Ok(())
    }

    /// Check that every block is finite and correctly shaped.
    pub fn validate(&self) -> Result<()> {
        let gates = self.kind.gate_labels().len();
        if self.w_h.len() != gates || self.w_x.len() != gates || self.b.len() != gates {
            return Err(Error::dim(
                "cell_params",
                format!("expected {gates} gate blocks for {}", self.kind.name()),
            ));
        }
        for (name, m) in self.blocks() {
            let want = match name.as_str() {
                "w_y" => (self.output_size, self.hidden_size),
                "b_y" => (1, self.output_size),
                n if n.starts_with("w_h") => (self.hidden_size, self.hidden_size),
                n if n.starts_with("w_x") => (self.hidden_size, self.input_size),
                _ => (1, self.hidden_size),
            };
            if m.shape() != want {
                return Err(Error::dim(
                    "cell_params",
                    format!("block '{name}' is {:?}, expected {:?}", m.shape(), want),
                ));
            }
            m.ensure_finite("cell_params")?;
        }
        Ok(())
    }
}

/// Hidden states and readout outputs of one forward pass.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<T> {
    hidden: Vec<Matrix<T>>,
    step_outputs: Vec<Matrix<T>>,
}

impl<T: Scalar> TrajectoryRecord<T> {
    /// Hidden states per timestep (T entries of B×n), h₀ excluded.
    pub fn hidden(&self) -> &[Matrix<T>] {
        &self.hidden
    }

    /// Readout outputs per timestep (T entries of B×output).
    pub fn step_outputs(&self) -> &[Matrix<T>] {
        &self.step_outputs
    }

    /// The final-timestep outputs (B×output).
    pub fn final_outputs(&self) -> &Matrix<T> {
        self.step_outputs.last().expect("non-empty trajectory")
    }

    /// Number of timesteps.
    pub fn len(&self) -> usize {
        self.hidden.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hidden.is_empty()
    }
}

/// Everything backward needs from the forward sweep, per family.
struct Trace<T> {
    /// T+1 entries; index 0 is h₀.
    hidden: Vec<Matrix<T>>,
    /// T entries of readout outputs.
    outputs: Vec<Matrix<T>>,
    /// Vanilla: pre-activations Z_t.
    pre: Vec<Matrix<T>>,
    /// LSTM: cell states (T+1, index 0 = c₀), gate activations, tanh(c).
    cells: Vec<Matrix<T>>,
    gates: Vec<[Matrix<T>; 4]>,
    cell_tanh: Vec<Matrix<T>>,
    /// GRU: r, z(update), candidate n, and s = h_{t−1}·W_hnᵀ.
    gru: Vec<[Matrix<T>; 4]>,
}

fn step_err(t: usize, e: Error) -> Error {
    match e {
        Error::Dimension { op, details } => Error::Dimension {
            op: "forward",
            details: format!("timestep {t}: {op}: {details}"),
        },
        Error::NonFinite { op, details } => Error::NonFinite {
            op: "forward",
            details: format!("timestep {t}: {op}: {details}"),
        },
        other => other,
    }
}

fn run_forward<T: Scalar>(
    params: &CellParams<T>,
    sequence: &[Matrix<T>],
    h0: Option<&Matrix<T>>,
) -> Result<Trace<T>> {
    params.validate()?;
    if sequence.is_empty() {
        return Err(Error::dim("forward", "empty input sequence"));
    }
    let batch = sequence[0].rows();
    let n = params.hidden_size;
    for (t, x) in sequence.iter().enumerate() {
        if x.rows() != batch || x.cols() != params.input_size {
            return Err(Error::dim(
                "forward",
                format!(
                    "timestep {t}: input is {}x{}, expected {batch}x{}",
                    x.rows(),
                    x.cols(),
                    params.input_size
                ),
            ));
        }
    }
    let h_init = match h0 {
        Some(h) => {
            if h.shape() != (batch, n) {
                return Err(Error::dim(
                    "forward",
                    format!("h0 is {:?}, expected ({batch}, {n})", h.shape()),
                ));
            }
            h.clone()
        }
        None => Matrix::zeros(batch, n),
    };

    let steps = sequence.len();
    let mut trace = Trace {
        hidden: Vec::with_capacity(steps + 1),
        outputs: Vec::with_capacity(steps),
        pre: Vec::new(),
        cells: Vec::new(),
        gates: Vec::new(),
        cell_tanh: Vec::new(),
        gru: Vec::new(),
    };
    trace.hidden.push(h_init);
    if params.kind == CellKind::Lstm {
        trace.cells.push(Matrix::zeros(batch, n));
    }

    for (t, x) in sequence.iter().enumerate() {
        let h_prev = trace.hidden.last().unwrap().clone();
        let h_next = match params.kind {
            CellKind::LinearRnn | CellKind::TanhRnn | CellKind::ReluRnn => {
                let z = h_prev
                    .matmul_transb(&params.w_h[0])
                    .and_then(|hh| x.matmul_transb(&params.w_x[0]).and_then(|xx| hh.add(&xx)))
                    .and_then(|s| s.add_row_broadcast(&params.b[0]))
                    .map_err(|e| step_err(t, e))?;
                let h = match params.kind {
                    CellKind::TanhRnn => z.tanh(),
                    CellKind::ReluRnn => z.relu(),
                    _ => z.clone(),
                };
                trace.pre.push(z);
                h
            }
            CellKind::Lstm => {
                let mut acts: Vec<Matrix<T>> = Vec::with_capacity(4);
                for g in 0..4 {
                    let z = h_prev
                        .matmul_transb(&params.w_h[g])
                        .and_then(|hh| {
                            x.matmul_transb(&params.w_x[g]).and_then(|xx| hh.add(&xx))
                        })
                        .and_then(|s| s.add_row_broadcast(&params.b[g]))
                        .map_err(|e| step_err(t, e))?;
                    acts.push(if g == 2 { z.tanh() } else { z.sigmoid() });
                }
                let [i, f, g_c, o] = [
                    acts[0].clone(),
                    acts[1].clone(),
                    acts[2].clone(),
                    acts[3].clone(),
                ];
                let c_prev = trace.cells.last().unwrap();
                let c = f
                    .hadamard(c_prev)
                    .and_then(|fc| i.hadamard(&g_c).and_then(|ig| fc.add(&ig)))
                    .map_err(|e| step_err(t, e))?;
                let ct = c.tanh();
                let h = o.hadamard(&ct).map_err(|e| step_err(t, e))?;
                trace.cells.push(c);
                trace.cell_tanh.push(ct);
                trace.gates.push([i, f, g_c, o]);
                h
            }
            CellKind::Gru => {
                let zr = h_prev
                    .matmul_transb(&params.w_h[0])
                    .and_then(|hh| x.matmul_transb(&params.w_x[0]).and_then(|xx| hh.add(&xx)))
                    .and_then(|s| s.add_row_broadcast(&params.b[0]))
                    .map_err(|e| step_err(t, e))?;
                let r = zr.sigmoid();
                let zz = h_prev
                    .matmul_transb(&params.w_h[1])
                    .and_then(|hh| x.matmul_transb(&params.w_x[1]).and_then(|xx| hh.add(&xx)))
                    .and_then(|s| s.add_row_broadcast(&params.b[1]))
                    .map_err(|e| step_err(t, e))?;
                let z = zz.sigmoid();
                let s = h_prev.matmul_transb(&params.w_h[2]).map_err(|e| step_err(t, e))?;
                let cand_pre = x
                    .matmul_transb(&params.w_x[2])
                    .and_then(|xx| r.hadamard(&s).and_then(|rs| xx.add(&rs)))
                    .and_then(|sum| sum.add_row_broadcast(&params.b[2]))
                    .map_err(|e| step_err(t, e))?;
                let cand = cand_pre.tanh();
                // h = (1−z)∘cand + z∘h_prev
                let one_minus_z = z.map(|v| T::one() - v);
                let h = one_minus_z
                    .hadamard(&cand)
                    .and_then(|a| z.hadamard(&h_prev).and_then(|b| a.add(&b)))
                    .map_err(|e| step_err(t, e))?;
                trace.gru.push([r, z, cand, s]);
                h
            }
        };
        let y = h_next
            .matmul_transb(&params.w_y)
            .and_then(|hy| hy.add_row_broadcast(&params.b_y))
            .map_err(|e| step_err(t, e))?;
        trace.hidden.push(h_next);
        trace.outputs.push(y);
    }
    Ok(trace)
}

/// Run the recurrence over `sequence` (T entries of B×input rows).
///
/// `h0` defaults to zeros. Returns per-step hidden states and readout
/// outputs; shape errors and non-finite activations name the timestep.
pub fn forward<T: Scalar>(
    params: &CellParams<T>,
    sequence: &[Matrix<T>],
    h0: Option<&Matrix<T>>,
) -> Result<TrajectoryRecord<T>> {
    let mut trace = run_forward(params, sequence, h0)?;
    let hidden = trace.hidden.split_off(1);
    Ok(TrajectoryRecord {
        hidden,
        step_outputs: trace.outputs,
    })
}

/// Loss and exact parameter gradients for one batch.
///
/// Runs the forward sweep, applies the loss to the readout outputs
/// (`Mse` + per-step targets, or `CrossEntropy` + final-step labels),
/// then accumulates reverse-time gradients for every block. The returned
/// bundle has the same shape and block names as `params`.
pub fn backward<T: Scalar>(
    params: &CellParams<T>,
    sequence: &[Matrix<T>],
    targets: &Targets<'_, T>,
    loss: LossKind,
) -> Result<(T, CellParams<T>)> {
    let (value, grads, _) = backward_with_outputs(params, sequence, targets, loss)?;
    Ok((value, grads))
}

/// [`backward`] plus the final step's readout outputs, which the
/// training loop reuses for accuracy bookkeeping without a second
/// forward sweep.
pub(crate) fn backward_with_outputs<T: Scalar>(
    params: &CellParams<T>,
    sequence: &[Matrix<T>],
    targets: &Targets<'_, T>,
    loss: LossKind,
) -> Result<(T, CellParams<T>, Matrix<T>)> {
    let mut trace = run_forward(params, sequence, None)?;
    let (loss_value, dys) = loss_grads(&trace.outputs, targets, loss)?;
    let mut grads = params.zeros_like();
    let steps = sequence.len();

    // Readout gradients and per-step dL/dh contributions.
    let mut dh_from_y: Vec<Option<Matrix<T>>> = Vec::with_capacity(steps);
    for t in 0..steps {
        match &dys[t] {
            Some(dy) => {
                let h_t = &trace.hidden[t + 1];
                grads.w_y.add_assign(&dy.matmul_transa(h_t)?)?;
                grads.b_y.add_assign(&dy.sum_rows())?;
                dh_from_y.push(Some(dy.matmul(&params.w_y)?));
            }
            None => dh_from_y.push(None),
        }
    }

    let batch = sequence[0].rows();
    let n = params.hidden_size;
    let mut dh_next = Matrix::<T>::zeros(batch, n);
    let mut dc_next = Matrix::<T>::zeros(batch, n);

    for t in (0..steps).rev() {
        let mut dh = dh_next;
        if let Some(dy_h) = &dh_from_y[t] {
            dh.add_assign(dy_h)?;
        }
        let h_prev = &trace.hidden[t];
        let x_t = &sequence[t];

        match params.kind {
            CellKind::LinearRnn | CellKind::TanhRnn | CellKind::ReluRnn => {
                let dz = match params.kind {
                    CellKind::TanhRnn => {
                        let h_t = &trace.hidden[t + 1];
                        dh.hadamard(&h_t.map(|v| T::one() - v * v))?
                    }
                    CellKind::ReluRnn => {
                        let z = &trace.pre[t];
                        dh.hadamard(&z.map(|v| if v > T::zero() { T::one() } else { T::zero() }))?
                    }
                    _ => dh,
                };
                grads.w_h[0].add_assign(&dz.matmul_transa(h_prev)?)?;
                grads.w_x[0].add_assign(&dz.matmul_transa(x_t)?)?;
                grads.b[0].add_assign(&dz.sum_rows())?;
                dh_next = dz.matmul(&params.w_h[0])?;
            }
            CellKind::Lstm => {
                let [i, f, g_c, o] = &trace.gates[t];
                let ct = &trace.cell_tanh[t];
                let c_prev = &trace.cells[t];

                let d_o = dh.hadamard(ct)?;
                let dz_o = d_o.hadamard(&o.map(|v| v * (T::one() - v)))?;
                let mut dc = dh
                    .hadamard(o)?
                    .hadamard(&ct.map(|v| T::one() - v * v))?;
                dc.add_assign(&dc_next)?;
                let dz_f = dc
                    .hadamard(c_prev)?
                    .hadamard(&f.map(|v| v * (T::one() - v)))?;
                let dz_i = dc
                    .hadamard(g_c)?
                    .hadamard(&i.map(|v| v * (T::one() - v)))?;
                let dz_g = dc
                    .hadamard(i)?
                    .hadamard(&g_c.map(|v| T::one() - v * v))?;
                dc_next = dc.hadamard(f)?;

                dh_next = Matrix::zeros(batch, n);
                for (g, dz) in [&dz_i, &dz_f, &dz_g, &dz_o].into_iter().enumerate() {
                    grads.w_h[g].add_assign(&dz.matmul_transa(h_prev)?)?;
                    grads.w_x[g].add_assign(&dz.matmul_transa(x_t)?)?;
                    grads.b[g].add_assign(&dz.sum_rows())?;
                    dh_next.add_assign(&dz.matmul(&params.w_h[g])?)?;
                }
            }
            CellKind::Gru => {
                let [r, z, cand, s] = &trace.gru[t];
                let one = T::one();

                let dn = dh.hadamard(&z.map(|v| one - v))?;
                let du = dh.hadamard(&h_prev.sub(cand)?)?;
                let mut dh_prev = dh.hadamard(z)?;

                let dz_n = dn.hadamard(&cand.map(|v| one - v * v))?;
                grads.w_x[2].add_assign(&dz_n.matmul_transa(x_t)?)?;
                grads.b[2].add_assign(&dz_n.sum_rows())?;
                let dr = dz_n.hadamard(s)?;
                let ds = dz_n.hadamard(r)?;
                grads.w_h[2].add_assign(&ds.matmul_transa(h_prev)?)?;
                dh_prev.add_assign(&ds.matmul(&params.w_h[2])?)?;

                let dz_r = dr.hadamard(&r.map(|v| v * (one - v)))?;
                grads.w_h[0].add_assign(&dz_r.matmul_transa(h_prev)?)?;
                grads.w_x[0].add_assign(&dz_r.matmul_transa(x_t)?)?;
                grads.b[0].add_assign(&dz_r.sum_rows())?;
                dh_prev.add_assign(&dz_r.matmul(&params.w_h[0])?)?;

                let dz_u = du.hadamard(&z.map(|v| v * (one - v)))?;
                grads.w_h[1].add_assign(&dz_u.matmul_transa(h_prev)?)?;
                grads.w_x[1].add_assign(&dz_u.matmul_transa(x_t)?)?;
                grads.b[1].add_assign(&dz_u.sum_rows())?;
                dh_prev.add_assign(&dz_u.matmul(&params.w_h[1])?)?;

                dh_next = dh_prev;
            }
        }
    }
    let last_output = trace.outputs.pop().expect("loss rejected empty trajectories");
    Ok((loss_value, grads, last_output))
}

/// Highest relative gradient error found by central finite differences.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    /// Worst relative error over every coordinate of every block.
    pub max_rel_error: f64,
    /// Block name owning the worst coordinate.
    pub worst_block: String,
    /// Flat index of the worst coordinate within its block.
    pub worst_index: usize,
    /// Total coordinates compared.
    pub coords_checked: usize,
}

/// Compare [`backward`]'s gradients against central finite differences.
///
/// Every coordinate of every block is perturbed by ±`step`; the relative
/// error uses `|a−b| / max(|a|, |b|, 1e-8)` so near-zero pairs cannot
/// blow up the ratio. Intended for small models — cost is two forward
/// passes per coordinate.
pub fn gradient_check<T: Scalar>(
    params: &CellParams<T>,
    sequence: &[Matrix<T>],
    targets: &Targets<'_, T>,
    loss: LossKind,
    step: f64,
) -> Result<GradCheckReport> {
    let (_, grads) = backward(params, sequence, targets, loss)?;
    let mut work = params.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_block: String::new(),
        worst_index: 0,
        coords_checked: 0,
    };
    let h = lit::<T>(step);

    let block_shapes: Vec<(String, usize)> = params
        .blocks()
        .into_iter()
        .map(|(name, m)| (name, m.as_slice().len()))
        .collect();
    for (block_idx, (name, len)) in block_shapes.iter().enumerate() {
        for idx in 0..*len {
            let original = params.blocks()[block_idx].1.as_slice()[idx];
            {
                let mut blocks = work.blocks_mut();
                blocks[block_idx].1.as_mut_slice()[idx] = original + h;
            }
            let up = eval_loss(&work, sequence, targets, loss)?;
            {
                let mut blocks = work.blocks_mut();
                blocks[block_idx].1.as_mut_slice()[idx] = original - h;
            }
            let down = eval_loss(&work, sequence, targets, loss)?;
            {
                let mut blocks = work.blocks_mut();
                blocks[block_idx].1.as_mut_slice()[idx] = original;
            }
            let numeric = (up - down).to_f64_lossy() / (2.0 * step);
            let analytic = grads.blocks()[block_idx].1.as_slice()[idx].to_f64_lossy();
            let denom = analytic.abs().max(numeric.abs()).max(1e-8);
            let rel = (analytic - numeric).abs() / denom;
            report.coords_checked += 1;
            if rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst_block = name.clone();
                report.worst_index = idx;
            }
        }
    }
    Ok(report)
}

/// Forward + loss without gradients.
pub fn eval_loss<T: Scalar>(
    params: &CellParams<T>,
    sequence: &[Matrix<T>],
    targets: &Targets<'_, T>,
    loss: LossKind,
) -> Result<T> {
    let trace = run_forward(params, sequence, None)?;
    let (value, _) = loss_grads(&trace.outputs, targets, loss)?;
    Ok(value)
}
