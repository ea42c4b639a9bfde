use super::dual::Dual;
use super::AutodiffError;
use crate::scalar::Scalar;
use std::cell::RefCell;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Node operations. Operand indices always point at earlier nodes, so one
/// forward pass in recording order evaluates the whole expression and one
/// reverse pass visits each node exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Input(u32),
    Param(u32),
    Const(u32),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Div(u32, u32),
    Neg(u32),
    Sin(u32),
    Cos(u32),
    Tanh(u32),
    Exp(u32),
    Powi(u32, i32),
}

/// Recorded scalar expression over named inputs and parameters.
///
/// Topology is fixed at recording time; leaf values can be rebound with
/// [`Tape::set_input`] / [`Tape::set_params`] and re-evaluated, which is how
/// per-point replays avoid re-recording.
#[derive(Debug, Clone)]
pub struct Tape<S> {
    ops: Vec<Op>,
    consts: Vec<S>,
    input_vals: Vec<S>,
    param_vals: Vec<S>,
    output: u32,
    vals: Vec<S>,
    evaluated: bool,
}

/// Recording context handed to the expression builder.
pub struct Graph<S> {
    inner: RefCell<GraphInner<S>>,
}

struct GraphInner<S> {
    ops: Vec<Op>,
    consts: Vec<S>,
    vals: Vec<S>,
    division_by_zero: Option<usize>,
}

/// Handle to a recorded node; supports arithmetic operators and the
/// elementary functions allowed on the tape (sin, cos, tanh, exp, powi).
#[derive(Clone, Copy)]
pub struct Expr<'g, S: Scalar> {
    graph: &'g Graph<S>,
    id: u32,
}

impl<S: Scalar> Graph<S> {
    fn push(&self, op: Op, val: S) -> u32 {
        let mut g = self.inner.borrow_mut();
        g.ops.push(op);
        g.vals.push(val);
        (g.ops.len() - 1) as u32
    }

    fn val(&self, id: u32) -> S {
        self.inner.borrow().vals[id as usize]
    }

    pub fn constant(&self, v: S) -> Expr<'_, S> {
        let idx = {
            let mut g = self.inner.borrow_mut();
            g.consts.push(v);
            (g.consts.len() - 1) as u32
        };
        let id = self.push(Op::Const(idx), v);
        Expr { graph: self, id }
    }
}

impl<'g, S: Scalar> Expr<'g, S> {
    pub fn sin(self) -> Self {
        let v = self.graph.val(self.id).sin();
        Expr {
            graph: self.graph,
            id: self.graph.push(Op::Sin(self.id), v),
        }
    }

    pub fn cos(self) -> Self {
        let v = self.graph.val(self.id).cos();
        Expr {
            graph: self.graph,
            id: self.graph.push(Op::Cos(self.id), v),
        }
    }

    pub fn tanh(self) -> Self {
        let v = self.graph.val(self.id).tanh();
        Expr {
            graph: self.graph,
            id: self.graph.push(Op::Tanh(self.id), v),
        }
    }

    pub fn exp(self) -> Self {
        let v = self.graph.val(self.id).exp();
        Expr {
            graph: self.graph,
            id: self.graph.push(Op::Exp(self.id), v),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        let v = self.graph.val(self.id).powi(n);
        Expr {
            graph: self.graph,
            id: self.graph.push(Op::Powi(self.id, n), v),
        }
    }
}

macro_rules! expr_binop {
    ($trait:ident, $fn:ident, $op:ident) => {
        impl<'g, S: Scalar> $trait for Expr<'g, S> {
            type Output = Expr<'g, S>;
            fn $fn(self, rhs: Expr<'g, S>) -> Expr<'g, S> {
                let v = self.graph.val(self.id).$fn(self.graph.val(rhs.id));
                Expr {
                    graph: self.graph,
                    id: self.graph.push(Op::$op(self.id, rhs.id), v),
                }
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);

impl<'g, S: Scalar> Div for Expr<'g, S> {
    type Output = Expr<'g, S>;
    fn div(self, rhs: Expr<'g, S>) -> Expr<'g, S> {
        let denom = self.graph.val(rhs.id);
        let v = self.graph.val(self.id) / denom;
        let id = self.graph.push(Op::Div(self.id, rhs.id), v);
        if denom.value() == 0.0 {
            self.graph.inner.borrow_mut().division_by_zero = Some(id as usize);
        }
        Expr { graph: self.graph, id }
    }
}

impl<'g, S: Scalar> Neg for Expr<'g, S> {
    type Output = Expr<'g, S>;
    fn neg(self) -> Expr<'g, S> {
        let v = -self.graph.val(self.id);
        Expr {
            graph: self.graph,
            id: self.graph.push(Op::Neg(self.id), v),
        }
    }
}

impl<S: Scalar> Tape<S> {
    /// Record an expression over `inputs` and `params`. The builder receives
    /// the graph plus one [`Expr`] per input and parameter, in order, and
    /// returns the output node. Values are computed during recording, so the
    /// tape comes back already evaluated.
    pub fn record<F>(inputs: &[S], params: &[S], build: F) -> Result<Self, AutodiffError>
    where
        F: for<'g> FnOnce(&'g Graph<S>, &'g [Expr<'g, S>], &'g [Expr<'g, S>]) -> Expr<'g, S>,
    {
        let graph = Graph {
            inner: RefCell::new(GraphInner {
                ops: Vec::new(),
                consts: Vec::new(),
                vals: Vec::new(),
                division_by_zero: None,
            }),
        };
        let in_exprs: Vec<Expr<'_, S>> = inputs
            .iter()
            .enumerate()
            .map(|(i, &v)| Expr {
                graph: &graph,
                id: graph.push(Op::Input(i as u32), v),
            })
            .collect();
        let param_exprs: Vec<Expr<'_, S>> = params
            .iter()
            .enumerate()
            .map(|(i, &v)| Expr {
                graph: &graph,
                id: graph.push(Op::Param(i as u32), v),
            })
            .collect();
        let out = build(&graph, &in_exprs, &param_exprs);
        let output = out.id;
        let inner = graph.inner.into_inner();
        if let Some(node) = inner.division_by_zero {
            return Err(AutodiffError::DivisionByZero { node });
        }
        Ok(Tape {
            ops: inner.ops,
            consts: inner.consts,
            input_vals: inputs.to_vec(),
            param_vals: params.to_vec(),
            output,
            vals: inner.vals,
            evaluated: true,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ops.len()
    }

    pub fn input_count(&self) -> usize {
        self.input_vals.len()
    }

    pub fn param_count(&self) -> usize {
        self.param_vals.len()
    }

    /// Rebind one input; invalidates cached values until [`Tape::eval`].
    pub fn set_input(&mut self, index: usize, v: S) {
        self.input_vals[index] = v;
        self.evaluated = false;
    }

    pub fn set_params(&mut self, params: &[S]) {
        assert_eq!(params.len(), self.param_vals.len());
        self.param_vals.copy_from_slice(params);
        self.evaluated = false;
    }

    /// Recompute all node values for the current leaf bindings.
    pub fn eval(&mut self) -> Result<(), AutodiffError> {
        let mut vals = std::mem::take(&mut self.vals);
        vals.clear();
        forward_pass(
            &self.ops,
            |i| self.input_vals[i],
            |i| self.param_vals[i],
            |i| self.consts[i],
            &mut vals,
        )?;
        self.vals = vals;
        self.evaluated = true;
        Ok(())
    }

    /// Output value of the evaluated tape.
    pub fn value(&self) -> Result<S, AutodiffError> {
        if !self.evaluated {
            return Err(AutodiffError::Unevaluated);
        }
        Ok(self.vals[self.output as usize])
    }

    /// Reverse pass: gradient of `seed * output` with respect to every
    /// registered parameter.
    pub fn backward(&self, seed: S) -> Result<Vec<S>, AutodiffError> {
        if !self.evaluated {
            return Err(AutodiffError::Unevaluated);
        }
        let mut grads = vec![S::zero(); self.param_vals.len()];
        let mut adjoints = vec![S::zero(); self.ops.len()];
        backward_pass(&self.ops, &self.vals, self.output, seed, &mut adjoints, &mut grads);
        Ok(grads)
    }

    /// Derivative of the output with respect to one input, order 1 via a
    /// dual-number forward pass, order 2 via dual-over-dual.
    pub fn input_derivative(&self, input: usize, order: u32) -> Result<S, AutodiffError> {
        if !self.evaluated {
            return Err(AutodiffError::Unevaluated);
        }
        match order {
            1 => {
                let vals = self.forward_dual(input)?;
                Ok(vals[self.output as usize].tangent)
            }
            2 => {
                let vals = self.forward_dual2(input)?;
                Ok(vals[self.output as usize].tangent.tangent)
            }
            other => Err(AutodiffError::UnsupportedOrder(other)),
        }
    }

    /// Forward-over-reverse: parameter gradients of the output and of its
    /// first input-derivative in one pass. Entry `i` of the result is
    /// `(d out / d theta_i, d^2 out / d input d theta_i)`.
    pub fn backward_with_input_tangent(
        &self,
        input: usize,
        seed: S,
    ) -> Result<Vec<Dual<S>>, AutodiffError> {
        if !self.evaluated {
            return Err(AutodiffError::Unevaluated);
        }
        let vals = self.forward_dual(input)?;
        let mut grads = vec![Dual::constant(S::zero()); self.param_vals.len()];
        let mut adjoints = vec![Dual::constant(S::zero()); self.ops.len()];
        backward_pass(
            &self.ops,
            &vals,
            self.output,
            Dual::constant(seed),
            &mut adjoints,
            &mut grads,
        );
        Ok(grads)
    }

    /// Parameter gradients of an input derivative (order 1 or 2).
    pub fn backward_of_input_derivative(
        &self,
        input: usize,
        order: u32,
    ) -> Result<Vec<S>, AutodiffError> {
        match order {
            1 => Ok(self
                .backward_with_input_tangent(input, S::one())?
                .into_iter()
                .map(|g| g.tangent)
                .collect()),
            2 => {
                if !self.evaluated {
                    return Err(AutodiffError::Unevaluated);
                }
                let vals = self.forward_dual2(input)?;
                let mut grads = vec![Dual::constant(Dual::constant(S::zero())); self.param_vals.len()];
                let mut adjoints = vec![Dual::constant(Dual::constant(S::zero())); self.ops.len()];
                backward_pass(
                    &self.ops,
                    &vals,
                    self.output,
                    Dual::constant(Dual::constant(S::one())),
                    &mut adjoints,
                    &mut grads,
                );
                Ok(grads.into_iter().map(|g| g.tangent.tangent).collect())
            }
            other => Err(AutodiffError::UnsupportedOrder(other)),
        }
    }

    /// Forward-mode gradient entry: derivative of the output with respect to
    /// one parameter, computed by seeding that parameter's tangent. Used as
    /// an independent cross-check against [`Tape::backward`].
    pub fn forward_param_derivative(&self, param: usize, input_tangent: Option<usize>) -> Result<Dual<S>, AutodiffError> {
        if !self.evaluated {
            return Err(AutodiffError::Unevaluated);
        }
        let mut vals: Vec<Dual<Dual<S>>> = Vec::new();
        forward_pass(
            &self.ops,
            |i| {
                let inner = if input_tangent == Some(i) {
                    Dual::variable(self.input_vals[i])
                } else {
                    Dual::constant(self.input_vals[i])
                };
                Dual::constant(inner)
            },
            |i| {
                if i == param {
                    Dual::variable(Dual::constant(self.param_vals[i]))
                } else {
                    Dual::constant(Dual::constant(self.param_vals[i]))
                }
            },
            |i| Dual::constant(Dual::constant(self.consts[i])),
            &mut vals,
        )?;
        // outer tangent: d/d theta; its inner tangent: d/d input d/d theta.
        let out = vals[self.output as usize];
        Ok(out.tangent)
    }

    /// Dual-valued replay with the tangent seeded on `input`, whose value is
    /// overridden by `x` without touching the stored bindings. Writes into a
    /// caller-owned buffer so hot loops avoid reallocation.
    pub fn replay_dual_at(
        &self,
        input: usize,
        x: S,
        vals: &mut Vec<Dual<S>>,
    ) -> Result<(), AutodiffError> {
        vals.clear();
        forward_pass(
            &self.ops,
            |i| {
                if i == input {
                    Dual::variable(x)
                } else {
                    Dual::constant(self.input_vals[i])
                }
            },
            |i| Dual::constant(self.param_vals[i]),
            |i| Dual::constant(self.consts[i]),
            vals,
        )
    }

    /// Output node value from a replay buffer.
    pub fn replay_output<T: Copy>(&self, vals: &[T]) -> T {
        vals[self.output as usize]
    }

    /// Reverse pass over a dual replay buffer with unit seed. Entry `i` of
    /// `grads` becomes `(d out/d theta_i, d (d out/d input)/d theta_i)`.
    /// `adjoints` is scratch sized to the node count.
    pub fn backward_dual_from(
        &self,
        vals: &[Dual<S>],
        adjoints: &mut Vec<Dual<S>>,
        grads: &mut Vec<Dual<S>>,
    ) {
        adjoints.clear();
        adjoints.resize(self.ops.len(), Dual::constant(S::zero()));
        grads.clear();
        grads.resize(self.param_vals.len(), Dual::constant(S::zero()));
        backward_pass(
            &self.ops,
            vals,
            self.output,
            Dual::constant(S::one()),
            adjoints,
            grads,
        );
    }

    fn forward_dual(&self, input: usize) -> Result<Vec<Dual<S>>, AutodiffError> {
        let mut vals = Vec::new();
        forward_pass(
            &self.ops,
            |i| {
                if i == input {
                    Dual::variable(self.input_vals[i])
                } else {
                    Dual::constant(self.input_vals[i])
                }
            },
            |i| Dual::constant(self.param_vals[i]),
            |i| Dual::constant(self.consts[i]),
            &mut vals,
        )?;
        Ok(vals)
    }

    fn forward_dual2(&self, input: usize) -> Result<Vec<Dual<Dual<S>>>, AutodiffError> {
        let mut vals = Vec::new();
        forward_pass(
            &self.ops,
            |i| {
                if i == input {
                    // tangent seeded at both nesting levels
                    Dual::new(Dual::variable(self.input_vals[i]), Dual::one())
                } else {
                    Dual::constant(Dual::constant(self.input_vals[i]))
                }
            },
            |i| Dual::constant(Dual::constant(self.param_vals[i])),
            |i| Dual::constant(Dual::constant(self.consts[i])),
            &mut vals,
        )?;
        Ok(vals)
    }
}

fn forward_pass<T: Scalar>(
    ops: &[Op],
    input: impl Fn(usize) -> T,
    param: impl Fn(usize) -> T,
    constant: impl Fn(usize) -> T,
    vals: &mut Vec<T>,
) -> Result<(), AutodiffError> {
    vals.reserve(ops.len());
    for (idx, op) in ops.iter().enumerate() {
        let v = match *op {
            Op::Input(i) => input(i as usize),
            Op::Param(i) => param(i as usize),
            Op::Const(i) => constant(i as usize),
            Op::Add(a, b) => vals[a as usize] + vals[b as usize],
            Op::Sub(a, b) => vals[a as usize] - vals[b as usize],
            Op::Mul(a, b) => vals[a as usize] * vals[b as usize],
            Op::Div(a, b) => {
                let denom = vals[b as usize];
                if denom.value() == 0.0 {
                    return Err(AutodiffError::DivisionByZero { node: idx });
                }
                vals[a as usize] / denom
            }
            Op::Neg(a) => -vals[a as usize],
            Op::Sin(a) => vals[a as usize].sin(),
            Op::Cos(a) => vals[a as usize].cos(),
            Op::Tanh(a) => vals[a as usize].tanh(),
            Op::Exp(a) => vals[a as usize].exp(),
            Op::Powi(a, n) => vals[a as usize].powi(n),
        };
        vals.push(v);
    }
    Ok(())
}

fn backward_pass<T: Scalar>(
    ops: &[Op],
    vals: &[T],
    output: u32,
    seed: T,
    adjoints: &mut [T],
    param_grads: &mut [T],
) {
    adjoints[output as usize] = seed;
    for idx in (0..ops.len()).rev() {
        let adj = adjoints[idx];
        match ops[idx] {
            Op::Input(_) | Op::Const(_) => {}
            Op::Param(p) => {
                param_grads[p as usize] = param_grads[p as usize] + adj;
            }
            Op::Add(a, b) => {
                adjoints[a as usize] = adjoints[a as usize] + adj;
                adjoints[b as usize] = adjoints[b as usize] + adj;
            }
            Op::Sub(a, b) => {
                adjoints[a as usize] = adjoints[a as usize] + adj;
                adjoints[b as usize] = adjoints[b as usize] - adj;
            }
            Op::Mul(a, b) => {
                adjoints[a as usize] = adjoints[a as usize] + adj * vals[b as usize];
                adjoints[b as usize] = adjoints[b as usize] + adj * vals[a as usize];
            }
            Op::Div(a, b) => {
                let vb = vals[b as usize];
                adjoints[a as usize] = adjoints[a as usize] + adj / vb;
                adjoints[b as usize] =
                    adjoints[b as usize] - adj * vals[idx] / vb;
            }
            Op::Neg(a) => {
                adjoints[a as usize] = adjoints[a as usize] - adj;
            }
            Op::Sin(a) => {
                adjoints[a as usize] = adjoints[a as usize] + adj * vals[a as usize].cos();
            }
            Op::Cos(a) => {
                adjoints[a as usize] = adjoints[a as usize] - adj * vals[a as usize].sin();
            }
            Op::Tanh(a) => {
                let t = vals[idx];
                adjoints[a as usize] = adjoints[a as usize] + adj * (T::one() - t * t);
            }
            Op::Exp(a) => {
                adjoints[a as usize] = adjoints[a as usize] + adj * vals[idx];
            }
            Op::Powi(a, n) => {
                let d = T::from_f64(n as f64) * vals[a as usize].powi(n - 1);
                adjoints[a as usize] = adjoints[a as usize] + adj * d;
            }
        }
    }
}
