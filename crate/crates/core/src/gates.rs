//! Gate library.
//!
//! Matrix conventions (angles in radians throughout):
//!
//! | Gate | Matrix |
//! |------|--------|
//! | `RX/RY/RZ(θ)` | `exp(-iθP/2)` |
//! | `P(φ)` | `diag(1, e^{iφ})` |
//! | `Rot(θ,φ,λ)` / `U` | `[[cos(θ/2), -e^{iλ}sin(θ/2)], [e^{iφ}sin(θ/2), e^{i(φ+λ)}cos(θ/2)]]` |
//! | `GlobalPhase(γ)` | `e^{iγ} I` |
//! | `RXX/RYY/RZZ(φ)` | `exp(-iφ P⊗P/2)` |
//! | `RXY(φ)` | `exp(-iφ (X⊗X + Y⊗Y)/4)` |
//! | `ISWAP` | swaps `|01⟩`,`|10⟩` with phase `i` |
//! | `SWAPalpha(α)` | `SWAP^α`, principal branch |
//! | `Magic` | `(1/√2)[[1,i,0,0],[0,0,i,1],[0,0,i,-1],[1,-i,0,0]]` |
//! | `Berkeley` | `exp(i(π/8)(2 X⊗X + Y⊗Y))` |
//! | `Canonical(a,b,c)` | `exp(-i(π/2)(a X⊗X + b Y⊗Y + c Z⊗Z))` |
//! | `Givens(θ)` | rotation by `θ` in the `{|01⟩, |10⟩}` block |
//! | `Barenco(α,φ,θ)` | controlled `[[e^{iα}cosθ, -ie^{i(α-φ)}sinθ], [-ie^{i(α+φ)}sinθ, e^{iα}cosθ]]` |
//! | `Margolus` | Toffoli with an extra `-1` on `|101⟩` |
//!
//! Multi-qubit matrices use the crate bit ordering: the first listed target is
//! the most significant bit of the local index. Controlled gates list their
//! controls first.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::matrix::{c, cis, Matrix, I, ONE, ZERO};

/// Widest gate accepted by [`GateDef::arbitrary`] and [`crate::Circuit::to_gate`].
pub const MAX_GATE_QUBITS: usize = 12;

const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateFamily {
    Single,
    Two,
    Three,
    Control,
    Arbitrary,
}

/// Parameter signature of a library gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub family: GateFamily,
    pub param_names: &'static [&'static str],
    /// Number of wires; for control gates this excludes the controls.
    pub wires: usize,
}

impl ParamSpec {
    pub fn param_count(&self) -> usize {
        self.param_names.len()
    }
}

macro_rules! spec {
    ($name:literal, $fam:ident, $wires:literal, [$($p:literal),*]) => {
        ParamSpec { name: $name, family: GateFamily::$fam, param_names: &[$($p),*], wires: $wires }
    };
}

/// Every named library gate, including aliases.
pub const LIBRARY: &[ParamSpec] = &[
    spec!("I", Single, 1, []),
    spec!("X", Single, 1, []),
    spec!("Y", Single, 1, []),
    spec!("Z", Single, 1, []),
    spec!("S", Single, 1, []),
    spec!("H", Single, 1, []),
    spec!("P", Single, 1, ["phi"]),
    spec!("T", Single, 1, []),
    spec!("Xsqrt", Single, 1, []),
    spec!("GlobalPhase", Single, 1, ["gamma"]),
    spec!("Rot", Single, 1, ["theta", "phi", "lambda"]),
    spec!("U", Single, 1, ["theta", "phi", "lambda"]),
    spec!("RX", Single, 1, ["theta"]),
    spec!("RY", Single, 1, ["theta"]),
    spec!("RZ", Single, 1, ["theta"]),
    spec!("SWAP", Two, 2, []),
    spec!("ISWAP", Two, 2, []),
    spec!("SWAPsqrt", Two, 2, []),
    spec!("SWAPalpha", Two, 2, ["alpha"]),
    spec!("Magic", Two, 2, []),
    spec!("RXX", Two, 2, ["phi"]),
    spec!("RYY", Two, 2, ["phi"]),
    spec!("RZZ", Two, 2, ["phi"]),
    spec!("RXY", Two, 2, ["phi"]),
    spec!("Barenco", Two, 2, ["alpha", "phi", "theta"]),
    spec!("Berkeley", Two, 2, []),
    spec!("Canonical", Two, 2, ["a", "b", "c"]),
    spec!("Givens", Two, 2, ["theta"]),
    spec!("Toffoli", Three, 3, []),
    spec!("CCX", Three, 3, []),
    spec!("Margolus", Three, 3, []),
    spec!("Fredkin", Three, 3, []),
    spec!("CSWAP", Three, 3, []),
    spec!("CX", Control, 1, []),
    spec!("CNOT", Control, 1, []),
    spec!("CZ", Control, 1, []),
    spec!("CP", Control, 1, ["phi"]),
    spec!("CU", Control, 1, ["theta", "phi", "lambda"]),
    spec!("CS", Control, 1, []),
    spec!("CSX", Control, 1, []),
];

/// Signature lookup by canonical name.
pub fn param_spec(name: &str) -> Option<&'static ParamSpec> {
    LIBRARY.iter().find(|s| s.name == name)
}

/// A unitary bound to concrete target wires.
#[derive(Clone, PartialEq)]
pub struct GateDef {
    name: String,
    params: Vec<f64>,
    matrix: Arc<Matrix>,
    /// Operator on the non-control targets; shares `matrix` when there are no controls.
    active: Arc<Matrix>,
    targets: Vec<usize>,
    num_controls: usize,
    family: GateFamily,
}

impl fmt::Debug for GateDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|x| format!("{x}")).collect();
            write!(f, "({})", p.join(", "))?;
        }
        write!(f, " {:?}", self.targets)
    }
}

type CacheKey = (&'static str, Vec<u64>);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<Matrix>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<Matrix>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached_matrix(spec: &'static ParamSpec, params: &[f64]) -> Arc<Matrix> {
    let key = (spec.name, params.iter().map(|p| p.to_bits()).collect::<Vec<_>>());
    if let Some(m) = cache().read().expect("gate cache poisoned").get(&key) {
        return Arc::clone(m);
    }
    let m = Arc::new(library_matrix(spec.name, params));
    cache()
        .write()
        .expect("gate cache poisoned")
        .entry(key)
        .or_insert(m)
        .clone()
}

fn check_wires(targets: &[usize]) -> Result<()> {
    for (k, t) in targets.iter().enumerate() {
        if targets[..k].contains(t) {
            return Err(Error::DuplicateWire(*t));
        }
    }
    Ok(())
}

fn lookup(name: &str, family: Option<GateFamily>, params: &[f64]) -> Result<&'static ParamSpec> {
    let spec = param_spec(name)
        .filter(|s| family.is_none_or(|f| f == s.family))
        .ok_or_else(|| Error::UnknownGate(name.to_string()))?;
    if params.len() != spec.param_count() {
        return Err(Error::ParamCount {
            gate: name.to_string(),
            expected: spec.param_count(),
            got: params.len(),
        });
    }
    if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
        return Err(Error::Domain(format!("gate `{name}` parameter {bad} is not finite")));
    }
    Ok(spec)
}

/// Lower-right `2^(k-c)` block of a controlled operator.
fn active_block(matrix: &Arc<Matrix>, num_controls: usize) -> Arc<Matrix> {
    if num_controls == 0 {
        return Arc::clone(matrix);
    }
    let d = matrix.dim() >> num_controls;
    let off = matrix.dim() - d;
    let mut m = Matrix::zeros(d);
    for r in 0..d {
        for col in 0..d {
            m.set(r, col, matrix.get(off + r, off + col));
        }
    }
    Arc::new(m)
}

impl GateDef {
    fn assemble(
        name: String,
        params: Vec<f64>,
        matrix: Arc<Matrix>,
        targets: Vec<usize>,
        num_controls: usize,
        family: GateFamily,
    ) -> Self {
        let active = active_block(&matrix, num_controls);
        Self {
            name,
            params,
            matrix,
            active,
            targets,
            num_controls,
            family,
        }
    }

    fn from_spec(spec: &'static ParamSpec, params: &[f64], targets: Vec<usize>) -> Result<Self> {
        check_wires(&targets)?;
        let num_controls = match spec.family {
            GateFamily::Control => targets.len() - 1,
            GateFamily::Two if spec.name == "Barenco" => 1,
            GateFamily::Three if matches!(spec.name, "Toffoli" | "CCX") => 2,
            GateFamily::Three if matches!(spec.name, "Fredkin" | "CSWAP") => 1,
            _ => 0,
        };
        let matrix = if spec.family == GateFamily::Control && num_controls > 1 {
            let base = cached_matrix(spec, params);
            let base = Matrix::clone(&base);
            Arc::new(controlled_matrix(&base, num_controls - 1))
        } else {
            cached_matrix(spec, params)
        };
        Ok(Self::assemble(
            spec.name.to_string(),
            params.to_vec(),
            matrix,
            targets,
            num_controls,
            spec.family,
        ))
    }

    /// One of the single-qubit library gates.
    pub fn single(name: &str, params: &[f64], target: usize) -> Result<Self> {
        let spec = lookup(name, Some(GateFamily::Single), params)?;
        Self::from_spec(spec, params, vec![target])
    }

    /// One of the two-qubit library gates.
    pub fn two(name: &str, params: &[f64], t1: usize, t2: usize) -> Result<Self> {
        let spec = lookup(name, Some(GateFamily::Two), params)?;
        Self::from_spec(spec, params, vec![t1, t2])
    }

    /// `Toffoli`/`CCX`, `Fredkin`/`CSWAP` or `Margolus`.
    pub fn three(name: &str, t1: usize, t2: usize, t3: usize) -> Result<Self> {
        let spec = lookup(name, Some(GateFamily::Three), &[])?;
        Self::from_spec(spec, &[], vec![t1, t2, t3])
    }

    /// A library control gate (`CX`, `CZ`, `CP`, `CU`, `CS`, `CSX`) with one
    /// or two controls.
    pub fn control(name: &str, params: &[f64], controls: &[usize], target: usize) -> Result<Self> {
        let spec = lookup(name, Some(GateFamily::Control), params)?;
        if controls.is_empty() || controls.len() > 2 {
            return Err(Error::WireCount {
                gate: name.to_string(),
                expected: 2,
                got: controls.len() + 1,
            });
        }
        let mut wires = controls.to_vec();
        wires.push(target);
        Self::from_spec(spec, params, wires)
    }

    /// Any library gate by name, wires given flat (controls first for control gates).
    pub fn library(name: &str, params: &[f64], wires: &[usize]) -> Result<Self> {
        let spec = lookup(name, None, params)?;
        let ok = match spec.family {
            GateFamily::Control => (2..=3).contains(&wires.len()),
            _ => wires.len() == spec.wires,
        };
        if !ok {
            return Err(Error::WireCount {
                gate: name.to_string(),
                expected: spec.wires + usize::from(spec.family == GateFamily::Control),
                got: wires.len(),
            });
        }
        Self::from_spec(spec, params, wires.to_vec())
    }

    /// A user-defined gate. The matrix must be `2^k x 2^k` for `k` targets and
    /// unitary within `1e-10`.
    pub fn arbitrary(name: impl Into<String>, matrix: Matrix, targets: &[usize]) -> Result<Self> {
        let k = targets.len();
        if k == 0 || k > MAX_GATE_QUBITS || matrix.dim() != 1 << k {
            return Err(Error::Dimension {
                rows: matrix.dim(),
                cols: matrix.dim(),
                qubits: k,
            });
        }
        check_wires(targets)?;
        let max_deviation = matrix.unitarity_deviation();
        if max_deviation >= UNITARY_TOLERANCE {
            return Err(Error::NonUnitary { max_deviation });
        }
        Ok(Self::assemble(
            name.into(),
            Vec::new(),
            Arc::new(matrix),
            targets.to_vec(),
            0,
            GateFamily::Arbitrary,
        ))
    }

    /// `u` controlled on `controls` (all must be `|1⟩`). Controls come first in
    /// the resulting target list.
    pub fn controlled(u: &GateDef, controls: &[usize]) -> Result<Self> {
        let mut wires = controls.to_vec();
        wires.extend_from_slice(&u.targets);
        if wires.len() > MAX_GATE_QUBITS {
            return Err(Error::TooManyQubits {
                qubits: wires.len(),
                limit: MAX_GATE_QUBITS,
                what: "a gate",
            });
        }
        check_wires(&wires)?;
        Ok(Self::assemble(
            format!("C{}", u.name),
            u.params.clone(),
            Arc::new(controlled_matrix(&u.matrix, controls.len())),
            wires,
            u.num_controls + controls.len(),
            GateFamily::Control,
        ))
    }

    /// Conjugate transpose. The name gains a `_dg` suffix (or loses it).
    pub fn adjoint(&self) -> Self {
        let name = match self.name.strip_suffix("_dg") {
            Some(base) => base.to_string(),
            None => format!("{}_dg", self.name),
        };
        Self::assemble(
            name,
            self.params.clone(),
            Arc::new(self.matrix.adjoint()),
            self.targets.clone(),
            self.num_controls,
            self.family,
        )
    }

    /// The same operator on different wires.
    pub fn on(&self, targets: &[usize]) -> Result<Self> {
        if targets.len() != self.targets.len() {
            return Err(Error::WireCount {
                gate: self.name.clone(),
                expected: self.targets.len(),
                got: targets.len(),
            });
        }
        check_wires(targets)?;
        Ok(Self {
            targets: targets.to_vec(),
            ..self.clone()
        })
    }

    /// Renames the gate (used for composite gates).
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The operator on the non-control wires `targets()[num_controls()..]`.
    pub fn active_matrix(&self) -> &Matrix {
        &self.active
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Number of leading control wires in [`GateDef::targets`].
    pub fn num_controls(&self) -> usize {
        self.num_controls
    }

    pub fn family(&self) -> GateFamily {
        self.family
    }

    /// True when the gate was built from the named library (as opposed to a
    /// user matrix, adjoint or composite).
    pub fn is_library(&self) -> bool {
        self.family != GateFamily::Arbitrary
            && param_spec(&self.name).is_some_and(|s| s.family == self.family)
    }
}

/// `diag(I, …, I, U)` with `k` control qubits in front of `u`.
pub fn controlled_matrix(u: &Matrix, k: usize) -> Matrix {
    let d = u.dim();
    let total = d << k;
    let mut m = Matrix::identity(total);
    let off = total - d;
    for r in 0..d {
        for col in 0..d {
            m.set(off + r, off + col, u.get(r, col));
        }
    }
    m
}

fn pauli(kind: char) -> Matrix {
    match kind {
        'I' => Matrix::identity(2),
        'X' => Matrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]),
        'Y' => Matrix::from_array([[ZERO, -I], [I, ZERO]]),
        'Z' => Matrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]),
        _ => unreachable!("not a Pauli: {kind}"),
    }
}

/// `cos(a) I - i sin(a) P` for an involution `P`, i.e. `exp(-i a P)`.
fn involution_exp(a: f64, p: &Matrix) -> Matrix {
    let id = Matrix::identity(p.dim());
    &id.scale(c(a.cos(), 0.0)) + &p.scale(c(0.0, -a.sin()))
}

fn swap_matrix() -> Matrix {
    Matrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

/// `SWAP^alpha = P_sym + e^{iπα} P_anti`.
fn swap_power(alpha: f64) -> Matrix {
    let id = Matrix::identity(4);
    let swap = swap_matrix();
    let sym = (&id + &swap).scale(c(0.5, 0.0));
    let anti = (&id + &swap.scale(c(-1.0, 0.0))).scale(c(0.5, 0.0));
    &sym + &anti.scale(cis(PI * alpha))
}

fn rot(theta: f64, phi: f64, lambda: f64) -> Matrix {
    let (s, co) = (theta / 2.0).sin_cos();
    Matrix::from_array([
        [c(co, 0.0), -cis(lambda) * s],
        [cis(phi) * s, cis(phi + lambda) * co],
    ])
}

fn toffoli() -> Matrix {
    let mut m = Matrix::identity(8);
    m.set(6, 6, ZERO);
    m.set(7, 7, ZERO);
    m.set(6, 7, ONE);
    m.set(7, 6, ONE);
    m
}

fn library_matrix(name: &str, p: &[f64]) -> Matrix {
    let h = FRAC_1_SQRT_2;
    let xx = pauli('X').kron(&pauli('X'));
    let yy = pauli('Y').kron(&pauli('Y'));
    let zz = pauli('Z').kron(&pauli('Z'));
    let sx = Matrix::from_array([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]);
    match name {
        "I" | "X" | "Y" | "Z" => pauli(name.chars().next().unwrap()),
        "S" => Matrix::diagonal(&[ONE, I]),
        "T" => Matrix::diagonal(&[ONE, cis(FRAC_PI_4)]),
        "H" => Matrix::from_real_rows([[h, h], [h, -h]]),
        "P" => Matrix::diagonal(&[ONE, cis(p[0])]),
        "Xsqrt" => sx,
        "GlobalPhase" => Matrix::identity(2).scale(cis(p[0])),
        "Rot" | "U" => rot(p[0], p[1], p[2]),
        "RX" => involution_exp(p[0] / 2.0, &pauli('X')),
        "RY" => involution_exp(p[0] / 2.0, &pauli('Y')),
        "RZ" => involution_exp(p[0] / 2.0, &pauli('Z')),

        "SWAP" => swap_matrix(),
        "ISWAP" => {
            let mut m = Matrix::identity(4);
            m.set(1, 1, ZERO);
            m.set(2, 2, ZERO);
            m.set(1, 2, I);
            m.set(2, 1, I);
            m
        }
        "SWAPsqrt" => swap_power(0.5),
        "SWAPalpha" => swap_power(p[0]),
        "Magic" => Matrix::from_array([
            [ONE, I, ZERO, ZERO],
            [ZERO, ZERO, I, ONE],
            [ZERO, ZERO, I, -ONE],
            [ONE, -I, ZERO, ZERO],
        ])
        .scale(c(h, 0.0)),
        "RXX" => involution_exp(p[0] / 2.0, &xx),
        "RYY" => involution_exp(p[0] / 2.0, &yy),
        "RZZ" => involution_exp(p[0] / 2.0, &zz),
        "RXY" => {
            // (XX + YY)/2 swaps |01> and |10> and annihilates |00>, |11>.
            let (s, co) = (p[0] / 2.0).sin_cos();
            let mut m = Matrix::identity(4);
            m.set(1, 1, c(co, 0.0));
            m.set(2, 2, c(co, 0.0));
            m.set(1, 2, c(0.0, -s));
            m.set(2, 1, c(0.0, -s));
            m
        }
        "Barenco" => {
            let (alpha, phi, theta) = (p[0], p[1], p[2]);
            let (s, co) = theta.sin_cos();
            let u = Matrix::from_array([
                [cis(alpha) * co, -I * cis(alpha - phi) * s],
                [-I * cis(alpha + phi) * s, cis(alpha) * co],
            ]);
            controlled_matrix(&u, 1)
        }
        // XX, YY and ZZ commute, so the exponentials factor.
        "Berkeley" => involution_exp(-FRAC_PI_4, &xx).matmul(&involution_exp(-FRAC_PI_8, &yy)),
        "Canonical" => involution_exp(FRAC_PI_2 * p[0], &xx)
            .matmul(&involution_exp(FRAC_PI_2 * p[1], &yy))
            .matmul(&involution_exp(FRAC_PI_2 * p[2], &zz)),
        "Givens" => {
            let (s, co) = p[0].sin_cos();
            let mut m = Matrix::identity(4);
            m.set(1, 1, c(co, 0.0));
            m.set(1, 2, c(-s, 0.0));
            m.set(2, 1, c(s, 0.0));
            m.set(2, 2, c(co, 0.0));
            m
        }

        "Toffoli" | "CCX" => toffoli(),
        "Margolus" => {
            let mut m = toffoli();
            m.set(5, 5, -ONE);
            m
        }
        "Fredkin" | "CSWAP" => controlled_matrix(&swap_matrix(), 1),

        "CX" | "CNOT" => controlled_matrix(&pauli('X'), 1),
        "CZ" => controlled_matrix(&pauli('Z'), 1),
        "CP" => controlled_matrix(&Matrix::diagonal(&[ONE, cis(p[0])]), 1),
        "CU" => controlled_matrix(&rot(p[0], p[1], p[2]), 1),
        "CS" => controlled_matrix(&Matrix::diagonal(&[ONE, I]), 1),
        "CSX" => controlled_matrix(&sx, 1),
        _ => unreachable!("library gate without a matrix: {name}"),
    }
}

// Shorthands for building circuits in code. They panic only on duplicate
// wires, which is a programming error at the call site.

macro_rules! fixed_single {
    ($($fn:ident => $name:literal),* $(,)?) => {$(
        #[doc = concat!("`", $name, "` on `q`.")]
        pub fn $fn(q: usize) -> GateDef {
            GateDef::single($name, &[], q).expect("library gate")
        }
    )*};
}

fixed_single!(id => "I", x => "X", y => "Y", z => "Z", s => "S", h => "H", t => "T", sx => "Xsqrt");

pub fn p(phi: f64, q: usize) -> GateDef {
    GateDef::single("P", &[phi], q).expect("library gate")
}

pub fn rx(theta: f64, q: usize) -> GateDef {
    GateDef::single("RX", &[theta], q).expect("library gate")
}

pub fn ry(theta: f64, q: usize) -> GateDef {
    GateDef::single("RY", &[theta], q).expect("library gate")
}

pub fn rz(theta: f64, q: usize) -> GateDef {
    GateDef::single("RZ", &[theta], q).expect("library gate")
}

pub fn cx(control: usize, target: usize) -> GateDef {
    GateDef::control("CX", &[], &[control], target).expect("distinct wires")
}

pub fn cz(control: usize, target: usize) -> GateDef {
    GateDef::control("CZ", &[], &[control], target).expect("distinct wires")
}

pub fn cp(phi: f64, control: usize, target: usize) -> GateDef {
    GateDef::control("CP", &[phi], &[control], target).expect("distinct wires")
}

pub fn ccx(c1: usize, c2: usize, target: usize) -> GateDef {
    GateDef::three("CCX", c1, c2, target).expect("distinct wires")
}

pub fn swap(a: usize, b: usize) -> GateDef {
    GateDef::two("SWAP", &[], a, b).expect("distinct wires")
}

pub fn rzz(phi: f64, a: usize, b: usize) -> GateDef {
    GateDef::two("RZZ", &[phi], a, b).expect("distinct wires")
}
