//! Python bindings. Frequencies cross the boundary in GHz, ζ in MHz,
//! temperatures in mK and gate times in ns.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use zzsim::channels::DensityMatrix;
use zzsim::coupler::{
    default_operating_point, default_search_interval, find_zero_zeta, linspace, RootOptions, ZetaEvaluator, ZetaMethod,
    ZetaRoot,
};
use zzsim::linalg::CMatrix;
use zzsim::perturbation::iswap_derivative_ratio;
use zzsim::rb::{run_rb, RbConfig, RbMode, RbResult, SequenceDesign};
use zzsim::tomography::thermal::{decohered_sqrt_iswap_ptm, SQRT_ISWAP_GATE_TIME};
use zzsim::tomography::{self as tomo, PauliTransferMatrix};
use zzsim::units::{ghz, mhz, ns, to_ghz, to_mhz};
use zzsim::{DeviceParams, Qubit};

fn py_err(e: zzsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = zzsim::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

fn dims_array(dims: Option<Vec<usize>>) -> PyResult<[usize; 4]> {
    match dims {
        None => Ok([4, 4, 3, 4]),
        Some(d) => d.try_into().map_err(|d: Vec<usize>| PyValueError::new_err(format!("dims needs 4 entries, got {}", d.len()))),
    }
}

fn to_cmatrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn density(rows: Vec<Vec<Complex64>>) -> PyResult<DensityMatrix> {
    DensityMatrix::new(to_cmatrix(rows)?).map_err(py_err)
}

/// Device parameters.
#[pyclass(name = "Device", frozen)]
struct PyDevice {
    inner: DeviceParams,
}

/// A zero of ζ on the coupler frequency axis.
#[pyclass(name = "ZetaRoot", frozen, get_all)]
struct PyZetaRoot {
    omega_minus_ghz: f64,
    detuning_ghz: f64,
    /// Flux in flux quanta, or None when off the coupler branch.
    phi: Option<f64>,
    zeta_hz: f64,
    slope: f64,
}

impl From<&ZetaRoot> for PyZetaRoot {
    fn from(r: &ZetaRoot) -> Self {
        PyZetaRoot {
            omega_minus_ghz: to_ghz(r.omega_minus),
            detuning_ghz: to_ghz(r.detuning),
            phi: r.phi,
            zeta_hz: to_mhz(r.zeta) * 1e6,
            slope: r.slope,
        }
    }
}

#[pymethods]
impl PyZetaRoot {
    fn __repr__(&self) -> String {
        format!("ZetaRoot(detuning_ghz={:.6}, slope={:.6})", self.detuning_ghz, self.slope)
    }
}

/// Averaged RB decay and fitted fidelities.
#[pyclass(name = "RbResult", frozen)]
struct PyRbResult {
    inner: RbResult,
}

#[pymethods]
impl PyRbResult {
    #[getter]
    fn lengths(&self) -> Vec<usize> {
        self.inner.curve.lengths.clone()
    }

    /// Mean ground-state population of qubit 1 or 2 at each length.
    fn populations(&self, qubit: u8) -> PyResult<Vec<f64>> {
        Ok(self.inner.curve.series(qubit_of(qubit)?))
    }

    /// Fitted average gate fidelity, or None for an inactive qubit.
    fn fidelity(&self, qubit: u8) -> PyResult<Option<f64>> {
        Ok(self.inner.fidelity(qubit_of(qubit)?))
    }
}

fn qubit_of(q: u8) -> PyResult<Qubit> {
    match q {
        1 => Ok(Qubit::One),
        2 => Ok(Qubit::Two),
        _ => Err(PyValueError::new_err(format!("qubit must be 1 or 2, got {q}"))),
    }
}

/// Two-qubit Pauli transfer matrix.
#[pyclass(name = "Ptm", frozen)]
struct PyPtm {
    inner: PauliTransferMatrix,
}

#[pymethods]
impl PyPtm {
    /// The ideal √iSWAP.
    #[staticmethod]
    fn sqrt_iswap() -> PyResult<PyPtm> {
        Ok(PyPtm { inner: tomo::ptm_from_unitary(&tomo::sqrt_iswap()).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_unitary(u: Vec<Vec<Complex64>>) -> PyResult<PyPtm> {
        Ok(PyPtm { inner: tomo::ptm_from_unitary(&to_cmatrix(u)?).map_err(py_err)? })
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        let m = self.inner.matrix();
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn gate_fidelity(&self, ideal: &PyPtm) -> PyResult<f64> {
        tomo::gate_fidelity(&self.inner, &ideal.inner, self.inner.n_qubits()).map_err(py_err)
    }

    fn process_fidelity(&self, ideal: &PyPtm) -> PyResult<f64> {
        tomo::process::process_fidelity(&self.inner, &ideal.inner).map_err(py_err)
    }
}

#[pymethods]
impl PyDevice {
    /// A bundled device: "device_a" or "device_b".
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<PyDevice> {
        DeviceParams::bundled(name)
            .map(|inner| PyDevice { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no bundled device `{name}`")))
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<PyDevice> {
        Ok(PyDevice { inner: DeviceParams::load(path).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyDevice> {
        Ok(PyDevice { inner: DeviceParams::from_json(text).map_err(py_err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    /// (ω₁, ω₂) in GHz.
    #[getter]
    fn qubit_frequencies_ghz(&self) -> (f64, f64) {
        (to_ghz(self.inner.omega.q1), to_ghz(self.inner.omega.q2))
    }

    /// ζ in MHz with the coupler at ω₁ + `detuning_ghz`.
    #[pyo3(signature = (detuning_ghz, method = "exact", dims = None))]
    fn zeta(&self, py: Python<'_>, detuning_ghz: f64, method: &str, dims: Option<Vec<usize>>) -> PyResult<f64> {
        let eval = ZetaEvaluator::with_dims(self.inner.clone(), parse(method)?, dims_array(dims)?).map_err(py_err)?;
        let w = self.inner.omega.q1 + ghz(detuning_ghz);
        py.detach(|| eval.zeta(w)).map(to_mhz).map_err(py_err)
    }

    /// ζ in MHz on an evenly spaced detuning grid; None where a point fails.
    #[pyo3(signature = (from_ghz, to_ghz, points = 200, method = "exact"))]
    fn zeta_sweep(&self, py: Python<'_>, from_ghz: f64, to_ghz: f64, points: usize, method: &str) -> PyResult<Vec<(f64, Option<f64>)>> {
        let eval = ZetaEvaluator::new(self.inner.clone(), parse(method)?);
        let q1 = self.inner.omega.q1;
        let xs: Vec<f64> = linspace(from_ghz, to_ghz, points).iter().map(|d| q1 + ghz(*d)).collect();
        let pts = py.detach(|| eval.sweep(&xs));
        Ok(pts.iter().map(|p| (zzsim::units::to_ghz(p.x - q1), p.zeta.map(to_mhz))).collect())
    }

    /// Zeros of ζ below both qubits, in ascending coupler frequency.
    #[pyo3(signature = (method = "exact"))]
    fn find_zero_zeta(&self, py: Python<'_>, method: &str) -> PyResult<Vec<PyZetaRoot>> {
        let method: ZetaMethod = parse(method)?;
        let eval = ZetaEvaluator::new(self.inner.clone(), method);
        let interval = default_search_interval(&self.inner);
        let search = py.detach(|| find_zero_zeta(&eval, interval, &RootOptions::default())).map_err(py_err)?;
        Ok(search.roots.iter().map(PyZetaRoot::from).collect())
    }

    /// The zero of ζ with the gentlest slope.
    fn operating_point(&self, py: Python<'_>) -> PyResult<PyZetaRoot> {
        let root = py.detach(|| default_operating_point(&self.inner)).map_err(py_err)?;
        Ok(PyZetaRoot::from(&root))
    }

    /// Ratio of ground- to excited-coupler √iSWAP drive sensitivities.
    fn derivative_ratio(&self, detuning_ghz: f64) -> PyResult<f64> {
        iswap_derivative_ratio(&self.inner, self.inner.omega.q1 + ghz(detuning_ghz)).map_err(py_err)
    }

    /// Randomized benchmarking with a static ZZ of `zeta_mhz`.
    #[pyo3(signature = (zeta_mhz = 0.0, mode = "simultaneous", design = "clifford", lengths = None, trials = 100, seed = 2024))]
    #[allow(clippy::too_many_arguments)]
    fn rb(
        &self,
        py: Python<'_>,
        zeta_mhz: f64,
        mode: &str,
        design: &str,
        lengths: Option<Vec<usize>>,
        trials: usize,
        seed: u64,
    ) -> PyResult<PyRbResult> {
        let mode: RbMode = parse(mode)?;
        let mut config = RbConfig::for_device(&self.inner, mhz(zeta_mhz), mode, seed).map_err(py_err)?;
        config.design = parse::<SequenceDesign>(design)?;
        config.trials = trials;
        if let Some(l) = lengths {
            config.lengths = l;
        }
        let inner = py.detach(|| run_rb(&config)).map_err(py_err)?;
        Ok(PyRbResult { inner })
    }

    /// √iSWAP followed by one gate of the device's decoherence.
    #[pyo3(signature = (gate_ns = 95.0))]
    fn sqrt_iswap_ptm(&self, gate_ns: f64) -> PyResult<PyPtm> {
        Ok(PyPtm { inner: decohered_sqrt_iswap_ptm(&self.inner, ns(gate_ns)).map_err(py_err)? })
    }

    /// (temperature_mK, p_excited, fidelity) for a thermally populated coupler
    /// parked at the operating point. `alpha` defaults to the derivative ratio there.
    #[pyo3(signature = (temperatures_mk, alpha = None))]
    fn thermal_fidelity(&self, py: Python<'_>, temperatures_mk: Vec<f64>, alpha: Option<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
        let p = &self.inner;
        let w = default_operating_point(p).map_err(py_err)?.omega_minus;
        let alpha = match alpha {
            Some(a) => a,
            None => iswap_derivative_ratio(p, w).map_err(py_err)?,
        };
        let temps: Vec<f64> = temperatures_mk.iter().map(|t| t * 1e-3).collect();
        let sweep = py.detach(|| tomo::thermal_sweep(p, w, alpha, &temps)).map_err(py_err)?;
        Ok(sweep.iter().map(|s| (s.temperature * 1e3, s.p, s.fidelity)).collect())
    }

    fn __repr__(&self) -> String {
        let (w1, w2) = self.qubit_frequencies_ghz();
        format!("Device({:?}, ω₁={w1:.4} GHz, ω₂={w2:.4} GHz)", self.inner.name)
    }
}

/// Wootters concurrence of a two-qubit density matrix.
#[pyfunction]
fn concurrence(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    tomo::concurrence(&density(rho)?).map_err(py_err)
}

/// Uhlmann fidelity between two density matrices.
#[pyfunction]
fn state_fidelity(rho: Vec<Vec<Complex64>>, sigma: Vec<Vec<Complex64>>) -> PyResult<f64> {
    tomo::state_fidelity(&density(rho)?, &density(sigma)?).map_err(py_err)
}

/// Nearest physical state to a measured matrix, and the distance moved.
#[pyfunction]
fn project_physical(rho: Vec<Vec<Complex64>>) -> PyResult<(Vec<Vec<Complex64>>, f64)> {
    let (projected, d) = tomo::project_physical(&to_cmatrix(rho)?).map_err(py_err)?;
    let m = projected.matrix();
    Ok((m.row_iter().map(|r| r.iter().copied().collect()).collect(), d))
}

#[pymodule]
#[pyo3(name = "zzsim")]
fn zzsim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDevice>()?;
    m.add_class::<PyZetaRoot>()?;
    m.add_class::<PyRbResult>()?;
    m.add_class::<PyPtm>()?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(state_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(project_physical, m)?)?;
    m.add("SQRT_ISWAP_GATE_NS", SQRT_ISWAP_GATE_TIME * 1e9)?;
    Ok(())
}
