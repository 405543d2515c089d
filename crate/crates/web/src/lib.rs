//! WebAssembly bindings for the static demo page in `www/`.

use wasm_bindgen::prelude::*;

pub mod demo;

/// Optimal chain spacings followed by `h_check, h_bar, h_tilde, h_hat`.
#[wasm_bindgen(js_name = spearProfile)]
pub fn spear_profile(n: usize, alpha: f64, beta: f64) -> Result<Vec<f64>, JsError> {
    let prof = demo::spear_profile(n, alpha, beta).map_err(|e| JsError::new(&e))?;
    Ok(prof.spacing.into_iter().chain(prof.marks).collect())
}

/// Flattened `(N, r_N, nearest-neighbor error)` triples.
#[wasm_bindgen(js_name = ringSweep)]
pub fn ring_sweep(alpha: f64, beta: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    let rows = demo::ring_sweep(alpha, beta, n_max).map_err(|e| JsError::new(&e))?;
    Ok(rows.into_iter().flatten().collect())
}

#[wasm_bindgen]
pub struct Simulation {
    inner: demo::Session,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, init: &str, coupling: f64, noise: f64, seed: u32) -> Result<Simulation, JsError> {
        let inner = demo::Session::new(n, init, coupling, noise, seed.into()).map_err(|e| JsError::new(&e))?;
        Ok(Self { inner })
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        self.inner.advance(steps).map_err(|e| JsError::new(&e))
    }

    pub fn positions(&self) -> Vec<f64> {
        self.inner.flat(false)
    }

    pub fn spins(&self) -> Vec<f64> {
        self.inner.flat(true)
    }

    pub fn energy(&self) -> f64 {
        self.inner.energy()
    }

    #[wasm_bindgen(js_name = gradNorm)]
    pub fn grad_norm(&self) -> f64 {
        self.inner.grad_norm()
    }

    pub fn time(&self) -> f64 {
        self.inner.state().time
    }

    pub fn structure(&self) -> String {
        self.inner.structure()
    }
}
